#pragma once

#include <complex>

#include "gammasum/errors.hpp"
#include <cstddef>
#include <vector>

namespace gammasum {

using Complex = std::complex<double>;

/// ln Gamma(a) for a > 0.
double log_gamma(double a);

/// log of x^a e^{-x} / Gamma(a+1), for a > -1 and x > 0.
///
/// This is the common prefactor of the incomplete gamma series. For large a
/// it is evaluated through the Stirling remainder so that the exponent does
/// not lose digits to the cancellation between a ln x, x and ln Gamma(a+1).
double log_gamma_prefactor(double a, double x);

/// Gamma(a, 1) density e^{-x} x^{a-1} / Gamma(a).
double gamma_pdf(double a, double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double reg_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), without the
/// subtraction when Q is the small one.
double reg_upper_gamma(double a, double x);

double erf(double x);

/// Partial result of the confluent series sum_{n>=0} z^n / ((a+1)...(a+n)).
struct KummerSeries {
    Complex value;
    double abs_sum;  ///< sum of |term|, the scale of the rounding error
    std::size_t terms;
};

/// sum_{n>=0} z^n / ((a+1)(a+2)...(a+n)) for a >= 0. Equals 1F1(1; a+1; z).
KummerSeries kummer_series(double a, Complex z);

/// Analytic continuation of P(a, .) to complex arguments by the power series,
/// principal branch of z^a. Requires |z| <= a + 40 and throws PrecisionError
/// when rounding in the series exceeds 1e-8 of the result.
Complex complex_reg_lower_gamma(double a, Complex z);

/// exp(exponent * Log(base)) for base in the open right half-plane.
Complex complex_pow_principal(Complex base, double exponent);

/// P(a + n, x) for n = 0 .. count-1.
///
/// Runs Q upward by adding positive terms while a + n < x, and the confluent
/// ratio downward for the remaining indices, so every entry carries full
/// relative precision.
std::vector<double> reg_lower_gamma_ladder(double a, double x, std::size_t count);

}  // namespace gammasum
