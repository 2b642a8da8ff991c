#include "gammasum/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gammasum/errors.hpp"

namespace gammasum {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxSeriesTerms = 100000;

// lgamma_r instead of std::lgamma: the latter writes the global signgam.
double lgamma_positive(double a)
{
    int sign = 0;
    return ::lgamma_r(a, &sign);
}

// ln Gamma(a+1) - (a ln a - a + ln(2 pi a)/2), a >= 10.
double stirling_remainder(double a)
{
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    // Bernoulli coefficients B_{2k} / (2k (2k-1)), k = 1..8.
    static constexpr double coef[] = {1.0 / 12.0,
                                      -1.0 / 360.0,
                                      1.0 / 1260.0,
                                      -1.0 / 1680.0,
                                      1.0 / 1188.0,
                                      -691.0 / 360360.0,
                                      1.0 / 156.0,
                                      -3617.0 / 122400.0};
    double sum = 0.0;
    for (int k = 7; k >= 0; --k) {
        sum = sum * inv2 + coef[k];
    }
    return sum * inv;
}

void require_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

// Series part of P(a, x): sum_{n>=0} x^n / ((a+1)...(a+n)), x < a + 1.
double lower_series(double a, double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 1; n < kMaxSeriesTerms; ++n) {
        term *= x / (a + static_cast<double>(n));
        sum += term;
        if (term < 0.5 * kEps * sum) {
            return sum;
        }
    }
    throw NonConvergence("incomplete gamma series did not converge", sum, term);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x), x >= a + 1.
// Returns h with Q = a * exp(log_gamma_prefactor(a, x)) * h.
double upper_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (std::size_t i = 1; i < kMaxSeriesTerms; ++i) {
        const double di = static_cast<double>(i);
        const double an = -di * (di - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return h;
        }
    }
    throw NonConvergence("incomplete gamma continued fraction did not converge", h, 0.0);
}

void check_gamma_args(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("incomplete gamma: shape must be positive and finite");
    }
    if (!(x >= 0.0)) {
        throw DomainError("incomplete gamma: argument must be non-negative");
    }
}

}  // namespace

double log_gamma(double a)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("log_gamma: argument must be positive and finite");
    }
    return lgamma_positive(a);
}

double log_gamma_prefactor(double a, double x)
{
    if (x == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (a < 10.0) {
        return a * std::log(x) - x - lgamma_positive(a + 1.0);
    }
    const double u = (x - a) / a;
    return -a * (u - std::log1p(u)) - 0.5 * std::log(2.0 * std::numbers::pi * a) -
           stirling_remainder(a);
}

double gamma_pdf(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("gamma_pdf: shape must be positive and finite");
    }
    if (!(x >= 0.0)) {
        throw DomainError("gamma_pdf: argument must be non-negative");
    }
    if (x == 0.0) {
        if (a < 1.0) throw DomainError("gamma_pdf: density diverges at 0 for shape < 1");
        return a == 1.0 ? 1.0 : 0.0;
    }
    if (std::isinf(x)) return 0.0;
    return std::exp(log_gamma_prefactor(a - 1.0, x));
}

double reg_lower_gamma(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) {
        return std::min(1.0, std::exp(log_gamma_prefactor(a, x)) * lower_series(a, x));
    }
    const double q = a * std::exp(log_gamma_prefactor(a, x)) * upper_fraction(a, x);
    return std::clamp(1.0 - q, 0.0, 1.0);
}

double reg_upper_gamma(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) {
        const double p = std::exp(log_gamma_prefactor(a, x)) * lower_series(a, x);
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    return std::min(1.0, a * std::exp(log_gamma_prefactor(a, x)) * upper_fraction(a, x));
}

double erf(double x)
{
    require_finite(x, "erf argument");
    return std::erf(x);
}

KummerSeries kummer_series(double a, Complex z)
{
    if (!(a >= 0.0)) {
        throw DomainError("kummer_series: parameter must be non-negative");
    }
    Complex term{1.0, 0.0};
    Complex sum{1.0, 0.0};
    double abs_sum = 1.0;
    const double zabs = std::abs(z);
    for (std::size_t n = 1; n < kMaxSeriesTerms; ++n) {
        const double an = a + static_cast<double>(n);
        term *= z / an;
        sum += term;
        const double t = std::abs(term);
        abs_sum += t;
        if (an > zabs && t <= 0.5 * kEps * std::abs(sum)) {
            return {sum, abs_sum, n + 1};
        }
        if (t == 0.0) {
            return {sum, abs_sum, n + 1};
        }
    }
    throw NonConvergence("confluent series did not converge", std::abs(sum), std::abs(term));
}

Complex complex_reg_lower_gamma(double a, Complex z)
{
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("complex_reg_lower_gamma: shape must be positive and finite");
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("complex_reg_lower_gamma: argument must be finite");
    }
    if (z == Complex{0.0, 0.0}) return {0.0, 0.0};
    if (std::abs(z) > a + 40.0) {
        throw DomainError("complex_reg_lower_gamma: |z| exceeds a + 40");
    }
    const KummerSeries s = kummer_series(a, z);
    const double value_abs = std::abs(s.value);
    if (value_abs == 0.0 || kEps * s.abs_sum > 1e-8 * value_abs) {
        throw PrecisionError("complex_reg_lower_gamma: series cancellation exceeds 1e-8");
    }
    const Complex log_pref = a * std::log(z) - z - lgamma_positive(a + 1.0);
    return std::exp(log_pref) * s.value;
}

Complex complex_pow_principal(Complex base, double exponent)
{
    if (!std::isfinite(base.real()) || !std::isfinite(base.imag()) || !std::isfinite(exponent)) {
        throw DomainError("complex_pow_principal: arguments must be finite");
    }
    if (!(base.real() > 0.0)) {
        throw DomainError("complex_pow_principal: base must have positive real part");
    }
    return std::exp(exponent * std::log(base));
}

std::vector<double> reg_lower_gamma_ladder(double a, double x, std::size_t count)
{
    check_gamma_args(a, x);
    std::vector<double> p(count, 0.0);
    if (count == 0 || x == 0.0) return p;
    if (std::isinf(x)) {
        std::fill(p.begin(), p.end(), 1.0);
        return p;
    }

    // Indices with a + n < x sit on the upper side, where Q is the small tail.
    std::size_t split = 0;
    if (x > a) {
        split = std::min<std::size_t>(count, static_cast<std::size_t>(std::ceil(x - a)));
    }

    double q = split > 0 ? reg_upper_gamma(a, x) : 0.0;
    for (std::size_t n = 0; n < split; ++n) {
        p[n] = std::clamp(1.0 - q, 0.0, 1.0);
        const double an = a + static_cast<double>(n);
        q += std::exp(log_gamma_prefactor(an, x));
    }

    if (split < count) {
        const std::size_t top = count - 1;
        double m = kummer_series(a + static_cast<double>(top), Complex{x, 0.0}).value.real();
        for (std::size_t n = top + 1; n-- > split;) {
            if (n < top) {
                m = 1.0 + x / (a + static_cast<double>(n + 1)) * m;
            }
            const double an = a + static_cast<double>(n);
            p[n] = std::clamp(std::exp(log_gamma_prefactor(an, x)) * m, 0.0, 1.0);
        }
    }
    return p;
}

}  // namespace gammasum
