#pragma once

#include <cstddef>
#include <vector>

#include "gammasum/special_fn.hpp"

namespace gammasum {

/// Generating function G_a(x, y) = sum_{n>=0} P(a+n, x) y^n, |y| < 1.
struct GfunResult {
    Complex value;
    std::size_t terms_used = 0;
    double tail_bound = 0.0;  ///< P(a+N+1, x) |y|^{N+1} / (1 - |y|)
};

inline constexpr std::size_t kGfunDefaultMaxTerms = 10000;

/// Truncated coefficient table P(a+n, x), n = 0..N, valid on the closed disk
/// |y| <= radius. Building it once lets many y on the same circle share the
/// incomplete gamma work.
class GSeries {
  public:
    /// Chooses N as the smallest index with the geometric tail bound below
    /// tol, and at least min_terms coefficients. Throws NonConvergence when
    /// more than max_terms would be needed.
    GSeries(double a, double x, double radius, double tol,
            std::size_t max_terms = kGfunDefaultMaxTerms, std::size_t min_terms = 1);

    Complex operator()(Complex y) const;

    std::size_t terms() const noexcept { return coef_.size(); }
    double tail_bound() const noexcept { return tail_bound_; }
    const std::vector<double>& coefficients() const noexcept { return coef_; }

  private:
    std::vector<double> coef_;
    double tail_bound_ = 0.0;
};

/// Direct series evaluation. Requires |y| <= 1 - 1e-6 and tol >= 1e-15.
GfunResult g_series(double a, double x, Complex y, double tol,
                    std::size_t max_terms = kGfunDefaultMaxTerms);

/// Closed form (1-y)^{-1} (P(a,x) - y^{1-a} e^{(y-1)x} P(a, xy)).
///
/// The power, the exponential and the complex incomplete gamma are combined
/// into y x^a e^{-x} / Gamma(a+1) * sum (xy)^n / ((a+1)...(a+n)), which is the
/// same quantity without the intermediate overflow. Throws PrecisionError when
/// the rounding estimate of that series exceeds tol.
Complex g_closed(double a, double x, Complex y, double tol = 1e-12);

/// Closed form (1-y)^{-1} (P(a-1,x) - y^{1-a} e^{(y-1)x} P(a-1, xy)), a >= 1,
/// with P(0, .) = 1.
Complex g_closed_alt(double a, double x, Complex y, double tol = 1e-12);

/// Limit y -> 1: x g_a(x) + (1 + x - a) P(a, x).
double g_at_one(double a, double x);

/// Series inside the disk, limit formula within 1e-6 of y = 1 on the real axis.
Complex g_eval(double a, double x, Complex y, double tol);

}  // namespace gammasum
