#include "gammasum/gfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gammasum/errors.hpp"

namespace gammasum {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSeriesRadiusLimit = 1.0 - 1e-6;
constexpr double kSingularWindow = 1e-4;

void check_shape_arg(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("gfun: shape must be positive");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("gfun: x must be finite and >= 0");
}

void check_inside(Complex y)
{
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
        throw DomainError("gfun: y must be finite");
    }
    if (!(std::abs(y) < 1.0)) throw DomainError("gfun: closed forms need |y| < 1");
    if (std::abs(1.0 - y) <= kSingularWindow) {
        throw DomainError("gfun: y too close to the removable singularity at 1");
    }
}

// (1-y)^{-1} (P(b, x) - D(b, x) * scale * S(b, xy)), D(b, x) = x^b e^{-x} / Gamma(b+1).
Complex fused_closed_form(double b, double p_bx, double x, Complex y, Complex scale,
                          double tol)
{
    if (x == 0.0) return {0.0, 0.0};
    const KummerSeries s = kummer_series(b, x * y);
    const double d = std::exp(log_gamma_prefactor(b, x));
    const double rounding = 4.0 * kEps * d * std::abs(scale) * s.abs_sum /
                            std::abs(1.0 - y);
    if (rounding > tol) {
        throw PrecisionError("gfun closed form: series cancellation exceeds tolerance");
    }
    return (p_bx - d * scale * s.value) / (1.0 - y);
}

}  // namespace

GSeries::GSeries(double a, double x, double radius, double tol, std::size_t max_terms,
                 std::size_t min_terms)
{
    check_shape_arg(a, x);
    if (!(radius >= 0.0) || !(radius <= kSeriesRadiusLimit)) {
        throw DomainError("g_series: radius must lie in [0, 1 - 1e-6]");
    }
    if (!(tol >= 1e-15)) throw DomainError("g_series: tol must be >= 1e-15");
    min_terms = std::max<std::size_t>(min_terms, 1);

    // Grow the ladder geometrically until the tail criterion is met inside it.
    std::size_t count = std::max<std::size_t>(min_terms + 1, 64);
    for (;;) {
        const std::size_t capped = std::min(count, max_terms + 1);
        std::vector<double> p = reg_lower_gamma_ladder(a, x, capped);
        double rpow = 1.0;  // radius^{n}
        for (std::size_t n = 0; n + 1 < capped; ++n) {
            rpow *= radius;
            // Tail bound when truncating after index n.
            const double bound = p[n + 1] == 0.0 || rpow == 0.0
                                     ? 0.0
                                     : p[n + 1] * rpow / (1.0 - radius);
            if (n + 1 >= min_terms && bound < tol) {
                p.resize(n + 1);
                coef_ = std::move(p);
                tail_bound_ = bound;
                return;
            }
        }
        if (capped == max_terms + 1) {
            throw NonConvergence("g_series: term cap reached", 0.0, 0.0);
        }
        count *= 2;
    }
}

Complex GSeries::operator()(Complex y) const
{
    Complex acc{0.0, 0.0};
    for (std::size_t n = coef_.size(); n-- > 0;) {
        acc = acc * y + coef_[n];
    }
    return acc;
}

GfunResult g_series(double a, double x, Complex y, double tol, std::size_t max_terms)
{
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
        throw DomainError("g_series: y must be finite");
    }
    const GSeries series(a, x, std::abs(y), tol, max_terms);
    if (y == Complex(0.0, 0.0)) return {reg_lower_gamma(a, x), 1, 0.0};
    return {series(y), series.terms(), series.tail_bound()};
}

Complex g_closed(double a, double x, Complex y, double tol)
{
    check_shape_arg(a, x);
    check_inside(y);
    return fused_closed_form(a, reg_lower_gamma(a, x), x, y, y, tol);
}

Complex g_closed_alt(double a, double x, Complex y, double tol)
{
    check_shape_arg(a, x);
    if (!(a >= 1.0)) throw DomainError("g_closed_alt: requires a >= 1");
    check_inside(y);
    const double b = a - 1.0;
    const double p_bx = b == 0.0 ? 1.0 : reg_lower_gamma(b, x);
    return fused_closed_form(b, p_bx, x, y, Complex{1.0, 0.0}, tol);
}

double g_at_one(double a, double x)
{
    check_shape_arg(a, x);
    if (x == 0.0) return 0.0;
    return x * gamma_pdf(a, x) + (1.0 + x - a) * reg_lower_gamma(a, x);
}

Complex g_eval(double a, double x, Complex y, double tol)
{
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
        throw DomainError("g_eval: y must be finite");
    }
    const double rho = std::abs(y);
    if (rho > 1.0) throw DomainError("g_eval: |y| > 1");
    if (rho <= kSeriesRadiusLimit) {
        return g_series(a, x, y, tol).value;
    }
    if (std::abs(1.0 - y) < 1e-6 && y.imag() == 0.0) {
        return {g_at_one(a, x), 0.0};
    }
    throw DomainError("g_eval: y on the unit circle away from 1");
}

}  // namespace gammasum
