#include "gammasum/core_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gammasum {

namespace {

constexpr std::size_t kMaxCoefficientTerms = 100000;
constexpr std::size_t kMaxBracketDoublings = 1100;
constexpr std::size_t kMaxBisections = 200;
constexpr double kQuantileTol = 1e-8;

// Neumaier summation; the order of accumulation is the node order.
class CompensatedSum {
  public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

bool all_scales_equal(const DerivedParams& d)
{
    return std::all_of(d.c.begin(), d.c.end(), [](double c) { return c == 0.0; });
}

// Smallest N so that the neglected coefficients contribute less than tol to
// the CDF: prefactor * P(alpha+N+1, vx) * sum_{n>N} d_n < tol.
std::size_t coefficient_terms_for_cdf(const DerivedParams& d, double vx, double tol)
{
    if (d.c_max_abs == 0.0) return 1;
    const double prefactor = std::exp(d.log_prefactor);
    std::size_t count = 64;
    for (;;) {
        const std::size_t capped = std::min(count, kMaxCoefficientTerms + 1);
        const std::vector<double> p = reg_lower_gamma_ladder(d.alpha_total, vx, capped);
        for (std::size_t n = 0; n + 1 < capped; ++n) {
            if (p[n + 1] == 0.0) return n + 1;
            const double tail = dominating_tail(d.alpha_total, d.c_max_abs, n);
            if (prefactor * p[n + 1] * tail < tol) return n + 1;
        }
        if (capped == kMaxCoefficientTerms + 1) {
            throw NonConvergence("cdf: coefficient truncation cap reached", 0.0, 0.0);
        }
        count *= 2;
    }
}

struct Level {
    double mean;
    double abs_mean;  // scale of the rounding error in mean
};

Level midpoint_level(const Integrand& f, std::size_t n)
{
    CompensatedSum sum;
    double abs_sum = 0.0;
    const double h = std::numbers::pi / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double v = f((static_cast<double>(m) + 0.5) * h);
        sum.add(v);
        abs_sum += std::abs(v);
    }
    const auto dn = static_cast<double>(n);
    return {sum.value() / dn, abs_sum / dn};
}

}  // namespace

void GammaSumParams::validate() const
{
    if (alphas.empty()) throw DomainError("gamma sum: at least one summand is required");
    if (alphas.size() != lambdas.size()) {
        throw DomainError("gamma sum: alphas and lambdas differ in length");
    }
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (!(alphas[j] > 0.0) || !std::isfinite(alphas[j])) {
            throw DomainError("gamma sum: shapes must be positive and finite");
        }
        if (!(lambdas[j] > 0.0) || !std::isfinite(lambdas[j])) {
            throw DomainError("gamma sum: scales must be positive and finite");
        }
    }
}

void QuadratureConfig::validate() const
{
    if (r && !(*r > 0.0 && *r < 1.0)) throw ConfigError("quadrature: r must lie in (0, 1)");
    if (n_start < 1) throw ConfigError("quadrature: n_start must be >= 1");
    if (n_max < n_start) throw ConfigError("quadrature: n_max must be >= n_start");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("quadrature: tol must be > 0");
}

DerivedParams derive_params(const GammaSumParams& p)
{
    p.validate();
    const auto [lo_it, hi_it] = std::minmax_element(p.lambdas.begin(), p.lambdas.end());
    const double lmin = *lo_it;
    const double lmax = *hi_it;

    DerivedParams d;
    d.alphas = p.alphas;
    d.v = 0.5 * (1.0 / lmax + 1.0 / lmin);
    d.c_max_abs = (lmax - lmin) / (lmax + lmin);
    d.c.reserve(p.lambdas.size());
    for (std::size_t j = 0; j < p.lambdas.size(); ++j) {
        const double l = p.lambdas[j];
        // 1 - 1/(v l) rewritten so that l = lmin or l = lmax loses nothing.
        const double c = ((l - lmin) * lmax + (l - lmax) * lmin) / (l * (lmax + lmin));
        d.c.push_back(c);
        d.alpha_total += p.alphas[j];
        d.log_prefactor += p.alphas[j] * std::log1p(-c);
    }
    return d;
}

double choose_r(const DerivedParams& d, const QuadratureConfig& cfg)
{
    if (!cfg.r) return 0.5 * (1.0 + d.c_max_abs);
    const double r = *cfg.r;
    if (!(r > d.c_max_abs && r < 1.0)) {
        throw ConfigError("quadrature: r must lie in (" + std::to_string(d.c_max_abs) +
                          ", 1)");
    }
    return r;
}

double dominating_tail(double alpha_total, double c_max_abs, std::size_t terms)
{
    if (c_max_abs == 0.0) return 0.0;
    const double n1 = static_cast<double>(terms + 1);
    const double ratio = c_max_abs * std::max(1.0, (alpha_total + n1) / (n1 + 1.0));
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    const double log_first = std::lgamma(alpha_total + n1) - std::lgamma(alpha_total) -
                             std::lgamma(n1 + 1.0) + n1 * std::log(c_max_abs);
    return std::exp(log_first) / (1.0 - ratio);
}

Integrand::Integrand(const DerivedParams& d, double x, double r, double tol)
    : d_(d),
      r_(r),
      g_(d.alpha_total, d.v * x, r, std::max(tol / 10.0, 1e-15), kMaxCoefficientTerms,
         coefficient_terms_for_cdf(d, d.v * x, std::max(tol / 10.0, 1e-15)))
{
    if (!(r > d.c_max_abs && r < 1.0)) throw ConfigError("integrand: r outside (c_max, 1)");
    rho_.reserve(d.c.size());
    one_minus_.reserve(d.c.size());
    for (double c : d.c) {
        rho_.push_back(c / r);
        one_minus_.push_back((r - std::abs(c)) / r);
    }
}

double Integrand::min_base_real(double phi) const
{
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        const double rho = rho_[j];
        const double half = rho >= 0.0 ? std::sin(0.5 * phi) : std::cos(0.5 * phi);
        lowest = std::min(lowest, one_minus_[j] + 2.0 * std::abs(rho) * half * half);
    }
    return lowest;
}

double Integrand::operator()(double phi) const
{
    const double s_half = std::sin(0.5 * phi);
    const double c_half = std::cos(0.5 * phi);
    const double sin_phi = std::sin(phi);
    // log prod_j (1 - rho_j e^{-i phi})^{alpha_j}; the real part of each base is
    // (1 - |rho|) + |rho| (1 -+ cos phi), which stays accurate near its zero.
    Complex log_factor{0.0, 0.0};
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        const double rho = rho_[j];
        const double half = rho >= 0.0 ? s_half : c_half;
        const Complex base{one_minus_[j] + 2.0 * std::abs(rho) * half * half, rho * sin_phi};
        log_factor += d_.alphas[j] * std::log(base);
    }
    const Complex y = std::polar(r_, phi);
    return (std::exp(-log_factor) * g_(y)).real();
}

double integrand(double phi, double x, const DerivedParams& d, double r, double tol)
{
    if (!(x >= 0.0)) throw DomainError("integrand: x must be >= 0");
    return Integrand(d, x, r, tol)(phi);
}

CdfEstimate cdf(const GammaSumParams& p, double x, const QuadratureConfig& cfg)
{
    cfg.validate();
    const DerivedParams d = derive_params(p);
    if (std::isnan(x) || std::isinf(x)) throw DomainError("cdf: x must be finite");

    CdfEstimate est;
    if (x <= 0.0) return est;
    if (all_scales_equal(d)) {
        est.value = est.raw_value = reg_lower_gamma(d.alpha_total, x * d.v);
        return est;
    }

    const double r = choose_r(d, cfg);
    const Integrand f(d, x, r, cfg.tol);
    const double prefactor = std::exp(d.log_prefactor);

    est.r_used = r;
    std::size_t n = cfg.n_start;
    Level level = midpoint_level(f, n);
    double current = prefactor * level.mean;
    for (;;) {
        if (2 * n > cfg.n_max) {
            est.raw_value = current;
            est.value = std::clamp(current, 0.0, 1.0);
            est.nodes_used = n;
            est.converged = false;
            throw CdfNonConvergence("cdf: node cap reached before tolerance", est);
        }
        n *= 2;
        level = midpoint_level(f, n);
        const double refined = prefactor * level.mean;
        est.err_estimate = std::abs(refined - current);
        current = refined;
        if (est.err_estimate < cfg.tol) break;
    }
    est.raw_value = current;
    est.value = std::clamp(current, 0.0, 1.0);
    est.nodes_used = n;
    // Each node carries a few ulps of its own magnitude.
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * prefactor *
                            level.abs_mean;
    if (rounding > cfg.tol) {
        est.warnings.push_back("integrand cancellation may exceed tol (rounding scale " +
                               std::to_string(rounding) + ")");
    }
    return est;
}

std::vector<RefinementLevel> refinement_trace(const GammaSumParams& p, double x,
                                              const QuadratureConfig& cfg)
{
    cfg.validate();
    const DerivedParams d = derive_params(p);
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("refinement_trace: x must be > 0");
    const double r = choose_r(d, cfg);
    const Integrand f(d, x, r, cfg.tol);
    const double prefactor = std::exp(d.log_prefactor);
    std::vector<RefinementLevel> levels;
    for (std::size_t n = cfg.n_start; n <= cfg.n_max; n *= 2) {
        levels.push_back({n, prefactor * midpoint_level(f, n).mean});
    }
    return levels;
}

double quantile(const GammaSumParams& p, double prob, const QuadratureConfig& cfg)
{
    p.validate();
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile: prob must lie in (0, 1)");

    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t j = 0; j < p.alphas.size(); ++j) hi += p.alphas[j] * p.lambdas[j];
    std::size_t doublings = 0;
    while (cdf(p, hi, cfg).value <= prob) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > kMaxBracketDoublings || !std::isfinite(hi)) {
            throw NonConvergence("quantile: could not bracket the probability", hi, 0.0);
        }
    }
    // The probability has to be resolvable by the cdf itself: a tail mass
    // below the quadrature tolerance is reported as non-convergence.
    const double tail = std::min(prob, 1.0 - prob);
    const double target = std::min(kQuantileTol, 0.5 * tail);
    double mid = 0.5 * (lo + hi);
    double err = hi - lo;
    for (std::size_t it = 0; it < kMaxBisections; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = cdf(p, mid, cfg).value;
        err = std::abs(f - prob);
        if (err <= target) break;
        if (f < prob) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (!(hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi)) break;
    }
    if (tail <= cfg.tol) {
        throw NonConvergence("quantile: tail probability is below the quadrature tolerance", mid,
                             cfg.tol);
    }
    if (err > target) {
        throw NonConvergence("quantile: bisection did not reach the probability tolerance", mid, err);
    }
    return mid;
}

}  // namespace gammasum
