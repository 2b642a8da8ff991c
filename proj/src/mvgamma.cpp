#include "gammasum/mvgamma.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace gammasum {

namespace {

constexpr std::size_t kHardDimCap = 4;
constexpr std::size_t kMaxNodesPerAxis = 512;
constexpr double kPi = std::numbers::pi;

double accurate_c(double l, double lmin, double lmax)
{
    return ((l - lmin) * lmax + (l - lmax) * lmin) / (l * (lmax + lmin));
}

// Smallest per-axis truncation whose neglected coefficients, bounded by the
// single-variable majorant (1 - ||C|| z)^{-alpha p}, stay below tol.
std::size_t axis_terms(const MvDerived& d, double vx, double tol)
{
    if (d.spectral_norm_c == 0.0) return 1;
    const double prefactor = std::exp(d.log_prefactor);
    const double shape = d.alpha * static_cast<double>(d.dim);
    std::size_t count = 64;
    for (;;) {
        const std::vector<double> p = reg_lower_gamma_ladder(d.alpha, vx, count);
        for (std::size_t n = 0; n + 1 < count; ++n) {
            if (p[n + 1] == 0.0) return n + 1;
            if (prefactor * p[n + 1] * dominating_tail(shape, d.spectral_norm_c, n) < tol) {
                return n + 1;
            }
        }
        if (count > kGfunDefaultMaxTerms) {
            throw NonConvergence("mv_cdf: coefficient truncation cap reached", 0.0, 0.0);
        }
        count *= 2;
    }
}

class CompensatedSum {
  public:
    void add(double v)
    {
        const double t = sum_ + v;
        comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Mean of Re(integrand) over the tensor midpoint grid with n nodes per axis,
// visited in lexicographic order. Consecutive nodes differ by one step h on
// some axes (periodically wrapped), which is what the branch tracking follows.
double grid_mean(const MvIntegrand& f, const MvDerived& d, std::size_t n)
{
    const std::size_t p = d.dim;
    const double h = 2.0 * kPi / static_cast<double>(n);
    std::vector<Complex> nodes(n);
    std::vector<std::vector<Complex>> g(p, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = std::polar(f.r(), -kPi + (static_cast<double>(i) + 0.5) * h);
        for (std::size_t k = 0; k < p; ++k) g[k][i] = f.g_axis(k, nodes[i]);
    }

    std::vector<std::size_t> idx(p, 0);
    std::vector<Complex> ys(p);
    CompensatedSum sum;
    // The first node neighbours Y = -r I, where the determinant is real positive.
    double ref = 0.0;
    for (;;) {
        Complex gprod{1.0, 0.0};
        for (std::size_t k = 0; k < p; ++k) {
            ys[k] = nodes[idx[k]];
            gprod *= g[k][idx[k]];
        }
        const Complex ld = f.log_det_at(ys, ref);
        ref = ld.imag();
        sum.add((std::exp(-d.alpha * ld) * gprod).real());

        std::size_t axis = p;
        while (axis-- > 0) {
            if (++idx[axis] < n) break;
            idx[axis] = 0;
        }
        if (axis == static_cast<std::size_t>(-1)) break;
    }
    return sum.value() / std::pow(static_cast<double>(n), static_cast<double>(p));
}

std::size_t axis_cap(const QuadratureConfig& cfg)
{
    return std::min<std::size_t>(cfg.n_max, kMaxNodesPerAxis);
}

struct GridResult {
    double value;
    double err;
    std::size_t n;
    bool converged;
};

GridResult integrate_grid(const MvDerived& d, const std::vector<double>& xs, double r,
                          const QuadratureConfig& cfg)
{
    const MvIntegrand f(d, xs, r, cfg.tol);
    const double prefactor = std::exp(d.log_prefactor);
    const std::size_t cap = axis_cap(cfg);
    std::size_t n = std::min(cfg.n_start, cap);
    double current = prefactor * grid_mean(f, d, n);
    double err = 0.0;
    while (2 * n <= cap) {
        n *= 2;
        const double refined = prefactor * grid_mean(f, d, n);
        err = std::abs(refined - current);
        current = refined;
        if (err < cfg.tol) return {current, err, n, true};
    }
    return {current, err, n, false};
}

void normalization_self_test()
{
    static std::once_flag once;
    static bool passed = false;
    std::call_once(once, [] {
        MvGammaParams p;
        p.alpha = 1.5;
        p.sigma = SymMatrix::diagonal({2.0, 2.0});
        const std::vector<double> xs{1.0, 2.5};
        const MvDerived d = mv_derive(p);
        QuadratureConfig cfg;
        cfg.n_start = 16;
        cfg.n_max = 256;
        cfg.tol = 1e-12;
        const GridResult g = integrate_grid(d, xs, 0.5, cfg);
        const double expected = reg_lower_gamma(1.5, 0.5) * reg_lower_gamma(1.5, 1.25);
        passed = std::abs(g.value - expected) < 1e-10;
    });
    if (!passed) {
        throw NormalizationError("mv_cdf: independence self-test failed");
    }
}

}  // namespace

void MvGammaParams::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("mvgamma: alpha must be > 0");
    if (max_dim > kHardDimCap) throw ConfigError("mvgamma: dimension cap cannot exceed 4");
    if (sigma.dim() == 0) throw DomainError("mvgamma: sigma is empty");
    if (sigma.dim() > max_dim) {
        throw DomainError("mvgamma: dimension " + std::to_string(sigma.dim()) +
                          " exceeds the cap " + std::to_string(max_dim));
    }
}

std::vector<std::string> MvGammaParams::warnings() const
{
    std::vector<std::string> out;
    const double twice = 2.0 * alpha;
    const bool integral = std::abs(twice - std::round(twice)) < 1e-12;
    const auto floor_half = static_cast<double>((sigma.dim() - 1) / 2);
    if (!integral && twice <= floor_half) {
        out.push_back("2*alpha is neither an integer nor above floor((p-1)/2); "
                      "the distribution may not exist");
    }
    return out;
}

MvDerived mv_derive(const MvGammaParams& p)
{
    p.validate();
    const EigenDecomp e = jacobi_eigen(p.sigma);
    require_positive_definite(e, "sigma");
    const std::size_t n = e.dim;
    const double lmin = e.values.front();
    const double lmax = e.values.back();

    MvDerived d;
    d.dim = n;
    d.alpha = p.alpha;
    d.v = 0.5 * (1.0 / lmax + 1.0 / lmin);
    d.spectral_norm_c = (lmax - lmin) / (lmax + lmin);
    std::vector<double> c(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double ck = accurate_c(e.values[k], lmin, lmax);
        d.log_prefactor += p.alpha * std::log1p(-ck);
        if (ck == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += ck * e.vector(i, k) * e.vector(j, k);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            c[i * n + j] = c[j * n + i] = 0.5 * (c[i * n + j] + c[j * n + i]);
        }
    }
    d.c_matrix = SymMatrix(n, std::move(c));
    return d;
}

Complex lu_log_det(std::vector<Complex> m, std::size_t dim)
{
    if (m.size() != dim * dim) throw DomainError("lu_log_det: entry count != dim * dim");
    Complex log_det{0.0, 0.0};
    std::size_t swaps = 0;
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < dim; ++row) {
            if (std::abs(m[row * dim + col]) > std::abs(m[piv * dim + col])) piv = row;
        }
        if (m[piv * dim + col] == Complex{0.0, 0.0}) {
            throw DomainError("lu_log_det: singular matrix");
        }
        if (piv != col) {
            for (std::size_t j = 0; j < dim; ++j) std::swap(m[col * dim + j], m[piv * dim + j]);
            ++swaps;
        }
        const Complex pivot = m[col * dim + col];
        log_det += std::log(pivot);
        for (std::size_t row = col + 1; row < dim; ++row) {
            const Complex factor = m[row * dim + col] / pivot;
            for (std::size_t j = col + 1; j < dim; ++j) {
                m[row * dim + j] -= factor * m[col * dim + j];
            }
        }
    }
    if (swaps % 2 == 1) log_det += Complex{0.0, kPi};
    return log_det;
}

MvIntegrand::MvIntegrand(const MvDerived& d, const std::vector<double>& xs, double r, double tol)
    : d_(d), r_(r)
{
    if (xs.size() != d.dim) throw DomainError("mv_integrand: xs length != dimension");
    if (!(r > d.spectral_norm_c && r < 1.0)) {
        throw ConfigError("mv_integrand: r must lie in (||C||, 1)");
    }
    imag_bound_ = static_cast<double>(d.dim) * std::asin(d.spectral_norm_c / r);
    const double gtol = std::max(tol / 10.0, 1e-15);
    g_.reserve(d.dim);
    for (double x : xs) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("mv_integrand: x_k must be >= 0");
        const double vx = d.v * x;
        g_.emplace_back(d.alpha, vx, r, gtol, kGfunDefaultMaxTerms, axis_terms(d, vx, gtol));
    }
}

Complex MvIntegrand::log_det_at(const std::vector<Complex>& ys,
                                std::optional<double> ref_imag) const
{
    const std::size_t p = d_.dim;
    std::vector<Complex> m(p * p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            m[i * p + j] = (i == j ? 1.0 : 0.0) - d_.c_matrix(i, j) / ys[j];
        }
    }
    const Complex principal = lu_log_det(std::move(m), p);
    const double two_pi = 2.0 * kPi;
    const double slack = 1e-9;
    const double target = ref_imag.value_or(0.0);
    const double k = std::round((target - principal.imag()) / two_pi);
    const Complex value = principal + Complex{0.0, two_pi * k};
    if (std::abs(value.imag()) > imag_bound_ + slack) {
        throw BranchError("mv_integrand: log-determinant outside its admissible strip");
    }
    if (ref_imag) {
        if (std::abs(value.imag() - *ref_imag) > 0.5 * kPi) {
            throw BranchError("mv_integrand: log-determinant jumped between neighbouring nodes");
        }
    } else if (imag_bound_ >= kPi) {
        // Another branch may also fit inside the strip.
        for (double shift : {-two_pi, two_pi}) {
            if (std::abs(value.imag() + shift) <= imag_bound_ + slack) {
                throw BranchError("mv_integrand: branch is ambiguous without a neighbour");
            }
        }
    }
    return value;
}

Complex MvIntegrand::log_det(const std::vector<double>& phis, std::optional<double> ref_imag) const
{
    if (phis.size() != d_.dim) throw DomainError("mv_integrand: phis length != dimension");
    std::vector<Complex> ys(d_.dim);
    for (std::size_t k = 0; k < d_.dim; ++k) ys[k] = std::polar(r_, phis[k]);
    return log_det_at(ys, ref_imag);
}

Complex MvIntegrand::operator()(const std::vector<double>& phis) const
{
    const Complex ld = log_det(phis);
    Complex value = std::exp(-d_.alpha * ld);
    for (std::size_t k = 0; k < d_.dim; ++k) value *= g_[k](std::polar(r_, phis[k]));
    return value;
}

Complex mv_integrand(const std::vector<double>& phis, const std::vector<double>& xs,
                     const MvDerived& d, double r, double tol)
{
    return MvIntegrand(d, xs, r, tol)(phis);
}

CdfEstimate mv_cdf(const MvGammaParams& p, const std::vector<double>& xs,
                   const QuadratureConfig& cfg)
{
    cfg.validate();
    const MvDerived d = mv_derive(p);
    if (xs.size() != d.dim) throw DomainError("mv_cdf: xs length != dimension");
    for (double x : xs) {
        if (!std::isfinite(x)) throw DomainError("mv_cdf: x_k must be finite");
    }
    normalization_self_test();

    CdfEstimate est;
    est.warnings = p.warnings();
    if (std::any_of(xs.begin(), xs.end(), [](double x) { return x <= 0.0; })) return est;

    double r = 0.5 * (1.0 + d.spectral_norm_c);
    if (cfg.r) {
        r = *cfg.r;
        if (!(r > d.spectral_norm_c && r < 1.0)) {
            throw ConfigError("mv_cdf: r must lie in (" + std::to_string(d.spectral_norm_c) +
                              ", 1)");
        }
    }
    const GridResult g = integrate_grid(d, xs, r, cfg);
    est.raw_value = g.value;
    est.value = std::clamp(g.value, 0.0, 1.0);
    est.err_estimate = g.err;
    est.nodes_used = static_cast<std::size_t>(
        std::pow(static_cast<double>(g.n), static_cast<double>(d.dim)));
    est.r_used = r;
    est.converged = g.converged;
    if (!g.converged) throw CdfNonConvergence("mv_cdf: per-axis node cap reached", est);
    return est;
}

}  // namespace gammasum
