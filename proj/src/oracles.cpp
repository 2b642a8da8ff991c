#include "gammasum/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gammasum {

namespace {

McResult finish(std::size_t hits, std::size_t n, std::uint64_t seed)
{
    McResult r;
    r.n_samples = n;
    r.seed = seed;
    r.estimate = static_cast<double>(hits) / static_cast<double>(n);
    r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n));
    return r;
}

void require_samples(std::size_t n)
{
    if (n == 0) throw DomainError("monte carlo: n_samples must be >= 1");
}

}  // namespace

std::vector<double> series_coefficients(const DerivedParams& d, std::size_t n_terms)
{
    if (n_terms == 0) throw DomainError("series_coefficients: n_terms must be >= 1");
    std::vector<double> power_sums(n_terms, 0.0);
    std::vector<double> cpow(d.c.size(), 1.0);
    for (std::size_t m = 1; m < n_terms; ++m) {
        double s = 0.0;
        for (std::size_t j = 0; j < d.c.size(); ++j) {
            cpow[j] *= d.c[j];
            s += d.alphas[j] * cpow[j];
        }
        power_sums[m] = s;
    }
    std::vector<double> b(n_terms, 0.0);
    b[0] = 1.0;
    for (std::size_t n = 1; n < n_terms; ++n) {
        double acc = 0.0;
        for (std::size_t m = 1; m <= n; ++m) acc += power_sums[m] * b[n - m];
        b[n] = acc / static_cast<double>(n);
    }
    return b;
}

SeriesResult series_cdf(const GammaSumParams& p, double x, double tol, std::size_t max_terms)
{
    const DerivedParams d = derive_params(p);
    if (!std::isfinite(x)) throw DomainError("series_cdf: x must be finite");
    if (!(tol > 0.0)) throw DomainError("series_cdf: tol must be > 0");
    SeriesResult out;
    if (x <= 0.0) return out;

    const double vx = d.v * x;
    const double prefactor = std::exp(d.log_prefactor);
    std::size_t count = 64;
    std::vector<double> ladder;
    std::size_t last = 0;  // index of the last retained term
    bool found = false;
    while (!found) {
        const std::size_t capped = std::min(count, max_terms + 1);
        ladder = reg_lower_gamma_ladder(d.alpha_total, vx, capped);
        for (std::size_t n = 0; n + 1 < capped; ++n) {
            const double bound =
                ladder[n + 1] == 0.0
                    ? 0.0
                    : prefactor * ladder[n + 1] * dominating_tail(d.alpha_total, d.c_max_abs, n);
            if (bound < tol) {
                last = n;
                out.tail_bound = bound;
                found = true;
                break;
            }
        }
        if (!found) {
            if (capped == max_terms + 1) {
                throw NonConvergence("series_cdf: term cap reached", 0.0, 0.0);
            }
            count *= 2;
        }
    }

    const std::vector<double> b = series_coefficients(d, last + 1);
    double sum = 0.0;
    for (std::size_t n = 0; n <= last; ++n) sum += b[n] * ladder[n];
    out.value = prefactor * sum;
    out.terms_used = last + 1;
    return out;
}

double Rng::uniform()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double Rng::gamma(double shape)
{
    if (!(shape > 0.0)) throw DomainError("Rng::gamma: shape must be positive");
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

McResult mc_cdf(const GammaSumParams& p, double x, std::size_t n_samples, std::uint64_t seed)
{
    p.validate();
    require_samples(n_samples);
    if (x < 0.0) return finish(0, n_samples, seed);
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double total = 0.0;
        for (std::size_t j = 0; j < p.alphas.size(); ++j) {
            total += p.lambdas[j] * rng.gamma(p.alphas[j]);
        }
        if (total <= x) ++hits;
    }
    return finish(hits, n_samples, seed);
}

McResult mc_qform(const SymMatrix& sigma, const SymMatrix& c, double x, std::size_t n_samples,
                  std::uint64_t seed)
{
    require_samples(n_samples);
    if (sigma.dim() != c.dim()) throw DomainError("mc_qform: dimensions differ");
    require_positive_definite(jacobi_eigen(c), "C");
    const std::vector<double> l = cholesky(sigma);
    const std::size_t n = sigma.dim();

    Rng rng(seed);
    std::vector<double> z(n), xv(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (double& zi : z) zi = rng.normal();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= i; ++k) acc += l[i * n + k] * z[k];
            xv[i] = acc;
        }
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += c(i, j) * xv[j];
            q += xv[i] * row;
        }
        if (q <= x) ++hits;
    }
    return finish(hits, n_samples, seed);
}

McResult mc_mvgamma(const SymMatrix& sigma, double alpha, const std::vector<double>& xs,
                    std::size_t n_samples, std::uint64_t seed)
{
    require_samples(n_samples);
    const double twice = 2.0 * alpha;
    if (!(alpha > 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
        throw DomainError("mc_mvgamma: 2 alpha must be a positive integer");
    }
    const std::size_t n = sigma.dim();
    if (xs.size() != n) throw DomainError("mc_mvgamma: xs length != dimension");
    const auto replicates = static_cast<std::size_t>(std::lround(twice));
    const std::vector<double> l = cholesky(sigma);

    Rng rng(seed);
    std::vector<double> z(n), diag(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        std::fill(diag.begin(), diag.end(), 0.0);
        for (std::size_t rep = 0; rep < replicates; ++rep) {
            for (double& zi : z) zi = rng.normal();
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k <= i; ++k) acc += l[i * n + k] * z[k];
                diag[i] += 0.5 * acc * acc;
            }
        }
        bool inside = true;
        for (std::size_t i = 0; i < n; ++i) inside = inside && diag[i] <= xs[i];
        if (inside) ++hits;
    }
    return finish(hits, n_samples, seed);
}

}  // namespace gammasum
