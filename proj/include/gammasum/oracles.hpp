#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gammasum/core_cdf.hpp"
#include "gammasum/qform.hpp"

namespace gammasum {

// --- Series reference ------------------------------------------------------

struct SeriesResult {
    double value = 0.0;
    std::size_t terms_used = 0;
    double tail_bound = 0.0;
};

/// Taylor coefficients b_0..b_{n_terms-1} of prod_j (1 - c_j z)^{-alpha_j},
/// via b_n = (1/n) sum_{m=1}^{n} s_m b_{n-m} with s_m = sum_j alpha_j c_j^m.
std::vector<double> series_coefficients(const DerivedParams& d, std::size_t n_terms);

/// prefactor * sum_n b_n P(alpha + n, v x), truncated when
/// prefactor * P(alpha+N+1, vx) * (tail of (1 - c_max z)^{-alpha}) < tol.
SeriesResult series_cdf(const GammaSumParams& p, double x, double tol = 1e-12,
                        std::size_t max_terms = 100000);

// --- Monte Carlo reference -------------------------------------------------

/// mt19937_64 with explicitly specified variate algorithms, so that streams
/// are identical across standard libraries:
///   uniform: top 53 bits, shifted to the open interval (0, 1);
///   normal:  Box-Muller, both outputs used in turn;
///   gamma:   Marsaglia-Tsang squeeze on a normal proposal for shape >= 1,
///            Gamma(a) = Gamma(a + 1) U^{1/a} for shape < 1.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double normal();
    double gamma(double shape);

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;  ///< sqrt(estimate (1 - estimate) / n_samples)
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Fraction of draws with sum_j lambda_j Gamma(alpha_j) <= x.
McResult mc_cdf(const GammaSumParams& p, double x, std::size_t n_samples, std::uint64_t seed);

/// Fraction of draws X = L Z ~ N(0, Sigma) (L the Cholesky factor) with X'CX <= x.
McResult mc_qform(const SymMatrix& sigma, const SymMatrix& c, double x, std::size_t n_samples,
                  std::uint64_t seed);

/// Wishart-diagonal reference for the p-variate gamma distribution with
/// transform |I + Sigma T|^{-alpha}, 2 alpha a positive integer: each draw sums
/// Z_i Z_i' / 2 over 2 alpha replicates Z_i ~ N(0, Sigma) and keeps the diagonal.
McResult mc_mvgamma(const SymMatrix& sigma, double alpha, const std::vector<double>& xs,
                    std::size_t n_samples, std::uint64_t seed);

}  // namespace gammasum
