#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gammasum/errors.hpp"
#include "gammasum/gfun.hpp"

namespace gammasum {

/// Shapes alpha_j and scales lambda_j of independent Gamma(alpha_j, lambda_j)
/// summands. The sum has Laplace transform prod_j (1 + lambda_j t)^{-alpha_j}.
struct GammaSumParams {
    std::vector<double> alphas;
    std::vector<double> lambdas;

    /// Throws DomainError unless both vectors are non-empty, of equal length,
    /// with strictly positive finite entries.
    void validate() const;
};

/// Reparametrization around the midpoint v of the inverse scales.
///
/// With v = (1/lambda_max + 1/lambda_min) / 2 and c_j = 1 - 1/(v lambda_j) the
/// transform becomes prefactor * z^alpha * prod_j (1 - c_j z)^{-alpha_j} with
/// z = (1 + t/v)^{-1}; z itself is never needed at runtime.
struct DerivedParams {
    double v = 0.0;
    std::vector<double> c;
    std::vector<double> alphas;
    double alpha_total = 0.0;
    double c_max_abs = 0.0;      ///< (lambda_max - lambda_min) / (lambda_max + lambda_min)
    double log_prefactor = 0.0;  ///< -alpha ln v - sum alpha_j ln lambda_j
};

struct QuadratureConfig {
    std::optional<double> r;  ///< contour radius; empty selects (1 + c_max) / 2
    std::size_t n_start = 16;
    std::size_t n_max = 65536;
    double tol = 1e-10;

    void validate() const;
};

struct CdfEstimate {
    double value = 0.0;      ///< clamped to [0, 1]
    double raw_value = 0.0;  ///< before clamping
    double err_estimate = 0.0;
    std::size_t nodes_used = 0;
    double r_used = 0.0;
    bool converged = true;
    std::vector<std::string> warnings;
};

/// NonConvergence carrying the last quadrature level.
class CdfNonConvergence : public NonConvergence {
  public:
    CdfNonConvergence(const std::string& what, CdfEstimate estimate)
        : NonConvergence(what, estimate.value, estimate.err_estimate),
          estimate_(std::move(estimate))
    {
    }
    const CdfEstimate& estimate() const noexcept { return estimate_; }

  private:
    CdfEstimate estimate_;
};

DerivedParams derive_params(const GammaSumParams& p);

/// Validated contour radius in (c_max_abs, 1).
double choose_r(const DerivedParams& d, const QuadratureConfig& cfg);

/// Sum over n > terms of the coefficients of (1 - c z)^{-alpha}. This series
/// dominates |b_n| for every coefficient sequence with max |c_j| = c.
double dominating_tail(double alpha_total, double c_max_abs, std::size_t terms);

/// Re[ prod_j (1 - c_j r^{-1} e^{-i phi})^{-alpha_j} G_alpha(v x, r e^{i phi}) ].
double integrand(double phi, double x, const DerivedParams& d, double r, double tol);

/// The integrand at a fixed (x, r), with the G coefficients built once.
class Integrand {
  public:
    Integrand(const DerivedParams& d, double x, double r, double tol);

    double operator()(double phi) const;

    /// Lower bound of Re(1 - c_j r^{-1} e^{-i phi}) over j; positive by construction.
    double min_base_real(double phi) const;

    std::size_t g_terms() const noexcept { return g_.terms(); }

  private:
    const DerivedParams& d_;
    double r_;
    std::vector<double> rho_;         // c_j / r
    std::vector<double> one_minus_;   // 1 - |c_j| / r, formed without cancellation
    GSeries g_;
};

/// P(sum_j X_j <= x) by the midpoint rule on (0, pi) with node doubling.
/// Throws CdfNonConvergence if n_max is reached before the tolerance.
CdfEstimate cdf(const GammaSumParams& p, double x, const QuadratureConfig& cfg = {});

/// Midpoint sums prefactor * I_n for n = n_start, 2 n_start, ... <= n_max.
struct RefinementLevel {
    std::size_t nodes;
    double value;
};
std::vector<RefinementLevel> refinement_trace(const GammaSumParams& p, double x,
                                              const QuadratureConfig& cfg);

/// x with |cdf(x) - prob| <= min(1e-8, min(prob, 1 - prob) / 2), by doubling
/// then bisection. Throws NonConvergence with the last midpoint when the tail
/// mass min(prob, 1 - prob) is not above cfg.tol or the bisection stalls.
double quantile(const GammaSumParams& p, double prob, const QuadratureConfig& cfg = {});

}  // namespace gammasum
