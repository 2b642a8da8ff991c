#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gammasum/core_cdf.hpp"
#include "gammasum/qform.hpp"

namespace gammasum {

/// p-variate gamma distribution with Laplace transform |I_p + Sigma T|^{-alpha},
/// T = diag(t_1, ..., t_p).
struct MvGammaParams {
    double alpha = 1.0;
    SymMatrix sigma;
    std::size_t max_dim = 3;  ///< may be raised to 4

    void validate() const;

    /// Existence caveat when 2 alpha is not an integer and 2 alpha <= floor((p-1)/2).
    std::vector<std::string> warnings() const;
};

struct MvDerived {
    std::size_t dim = 0;
    double alpha = 0.0;
    double v = 0.0;
    SymMatrix c_matrix;            ///< I - (v Sigma)^{-1}
    double spectral_norm_c = 0.0;  ///< (lambda_max - lambda_min) / (lambda_max + lambda_min)
    double log_prefactor = 0.0;    ///< -alpha p ln v - alpha ln det Sigma
};

MvDerived mv_derive(const MvGammaParams& p);

/// Log-determinant of a small complex matrix (row-major) from an LU
/// factorization with partial pivoting: the sum of principal logs of the pivots
/// plus i pi per row exchange. Correct modulo 2 pi i only.
Complex lu_log_det(std::vector<Complex> m, std::size_t dim);

/// |I - C Y^{-1}|^{-alpha} prod_k G_alpha(v x_k, y_k), y_k = r e^{i phi_k}.
class MvIntegrand {
  public:
    MvIntegrand(const MvDerived& d, const std::vector<double>& xs, double r, double tol);

    /// The log-determinant on the branch that is continuous from Y = -r I.
    ///
    /// Every eigenvalue of I - C Y^{-1} is 1 - mu with |mu| <= ||C|| / r < 1, so
    /// |Im log det| <= p asin(||C|| / r). With a neighbouring value the branch
    /// closest to it is taken and a jump beyond pi/2 raises BranchError; without
    /// one the bound alone must single out the branch.
    Complex log_det(const std::vector<double>& phis, std::optional<double> ref_imag = {}) const;

    /// Same, for precomputed y_k.
    Complex log_det_at(const std::vector<Complex>& ys, std::optional<double> ref_imag) const;

    Complex operator()(const std::vector<double>& phis) const;

    Complex g_axis(std::size_t k, Complex y) const { return g_[k](y); }
    double r() const noexcept { return r_; }

  private:
    const MvDerived& d_;
    double r_;
    double imag_bound_;
    std::vector<GSeries> g_;
};

Complex mv_integrand(const std::vector<double>& phis, const std::vector<double>& xs,
                     const MvDerived& d, double r, double tol);

/// F(x_1..x_p) = prefactor (2 pi)^{-p} int_{(-pi,pi)^p} |I - C Y^{-1}|^{-alpha}
/// prod_k G_alpha(v x_k, y_k) dphi, on a tensor midpoint grid with n per axis
/// doubling up to min(n_max, 512). The normalization is checked once per
/// process against the independent case C = 0.
CdfEstimate mv_cdf(const MvGammaParams& p, const std::vector<double>& xs,
                   const QuadratureConfig& cfg = {});

}  // namespace gammasum
