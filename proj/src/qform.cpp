#include "gammasum/qform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gammasum {

namespace {

constexpr int kMaxSweeps = 100;
constexpr std::size_t kSoftDimLimit = 512;

using Dense = std::vector<double>;

Dense multiply(const Dense& a, const Dense& b, std::size_t n)
{
    Dense out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
        }
    }
    return out;
}

// Average with the transpose; products of symmetric factors are symmetric
// only up to rounding.
SymMatrix symmetric_part(Dense a, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = a[j * n + i] = m;
        }
    }
    return SymMatrix(n, std::move(a));
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> entries)
    : dim_(dim), a_(std::move(entries))
{
    if (dim_ == 0) throw DomainError("matrix: dimension must be >= 1");
    if (dim_ > kSoftDimLimit) throw DomainError("matrix: dimension exceeds 512");
    if (a_.size() != dim_ * dim_) throw DomainError("matrix: entry count != dim * dim");
    for (double v : a_) {
        if (!std::isfinite(v)) throw DomainError("matrix: entries must be finite");
    }
    const double scale = max_abs();
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = i + 1; j < dim_; ++j) {
            double& u = a_[i * dim_ + j];
            double& l = a_[j * dim_ + i];
            if (std::abs(u - l) > 1e-12 * scale) throw DomainError("matrix: not symmetric");
            u = l = 0.5 * (u + l);
        }
    }
}

SymMatrix SymMatrix::identity(std::size_t dim)
{
    std::vector<double> a(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] = 1.0;
    return SymMatrix(dim, std::move(a));
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& values)
{
    const std::size_t n = values.size();
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = values[i];
    return SymMatrix(n, std::move(a));
}

double SymMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

EigenDecomp jacobi_eigen(const SymMatrix& input)
{
    const std::size_t n = input.dim();
    Dense a = input.entries();
    Dense v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double norm2 = 0.0;
    for (double x : a) norm2 += x * x;
    const double threshold = 1e-14 * std::sqrt(norm2);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) s += a[i * n + j] * a[i * n + j];
            }
        }
        return std::sqrt(s);
    };

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_norm() <= threshold) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_norm() > threshold) {
        throw NonConvergence("jacobi_eigen: 100 sweeps without convergence", off_norm(), 0.0);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
    EigenDecomp e;
    e.dim = n;
    e.values.resize(n);
    e.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        e.values[k] = a[order[k] * n + order[k]];
        for (std::size_t row = 0; row < n; ++row) e.vectors[row * n + k] = v[row * n + order[k]];
    }
    return e;
}

void require_positive_definite(const EigenDecomp& e, std::string_view name)
{
    const double top = e.values.back();
    const double floor = static_cast<double>(e.dim) * 1e-14 * top;
    if (!(top > 0.0) || !(e.values.front() > floor)) {
        throw DefinitenessError(std::string(name) + " is not positive definite");
    }
}

SymMatrix sym_sqrt(const SymMatrix& a)
{
    const EigenDecomp e = jacobi_eigen(a);
    require_positive_definite(e, "matrix");
    const std::size_t n = a.dim();
    Dense out(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::sqrt(e.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = e.vector(i, k) * w;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += vik * e.vector(j, k);
        }
    }
    return symmetric_part(std::move(out), n);
}

double determinant(const SymMatrix& a)
{
    const EigenDecomp e = jacobi_eigen(a);
    double det = 1.0;
    for (double w : e.values) det *= w;
    return det;
}

std::vector<double> cholesky(const SymMatrix& a)
{
    const std::size_t n = a.dim();
    Dense l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
        if (!(diag > 0.0)) throw DefinitenessError("cholesky: matrix is not positive definite");
        const double ljj = std::sqrt(diag);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = s / ljj;
        }
    }
    return l;
}

std::vector<double> qform_eigenvalues(const SymMatrix& sigma, const SymMatrix& c)
{
    if (sigma.dim() != c.dim()) throw DomainError("qform: sigma and C differ in dimension");
    require_positive_definite(jacobi_eigen(c), "C");
    const SymMatrix root = sym_sqrt(sigma);
    const std::size_t n = sigma.dim();
    const SymMatrix m =
        symmetric_part(multiply(multiply(root.entries(), c.entries(), n), root.entries(), n), n);
    const EigenDecomp e = jacobi_eigen(m);
    require_positive_definite(e, "Sigma^{1/2} C Sigma^{1/2}");
    return e.values;
}

CdfEstimate qform_cdf(const SymMatrix& sigma, const SymMatrix& c, double x,
                      const QuadratureConfig& cfg)
{
    const std::vector<double> lambdas = qform_eigenvalues(sigma, c);
    GammaSumParams p{std::vector<double>(lambdas.size(), 0.5), lambdas};

    CdfEstimate est = cdf(p, 0.5 * x, cfg);

    // prod lambda_j = |C Sigma| enters the prefactor v^{-k/2} |C Sigma|^{-1/2}.
    double log_prod = 0.0;
    for (double l : lambdas) log_prod += std::log(l);
    const double log_det = std::log(determinant(sigma)) + std::log(determinant(c));
    if (std::abs(log_prod - log_det) > 1e-9) {
        est.warnings.push_back("eigenvalue product differs from det(C) det(Sigma)");
    }
    return est;
}

}  // namespace gammasum
