#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gammasum/oracles.hpp"
#include "gammasum/qform.hpp"
#include "gammasum/special_fn.hpp"

using namespace gammasum;

namespace {

SymMatrix product(const SymMatrix& a, const SymMatrix& b)
{
    const std::size_t n = a.dim();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) m[i * n + j] += a(i, k) * b(k, j);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = 0.5 * (m[i * n + j] + m[j * n + i]);
    return SymMatrix(n, m);
}

// Q' A Q for an orthogonal Q given row-major.
SymMatrix congruence(const std::vector<double>& q, const SymMatrix& a)
{
    const std::size_t n = a.dim();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) m[i * n + j] += q[k * n + i] * a(k, l) * q[l * n + j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = m[j * n + i] = 0.5 * (m[i * n + j] + m[j * n + i]);
    return SymMatrix(n, m);
}

}  // namespace

TEST_CASE("symmetric matrix validation")
{
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 3.0, 1.0}), DomainError);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, NAN, NAN, 1.0}), DomainError);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 0.0, 0.0}), DomainError);
    const SymMatrix m(2, {1.0, 0.5, 0.5 + 1e-14, 2.0});
    CHECK(m(0, 1) == m(1, 0));
}

TEST_CASE("jacobi eigen")
{
    const EigenDecomp d = jacobi_eigen(SymMatrix::diagonal({3.0, 1.0, 2.0}));
    CHECK(d.values == std::vector<double>{1.0, 2.0, 3.0});
    for (std::size_t i = 0; i < 3; ++i) {
        int ones = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double v = std::abs(d.vector(i, k));
            CHECK((v == 0.0 || v == 1.0));
            ones += v == 1.0;
        }
        CHECK(ones == 1);
    }
    const EigenDecomp e = jacobi_eigen(SymMatrix(2, {2.0, 1.0, 1.0, 2.0}));
    CHECK(std::abs(e.values[0] - 1.0) < 1e-14);
    CHECK(std::abs(e.values[1] - 3.0) < 1e-14);

    std::vector<double> h(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h[i * 3 + j] = 1.0 / (i + j + 1);
    const EigenDecomp hil = jacobi_eigen(SymMatrix(3, h));
    // 40-digit reference
    CHECK(std::abs(hil.values[0] - 0.002687340355773529231) < 1e-10);
    CHECK(std::abs(hil.values[1] - 0.12232706585390584656) < 1e-10);
    CHECK(std::abs(hil.values[2] - 1.4083189271236539575) < 1e-10);
}

TEST_CASE("eigenvectors reconstruct random matrices")
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    for (std::size_t n : {1u, 2u, 4u, 7u}) {
        std::vector<double> a(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) a[i * n + j] = a[j * n + i] = nd(gen);
        const SymMatrix m(n, a);
        const EigenDecomp e = jacobi_eigen(m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0, o = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    s += e.vector(i, k) * e.values[k] * e.vector(j, k);
                    o += e.vector(k, i) * e.vector(k, j);
                }
                CHECK(std::abs(s - m(i, j)) < 1e-12);
                CHECK(std::abs(o - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("positive definiteness, square root, determinant, cholesky")
{
    CHECK_THROWS_AS(require_positive_definite(jacobi_eigen(SymMatrix::diagonal({1.0, 0.0})), "m"),
                    DefinitenessError);
    CHECK_THROWS_AS(sym_sqrt(SymMatrix::diagonal({1.0, -1.0})), DefinitenessError);

    const SymMatrix i3 = sym_sqrt(SymMatrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(i3(i, j) - (i == j ? 1.0 : 0.0)) < 1e-15);
    const SymMatrix d = sym_sqrt(SymMatrix::diagonal({4.0, 9.0}));
    CHECK(std::abs(d(0, 0) - 2.0) < 1e-15);
    CHECK(std::abs(d(1, 1) - 3.0) < 1e-15);
    CHECK(std::abs(d(0, 1)) < 1e-15);
    const SymMatrix s(2, {2.0, 1.0, 1.0, 2.0});
    const SymMatrix sq = product(sym_sqrt(s), sym_sqrt(s));
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(sq(i, j) - s(i, j)) < 1e-12);

    CHECK(std::abs(determinant(s) - 3.0) < 1e-14);
    const auto l = cholesky(s);
    CHECK(std::abs(l[0] - std::sqrt(2.0)) < 1e-15);
    CHECK(l[1] == 0.0);
    CHECK(std::abs(l[2] * l[2] + l[3] * l[3] - 2.0) < 1e-14);
}

TEST_CASE("qform eigenvalues")
{
    auto e = qform_eigenvalues(SymMatrix::identity(2), SymMatrix::diagonal({1.0, 2.0}));
    CHECK(std::abs(e[0] - 1.0) < 1e-15);
    CHECK(std::abs(e[1] - 2.0) < 1e-15);
    e = qform_eigenvalues(SymMatrix::diagonal({2.0, 2.0}), SymMatrix::identity(2));
    CHECK(std::abs(e[0] - 2.0) < 1e-15);
    CHECK(std::abs(e[1] - 2.0) < 1e-15);
    e = qform_eigenvalues(SymMatrix(2, {2.0, 1.0, 1.0, 2.0}), SymMatrix::diagonal({1.0, 3.0}));
    CHECK(std::abs(e[0] * e[1] - 9.0) < 1e-12);
    CHECK(std::abs(e[0] + e[1] - 8.0) < 1e-12);
    CHECK_THROWS_AS(qform_eigenvalues(SymMatrix::identity(2), SymMatrix::identity(3)), DomainError);
    CHECK_THROWS_AS(qform_eigenvalues(SymMatrix::identity(2), SymMatrix::diagonal({1.0, -1.0})),
                    DefinitenessError);
}

TEST_CASE("qform cdf")
{
    for (int k = 1; k <= 6; ++k) {
        for (double x : {0.5, 3.0, 9.0}) {
            const CdfEstimate e = qform_cdf(SymMatrix::identity(k), SymMatrix::identity(k), x);
            CHECK(std::abs(e.value - reg_lower_gamma(0.5 * k, 0.5 * x)) < 1e-10);
        }
    }
    CHECK(std::abs(qform_cdf(SymMatrix::identity(2), SymMatrix::identity(2), 2.0 * std::log(2.0)).value - 0.5) < 1e-12);
    for (double x : {1.0, 6.0, 20.0}) {
        const CdfEstimate e = qform_cdf(SymMatrix::identity(2), SymMatrix::diagonal({3.0, 3.0}), x);
        CHECK(std::abs(e.value - (1.0 - std::exp(-x / 6.0))) < 1e-12);
    }
    const SymMatrix sigma(2, {2.0, 1.0, 1.0, 2.0});
    const SymMatrix c = SymMatrix::diagonal({1.0, 3.0});
    const CdfEstimate e = qform_cdf(sigma, c, 10.0);
    const auto lam = qform_eigenvalues(sigma, c);
    CHECK(std::abs(e.value - series_cdf({{0.5, 0.5}, {lam[0], lam[1]}}, 5.0).value) < 1e-8);
    const McResult m = mc_qform(sigma, c, 10.0, 1000000, 21);
    CHECK(std::abs(e.value - m.estimate) < 4.0 * m.std_error);
}

TEST_CASE("qform congruence and scaling")
{
    const double t = 0.7;
    const std::vector<double> q{std::cos(t), -std::sin(t), std::sin(t), std::cos(t)};
    const SymMatrix sigma(2, {2.0, 0.6, 0.6, 1.0});
    const SymMatrix c(2, {1.0, -0.3, -0.3, 2.5});
    for (double x : {0.5, 2.0, 7.0}) {
        const double base = qform_cdf(sigma, c, x).value;
        CHECK(std::abs(qform_cdf(congruence(q, sigma), congruence(q, c), x).value - base) < 1e-9);
        CHECK(std::abs(qform_cdf(sigma, product(SymMatrix::diagonal({3.0, 3.0}), c), 3.0 * x).value - base) < 1e-9);
    }
}
