#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gammasum/gfun.hpp"
#include "gammasum/mvgamma.hpp"
#include "gammasum/oracles.hpp"
#include "gammasum/special_fn.hpp"

using namespace gammasum;

namespace {

MvGammaParams params(double alpha, SymMatrix sigma)
{
    MvGammaParams p;
    p.alpha = alpha;
    p.sigma = std::move(sigma);
    return p;
}

}  // namespace

TEST_CASE("validation")
{
    CHECK_THROWS_AS(params(0.0, SymMatrix::identity(2)).validate(), DomainError);
    CHECK_THROWS_AS(params(1.0, SymMatrix::identity(4)).validate(), DomainError);
    MvGammaParams four = params(1.0, SymMatrix::identity(4));
    four.max_dim = 4;
    CHECK_NOTHROW(four.validate());
    four.max_dim = 5;
    CHECK_THROWS_AS(four.validate(), ConfigError);
    CHECK_THROWS_AS(mv_derive(params(1.0, SymMatrix::diagonal({1.0, -2.0}))), DefinitenessError);
    CHECK(params(0.25, SymMatrix::identity(3)).warnings().size() == 1);
    CHECK(params(1.0, SymMatrix::identity(3)).warnings().empty());
}

TEST_CASE("mv_derive")
{
    const MvDerived a = mv_derive(params(1.0, SymMatrix::diagonal({2.5, 2.5, 2.5})));
    CHECK(std::abs(a.v - 0.4) < 1e-15);
    CHECK(a.c_matrix.max_abs() == 0.0);

    const MvDerived b = mv_derive(params(1.0, SymMatrix::diagonal({1.0, 3.0})));
    CHECK(std::abs(b.v - 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(b.c_matrix(0, 0) + 0.5) < 1e-15);
    CHECK(std::abs(b.c_matrix(1, 1) - 0.5) < 1e-15);
    CHECK(b.c_matrix(0, 1) == 0.0);
    CHECK(std::abs(b.spectral_norm_c - 0.5) < 1e-15);

    const MvDerived c = mv_derive(params(1.0, SymMatrix(2, {2.0, 1.0, 1.0, 2.0})));
    CHECK(std::abs(c.v - 2.0 / 3.0) < 1e-14);
    CHECK(std::abs(c.spectral_norm_c - 0.5) < 1e-14);
    // I - (3/2) Sigma^{-1}, Sigma^{-1} = [[2,-1],[-1,2]] / 3
    CHECK(std::abs(c.c_matrix(0, 0) - 0.0) < 1e-14);
    CHECK(std::abs(c.c_matrix(0, 1) - 0.5) < 1e-14);
    CHECK(std::abs(c.c_matrix(1, 1) - 0.0) < 1e-14);
}

TEST_CASE("lu_log_det")
{
    const Complex l = lu_log_det({{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {3.0, 0.0}}, 2);
    CHECK(std::abs(l - std::log(Complex(6.0, 0.0))) < 1e-15);
    // a permutation has determinant -1
    const Complex p = lu_log_det({{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}, 2);
    CHECK(std::abs(std::exp(p) - Complex(-1.0, 0.0)) < 1e-15);
    const std::vector<Complex> m{{1.0, 2.0}, {0.5, -1.0}, {-0.3, 0.2}, {2.0, 0.5}};
    const Complex det = m[0] * m[3] - m[1] * m[2];
    CHECK(std::abs(std::exp(lu_log_det(m, 2)) - det) < 1e-14);
    CHECK_THROWS_AS(lu_log_det(m, 3), DomainError);
}

TEST_CASE("integrand")
{
    const MvDerived flat = mv_derive(params(1.5, SymMatrix::diagonal({2.0, 2.0})));
    const std::vector<double> xs{1.0, 2.5};
    const std::vector<double> phis{0.4, -2.0};
    const Complex f = mv_integrand(phis, xs, flat, 0.5, 1e-14);
    Complex expected{1.0, 0.0};
    for (std::size_t k = 0; k < 2; ++k) expected *= g_eval(1.5, flat.v * xs[k], std::polar(0.5, phis[k]), 1e-15);
    CHECK(std::abs(f - expected) < 1e-13);

    const MvDerived d = mv_derive(params(1.0, SymMatrix(2, {2.0, 1.0, 1.0, 2.0})));
    const Complex g = mv_integrand({std::numbers::pi / 3.0, -std::numbers::pi / 4.0}, {2.0, 3.0}, d, 0.75, 1e-14);
    // 40-digit reference
    CHECK(std::abs(g - Complex(1.799281809432902738, -0.50392366775315168808)) < 1e-11);

    // conjugate symmetry
    const Complex h = mv_integrand({-std::numbers::pi / 3.0, std::numbers::pi / 4.0}, {2.0, 3.0}, d, 0.75, 1e-14);
    CHECK(std::abs(h - std::conj(g)) < 1e-13);

    // p = 1 reduces to the single-factor determinant
    const MvDerived one = mv_derive(params(1.3, SymMatrix::diagonal({2.0})));
    const Complex u = mv_integrand({0.9}, {1.7}, one, 0.4, 1e-14);
    CHECK(std::abs(u - g_eval(1.3, one.v * 1.7, std::polar(0.4, 0.9), 1e-15)) < 1e-13);
}

TEST_CASE("mv_cdf reductions")
{
    for (double a : {0.5, 1.0, 2.3}) {
        const double lam = 1.7;
        const CdfEstimate e = mv_cdf(params(a, SymMatrix::diagonal({lam, lam})), {1.0, 4.0});
        CHECK(std::abs(e.value - reg_lower_gamma(a, 1.0 / lam) * reg_lower_gamma(a, 4.0 / lam)) < 1e-8);
        const CdfEstimate t = mv_cdf(params(a, SymMatrix::diagonal({lam, lam, lam})), {1.0, 2.0, 3.0});
        CHECK(std::abs(t.value - reg_lower_gamma(a, 1.0 / lam) * reg_lower_gamma(a, 2.0 / lam) *
                                     reg_lower_gamma(a, 3.0 / lam)) < 1e-8);
    }
    for (double x : {0.3, 1.0, 5.0}) {
        CHECK(std::abs(mv_cdf(params(1.0, SymMatrix::diagonal({2.0})), {x}).value - cdf({{1.0}, {2.0}}, x).value) < 1e-9);
    }
    CHECK(mv_cdf(params(1.0, SymMatrix(2, {2.0, 1.0, 1.0, 2.0})), {0.0, 3.0}).value == 0.0);
    CHECK_THROWS_AS(mv_cdf(params(1.0, SymMatrix::identity(2)), {1.0}), DomainError);
}

TEST_CASE("mv_cdf against the Wishart-diagonal oracle")
{
    const SymMatrix sigma(2, {2.0, 1.0, 1.0, 2.0});
    const CdfEstimate e = mv_cdf(params(1.0, sigma), {3.0, 3.0});
    CHECK(e.converged);
    const McResult m = mc_mvgamma(sigma, 1.0, {3.0, 3.0}, 1000000, 31);
    CHECK(std::abs(e.value - m.estimate) < 4.0 * m.std_error);
}

TEST_CASE("mv_cdf monotonicity and limits")
{
    const MvGammaParams p = params(1.0, SymMatrix(2, {2.0, 1.0, 1.0, 2.0}));
    double prev = 0.0;
    for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double v = mv_cdf(p, {x, 3.0}).value;
        CHECK(v >= prev - 1e-10);
        prev = v;
    }
    CHECK(std::abs(mv_cdf(p, {60.0, 60.0}).value - 1.0) < 1e-6);
}
