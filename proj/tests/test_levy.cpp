#include <doctest.h>

#include "oracles.hpp"

#include <renyi/errors.hpp>
#include <renyi/levy.hpp>
#include <renyi/measures.hpp>

#include <array>
#include <cmath>

using namespace renyi;

namespace
{

// P_{N,i}(s) and its s-derivative, written out directly.
double P(int N, double i, double s)
{
    return (s + N - 1) / ((s + i) * (s + i - 1));
}

double dP(int N, double i, double s)
{
    const auto a = s + i, b = s + i - 1;
    return (a * b - (s + N - 1) * (a + b)) / (a * a * b * b);
}

double kernel_by_quadrature(int N, double i, double theta)
{
    return oracle::simpson([&](double s) { return std::abs(dP(N, i + 1, s)); }, 0, theta, 1e-13) + P(N, i + 1, theta);
}

} // namespace

TEST_CASE("constants")
{
    const ExpansionParams p2(2), p3(3), p4(4);
    CHECK(beta_const(p2) == doctest::Approx(3 - 2 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(beta_const(p3) == doctest::Approx(5 - 2 * std::sqrt(6.0)).epsilon(1e-14));

    // grid maximum of x(1-x)/(x+1)
    double best = 0;
    for (int k = 0; k <= 1000000; ++k) {
        const auto x = k / 1e6;
        best = std::max(best, x * (1 - x) / (x + 1));
    }
    CHECK(std::abs(beta_const(p2) - best) <= 1e-8);

    CHECK(delta_const(p2) == doctest::Approx(2.0 / 3 - std::log(4.0 / 3) / std::log(2.0)).epsilon(1e-13));
    CHECK(delta_const(p3) == doctest::Approx(0.5 - std::log(9.0 / 8) / std::log(1.5)).epsilon(1e-13));
    CHECK(delta_const(ExpansionParams(10)) > 0);
    CHECK(delta_const(ExpansionParams(10)) < 1);

    CHECK(rate_const(p2) == doctest::Approx(9 - 1.0 / 6 - 6 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(rate_const(p2) == doctest::Approx(0.3480520).epsilon(1e-6));
    CHECK(rate_const(p3) == doctest::Approx(5 - 2 * std::sqrt(6.0) + 2.0 / 12).epsilon(1e-13));
    CHECK(rate_const(p4) == doctest::Approx(7 - 4 * std::sqrt(3.0) + 3.0 / 20).epsilon(1e-13));
    for (int N = 2; N < 50; ++N) {
        CHECK(rate_const(ExpansionParams(N + 1)) < rate_const(ExpansionParams(N)));
    }
}

TEST_CASE("beta kernel")
{
    const ExpansionParams p2(2), p3(3), p4(4);
    CHECK(beta_kernel(p2, 2, std::sqrt(2.0) - 1) == doctest::Approx(6 - 4 * std::sqrt(2.0) - 1.0 / 6).epsilon(1e-12));
    for (double theta : {0.0, 0.3, 0.9}) {
        CHECK(beta_kernel(p3, 3, theta) == doctest::Approx(1.0 / 6).epsilon(1e-12));
    }
    CHECK(beta_kernel(p2, 3, 1) == doctest::Approx(0.1166667).epsilon(1e-6));

    for (int N : {2, 3, 5}) {
        const ExpansionParams p(N);
        for (digit_t i = N; i <= N + 12; ++i) {
            for (double theta : {0.0, 0.2, 0.41, 0.75, 0.999}) {
                CHECK(beta_kernel(p, i, theta)
                      == doctest::Approx(kernel_by_quadrature(N, static_cast<double>(i), theta)).epsilon(1e-9));
            }
        }
    }

    CHECK(theta_star(p3, 4) == doctest::Approx(std::sqrt(6.0) - 2).epsilon(1e-13));
    CHECK(theta_star(p2, 3) == doctest::Approx(std::sqrt(6.0) - 1).epsilon(1e-13));
    CHECK(theta_star(p4, 5) == doctest::Approx(std::sqrt(6.0) - 3).epsilon(1e-13));
    CHECK_THROWS_AS(theta_star(p3, 3), domain_error);

    CHECK(sup_beta_kernel(p2) == doctest::Approx(0.1764791).epsilon(1e-6));
    CHECK(sup_beta_kernel(p3) == 1.0 / 6);
    CHECK(sup_beta_kernel(p4) == 3.0 / 20);
    const auto s = search_beta_kernel(p2, 2, 200, 401);
    CHECK(s.value <= sup_beta_kernel(p2) + 1e-12);
    CHECK(s.digit == 2);
}

TEST_CASE("alpha at level zero")
{
    for (int N : {2, 3}) {
        const ExpansionParams p(N);
        const InvariantMeasure m(p);
        for (double t : {0.0, 0.2, 0.7, 1.0}) {
            const auto a = alpha_sup(AtomicDistribution::point_mass(p, t));
            const auto expected = std::max(m.cdf(t), 1 - m.cdf(t));
            CHECK(a.lower <= expected + 1e-15);
            CHECK(a.upper >= expected - 1e-15);
            CHECK(a.estimate == doctest::Approx(expected).epsilon(1e-14));
        }
        const auto half = std::sqrt(N * (N - 1.0)) - (N - 1);
        CHECK(alpha_sup(AtomicDistribution::point_mass(p, half)).estimate == doctest::Approx(0.5).epsilon(1e-12));
    }
    const auto a = alpha_sup(chain_law(ExpansionParams(2), 0.3, 3));
    CHECK(a.lower <= a.upper);
    CHECK(a.upper <= 1);
}

TEST_CASE("F error supremum against dense sampling")
{
    const ExpansionParams p(2);
    const InvariantMeasure m(p);
    for (double t : {0.0, 0.6}) {
        PropagationSettings s;
        s.tail_mode = TailMode::enclose;
        s.digit_cap = 60;
        const auto d = chain_law(p, t, 2, s);
        const auto sup = f_error_sup(d);
        // |d(F - G_N)/dx| <= 2 + 1/log 2, so a grid of step h misses at most 1.8 h
        const int points = 20000;
        double dense = 0;
        for (int k = 0; k <= points; ++k) {
            const auto x = static_cast<double>(k) / points;
            dense = std::max(dense, std::abs(F_cdf(d, x).estimate - m.cdf(x)));
        }
        CHECK(sup.lower <= sup.upper);
        CHECK(dense <= sup.upper + 1e-12);
        CHECK(sup.lower <= dense + 1.8 / points);
        // the width comes from the enclosed tail beyond digit 60
        CHECK(sup.upper - sup.lower <= 1e-3);
    }
}

TEST_CASE("bound arithmetic")
{
    const ExpansionParams p2(2), p3(3);
    const auto d2 = delta_const(p2), c2 = rate_const(p2);
    CHECK(g_bound(p2, 1) == doctest::Approx(d2).epsilon(1e-15));
    CHECK(g_bound(p2, 3) == doctest::Approx(d2 * c2 * c2).epsilon(1e-14));
    CHECK(g_bound(p2, 3) == doctest::Approx(0.0305).epsilon(2e-2));
    CHECK(g_bound(p3, 2) == doctest::Approx(0.056084).epsilon(1e-4));
    CHECK(f_bound(p2, 2) == doctest::Approx(beta_const(p2) * d2 * c2).epsilon(1e-14));
    CHECK_THROWS_AS(g_bound(p2, 0), domain_error);
}

TEST_CASE("theorem check on a small grid")
{
    const ExpansionParams p(3);
    const std::array<double, 2> ts{0.25, 0.75};
    const auto r = verify_error_bounds(p, ts, 2);
    CHECK(r.rows.size() == 4);
    CHECK(r.f_violations() == 0);
    CHECK(r.beta == beta_const(p));
    for (const auto &row : r.rows) {
        CHECK(row.g_observed.lower <= row.g_observed.upper);
        CHECK(row.f_observed.lower <= row.f_observed.upper);
        CHECK(row.g_bound == g_bound(p, row.n));
    }
}
