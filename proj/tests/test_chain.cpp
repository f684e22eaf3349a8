#include <doctest.h>

#include "oracles.hpp"

#include <renyi/chain.hpp>
#include <renyi/errors.hpp>
#include <renyi/measures.hpp>
#include <renyi/report_io.hpp>

#include <cmath>
#include <random>

using namespace renyi;

TEST_CASE("transition probabilities")
{
    const ExpansionParams p(2);
    CHECK(transition_prob(p, 2, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(transition_prob(p, 2, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    double partial = 0;
    for (digit_t i = 2; i <= 11; ++i) {
        partial += transition_prob(p, i, 0);
    }
    CHECK(partial == doctest::Approx(1 - 1.0 / 11).epsilon(1e-14));
    CHECK(transition_tail(p, 1, 0) == doctest::Approx(1).epsilon(1e-15));
    CHECK(transition_tail(p, 11, 0) == doctest::Approx(1.0 / 11).epsilon(1e-15));
    CHECK(transition_tail(ExpansionParams(3), 2, 1) == doctest::Approx(1).epsilon(1e-15));

    // P_{N,i}(s) is the rho^s mass of the cylinder I(i)
    for (int N : {2, 5}) {
        const ExpansionParams q(N);
        for (double s : {0.0, 0.4, 1.0}) {
            const ConditionalMeasure c(q, s);
            for (digit_t i = N; i < N + 20; ++i) {
                CHECK(transition_prob(q, i, s)
                      == doctest::Approx(c.mass(cylinder_interval(DigitBlock(q, {i})))).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(transition_prob(p, 1, 0), domain_error);
}

TEST_CASE("chain steps and digit selection")
{
    const ExpansionParams p(2);
    auto s = chain_start(p, 0);
    CHECK(chain_step(s, 2).s == 0);
    CHECK(chain_step(s, 3).s == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(chain_step(chain_start(p, 1), 2).s == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(chain_step(s, 3).step == 1);

    CHECK(select_digit(p, 0, 0.6) == 3);
    CHECK(select_digit(p, 0, 0.49) == 2);
    CHECK(select_digit(p, 0, 0.5) == 3);

    std::mt19937_64 rng(3);
    std::size_t hits = 0;
    const std::size_t draws = 1000000;
    for (std::size_t k = 0; k < draws; ++k) {
        if (select_digit(p, 0, uniform01(rng)) == 2) {
            ++hits;
        }
    }
    CHECK(static_cast<double>(hits) / draws == doctest::Approx(0.5).epsilon(0.004));
}

TEST_CASE("propagation")
{
    const ExpansionParams p(2);
    PropagationSettings small;
    small.digit_cap = 3;
    const auto d = chain_law(p, 0, 1, small);
    REQUIRE(d.atoms().size() == 2);
    CHECK(d.atoms()[0].position == 0);
    CHECK(d.atoms()[0].weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.atoms()[1].position == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(d.atoms()[1].weight == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(d.discarded_mass() == doctest::Approx(1.0 / 3).epsilon(1e-15));

    for (double t : {0.0, 0.35, 1.0}) {
        for (std::size_t n : {1, 2, 3, 4}) {
            const auto law = chain_law(p, t, n);
            CHECK(law.level() == n);
            CHECK(std::abs(law.atom_mass() + law.discarded_mass() - 1) <= 1e-12);
        }
    }

    // level one: atom at u_i(t) carries P_i(t)
    const auto one = chain_law(ExpansionParams(3), 0.2, 1);
    for (const auto &a : one.atoms()) {
        const auto i = static_cast<digit_t>(std::llround(3 / (1 - a.position) - 0.2));
        CHECK(a.weight == doctest::Approx(transition_prob(ExpansionParams(3), i, 0.2)).epsilon(1e-12));
    }

    PropagationSettings enclose;
    enclose.tail_mode = TailMode::enclose;
    const auto e = chain_law(p, 0, 2, enclose);
    CHECK(e.discarded_mass() <= 1e-9);
    CHECK(std::abs(e.atom_mass() + e.discarded_mass() - 1) <= 1e-12);

    CHECK(coarsen(chain_law(p, 0, 3), 1e-3).max_slack() <= 1e-3);
}

TEST_CASE("cdf enclosures")
{
    const ExpansionParams p(2);
    const auto zero = AtomicDistribution::point_mass(p, 0.5);
    CHECK(G_cdf(zero, 0.5).upper == 0);
    CHECK(G_cdf(zero, 0.500001).lower == 1);

    const auto d = chain_law(p, 0, 1, {.digit_cap = 100000});
    CHECK(G_cdf(d, 1.0 / 3).estimate == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(G_cdf(d, 1.0 / 3 + 1e-9).estimate == doctest::Approx(2.0 / 3).epsilon(1e-12));
    const auto top = G_cdf(d, 1);
    CHECK(top.upper == doctest::Approx(1).epsilon(1e-15));
    CHECK(top.lower <= 1);

    CHECK(F_cdf(d, 0).upper == 0);
    CHECK(F_cdf(d, 1).lower >= 1 - d.discarded_mass() - 1e-15);

    // F^0_{2,1}(x) = sum_{i >= 2} (1/(i-1) - 1/(x+i-1))
    const auto series = oracle::series([](double i) { return 1 / (i - 1) - 1 / (0.5 + i - 1); }, 2);
    const auto f = F_cdf(d, 0.5);
    CHECK(f.contains(series));
    CHECK(f.width() <= 1e-5);

    // level 0: F is the conditional cdf and F' its density
    for (double t : {0.0, 0.4, 1.0}) {
        const auto d0 = AtomicDistribution::point_mass(p, t);
        const ConditionalMeasure c(p, t);
        for (double x : {0.1, 0.5, 0.8}) {
            CHECK(F_cdf(d0, x).estimate == doctest::Approx(c.cdf(x)).epsilon(1e-14));
            CHECK(F_density(d0, x).estimate == doctest::Approx(c.density(x)).epsilon(1e-14));
        }
    }

    const auto d3 = chain_law(p, 0.25, 3);
    const auto h = 1e-5;
    for (double x : {0.1, 0.3, 0.6, 0.9}) {
        const auto fd = (F_cdf(d3, x + h).estimate - F_cdf(d3, x - h).estimate) / (2 * h);
        CHECK(std::abs(fd - F_density(d3, x).estimate) <= 1e-6);
        // the estimate leaves out the discarded mass, so only the bracket order is fixed
        CHECK(F_density(d3, x).lower <= F_density(d3, x).upper);
    }
}

TEST_CASE("bbl formula and block probabilities")
{
    const ExpansionParams p(2);
    CHECK(block_probability(p, 0, DigitBlock(p, {2})) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(block_probability(p, 1, DigitBlock(p, {2})) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(block_probability(p, 0, DigitBlock(p, {2, 2})) == doctest::Approx(0.25).epsilon(1e-15));

    const DigitBlock b(p, {2, 3});
    CHECK(verify_bbl(p, b, 0.3, 0) <= 1e-15);
    CHECK(verify_bbl(p, b, 0.3, 1) <= 1e-15);
    CHECK(verify_bbl(p, b, 0.3, 0.5) <= 1e-10);

    // block probability = conditional mass of the cylinder
    const ConditionalMeasure c(p, 0.3);
    CHECK(block_probability(p, 0.3, b) == doctest::Approx(c.mass(cylinder_interval(b))).epsilon(1e-12));

    CHECK(bbl_kernel(p, 0.5, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(bbl_density_kernel(p, 0.2, 1) == doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("simulation is deterministic")
{
    const ExpansionParams p(2);
    const auto a = simulate_chain(p, 0, 4, 5000, 7);
    const auto b = simulate_chain(p, 0, 4, 5000, 7);
    CHECK(a == b);
    CHECK(simulate_chain(p, 0, 4, 5000, 8) != a);

    const auto law = chain_law(p, 0, 4);
    CHECK(ks_distance_to_band(simulate_chain(p, 0, 4, 200000, 1), law) <= 0.005);
}

TEST_CASE("distribution json round trip")
{
    const ExpansionParams p(3);
    const auto d = chain_law(p, 0.2, 2);
    const auto back = distribution_from_json(to_json(d));
    CHECK(back.params() == d.params());
    CHECK(back.t() == d.t());
    CHECK(back.level() == d.level());
    CHECK(back.discarded_mass() == d.discarded_mass());
    REQUIRE(back.atoms().size() == d.atoms().size());
    for (std::size_t k = 0; k < d.atoms().size(); ++k) {
        CHECK(back.atoms()[k].position == d.atoms()[k].position);
        CHECK(back.atoms()[k].weight == d.atoms()[k].weight);
    }
}
