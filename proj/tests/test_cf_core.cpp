#include <doctest.h>

#include <renyi/cf_core.hpp>
#include <renyi/errors.hpp>

#include <cmath>
#include <random>

using namespace renyi;

TEST_CASE("parameters")
{
    CHECK_THROWS_AS(ExpansionParams(1), domain_error);
    for (int N : {2, 3, 7}) {
        CHECK(ExpansionParams(N).log_ratio() == doctest::Approx(std::log(N / (N - 1.0))).epsilon(1e-15));
    }
    const ExpansionParams p(2);
    CHECK_THROWS_AS(DigitBlock(p, {2, 1}), domain_error);
}

TEST_CASE("renyi map and first digit")
{
    const ExpansionParams p(2);
    CHECK(renyi_map(p, 0) == 0);
    CHECK(renyi_map(p, 0.5) == 0);
    CHECK(renyi_map(p, 0.3) == doctest::Approx(2 / 0.7 - 2).epsilon(1e-14));
    CHECK(renyi_map(p, 1) == 0);
    CHECK(first_digit(p, 0) == 2);
    CHECK(first_digit(p, 0.5) == 4);
    CHECK(first_digit(p, 0.3333333333) == 2);
    CHECK_THROWS_AS(first_digit(p, 1), infinite_digit_error);
    CHECK_THROWS_AS(renyi_map(p, -0.1), domain_error);
    CHECK_THROWS_AS(renyi_map(p, 1.5), domain_error);

    const ExpansionParams p3(3);
    CHECK(first_digit(p3, 0) == 3);
    CHECK(first_digit(p3, 0.5) == 6);
}

TEST_CASE("computed cylinder ends carry their own digit")
{
    for (int N : {2, 3, 5}) {
        const ExpansionParams p(N);
        for (digit_t i = N; i < 5000; ++i) {
            const auto lo = inverse_branch(p, i, 0);
            REQUIRE(first_digit(p, lo) == i);
            CHECK(renyi_map(p, lo) < 1e-9);
        }
    }
}

TEST_CASE("digits of a point")
{
    const ExpansionParams p(2);
    const auto zero = digits_of(p, 0, 5);
    CHECK(zero.block.digits() == std::vector<digit_t>{2, 2, 2, 2, 2});
    CHECK_FALSE(zero.truncated);

    // 1/2 = u_4(0): one digit, then the orbit sits at the fixed point 0
    const auto half = digits_of(p, 0.5, 3);
    CHECK(half.block.digits() == std::vector<digit_t>{4, 2, 2});

    CHECK_THROWS_AS(digits_of(p, 1, 3), domain_error);
    CHECK_THROWS_AS(digits_of(p, 0.5, 0), domain_error);
}

TEST_CASE("orbits reaching 1 are truncated")
{
    const ExpansionParams p(2);
    const auto e = digits_of(p, std::nextafter(1.0, 0.0), 5);
    CHECK(e.truncated);
    CHECK(e.block.size() == 0);
    // just left of 1/2 the digit is 3 and R(x) = 4 - 2/x sits within 1e-14 of 1
    const auto f = digits_of(p, 0.5 - 1.1e-15, 5);
    CHECK(f.truncated);
    CHECK(f.block.digits() == std::vector<digit_t>{3});
}

TEST_CASE("forward and backward evaluation")
{
    const ExpansionParams p(2);
    CHECK(eval_forward(DigitBlock(p, {3}), 0) == doctest::Approx(1.0 / 3));
    // u_2(u_3(0)) = 1 - 2 / (2 + 1/3) = 1/7
    CHECK(eval_forward(DigitBlock(p, {2, 3}), 0) == doctest::Approx(1.0 / 7).epsilon(1e-15));
    // backward: 1 - 2/(2 + 0) = 0, then 1 - 2/(3 + 0) = 1/3
    CHECK(eval_backward(DigitBlock(p, {2, 3}), 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(eval_backward(DigitBlock(p, {3, 2}), 1) == doctest::Approx(1 - 2 / (2 + 0.5)).epsilon(1e-15));
    // empty block returns the seed
    CHECK(eval_forward(DigitBlock(p), 0.25) == 0.25);
    CHECK(eval_backward(DigitBlock(p), 0.25) == 0.25);
}

TEST_CASE("cylinder intervals")
{
    const ExpansionParams p(2);
    const auto empty = cylinder_interval(DigitBlock(p));
    CHECK(empty.lo == 0);
    CHECK(empty.hi == 1);

    const auto c2 = cylinder_interval(DigitBlock(p, {2}));
    CHECK(c2.lo == 0);
    CHECK(c2.hi == doctest::Approx(1.0 / 3).epsilon(1e-15));

    const auto c7 = cylinder_interval(DigitBlock(p, {7}));
    CHECK(c7.lo == doctest::Approx(1 - 2.0 / 7).epsilon(1e-15));
    CHECK(c7.length() == doctest::Approx(2.0 / 7 - 2.0 / 8).epsilon(1e-14));

    // a short cylinder far from 0 keeps its length to within rounding of its ends
    std::vector<digit_t> three(3, 40);
    const auto d = cylinder_interval(DigitBlock(p, three));
    const auto f = forward_map(DigitBlock(p, three));
    CHECK(d.length() == doctest::Approx(f.difference(0, 1)).epsilon(1e-6));
    // deep cylinders are below double spacing as intervals, but the Moebius length is not
    const auto deep = forward_map(DigitBlock(p, std::vector<digit_t>(25, 40)));
    double product = 1;
    for (int k = 0; k < 25; ++k) {
        product *= 2.0 / (40 * 41);
    }
    CHECK(deep.difference(0, 1) > 0);
    CHECK(deep.difference(0, 1) >= product * 0.5);
}

TEST_CASE("moebius composition matches nested evaluation")
{
    const ExpansionParams p(3);
    const DigitBlock b(p, {3, 7, 4, 12, 5});
    const auto f = forward_map(b);
    for (double x : {0.0, 0.2, 0.7, 0.999}) {
        CHECK(f(x) == doctest::Approx(eval_forward(b, x)).epsilon(1e-14));
        const auto h = 1e-6;
        const auto fd = (eval_forward(b, std::min(x + h, 1.0)) - eval_forward(b, std::max(x - h, 0.0)))
                        / (std::min(x + h, 1.0) - std::max(x - h, 0.0));
        CHECK(f.derivative(x) == doctest::Approx(fd).epsilon(1e-5));
    }
    const auto g = compose(branch_map(p, 3), branch_map(p, 7));
    CHECK(g(0.4) == doctest::Approx(inverse_branch(p, 3, inverse_branch(p, 7, 0.4))).epsilon(1e-15));
}

TEST_CASE("round trip through digits")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int N : {2, 4}) {
        const ExpansionParams p(N);
        for (int k = 0; k < 200; ++k) {
            const auto x = u(rng);
            const auto e = digits_of(p, x, 30);
            CHECK(std::abs(eval_forward(e.block, e.remainder) - x) <= 1e-9);
            // every prefix cylinder contains x
            const auto I = cylinder_interval(DigitBlock(p, {e.block.digits().begin(), e.block.digits().begin() + 3}));
            CHECK(I.lo <= x);
            CHECK(x < I.hi);
        }
    }
}

TEST_CASE("natural extension")
{
    const ExpansionParams p(2);
    const auto a = extension_step(p, SquarePoint(0, 0));
    CHECK(a.x == 0);
    CHECK(a.y == 0);
    // the digit comes from x: u_2(0.5) = 1 - 2/2.5
    const auto b = extension_step(p, SquarePoint(0, 0.5));
    CHECK(b.x == 0);
    CHECK(b.y == doctest::Approx(0.2).epsilon(1e-15));
    // (0.5, 0) -> (R(0.5), u_4(0)) = (0, 1/2)
    const auto c = extension_step(p, SquarePoint(0.5, 0));
    CHECK(c.x == 0);
    CHECK(c.y == doctest::Approx(0.5));
    // 1/3 is the left end of the digit-3 cylinder: (R(1/3), u_3(1)) = (0, 1/2)
    const auto d = extension_step(p, SquarePoint(1.0 / 3, 1));
    CHECK(d.x == doctest::Approx(0).epsilon(1e-15));
    CHECK(d.y == doctest::Approx(0.5).epsilon(1e-15));
    const auto e = extension_inverse(p, SquarePoint(0, 0.5));
    CHECK(e.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.y == 0);

    for (double x : {0.1, 0.45, 0.8}) {
        for (double y : {0.05, 0.6, 0.9}) {
            const auto q = extension_inverse(p, extension_step(p, SquarePoint(x, y)));
            CHECK(q.x == doctest::Approx(x).epsilon(1e-12));
            CHECK(q.y == doctest::Approx(y).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(SquarePoint(1.2, 0), domain_error);
}
