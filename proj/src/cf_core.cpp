#include <renyi/cf_core.hpp>
#include <renyi/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace renyi
{

namespace
{

void check_unit(double x, const char *what)
{
    if (!std::isfinite(x) || x < 0 || x > 1) {
        throw domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
    }
}

void check_digit(const ExpansionParams &params, digit_t i)
{
    if (i < params.N()) {
        throw domain_error("digit " + std::to_string(i) + " is below N = " + std::to_string(params.N()));
    }
}

struct Split {
    digit_t digit;
    double remainder;
};

// floor(N / (1 - x)) and the fractional part, for x in [0, 1). A quotient
// within rounding distance below an integer is rounded up, so the computed left
// end 1 - N/i of a cylinder gets digit i like the exact one. Near 1 the spacing
// of doubles alone moves the quotient by about eps v^2 / N.
Split split_unchecked(int N, double x)
{
    const auto v = N / (1 - x);
    auto q = std::floor(v);
    if (q + 1 - v <= 4 * std::numeric_limits<double>::epsilon() * v * std::max(1.0, v / N)) {
        q += 1;
    }
    if (q > 0x1p62) {
        throw domain_error("digit overflows the integer range");
    }
    return {static_cast<digit_t>(q), std::clamp(v - q, 0.0, std::nextafter(1.0, 0.0))};
}

digit_t digit_unchecked(int N, double x)
{
    return split_unchecked(N, x).digit;
}

} // namespace

ExpansionParams::ExpansionParams(int N) : N_(N), log_ratio_(0)
{
    if (N < 2) {
        throw domain_error("N must be at least 2, got " + std::to_string(N));
    }
    log_ratio_ = std::log1p(1.0 / (N - 1));
}

DigitBlock::DigitBlock(const ExpansionParams &params, std::vector<digit_t> digits)
    : params_(params), digits_(std::move(digits))
{
    for (auto d : digits_) {
        check_digit(params_, d);
    }
}

DigitBlock::DigitBlock(const ExpansionParams &params, std::initializer_list<digit_t> digits)
    : DigitBlock(params, std::vector<digit_t>(digits))
{
}

DigitBlock DigitBlock::appended(digit_t d) const
{
    check_digit(params_, d);
    auto out = *this;
    out.digits_.push_back(d);
    return out;
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
{
    check_unit(lo, "interval lower end");
    check_unit(hi, "interval upper end");
    if (lo > hi) {
        throw domain_error("interval with lo > hi");
    }
}

SquarePoint::SquarePoint(double x_, double y_) : x(x_), y(y_)
{
    check_unit(x, "x");
    check_unit(y, "y");
}

double renyi_map(const ExpansionParams &params, double x)
{
    check_unit(x, "x");
    if (x == 1) {
        return 0;
    }
    return split_unchecked(params.N(), x).remainder;
}

digit_t first_digit(const ExpansionParams &params, double x)
{
    check_unit(x, "x");
    if (x == 1) {
        throw infinite_digit_error();
    }
    return digit_unchecked(params.N(), x);
}

Expansion digits_of(const ExpansionParams &params, double x, std::size_t count)
{
    check_unit(x, "x");
    if (x == 1) {
        throw domain_error("digits_of requires x in [0, 1)");
    }
    if (count == 0) {
        throw domain_error("digit count must be positive");
    }
    std::vector<digit_t> digits;
    digits.reserve(count);
    bool truncated = false;
    for (std::size_t k = 0; k < count; ++k) {
        if (1 - x <= endpoint_tolerance) {
            truncated = true;
            break;
        }
        const auto sp = split_unchecked(params.N(), x);
        digits.push_back(sp.digit);
        x = sp.remainder;
    }
    return {DigitBlock(params, std::move(digits)), truncated, x};
}

double inverse_branch(const ExpansionParams &params, digit_t i, double x)
{
    check_digit(params, i);
    check_unit(x, "x");
    return 1 - params.N() / (x + static_cast<double>(i));
}

double eval_forward(const DigitBlock &block, double seed)
{
    check_unit(seed, "seed");
    const auto N = block.params().N();
    auto x = seed;
    for (auto it = block.digits().rbegin(); it != block.digits().rend(); ++it) {
        x = 1 - N / (x + static_cast<double>(*it));
    }
    return x;
}

double eval_backward(const DigitBlock &block, double seed)
{
    check_unit(seed, "seed");
    const auto N = block.params().N();
    auto s = seed;
    for (auto d : block) {
        s = 1 - N / (s + static_cast<double>(d));
    }
    return s;
}

Interval cylinder_interval(const DigitBlock &block)
{
    if (block.empty()) {
        return {0, 1};
    }
    const auto f = forward_map(block);
    const auto lo = eval_forward(block, 0);
    // the upper end via the exact length keeps adjacent cylinders consistent
    auto hi = std::fmin(1.0, lo + f.difference(0, 1));
    hi = std::fmax(hi, lo);
    return {lo, hi};
}

Moebius branch_map(const ExpansionParams &params, digit_t i)
{
    check_digit(params, i);
    const auto d = static_cast<double>(i);
    const double N = params.N();
    return {1, d - N, 1, d, N};
}

Moebius compose(const Moebius &f, const Moebius &g)
{
    Moebius m{f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d, f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d,
              f.det * g.det};
    // the map is invariant under scaling; keep entries in range for long blocks
    if (m.d > 0x1p200) {
        const auto scale = m.d;
        m.a /= scale;
        m.b /= scale;
        m.c /= scale;
        m.d /= scale;
        m.det /= scale * scale;
    }
    return m;
}

Moebius forward_map(const DigitBlock &block)
{
    Moebius m;
    for (auto it = block.digits().rbegin(); it != block.digits().rend(); ++it) {
        m = compose(branch_map(block.params(), *it), m);
    }
    return m;
}

SquarePoint extension_step(const ExpansionParams &params, const SquarePoint &p)
{
    const auto a = first_digit(params, p.x);
    return {renyi_map(params, p.x), inverse_branch(params, a, p.y)};
}

SquarePoint extension_inverse(const ExpansionParams &params, const SquarePoint &p)
{
    const auto a = first_digit(params, p.y);
    return {inverse_branch(params, a, p.x), renyi_map(params, p.y)};
}

} // namespace renyi
