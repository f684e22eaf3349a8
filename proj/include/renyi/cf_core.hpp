#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace renyi
{

using digit_t = std::int64_t;

// Iterates closer than this to 1 are treated as hitting the endpoint x = 1.
inline constexpr double endpoint_tolerance = 1e-14;

class ExpansionParams
{
public:
    explicit ExpansionParams(int N);

    int N() const noexcept
    {
        return N_;
    }
    // log(N/(N-1)), computed without cancellation.
    double log_ratio() const noexcept
    {
        return log_ratio_;
    }

    friend bool operator==(const ExpansionParams &, const ExpansionParams &) = default;

private:
    int N_;
    double log_ratio_;
};

class DigitBlock
{
public:
    explicit DigitBlock(const ExpansionParams &params, std::vector<digit_t> digits = {});
    DigitBlock(const ExpansionParams &params, std::initializer_list<digit_t> digits);

    const ExpansionParams &params() const noexcept
    {
        return params_;
    }
    const std::vector<digit_t> &digits() const noexcept
    {
        return digits_;
    }
    std::size_t size() const noexcept
    {
        return digits_.size();
    }
    bool empty() const noexcept
    {
        return digits_.empty();
    }
    digit_t operator[](std::size_t k) const
    {
        return digits_[k];
    }
    auto begin() const noexcept
    {
        return digits_.begin();
    }
    auto end() const noexcept
    {
        return digits_.end();
    }

    DigitBlock appended(digit_t d) const;

    friend bool operator==(const DigitBlock &, const DigitBlock &) = default;

private:
    ExpansionParams params_;
    std::vector<digit_t> digits_;
};

// Half-open [lo, hi) inside [0, 1].
struct Interval {
    double lo = 0;
    double hi = 1;

    Interval() = default;
    Interval(double lo, double hi);

    double length() const noexcept
    {
        return hi - lo;
    }
    bool contains(double x) const noexcept
    {
        return lo <= x && x < hi;
    }
};

struct SquarePoint {
    double x = 0;
    double y = 0;

    SquarePoint() = default;
    SquarePoint(double x, double y);
};

struct Expansion {
    DigitBlock block;
    // Set when an iterate reached 1 (within endpoint_tolerance) before `count` digits.
    bool truncated = false;
    // R_N^k(x) after the k digits that were produced.
    double remainder = 0;
};

// x -> (a x + b) / (c x + d) with nonnegative c, d and determinant a d - b c > 0.
struct Moebius {
    double a = 1, b = 0, c = 0, d = 1;
    double det = 1;

    double operator()(double x) const noexcept
    {
        return (a * x + b) / (c * x + d);
    }
    // f(x1) - f(x0) without cancellation.
    double difference(double x0, double x1) const noexcept
    {
        return det * (x1 - x0) / ((c * x1 + d) * (c * x0 + d));
    }
    double derivative(double x) const noexcept
    {
        const auto q = c * x + d;
        return det / (q * q);
    }
};

double renyi_map(const ExpansionParams &params, double x);
digit_t first_digit(const ExpansionParams &params, double x);
Expansion digits_of(const ExpansionParams &params, double x, std::size_t count);
double inverse_branch(const ExpansionParams &params, digit_t i, double x);

double eval_forward(const DigitBlock &block, double seed);
double eval_backward(const DigitBlock &block, double seed);
Interval cylinder_interval(const DigitBlock &block);

// u_{N,i} as a Moebius map.
Moebius branch_map(const ExpansionParams &params, digit_t i);
// f o g
Moebius compose(const Moebius &f, const Moebius &g);
// The composition u_{a_1} o ... o u_{a_n} as a single Moebius map.
Moebius forward_map(const DigitBlock &block);

SquarePoint extension_step(const ExpansionParams &params, const SquarePoint &p);
SquarePoint extension_inverse(const ExpansionParams &params, const SquarePoint &p);

} // namespace renyi
