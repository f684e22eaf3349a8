#pragma once

#include <renyi/cf_core.hpp>

namespace renyi
{

// rho_N: density nu_N(x) = 1 / (log(N/(N-1)) (x + N - 1)).
class InvariantMeasure
{
public:
    explicit InvariantMeasure(const ExpansionParams &params);

    const ExpansionParams &params() const noexcept
    {
        return params_;
    }
    double normalizer() const noexcept
    {
        return normalizer_;
    }

    // G_N(s) = rho_N([0, s]).
    double cdf(double s) const;
    double density(double x) const;
    double mass(const Interval &a) const;
    // Mass of the image f([x0, x1)) of a Moebius map; accurate for tiny images.
    double mass(const Moebius &f, double x0 = 0, double x1 = 1) const;
    // Inverse of cdf.
    double quantile(double p) const;

private:
    ExpansionParams params_;
    double normalizer_;
};

// rho^t_N with cdf N x / (N - (1-x)(1-t)).
class ConditionalMeasure
{
public:
    ConditionalMeasure(const ExpansionParams &params, double t);

    const ExpansionParams &params() const noexcept
    {
        return params_;
    }
    double t() const noexcept
    {
        return t_;
    }

    double cdf(double x) const;
    double density(double x) const;
    double mass(const Interval &a) const;
    // rho^t_N(f([x0, x1))) computed from the exact image length.
    double mass(const Moebius &f, double x0, double x1) const;

private:
    ExpansionParams params_;
    double t_;
};

// rho-bar_N on the unit square.
class ExtendedMeasure
{
public:
    explicit ExtendedMeasure(const ExpansionParams &params);

    const ExpansionParams &params() const noexcept
    {
        return params_;
    }

    double rect(const Interval &a, const Interval &b) const;

private:
    ExpansionParams params_;
};

// sum_{n >= 0} 1 / (n + a)^2.
double hurwitz_zeta2(double a);

} // namespace renyi
