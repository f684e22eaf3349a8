#include <renyi/errors.hpp>
#include <renyi/measures.hpp>

#include <cmath>
#include <string>

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

} // namespace

InvariantMeasure::InvariantMeasure(const ExpansionParams &params)
    : params_(params), normalizer_(1 / params.log_ratio())
{
}

double InvariantMeasure::cdf(double s) const
{
    check_unit(s, "s");
    if (s == 1) {
        return 1;
    }
    return std::log1p(s / (params_.N() - 1)) * normalizer_;
}

double InvariantMeasure::density(double x) const
{
    check_unit(x, "x");
    return normalizer_ / (x + params_.N() - 1);
}

double InvariantMeasure::mass(const Interval &a) const
{
    return std::log1p(a.length() / (a.lo + params_.N() - 1)) * normalizer_;
}

double InvariantMeasure::mass(const Moebius &f, double x0, double x1) const
{
    return std::log1p(f.difference(x0, x1) / (f(x0) + params_.N() - 1)) * normalizer_;
}

double InvariantMeasure::quantile(double p) const
{
    check_unit(p, "p");
    if (p == 1) {
        return 1;
    }
    return std::fmin(1.0, (params_.N() - 1) * std::expm1(p * params_.log_ratio()));
}

ConditionalMeasure::ConditionalMeasure(const ExpansionParams &params, double t) : params_(params), t_(t)
{
    check_unit(t, "t");
}

double ConditionalMeasure::cdf(double x) const
{
    check_unit(x, "x");
    const double N = params_.N();
    return N * x / (N - (1 - x) * (1 - t_));
}

double ConditionalMeasure::density(double x) const
{
    check_unit(x, "x");
    const double N = params_.N();
    const auto D = N - (1 - x) * (1 - t_);
    return N * (N - 1 + t_) / (D * D);
}

double ConditionalMeasure::mass(const Interval &a) const
{
    const double N = params_.N();
    const auto Dlo = N - (1 - a.lo) * (1 - t_);
    const auto Dhi = N - (1 - a.hi) * (1 - t_);
    return N * (N - 1 + t_) * a.length() / (Dlo * Dhi);
}

double ConditionalMeasure::mass(const Moebius &f, double x0, double x1) const
{
    const double N = params_.N();
    const auto Dlo = N - (1 - f(x0)) * (1 - t_);
    const auto Dhi = N - (1 - f(x1)) * (1 - t_);
    return N * (N - 1 + t_) * f.difference(x0, x1) / (Dlo * Dhi);
}

ExtendedMeasure::ExtendedMeasure(const ExpansionParams &params) : params_(params) {}

double ExtendedMeasure::rect(const Interval &a, const Interval &b) const
{
    // The corner sum of -log(N - (1-x)(1-y)) collapses to a single log1p,
    // which has no pole at y = 1 and no cancellation for thin rectangles.
    const double N = params_.N();
    const auto d0 = N - (1 - a.lo) * (1 - b.lo);
    const auto d1 = N - (1 - a.hi) * (1 - b.hi);
    return std::log1p(N * a.length() * b.length() / (d0 * d1)) / params_.log_ratio();
}

double hurwitz_zeta2(double a)
{
    if (!(a > 0) || !std::isfinite(a)) {
        throw domain_error("hurwitz_zeta2 requires a > 0");
    }
    constexpr int M = 50;
    // Euler-Maclaurin tail of sum_{n >= M} (n + a)^-2; the next term is 1/(30 z^9).
    const auto z = M + a;
    const auto iz = 1 / z;
    const auto iz2 = iz * iz;
    const auto iz5 = iz2 * iz2 * iz;
    auto sum = iz + iz2 / 2 + iz2 * iz / 6 - iz5 / 30 + iz5 * iz2 / 42;
    for (int n = M - 1; n >= 0; --n) {
        const auto v = n + a;
        sum += 1 / (v * v);
    }
    return sum;
}

} // namespace renyi
