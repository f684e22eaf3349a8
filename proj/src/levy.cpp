#include <renyi/errors.hpp>
#include <renyi/levy.hpp>
#include <renyi/measures.hpp>
#include <renyi/parallel.hpp>

#include "step_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace renyi
{

double beta_const(const ExpansionParams &params)
{
    const double N = params.N();
    return 1 / (2 * N - 1 + 2 * std::sqrt(N * (N - 1)));
}

double delta_const(const ExpansionParams &params)
{
    const double N = params.N();
    return 2 / (N + 1) - std::log1p(1 / (N * N - 1)) / params.log_ratio();
}

double rate_const(const ExpansionParams &params)
{
    const double N = params.N();
    if (params.N() == 2) {
        return 9 - 1.0 / 6 - 6 * std::sqrt(2.0);
    }
    return beta_const(params) + (N - 1) / (N * (N + 1));
}

namespace
{

// Stationary point of s -> P_{N,i+1}(s), valid for every i >= N.
double stationary_point(const ExpansionParams &params, digit_t i)
{
    const double N = params.N();
    const auto d = static_cast<double>(i) - N;
    return 1 - N + std::sqrt((d + 1) * (d + 2));
}

} // namespace

double beta_kernel(const ExpansionParams &params, digit_t i, double theta)
{
    if (i < params.N()) {
        throw domain_error("beta_kernel requires i >= N");
    }
    if (!(theta >= 0 && theta <= 1)) {
        throw domain_error("theta must lie in [0, 1]");
    }
    // P_{N,i+1} increases up to its stationary point and decreases after, so
    // the total variation on [0, theta] telescopes
    const auto peak = std::min(theta, std::max(stationary_point(params, i), 0.0));
    return 2 * transition_prob(params, i + 1, peak) - transition_prob(params, i + 1, 0);
}

double theta_star(const ExpansionParams &params, digit_t i)
{
    if (i <= params.N()) {
        throw domain_error("theta_star requires i >= N + 1");
    }
    return stationary_point(params, i);
}

double sup_beta_kernel(const ExpansionParams &params)
{
    const double N = params.N();
    if (params.N() == 2) {
        return 6 - 4 * std::sqrt(2.0) - 1.0 / 6;
    }
    return (N - 1) / (N * (N + 1));
}

KernelSearch search_beta_kernel(const ExpansionParams &params, digit_t first, digit_t last, std::size_t theta_points)
{
    if (first < params.N() || last < first || theta_points < 2) {
        throw domain_error("invalid beta_kernel search range");
    }
    KernelSearch best{-1, first, 0};
    auto consider = [&](digit_t i, double theta) {
        const auto v = beta_kernel(params, i, theta);
        if (v > best.value) {
            best = {v, i, theta};
        }
    };
    for (auto i = first; i <= last; ++i) {
        for (std::size_t k = 0; k < theta_points; ++k) {
            consider(i, static_cast<double>(k) / static_cast<double>(theta_points - 1));
        }
        consider(i, std::clamp(stationary_point(params, i), 0.0, 1.0));
    }
    return best;
}

Enclosure alpha_sup(const AtomicDistribution &dist)
{
    const InvariantMeasure rho(dist.params());
    std::vector<detail::StepEvent> events;
    events.reserve(3 * dist.atoms().size() + 2);
    for (const auto &a : dist.atoms()) {
        events.push_back({a.position, {a.weight, 0, 0}});
        if (a.slack > 0) {
            events.push_back({a.position + a.slack, {0, a.weight, 0}});
            events.push_back({a.position - a.slack, {0, 0, a.weight}});
        } else {
            events.push_back({a.position, {0, a.weight, a.weight}});
        }
    }
    // make sure both ends of [0, 1] are visited
    events.push_back({0, {0, 0, 0}});
    events.push_back({1, {0, 0, 0}});

    const auto e = dist.signed_error() / 2;
    Enclosure out{0, 0, 0};
    detail::sweep_steps(events, {0, -e, dist.discarded_mass() + e},
                        [&](double s, const std::array<double, 3> &c, bool right) {
                            if (s < 0 || s > 1 || (right && s == 1)) {
                                return;
                            }
                            const auto g = rho.cdf(s);
                            const auto lo = std::clamp(c[1], 0.0, 1.0);
                            const auto hi = std::clamp(c[2], 0.0, 1.0);
                            out.estimate = std::max(out.estimate, std::abs(c[0] - g));
                            out.lower = std::max({out.lower, lo - g, g - hi});
                            out.upper = std::max({out.upper, hi - g, g - lo});
                        });
    return out;
}

namespace
{

// Unclamped upper and lower envelopes of F at x, and of its x-derivative.
struct FPoint {
    double estimate, lo, hi, dlo, dhi;
};

FPoint f_point(const AtomicDistribution &law, double x)
{
    const auto &params = law.params();
    FPoint r{0, 0, 0, 0, 0};
    for (const auto &a : law.atoms()) {
        const auto w = a.weight;
        r.estimate += w * bbl_kernel(params, x, a.position);
        if (a.slack > 0) {
            // the kernel decreases in s, so the envelopes use the slack ends
            const auto s_lo = std::max(a.position - a.slack, 0.0);
            const auto s_hi = std::min(a.position + a.slack, 1.0);
            r.hi += w * bbl_kernel(params, x, s_lo);
            r.lo += w * bbl_kernel(params, x, s_hi);
            r.dhi += w * bbl_density_kernel(params, x, s_lo);
            r.dlo += w * bbl_density_kernel(params, x, s_hi);
        } else {
            const auto k = w * bbl_kernel(params, x, a.position);
            const auto d = w * bbl_density_kernel(params, x, a.position);
            r.hi += k;
            r.lo += k;
            r.dhi += d;
            r.dlo += d;
        }
    }
    return r;
}

// Largest value on [a, b] of a function with the given endpoint values whose
// derivative stays in [m, M].
double peak_bound(double a, double b, double ua, double ub, double m, double M)
{
    const auto w = b - a;
    if (M <= 0) {
        return ua;
    }
    if (m >= 0) {
        return ub;
    }
    const auto t = std::clamp((ub - ua - m * w) / (M - m), 0.0, w);
    return ua + M * t;
}

} // namespace

Enclosure f_error_sup(const AtomicDistribution &dist, const FSupSettings &settings)
{
    if (settings.coarse_points < 1) {
        throw domain_error("f_error_sup needs at least one grid cell");
    }
    const auto &params = dist.params();
    const InvariantMeasure rho(params);
    const auto &law = (settings.compress_width > 0 && dist.atoms().size() > 8192)
                          ? coarsen(dist, settings.compress_width)
                          : dist;
    const auto D = law.discarded_mass();
    const auto e = law.signed_error() / 2;

    Enclosure out{0, 0, 0};
    std::size_t evaluations = 0;

    // Values of phi1 = F_hi - G_N and phi2 = G_N - F_lo at x, plus the pieces
    // needed to bound their derivatives on a cell.
    struct Sample {
        double x, phi1, phi2, dhi, dlo;
    };
    auto sample = [&](double x) {
        ++evaluations;
        const auto p = f_point(law, x);
        const auto k0 = bbl_kernel(params, x, 0);
        const auto k1 = bbl_kernel(params, x, 1);
        const auto hi = p.hi + D * k0 + e * (k0 - k1);
        const auto lo = p.lo + D * k1 - e * (k0 - k1);
        const auto g = rho.cdf(x);
        out.estimate = std::max(out.estimate, std::abs(p.estimate - g));
        out.lower = std::max({out.lower, std::clamp(lo, 0.0, 1.0) - g, g - std::clamp(hi, 0.0, 1.0)});
        return Sample{x, hi - g, g - lo, p.dhi, p.dlo};
    };

    struct Cell {
        double bound;
        Sample a, b;
        bool operator<(const Cell &o) const
        {
            return bound < o.bound;
        }
    };
    // every density term decreases in x, so its values at the cell ends bound
    // it inside the cell; the signed error term mixes s = 0 and s = 1
    auto make_cell = [&](const Sample &a, const Sample &b) {
        const auto h = [&](double x, double s) { return bbl_density_kernel(params, x, s); };
        const auto nu_a = rho.density(a.x);
        const auto nu_b = rho.density(b.x);
        const auto dhi_min = b.dhi + D * h(b.x, 0) + e * (h(b.x, 0) - h(a.x, 1));
        const auto dhi_max = a.dhi + D * h(a.x, 0) + e * (h(a.x, 0) - h(b.x, 1));
        const auto dlo_min = b.dlo + D * h(b.x, 1) - e * (h(a.x, 0) - h(b.x, 1));
        const auto dlo_max = a.dlo + D * h(a.x, 1) - e * (h(b.x, 0) - h(a.x, 1));
        const auto p1 = peak_bound(a.x, b.x, a.phi1, b.phi1, dhi_min - nu_a, dhi_max - nu_b);
        const auto p2 = peak_bound(a.x, b.x, a.phi2, b.phi2, nu_b - dlo_max, nu_a - dlo_min);
        return Cell{std::max(p1, p2), a, b};
    };

    std::priority_queue<Cell> cells;
    const auto m = settings.coarse_points;
    auto sa = sample(0.0);
    for (std::size_t k = 1; k <= m; ++k) {
        const auto sb = sample(static_cast<double>(k) / static_cast<double>(m));
        cells.push(make_cell(sa, sb));
        sa = sb;
    }
    // the top cell carries the largest bound; stop once its overshoot over the
    // sampled values is small next to the tolerance or the lower/upper gap
    while (evaluations < settings.max_evaluations) {
        const auto &c = cells.top();
        const auto sampled = std::max({c.a.phi1, c.a.phi2, c.b.phi1, c.b.phi2});
        const auto tol = std::max(settings.tolerance, settings.gap_fraction * (c.bound - out.lower));
        if (c.bound - sampled <= tol || c.b.x - c.a.x < 1e-12) {
            break;
        }
        const auto a = c.a;
        const auto b = c.b;
        cells.pop();
        const auto mid = sample((a.x + b.x) / 2);
        cells.push(make_cell(a, mid));
        cells.push(make_cell(mid, b));
    }
    out.upper = std::clamp(cells.top().bound, out.lower, 1.0);
    return out;
}

double g_bound(const ExpansionParams &params, std::size_t n)
{
    if (n < 1) {
        throw domain_error("bounds are stated for n >= 1");
    }
    return delta_const(params) * std::pow(rate_const(params), static_cast<double>(n - 1));
}

double f_bound(const ExpansionParams &params, std::size_t n)
{
    return beta_const(params) * g_bound(params, n);
}

std::size_t BoundsReport::g_violations() const noexcept
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto &r) { return r.g_violation(); }));
}

std::size_t BoundsReport::f_violations() const noexcept
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto &r) { return r.f_violation(); }));
}

std::size_t BoundsReport::contraction_violations() const noexcept
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto &r) { return !r.contraction_ok; }));
}

BoundsReport verify_error_bounds(const ExpansionParams &params, std::span<const double> t_grid, std::size_t n_max,
                              const BoundsSettings &settings)
{
    if (n_max < 1) {
        throw domain_error("n_max must be at least 1");
    }
    BoundsReport report{params, beta_const(params), delta_const(params), rate_const(params), {}};
    std::vector<std::vector<BoundsRow>> per_t(t_grid.size());
    parallel_for(t_grid.size(), [&](std::size_t k) {
        const auto t = t_grid[k];
        auto dist = AtomicDistribution::point_mass(params, t);
        Enclosure previous{};
        for (std::size_t n = 1; n <= n_max; ++n) {
            dist = propagate(dist, settings.propagation);
            BoundsRow row;
            row.t = t;
            row.n = n;
            row.g_observed = alpha_sup(dist);
            row.g_bound = g_bound(params, n);
            row.f_observed = f_error_sup(dist, settings.f_sup);
            row.f_bound = f_bound(params, n);
            row.discarded_mass = dist.discarded_mass();
            row.signed_error = dist.signed_error();
            if (n > 1) {
                row.contraction_ok = row.g_observed.lower <= report.rate * previous.upper;
            }
            previous = row.g_observed;
            per_t[k].push_back(row);
        }
    });
    for (auto &rows : per_t) {
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    return report;
}

} // namespace renyi
