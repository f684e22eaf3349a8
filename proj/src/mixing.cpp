#include <renyi/errors.hpp>
#include <renyi/levy.hpp>
#include <renyi/measures.hpp>
#include <renyi/mixing.hpp>
#include <renyi/parallel.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace renyi
{

double epsilon1_exact(const ExpansionParams &params)
{
    return params.N() * params.log_ratio() - 1;
}

Epsilon2Branches epsilon2_branches(const ExpansionParams &params)
{
    const double N = params.N();
    const auto L = params.log_ratio();
    const auto zN = hurwitz_zeta2(N);
    const auto zN1 = hurwitz_zeta2(N + 1);
    return {std::abs((1 + (N - 1) * (N - 1) * zN) * L - 1), std::abs((1 + N * N * zN1 - N * zN) * L - 1)};
}

double epsilon2_exact(const ExpansionParams &params)
{
    const auto b = epsilon2_branches(params);
    return std::max(b.upper, b.lower);
}

double K_const(const ExpansionParams &params)
{
    const double N = params.N();
    return N + N * N * N / ((N - 1) * (N - 1))
           - (N - 1) * ((2 * N - 1) * N / ((N - 1) * (N - 1) + N * N) + (2 * N + 1) / (2 * N));
}

namespace
{

// L K delta c^e
double lkd_power(const ExpansionParams &params, double e)
{
    return params.log_ratio() * K_const(params) * delta_const(params) * std::pow(rate_const(params), e);
}

double epsilon_value(const ExpansionParams &params, std::size_t n)
{
    if (n == 1) {
        return epsilon1_exact(params);
    }
    if (n == 2) {
        return epsilon2_exact(params);
    }
    return epsilon_bound(params, n).value;
}

// q(x, s) = L (N-1+x) h(x, s), the density ratio dF/dnu for a chain at s.
// Bound on |dq/dx| over the box [x0, x1] x [s0, s1]; q is symmetric, so the
// s-derivative bound is obtained by swapping the arguments.
double dq_dx_bound(const ExpansionParams &params, double x0, double x1, double s0, double s1)
{
    const double N = params.N();
    const auto L = params.log_ratio();
    constexpr int pieces = 32;
    double best = 0;
    for (int k = 0; k < pieces; ++k) {
        const auto a = s0 + (s1 - s0) * k / pieces;
        const auto b = s0 + (s1 - s0) * (k + 1) / pieces;
        // N - (1-s)(2N-1+x) is bilinear, so its extremes sit at the corners
        double num = 0;
        for (auto s : {a, b}) {
            for (auto x : {x0, x1}) {
                num = std::max(num, std::abs(N - (1 - s) * (2 * N - 1 + x)));
            }
        }
        const auto D = N - (1 - x0) * (1 - a);
        best = std::max(best, L * N * (N - 1 + b) * num / (D * D * D));
    }
    return best;
}

void check_grid(std::span<const double> grid, const char *what)
{
    if (grid.size() < 2) {
        throw domain_error(std::string(what) + " needs at least 2 points");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0 && grid[k] <= 1) || (k > 0 && !(grid[k] > grid[k - 1]))) {
            throw domain_error(std::string(what) + " must be increasing inside [0, 1]");
        }
    }
}

} // namespace

BoundValue epsilon_bound(const ExpansionParams &params, std::size_t n)
{
    if (n < 2) {
        throw domain_error("epsilon_bound is stated for n >= 2");
    }
    const auto e = static_cast<double>(params.N() == 2 ? n - 2 : n - 1);
    const auto v = lkd_power(params, e);
    return {v, v > 1};
}

LatticeEstimate epsilon_prime_estimate(const ExpansionParams &params, std::size_t n, std::span<const double> t_grid,
                                       std::span<const double> x_grid, const EpsilonSettings &settings)
{
    if (n < 1) {
        throw domain_error("epsilon' is defined for n >= 1");
    }
    check_grid(t_grid, "t grid");
    check_grid(x_grid, "x grid");
    const double N = params.N();
    const auto L = params.log_ratio();
    const auto nt = t_grid.size();
    const auto nx = x_grid.size();

    // upper bound of |ratio - 1| at each lattice point, plus estimates
    std::vector<double> upper(nt * nx), estimate(nt * nx), lower(nt * nx);
    parallel_for(nt, [&](std::size_t j) {
        auto law = chain_law(params, t_grid[j], n - 1, settings.propagation);
        if (settings.compress_width > 0 && law.atoms().size() > 8192) {
            law = coarsen(law, settings.compress_width);
        }
        for (std::size_t k = 0; k < nx; ++k) {
            const auto x = x_grid[k];
            const auto f = F_density(law, x);
            const auto scale = L * (N - 1 + x);
            const auto lo = f.lower * scale - 1;
            const auto hi = f.upper * scale - 1;
            upper[j * nx + k] = std::max(std::abs(lo), std::abs(hi));
            lower[j * nx + k] = std::max({lo, -hi, 0.0});
            estimate[j * nx + k] = std::abs(f.estimate * scale - 1);
        }
    });

    LatticeEstimate out;
    out.estimate = -1;
    for (std::size_t j = 0; j < nt; ++j) {
        for (std::size_t k = 0; k < nx; ++k) {
            const auto v = estimate[j * nx + k];
            if (v > out.estimate) {
                out.estimate = v;
                out.argmax_t = t_grid[j];
                out.argmax_x = x_grid[k];
            }
            out.lower = std::max(out.lower, lower[j * nx + k]);
        }
    }

    // off-lattice control: |phi(t,x) - phi(corner)| <= Lx |dx| + Lt |dt|
    const auto decay = std::pow(1 / N, static_cast<double>(n - 1));
    double cell_max = out.estimate;
    for (std::size_t j = 0; j + 1 < nt; ++j) {
        const auto t0 = t_grid[j], t1 = t_grid[j + 1];
        for (std::size_t k = 0; k + 1 < nx; ++k) {
            const auto x0 = x_grid[k], x1 = x_grid[k + 1];
            double lx, lt;
            if (n == 1) {
                // the level-0 law is the point mass at t
                lx = dq_dx_bound(params, x0, x1, t0, t1);
                lt = dq_dx_bound(params, t0, t1, x0, x1);
            } else {
                // weights move with t by total variation <= 1/(2(N-1)) and q
                // oscillates by at most L in s; positions move by <= N^{-(n-1)} |dt|
                lx = dq_dx_bound(params, x0, x1, 0, 1);
                lt = L / (4 * (N - 1)) + decay * dq_dx_bound(params, 0, 1, x0, x1);
            }
            const auto corners = std::max({upper[j * nx + k], upper[j * nx + k + 1], upper[(j + 1) * nx + k],
                                           upper[(j + 1) * nx + k + 1]});
            cell_max = std::max(cell_max, corners + (lx * (x1 - x0) + lt * (t1 - t0)) / 2);
        }
    }
    out.slack = cell_max - out.estimate;
    return out;
}

BoundValue psi_t_bound(const ExpansionParams &params, std::size_t n)
{
    if (n < 1) {
        throw domain_error("psi bounds are stated for n >= 1");
    }
    const auto a = epsilon_value(params, n);
    const auto b = epsilon_value(params, n + 1);
    if (b >= 1) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {(a + b) / (1 - b), false};
}

BoundValue psi_t_bound_closed(const ExpansionParams &params, std::size_t n)
{
    if (n < 2) {
        throw domain_error("the closed psi^t form is stated for n >= 2");
    }
    const auto c = rate_const(params);
    const auto den = 1 - lkd_power(params, static_cast<double>(n - 1));
    if (den <= 0) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {lkd_power(params, static_cast<double>(n - 2)) * (1 + c) / den, false};
}

std::string to_string(ValueKind kind)
{
    switch (kind) {
        case ValueKind::exact:
            return "exact";
        case ValueKind::estimate:
            return "estimate";
        case ValueKind::bound:
            return "bound";
    }
    return "unknown";
}

PsiValue psi_rho_value(const ExpansionParams &params, std::size_t n)
{
    if (n < 1) {
        throw domain_error("psi is defined for n >= 1");
    }
    if (n <= 2) {
        return {epsilon_value(params, n), ValueKind::exact, false};
    }
    const auto v = lkd_power(params, static_cast<double>(n - 2));
    return {v, ValueKind::bound, v > 1};
}

namespace
{

std::vector<std::vector<digit_t>> all_blocks(const ExpansionParams &params, std::size_t len, digit_t cap)
{
    std::vector<std::vector<digit_t>> out{{}};
    for (std::size_t k = 0; k < len; ++k) {
        std::vector<std::vector<digit_t>> next;
        next.reserve(out.size() * static_cast<std::size_t>(cap - params.N() + 1));
        for (const auto &b : out) {
            for (digit_t d = params.N(); d <= cap; ++d) {
                next.push_back(b);
                next.back().push_back(d);
            }
        }
        out = std::move(next);
    }
    return out;
}

Moebius block_map(const ExpansionParams &params, const std::vector<digit_t> &digits)
{
    return forward_map(DigitBlock(params, digits));
}

double checked_mass(const InvariantMeasure &rho, const Moebius &f, double x0 = 0, double x1 = 1)
{
    const auto m = rho.mass(f, x0, x1);
    if (m < 1e-300) {
        throw degenerate_cylinder_error("cylinder mass underflows");
    }
    return m;
}

} // namespace

BruteForceResult psi_bruteforce(const ExpansionParams &params, std::size_t n, std::size_t k, std::size_t l,
                                digit_t digit_cap)
{
    if (n < 1 || k < 1 || l < 1) {
        throw domain_error("psi_bruteforce requires n, k, l >= 1");
    }
    if (digit_cap < params.N()) {
        throw domain_error("digit cap must be at least N");
    }
    const InvariantMeasure rho(params);
    const double N = params.N();
    const auto past = all_blocks(params, k, digit_cap);
    const auto future = all_blocks(params, l, digit_cap);
    const auto middle = all_blocks(params, n - 1, digit_cap);

    std::vector<Moebius> future_maps;
    std::vector<double> future_mass, future_length;
    for (const auto &j : future) {
        future_maps.push_back(block_map(params, j));
        future_mass.push_back(checked_mass(rho, future_maps.back()));
        future_length.push_back(future_maps.back().difference(0, 1));
    }

    struct PastResult {
        double lower = 0, upper = 0, gap = 0;
        std::size_t arg = 0;
    };
    std::vector<PastResult> results(past.size());
    parallel_for(past.size(), [&](std::size_t ai) {
        const auto fa = block_map(params, past[ai]);
        const auto mass_a = checked_mass(rho, fa);
        std::vector<double> joint(future.size(), 0.0);
        double covered = 0;
        for (const auto &m : middle) {
            const auto fam = compose(fa, block_map(params, m));
            if (n > 1) {
                covered += checked_mass(rho, fam);
            }
            for (std::size_t bj = 0; bj < future.size(); ++bj) {
                joint[bj] += checked_mass(rho, compose(fam, future_maps[bj]));
            }
        }

        // enclosure of the joint mass with an intermediate digit above the cap
        std::vector<double> gap_lo(future.size(), 0.0), gap_hi(future.size(), 0.0);
        auto &res = results[ai];
        if (n == 2) {
            // I(a, m) for m > M is fa([u_{M+1}(0), 1)); inside each, the share of
            // I(a, m, j) is lambda(I(j)) up to the distortion of fa o u_m, which
            // is largest for m = M + 1
            const auto x0 = 1 - N / (static_cast<double>(digit_cap) + 1);
            const auto tail = rho.mass(fa, x0, 1);
            const auto g = compose(fa, branch_map(params, digit_cap + 1));
            const auto slope = (g.c + g.d) / g.d;
            const auto distortion = slope * slope * (g(1) + N - 1) / (g(0) + N - 1);
            for (std::size_t bj = 0; bj < future.size(); ++bj) {
                gap_lo[bj] = future_length[bj] * tail / distortion;
                gap_hi[bj] = future_length[bj] * tail * distortion;
            }
            res.gap = tail;
        } else if (n > 2) {
            const auto rest = std::max(0.0, mass_a - covered);
            std::fill(gap_hi.begin(), gap_hi.end(), rest);
            res.gap = rest;
        }

        res.lower = 0;
        res.upper = 0;
        for (std::size_t bj = 0; bj < future.size(); ++bj) {
            const auto den = mass_a * future_mass[bj];
            const auto r_lo = (joint[bj] + gap_lo[bj]) / den - 1;
            const auto r_hi = (joint[bj] + gap_hi[bj]) / den - 1;
            const auto lo = std::max({r_lo, -r_hi, 0.0});
            if (lo > res.lower) {
                res.lower = lo;
                res.arg = bj;
            }
            res.upper = std::max({res.upper, std::abs(r_lo), std::abs(r_hi)});
        }
    });

    BruteForceResult out;
    out.estimate = -1;
    for (std::size_t ai = 0; ai < past.size(); ++ai) {
        const auto &r = results[ai];
        out.gap_mass += r.gap;
        out.upper = std::max(out.upper, r.upper);
        if (r.lower > out.estimate) {
            out.estimate = r.lower;
            out.arg_past = past[ai];
            out.arg_future = future[r.arg];
        }
    }
    return out;
}

double extended_mass_quadrature(const ExpansionParams &params, std::size_t n, const Interval &a0, const Interval &b,
                                const ExtendedSettings &settings)
{
    if (n < 1) {
        throw domain_error("n must be at least 1");
    }
    if (b.length() == 0 || a0.length() == 0) {
        return 0;
    }
    const InvariantMeasure rho(params);
    PropagationSettings prop;
    prop.digit_cap = settings.digit_cap;
    prop.weight_floor = 0;
    prop.bin_width = 0;
    prop.merge_tolerance = 0;

    auto integrand = [&](double u) {
        u = std::clamp(u, 0.0, 1.0);
        double cond;
        if (n == 1) {
            cond = ConditionalMeasure(params, u).mass(a0);
        } else {
            const auto law = chain_law(params, u, n - 1, prop);
            cond = 0;
            for (const auto &atom : law.atoms()) {
                cond += atom.weight
                        * (bbl_kernel(params, a0.hi, atom.position) - bbl_kernel(params, a0.lo, atom.position));
            }
        }
        return cond * rho.density(u);
    };
    double error = 0;
    const auto value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, b.lo, b.hi, settings.max_depth, settings.tolerance, &error);
    if (!(error <= std::max(1e-9 * std::abs(value), 1e-12))) {
        throw quadrature_error("extended-measure quadrature did not converge (error estimate "
                               + std::to_string(error) + ")");
    }
    return value;
}

double extended_mass_cylinders(const ExpansionParams &params, std::size_t n, const Interval &a0, const Interval &b,
                               digit_t digit_cap)
{
    if (n < 1) {
        throw domain_error("n must be at least 1");
    }
    const ExtendedMeasure bar(params);
    double total = 0;
    for (const auto &block : all_blocks(params, n - 1, digit_cap)) {
        const auto f = block_map(params, block);
        const auto lo = f(a0.lo);
        const auto hi = std::max(lo, std::min(1.0, lo + f.difference(a0.lo, a0.hi)));
        total += bar.rect(Interval(lo, hi), b);
    }
    return total;
}

double psi_extended_estimate(const ExpansionParams &params, std::size_t n, std::span<const Interval> future,
                             std::span<const Interval> past, const ExtendedSettings &settings)
{
    const InvariantMeasure rho(params);
    const Interval whole(0, 1);
    std::vector<double> best(future.size(), 0.0);
    parallel_for(future.size(), [&](std::size_t ai) {
        const auto &a0 = future[ai];
        // rho_N of the truncated event, from the same quadrature
        const auto mass_a = extended_mass_quadrature(params, n, a0, whole, settings);
        if (!(mass_a > 0)) {
            return;
        }
        for (const auto &b : past) {
            const auto mass_b = rho.mass(b);
            if (!(mass_b > 0)) {
                continue;
            }
            const auto joint = extended_mass_quadrature(params, n, a0, b, settings);
            best[ai] = std::max(best[ai], std::abs(joint / (mass_a * mass_b) - 1));
        }
    });
    double out = 0;
    for (auto v : best) {
        out = std::max(out, v);
    }
    return out;
}

std::vector<double> uniform_grid(std::size_t points)
{
    if (points < 2) {
        throw domain_error("grids need at least 2 points");
    }
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k) {
        g[k] = static_cast<double>(k) / static_cast<double>(points - 1);
    }
    return g;
}

MixingReport build_mixing_report(const ExpansionParams &params, const MixingSettings &settings)
{
    if (settings.n_max < 1) {
        throw domain_error("n_max must be at least 1");
    }
    MixingReport report{params, K_const(params), {}, {}};
    auto &rows = report.rows;
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };

    rows.push_back({"K", 0, ValueKind::exact, report.K, 0, false});
    const double exact[] = {epsilon1_exact(params), epsilon2_exact(params)};
    for (std::size_t n = 1; n <= 2; ++n) {
        rows.push_back({"epsilon", n, ValueKind::exact, exact[n - 1], 0, false});
    }

    const auto tg = uniform_grid(settings.t_points);
    const auto xg = uniform_grid(settings.x_points);
    std::vector<LatticeEstimate> est;
    for (std::size_t n = 1; n <= settings.n_max; ++n) {
        est.push_back(epsilon_prime_estimate(params, n, tg, xg, settings.epsilon));
        rows.push_back({"epsilon", n, ValueKind::estimate, est.back().estimate, est.back().slack, false});
        if (n <= 2) {
            const auto e = exact[n - 1];
            if (e < est.back().lower - 1e-12 || e > est.back().estimate + est.back().slack + 1e-12) {
                report.violations.push_back("epsilon estimate at n=" + std::to_string(n) + " does not bracket "
                                            + fmt(e));
            }
        }
        if (n >= 2) {
            const auto &prev = est[n - 2];
            if (est.back().lower > prev.estimate + prev.slack) {
                report.violations.push_back("epsilon estimates increase from n=" + std::to_string(n - 1) + " to n="
                                            + std::to_string(n));
            }
        }
    }
    for (std::size_t n = 2; n <= settings.n_max; ++n) {
        const auto b = epsilon_bound(params, n);
        rows.push_back({"epsilon", n, ValueKind::bound, b.value, 0, b.vacuous});
        if (est[n - 1].lower > b.value) {
            report.violations.push_back("epsilon estimate at n=" + std::to_string(n) + " exceeds the bound "
                                        + fmt(b.value));
        }
        if (n == 2 && exact[1] > b.value) {
            report.violations.push_back("exact epsilon at n=2 exceeds the bound " + fmt(b.value));
        }
    }
    for (std::size_t n = 1; n <= settings.n_max; ++n) {
        const auto b = psi_t_bound(params, n);
        rows.push_back({"psi_t", n, ValueKind::bound, b.value, 0, b.vacuous});
    }
    for (std::size_t n = 1; n <= settings.n_max; ++n) {
        const auto v = psi_rho_value(params, n);
        rows.push_back({"psi_rho", n, v.kind, v.value, 0, v.vacuous});
    }
    if (settings.bruteforce_cap >= params.N()) {
        for (std::size_t n = 1; n <= std::min<std::size_t>(2, settings.n_max); ++n) {
            const auto bf = psi_bruteforce(params, n, 1, 1, settings.bruteforce_cap);
            rows.push_back({"psi_bruteforce", n, ValueKind::estimate, bf.estimate, bf.upper - bf.estimate, false});
            if (bf.estimate > exact[n - 1] + 1e-9) {
                report.violations.push_back("brute-force psi at n=" + std::to_string(n) + " exceeds the exact value");
            }
        }
    }
    return report;
}

} // namespace renyi
