#pragma once

#include <renyi/chain.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace renyi
{

// 2N - 1 - 2 sqrt(N(N-1)) = sup_x x(1-x)/(N-1+x).
double beta_const(const ExpansionParams &params);
double delta_const(const ExpansionParams &params);
// Contraction factor: 9 - 1/6 - 6 sqrt 2 for N = 2, beta_N + (N-1)/(N(N+1)) otherwise.
double rate_const(const ExpansionParams &params);

// int_0^theta |dP_{N,i+1}/ds| ds + P_{N,i+1}(theta); theta = 1 is the limit.
double beta_kernel(const ExpansionParams &params, digit_t i, double theta);
// Stationary point of P_{N,i+1}; requires i >= N + 1.
double theta_star(const ExpansionParams &params, digit_t i);
double sup_beta_kernel(const ExpansionParams &params);

struct KernelSearch {
    double value = 0;
    digit_t digit = 0;
    double theta = 0;
};

// Exhaustive maximum of beta_kernel over digits in [first, last] and a uniform
// theta grid on [0, 1] plus the clamped stationary points.
KernelSearch search_beta_kernel(const ExpansionParams &params, digit_t first, digit_t last,
                                std::size_t theta_points = 1001);

// sup_s |G^t_{N,n}(s) - G_N(s)|.
Enclosure alpha_sup(const AtomicDistribution &dist);

struct FSupSettings {
    std::size_t coarse_points = 1000;
    // atoms are merged into bins of this width before evaluating F
    double compress_width = 1.0 / 16384;
    double tolerance = 1e-8;
    // refinement also stops when the overshoot is below this share of upper - lower
    double gap_fraction = 0.05;
    std::size_t max_evaluations = 20000;
};

// sup_x |F^t_{N,n}(x) - G_N(x)|: grid search, then branch and bound on cells
// whose bounds enclose the x-derivative of each envelope of F.
Enclosure f_error_sup(const AtomicDistribution &dist, const FSupSettings &settings = {});

double g_bound(const ExpansionParams &params, std::size_t n);
double f_bound(const ExpansionParams &params, std::size_t n);

struct BoundsRow {
    double t = 0;
    std::size_t n = 0;
    Enclosure g_observed;
    double g_bound = 0;
    Enclosure f_observed;
    double f_bound = 0;
    double discarded_mass = 0;
    double signed_error = 0;
    // alpha_{n} <= rate * alpha_{n-1} within certified error; true for n = 1
    bool contraction_ok = true;

    bool g_violation() const noexcept
    {
        return g_observed.lower > g_bound;
    }
    bool f_violation() const noexcept
    {
        return f_observed.lower > f_bound;
    }
};

struct BoundsReport {
    ExpansionParams params;
    double beta = 0;
    double delta = 0;
    double rate = 0;
    std::vector<BoundsRow> rows;

    std::size_t g_violations() const noexcept;
    std::size_t f_violations() const noexcept;
    std::size_t contraction_violations() const noexcept;
};

struct BoundsSettings {
    PropagationSettings propagation = default_propagation();
    FSupSettings f_sup;

    static PropagationSettings default_propagation()
    {
        PropagationSettings p;
        p.tail_mode = TailMode::enclose;
        return p;
    }
};

BoundsReport verify_error_bounds(const ExpansionParams &params, std::span<const double> t_grid, std::size_t n_max,
                              const BoundsSettings &settings = {});

} // namespace renyi
