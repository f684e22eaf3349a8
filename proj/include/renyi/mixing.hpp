#pragma once

#include <renyi/chain.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace renyi
{

double epsilon1_exact(const ExpansionParams &params);

struct Epsilon2Branches {
    // |(1 + (N-1)^2 zeta(2,N)) L - 1|
    double upper = 0;
    // |(1 + N^2 zeta(2,N+1) - N zeta(2,N)) L - 1|
    double lower = 0;
};

Epsilon2Branches epsilon2_branches(const ExpansionParams &params);
double epsilon2_exact(const ExpansionParams &params);
double K_const(const ExpansionParams &params);

struct BoundValue {
    double value = 0;
    bool vacuous = false;
};

// Upper bound on epsilon_{N,n}, n >= 2.
BoundValue epsilon_bound(const ExpansionParams &params, std::size_t n);

struct EpsilonSettings {
    PropagationSettings propagation = default_propagation();
    // atoms are merged into bins of this width before evaluating densities
    double compress_width = 1.0 / 4096;

    static PropagationSettings default_propagation()
    {
        PropagationSettings p;
        p.tail_mode = TailMode::enclose;
        // the pruned mass is enclosed in the density bounds; halves the cost at n = 4
        p.weight_floor = 1e-11;
        return p;
    }
};

struct LatticeEstimate {
    // max over the lattice of |F' / nu_N - 1| at atom positions
    double estimate = 0;
    // certified: sup over the covered square <= estimate + slack
    double slack = 0;
    // certified lower bound of the sup
    double lower = 0;
    double argmax_t = 0;
    double argmax_x = 0;
};

// Lattice maximum of |dF^t_{N,n-1}/dx / nu_N - 1|. Grids must be increasing;
// the slack covers the rectangle [t_grid.front(), t_grid.back()] x [x_grid.front(), x_grid.back()].
LatticeEstimate epsilon_prime_estimate(const ExpansionParams &params, std::size_t n, std::span<const double> t_grid,
                                       std::span<const double> x_grid, const EpsilonSettings &settings = {});

// (eps_n + eps_{n+1}) / (1 - eps_{n+1}) with exact eps for n <= 2.
BoundValue psi_t_bound(const ExpansionParams &params, std::size_t n);
// Closed form L K delta c^{n-2} (1 + c) / (1 - L K delta c^{n-1}), n >= 2.
BoundValue psi_t_bound_closed(const ExpansionParams &params, std::size_t n);

enum class ValueKind { exact, estimate, bound };

std::string to_string(ValueKind kind);

struct PsiValue {
    double value = 0;
    ValueKind kind = ValueKind::exact;
    bool vacuous = false;
};

// psi_{rho_N}(n): exact for n <= 2, L K delta c^{n-2} otherwise.
PsiValue psi_rho_value(const ExpansionParams &params, std::size_t n);

struct BruteForceResult {
    // certified lower bound of the max |rho(A B) / (rho(A) rho(B)) - 1| over the family
    double estimate = 0;
    // certified upper bound of the same max
    double upper = 0;
    // rho-mass of enumerated past cylinders whose intermediate digits exceed the cap
    double gap_mass = 0;
    std::vector<digit_t> arg_past;
    std::vector<digit_t> arg_future;
};

BruteForceResult psi_bruteforce(const ExpansionParams &params, std::size_t n, std::size_t k, std::size_t l,
                                digit_t digit_cap);

struct ExtendedSettings {
    digit_t digit_cap = 400;
    double tolerance = 1e-11;
    unsigned max_depth = 20;
};

// max |rho-bar(A x B) / (rho(A) rho(B)) - 1| over A = R^{-(n-1)}(A0), B from the
// families, with rho-bar(A x B) = int_B rho^u(A) rho_N(du) by quadrature.
double psi_extended_estimate(const ExpansionParams &params, std::size_t n, std::span<const Interval> future,
                             std::span<const Interval> past, const ExtendedSettings &settings = {});

// rho-bar(A x B) by the quadrature above, and by summing closed-form rectangle
// masses over the cylinders of A; the two agree up to quadrature error.
double extended_mass_quadrature(const ExpansionParams &params, std::size_t n, const Interval &a0, const Interval &b,
                                const ExtendedSettings &settings = {});
double extended_mass_cylinders(const ExpansionParams &params, std::size_t n, const Interval &a0, const Interval &b,
                               digit_t digit_cap);

struct MixingRow {
    std::string quantity;
    std::size_t n = 0;
    ValueKind kind = ValueKind::exact;
    double value = 0;
    double slack = 0;
    bool vacuous = false;
};

struct MixingSettings {
    std::size_t n_max = 4;
    std::size_t t_points = 101;
    std::size_t x_points = 101;
    EpsilonSettings epsilon;
    digit_t bruteforce_cap = 80;
};

struct MixingReport {
    ExpansionParams params;
    double K = 0;
    std::vector<MixingRow> rows;
    // human-readable descriptions of dominance or monotonicity failures
    std::vector<std::string> violations;
};

MixingReport build_mixing_report(const ExpansionParams &params, const MixingSettings &settings = {});

std::vector<double> uniform_grid(std::size_t points);

} // namespace renyi
