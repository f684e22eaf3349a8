#pragma once

#include <renyi/cf_core.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace renyi
{

// P_{N,i}(s) = (s + N - 1) / ((s + i)(s + i - 1)).
double transition_prob(const ExpansionParams &params, digit_t i, double s);
// sum_{i > j} P_{N,i}(s) = (s + N - 1) / (s + j).
double transition_tail(const ExpansionParams &params, digit_t j, double s);
// Smallest i >= N with 1 - transition_tail(i, s) > u.
digit_t select_digit(const ExpansionParams &params, double s, double u);

struct ChainState {
    ExpansionParams params;
    double t = 0;
    double s = 0;
    std::size_t step = 0;
};

ChainState chain_start(const ExpansionParams &params, double t);
ChainState chain_step(const ChainState &state, digit_t i);
ChainState sample_step(const ChainState &state, std::mt19937_64 &rng);

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64 &rng);

// Values of s^t_{N,n} over independent paths. Paths are generated in fixed
// blocks, each with its own generator, so the result does not depend on the
// number of worker threads.
std::vector<double> simulate_chain(const ExpansionParams &params, double t, std::size_t n, std::size_t paths,
                                   std::uint64_t seed);

// One atom of a certified discrete law: mass `weight` located somewhere in
// [position - slack, position + slack].
struct Atom {
    double position = 0;
    double weight = 0;
    double slack = 0;
};

enum class TailMode {
    // tail mass beyond the digit cap is added to discarded_mass
    discard,
    // tail mass becomes one atom covering [u_{M+1}(s), 1)
    enclose
};

struct PropagationSettings {
    digit_t digit_cap = 400;
    double weight_floor = 1e-12;
    double merge_tolerance = 1e-13;
    // 0 disables binning
    double bin_width = 1e-5;
    // first level produced with binning
    std::size_t bin_from_level = 3;
    TailMode tail_mode = TailMode::discard;
    std::size_t max_atoms = std::size_t(1) << 24;
};

// Law of s^t_{N,n}. Besides the atoms, the true law may differ by
//  - discarded_mass: positive mass at unknown positions in [0, 1];
//  - signed_error: total variation of a zero-mass signed measure.
class AtomicDistribution
{
public:
    AtomicDistribution(const ExpansionParams &params, double t, std::size_t level, std::vector<Atom> atoms,
                       double discarded_mass = 0, double signed_error = 0);

    static AtomicDistribution point_mass(const ExpansionParams &params, double t);

    const ExpansionParams &params() const noexcept
    {
        return params_;
    }
    double t() const noexcept
    {
        return t_;
    }
    std::size_t level() const noexcept
    {
        return level_;
    }
    const std::vector<Atom> &atoms() const noexcept
    {
        return atoms_;
    }
    double discarded_mass() const noexcept
    {
        return discarded_mass_;
    }
    double signed_error() const noexcept
    {
        return signed_error_;
    }
    double atom_mass() const noexcept;
    double max_slack() const noexcept;

private:
    ExpansionParams params_;
    double t_;
    std::size_t level_;
    std::vector<Atom> atoms_;
    double discarded_mass_;
    double signed_error_;
};

AtomicDistribution propagate(const AtomicDistribution &dist, const PropagationSettings &settings);
// Level-n law started from the point mass at t.
AtomicDistribution chain_law(const ExpansionParams &params, double t, std::size_t n,
                             const PropagationSettings &settings = {});
// Merge atoms into bins of the given width; slack grows to cover the moved mass.
AtomicDistribution coarsen(const AtomicDistribution &dist, double width);

struct Enclosure {
    double estimate = 0;
    double lower = 0;
    double upper = 0;

    double width() const noexcept
    {
        return upper - lower;
    }
    bool contains(double v) const noexcept
    {
        return lower <= v && v <= upper;
    }
};

// G^t_{N,n}(s) = P(s_n < s).
Enclosure G_cdf(const AtomicDistribution &dist, double s);
// F^t_{N,n}(x) = sum_j w_j N x / (N - (1-x)(1-s_j)).
Enclosure F_cdf(const AtomicDistribution &dist, double x);
Enclosure F_density(const AtomicDistribution &dist, double x);

// Conditional cdf kernel N x / (N - (1-x)(1-s)) and its x-derivative.
double bbl_kernel(const ExpansionParams &params, double x, double s);
double bbl_density_kernel(const ExpansionParams &params, double x, double s);

// |LHS - RHS| of the BBL formula for one (block, t, x).
double verify_bbl(const ExpansionParams &params, const DigitBlock &block, double t, double x);
// prod_k P_{N,i_k}(s_{k-1}) along the chain started at t.
double block_probability(const ExpansionParams &params, double t, const DigitBlock &block);

// Kolmogorov distance from the empirical cdf of `samples` to the band
// [G.lower, G.upper]; 0 if the empirical cdf stays inside the band.
double ks_distance_to_band(std::vector<double> samples, const AtomicDistribution &dist);

} // namespace renyi
