#include <renyi/chain.hpp>
#include <renyi/errors.hpp>
#include <renyi/measures.hpp>
#include <renyi/parallel.hpp>

#include "step_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <optional>
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

double clamp01(double v)
{
    return std::clamp(v, 0.0, 1.0);
}

// Collapses a position-sorted run of atoms into one atom at their centroid.
Atom merged(const Atom *first, const Atom *last)
{
    double w = 0, wp = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto *a = first; a != last; ++a) {
        w += a->weight;
        wp += a->weight * a->position;
        lo = std::min(lo, a->position - a->slack);
        hi = std::max(hi, a->position + a->slack);
    }
    auto c = std::clamp(wp / w, first->position, (last - 1)->position);
    return {c, w, std::max({c - lo, hi - c, 0.0})};
}

// Sorts by position and merges atoms closer than tol.
std::vector<Atom> sort_and_merge(std::vector<Atom> atoms, double tol)
{
    std::sort(atoms.begin(), atoms.end(), [](const Atom &a, const Atom &b) { return a.position < b.position; });
    std::vector<Atom> out;
    out.reserve(atoms.size());
    std::size_t k = 0;
    while (k < atoms.size()) {
        auto e = k + 1;
        while (e < atoms.size() && atoms[e].position - atoms[k].position <= tol) {
            ++e;
        }
        out.push_back(e == k + 1 ? atoms[k] : merged(atoms.data() + k, atoms.data() + e));
        k = e;
    }
    // merged centroids of neighbouring runs may still coincide
    for (std::size_t j = 1; j < out.size(); ++j) {
        if (!(out[j].position > out[j - 1].position)) {
            out[j - 1] = merged(out.data() + j - 1, out.data() + j + 1);
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
            --j;
        }
    }
    return out;
}

// Accumulates atoms into fixed-width bins. Atoms whose slack already exceeds
// the width go to a separate set of bins so they do not blur sharp ones.
class Binner
{
public:
    explicit Binner(double width) : width_(width), count_(static_cast<std::size_t>(std::ceil(1 / width)))
    {
        for (auto &cls : cells_) {
            cls.assign(count_, Cell{});
        }
    }

    void add(double pos, double w, double slack)
    {
        auto k = static_cast<std::size_t>(std::max(0.0, pos / width_));
        k = std::min(k, count_ - 1);
        auto &c = cells_[slack > width_ ? 1 : 0][k];
        c.w += w;
        c.wp += w * pos;
        c.lo = std::min(c.lo, pos - slack);
        c.hi = std::max(c.hi, pos + slack);
        c.pmin = std::min(c.pmin, pos);
        c.pmax = std::max(c.pmax, pos);
    }

    std::vector<Atom> atoms(double merge_tol) const
    {
        std::vector<Atom> out;
        for (const auto &cls : cells_) {
            for (const auto &c : cls) {
                if (c.w > 0) {
                    const auto pos = std::clamp(c.wp / c.w, c.pmin, c.pmax);
                    out.push_back({pos, c.w, std::max({pos - c.lo, c.hi - pos, 0.0})});
                }
            }
        }
        return sort_and_merge(std::move(out), merge_tol);
    }

private:
    struct Cell {
        double w = 0, wp = 0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double pmin = std::numeric_limits<double>::infinity();
        double pmax = -std::numeric_limits<double>::infinity();
    };

    double width_;
    std::size_t count_;
    std::array<std::vector<Cell>, 2> cells_;
};

} // namespace

double transition_prob(const ExpansionParams &params, digit_t i, double s)
{
    if (i < params.N()) {
        throw domain_error("digit " + std::to_string(i) + " is below N");
    }
    const auto x = s + static_cast<double>(i);
    return (s + params.N() - 1) / (x * (x - 1));
}

double transition_tail(const ExpansionParams &params, digit_t j, double s)
{
    if (j < params.N() - 1) {
        throw domain_error("tail index must be at least N - 1");
    }
    return (s + params.N() - 1) / (s + static_cast<double>(j));
}

digit_t select_digit(const ExpansionParams &params, double s, double u)
{
    check_unit(s, "s");
    if (!(u >= 0 && u < 1)) {
        throw domain_error("u must lie in [0, 1)");
    }
    const auto N = params.N();
    // smallest integer i with (s + N - 1) / (s + i) < 1 - u
    const auto y = (s + N - 1) / (1 - u) - s;
    auto i = static_cast<digit_t>(std::min(std::floor(y), 0x1p61)) + 1;
    i = std::max<digit_t>(i, N);
    auto accepts = [&](digit_t k) { return transition_tail(params, k, s) < 1 - u; };
    while (i > N && accepts(i - 1)) {
        --i;
    }
    while (!accepts(i)) {
        ++i;
    }
    return i;
}

ChainState chain_start(const ExpansionParams &params, double t)
{
    check_unit(t, "t");
    return {params, t, t, 0};
}

ChainState chain_step(const ChainState &state, digit_t i)
{
    if (i < state.params.N()) {
        throw domain_error("digit " + std::to_string(i) + " is below N");
    }
    auto next = state;
    next.s = 1 - state.params.N() / (static_cast<double>(i) + state.s);
    ++next.step;
    return next;
}

double uniform01(std::mt19937_64 &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

ChainState sample_step(const ChainState &state, std::mt19937_64 &rng)
{
    return chain_step(state, select_digit(state.params, state.s, uniform01(rng)));
}

std::vector<double> simulate_chain(const ExpansionParams &params, double t, std::size_t n, std::size_t paths,
                                   std::uint64_t seed)
{
    check_unit(t, "t");
    constexpr std::size_t block = 1 << 16;
    std::vector<double> out(paths);
    const auto blocks = (paths + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(b)};
        std::mt19937_64 rng(seq);
        const auto end = std::min(paths, (b + 1) * block);
        for (auto p = b * block; p < end; ++p) {
            auto st = chain_start(params, t);
            for (std::size_t k = 0; k < n; ++k) {
                st = sample_step(st, rng);
            }
            out[p] = st.s;
        }
    });
    return out;
}

AtomicDistribution::AtomicDistribution(const ExpansionParams &params, double t, std::size_t level,
                                       std::vector<Atom> atoms, double discarded_mass, double signed_error)
    : params_(params), t_(t), level_(level), atoms_(std::move(atoms)), discarded_mass_(discarded_mass),
      signed_error_(signed_error)
{
    check_unit(t, "t");
    if (!(discarded_mass >= 0) || !(signed_error >= 0)) {
        throw domain_error("discarded mass and signed error must be nonnegative");
    }
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        const auto &a = atoms_[k];
        if (!(a.position >= 0 && a.position <= 1) || !(a.weight > 0) || !std::isfinite(a.weight)
            || !(a.slack >= 0)) {
            throw domain_error("invalid atom at index " + std::to_string(k));
        }
        if (k > 0 && !(a.position > atoms_[k - 1].position)) {
            throw domain_error("atom positions must be strictly increasing");
        }
    }
    if (std::abs(atom_mass() + discarded_mass_ - 1) > 1e-9) {
        throw domain_error("atom weights plus discarded mass must equal 1");
    }
}

AtomicDistribution AtomicDistribution::point_mass(const ExpansionParams &params, double t)
{
    return AtomicDistribution(params, t, 0, {Atom{t, 1, 0}});
}

double AtomicDistribution::atom_mass() const noexcept
{
    double s = 0;
    for (const auto &a : atoms_) {
        s += a.weight;
    }
    return s;
}

double AtomicDistribution::max_slack() const noexcept
{
    double h = 0;
    for (const auto &a : atoms_) {
        h = std::max(h, a.slack);
    }
    return h;
}

AtomicDistribution propagate(const AtomicDistribution &dist, const PropagationSettings &settings)
{
    const auto &params = dist.params();
    const auto N = params.N();
    const auto M = settings.digit_cap;
    if (M < N) {
        throw domain_error("digit cap must be at least N");
    }
    if (!(settings.weight_floor >= 0)) {
        throw domain_error("weight floor must be nonnegative");
    }
    const auto level = dist.level() + 1;
    const bool binned = settings.bin_width > 0 && level >= settings.bin_from_level;

    auto discarded = dist.discarded_mass();
    auto signed_error = dist.signed_error();
    std::vector<Atom> children;
    std::optional<Binner> bins;
    if (binned) {
        bins.emplace(settings.bin_width);
    }
    auto emit = [&](double pos, double w, double slack) {
        if (bins) {
            bins->add(pos, w, slack);
            return;
        }
        if (children.size() >= settings.max_atoms) {
            throw resource_error("atom budget of " + std::to_string(settings.max_atoms) + " exceeded at level "
                                 + std::to_string(level));
        }
        children.push_back({pos, w, slack});
    };

    for (const auto &atom : dist.atoms()) {
        const auto p = atom.position;
        const auto w = atom.weight;
        const auto h = atom.slack;
        const auto slo = std::max(p - h, 0.0);
        const auto shi = std::min(p + h, 1.0);
        if (h > 0) {
            // weights are evaluated at p instead of the true position; the
            // kernel's total variation in s is at most 2 / (s + N - 1)
            signed_error += w * h * 2 / (slo + N - 1);
        }
        for (digit_t i = N; i <= M; ++i) {
            const auto wi = w * transition_prob(params, i, p);
            if (wi < settings.weight_floor) {
                discarded += w * (transition_tail(params, i - 1, p) - transition_tail(params, M, p));
                break;
            }
            const auto di = static_cast<double>(i);
            const auto pos = 1 - N / (di + p);
            double slack = 0;
            if (h > 0) {
                slack = std::max(pos - (1 - N / (di + slo)), (1 - N / (di + shi)) - pos);
            }
            emit(pos, wi, slack);
        }
        const auto tail = w * transition_tail(params, M, p);
        if (settings.tail_mode == TailMode::enclose && tail >= settings.weight_floor) {
            const auto lo = 1 - N / (static_cast<double>(M) + 1 + slo);
            emit((lo + 1) / 2, tail, (1 - lo) / 2);
        } else {
            discarded += tail;
        }
    }

    auto atoms = bins ? bins->atoms(settings.merge_tolerance) : sort_and_merge(std::move(children), settings.merge_tolerance);
    if (atoms.size() > settings.max_atoms) {
        throw resource_error("atom budget of " + std::to_string(settings.max_atoms) + " exceeded at level "
                             + std::to_string(level));
    }
    return AtomicDistribution(params, dist.t(), level, std::move(atoms), discarded, signed_error);
}

AtomicDistribution chain_law(const ExpansionParams &params, double t, std::size_t n, const PropagationSettings &settings)
{
    auto dist = AtomicDistribution::point_mass(params, t);
    for (std::size_t k = 0; k < n; ++k) {
        dist = propagate(dist, settings);
    }
    return dist;
}

AtomicDistribution coarsen(const AtomicDistribution &dist, double width)
{
    if (!(width > 0)) {
        throw domain_error("bin width must be positive");
    }
    Binner bins(width);
    for (const auto &a : dist.atoms()) {
        bins.add(a.position, a.weight, a.slack);
    }
    return AtomicDistribution(dist.params(), dist.t(), dist.level(), bins.atoms(0), dist.discarded_mass(),
                              dist.signed_error());
}

Enclosure G_cdf(const AtomicDistribution &dist, double s)
{
    check_unit(s, "s");
    double est = 0, lo = 0, hi = 0;
    for (const auto &a : dist.atoms()) {
        if (a.position < s) {
            est += a.weight;
        }
        if (a.position + a.slack < s) {
            lo += a.weight;
        }
        if (a.position - a.slack < s) {
            hi += a.weight;
        }
    }
    const auto e = dist.signed_error() / 2;
    return {est, clamp01(lo - e), clamp01(hi + dist.discarded_mass() + e)};
}

double bbl_kernel(const ExpansionParams &params, double x, double s)
{
    const double N = params.N();
    return N * x / (N - (1 - x) * (1 - s));
}

double bbl_density_kernel(const ExpansionParams &params, double x, double s)
{
    const double N = params.N();
    const auto D = N - (1 - x) * (1 - s);
    return N * (N - 1 + s) / (D * D);
}

Enclosure F_cdf(const AtomicDistribution &dist, double x)
{
    check_unit(x, "x");
    const auto &params = dist.params();
    double est = 0, lo = 0, hi = 0;
    for (const auto &a : dist.atoms()) {
        est += a.weight * bbl_kernel(params, x, a.position);
        if (a.slack > 0) {
            // the kernel decreases in s
            lo += a.weight * bbl_kernel(params, x, std::min(a.position + a.slack, 1.0));
            hi += a.weight * bbl_kernel(params, x, std::max(a.position - a.slack, 0.0));
        } else {
            const auto k = a.weight * bbl_kernel(params, x, a.position);
            lo += k;
            hi += k;
        }
    }
    const auto kmin = bbl_kernel(params, x, 1);
    const auto kmax = bbl_kernel(params, x, 0);
    const auto e = dist.signed_error() / 2 * (kmax - kmin);
    const auto D = dist.discarded_mass();
    return {est, clamp01(lo + D * kmin - e), clamp01(hi + D * kmax + e)};
}

namespace
{

// Range of s -> h(x, s) over [a, b]; h increases then decreases in s.
std::pair<double, double> density_kernel_range(const ExpansionParams &params, double x, double a, double b)
{
    const double N = params.N();
    const auto ha = bbl_density_kernel(params, x, a);
    const auto hb = bbl_density_kernel(params, x, b);
    auto hmax = std::max(ha, hb);
    if (x < 1) {
        const auto s0 = N / (1 - x) - 2 * N + 1;
        if (s0 > a && s0 < b) {
            hmax = std::max(hmax, bbl_density_kernel(params, x, s0));
        }
    }
    return {std::min(ha, hb), hmax};
}

} // namespace

Enclosure F_density(const AtomicDistribution &dist, double x)
{
    check_unit(x, "x");
    const auto &params = dist.params();
    double est = 0, lo = 0, hi = 0;
    for (const auto &a : dist.atoms()) {
        const auto v = a.weight * bbl_density_kernel(params, x, a.position);
        est += v;
        if (a.slack > 0) {
            const auto [kmin, kmax]
                = density_kernel_range(params, x, std::max(a.position - a.slack, 0.0), std::min(a.position + a.slack, 1.0));
            lo += a.weight * kmin;
            hi += a.weight * kmax;
        } else {
            lo += v;
            hi += v;
        }
    }
    const auto [kmin, kmax] = density_kernel_range(params, x, 0, 1);
    const auto e = dist.signed_error() / 2 * (kmax - kmin);
    const auto D = dist.discarded_mass();
    return {est, std::max(0.0, lo + D * kmin - e), hi + D * kmax + e};
}

double verify_bbl(const ExpansionParams &params, const DigitBlock &block, double t, double x)
{
    if (block.empty()) {
        throw domain_error("verify_bbl requires a nonempty block");
    }
    check_unit(t, "t");
    check_unit(x, "x");
    const ConditionalMeasure rho(params, t);
    const auto f = forward_map(block);
    const auto whole = rho.mass(f, 0, 1);
    if (!(whole > 1e-300)) {
        throw degenerate_cylinder_error("cylinder mass underflows");
    }
    const auto lhs = rho.mass(f, 0, x) / whole;
    const auto rhs = bbl_kernel(params, x, eval_backward(block, t));
    return std::abs(lhs - rhs);
}

double block_probability(const ExpansionParams &params, double t, const DigitBlock &block)
{
    if (block.empty()) {
        throw domain_error("block_probability requires a nonempty block");
    }
    auto state = chain_start(params, t);
    double p = 1;
    for (auto d : block) {
        p *= transition_prob(params, d, state.s);
        state = chain_step(state, d);
    }
    return p;
}

double ks_distance_to_band(std::vector<double> samples, const AtomicDistribution &dist)
{
    if (samples.empty()) {
        throw domain_error("no samples");
    }
    const auto inv = 1.0 / static_cast<double>(samples.size());
    std::vector<detail::StepEvent> events;
    events.reserve(samples.size() + 2 * dist.atoms().size());
    for (auto v : samples) {
        events.push_back({v, {inv, 0, 0}});
    }
    for (const auto &a : dist.atoms()) {
        events.push_back({a.position + a.slack, {0, a.weight, 0}});
        events.push_back({a.position - a.slack, {0, 0, a.weight}});
    }
    const auto e = dist.signed_error() / 2;
    const auto D = dist.discarded_mass();
    double worst = 0;
    detail::sweep_steps(events, {0, 0, 0}, [&](double, const std::array<double, 3> &c, bool) {
        const auto lo = clamp01(c[1] - e);
        const auto hi = clamp01(c[2] + D + e);
        worst = std::max({worst, c[0] - hi, lo - c[0]});
    });
    return worst;
}

} // namespace renyi
