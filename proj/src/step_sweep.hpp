#pragma once

#include <algorithm>
#include <array>
#include <vector>

namespace renyi::detail
{

// A jump of up to three left-continuous step functions c_k(s) = sum_{v < s} d_k.
struct StepEvent {
    double at;
    std::array<double, 3> delta;
};

// Visits every breakpoint v twice, once with the counts of events strictly
// below v (the value at s = v) and once including v (the limit s -> v+).
template <typename Visit>
void sweep_steps(std::vector<StepEvent> &events, std::array<double, 3> counts, Visit &&visit)
{
    std::sort(events.begin(), events.end(), [](const auto &a, const auto &b) { return a.at < b.at; });
    std::size_t k = 0;
    while (k < events.size()) {
        const auto v = events[k].at;
        visit(v, counts, false);
        for (; k < events.size() && events[k].at == v; ++k) {
            for (std::size_t c = 0; c < 3; ++c) {
                counts[c] += events[k].delta[c];
            }
        }
        visit(v, counts, true);
    }
}

} // namespace renyi::detail
