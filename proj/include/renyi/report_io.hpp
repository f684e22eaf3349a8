#pragma once

#include <renyi/chain.hpp>
#include <renyi/levy.hpp>
#include <renyi/mixing.hpp>
#include <renyi/verify.hpp>

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace renyi
{

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_real(double v);

// CSV: '#' metadata lines, then "position,weight,slack".
void write_csv(std::ostream &os, const AtomicDistribution &dist);
nlohmann::json to_json(const AtomicDistribution &dist);
AtomicDistribution distribution_from_json(const nlohmann::json &j);

// G and F enclosures on a uniform grid of `points` values in [0, 1].
// CSV columns: x,G_estimate,G_lower,G_upper,F_estimate,F_lower,F_upper
void write_curves_csv(std::ostream &os, const AtomicDistribution &dist, std::size_t points);
nlohmann::json curves_json(const AtomicDistribution &dist, std::size_t points);

// CSV columns: N,t,n,quantity,observed_lo,observed_hi,bound,margin
void write_csv(std::ostream &os, const BoundsReport &report);
nlohmann::json to_json(const BoundsReport &report);

// CSV columns: N,n,quantity,kind,value,slack,vacuous
void write_csv(std::ostream &os, const MixingReport &report);
nlohmann::json to_json(const MixingReport &report);

// [{suite, module, status, worst_residual, tolerance, detail}]
nlohmann::json to_json(const std::vector<SuiteResult> &results);
// CSV columns: suite,module,status,worst_residual,tolerance,detail
void write_csv(std::ostream &os, const std::vector<SuiteResult> &results);

} // namespace renyi
