#include <renyi/errors.hpp>
#include <renyi/report_io.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace renyi
{

std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // snprintf follows LC_NUMERIC; normalize the decimal separator
    for (auto &c : buf) {
        if (c == ',') {
            c = '.';
        }
    }
    return buf;
}

void write_csv(std::ostream &os, const AtomicDistribution &dist)
{
    os << "# N=" << dist.params().N() << '\n';
    os << "# t=" << format_real(dist.t()) << '\n';
    os << "# level=" << dist.level() << '\n';
    os << "# discarded_mass=" << format_real(dist.discarded_mass()) << '\n';
    os << "# signed_error=" << format_real(dist.signed_error()) << '\n';
    os << "position,weight,slack\n";
    for (const auto &a : dist.atoms()) {
        os << format_real(a.position) << ',' << format_real(a.weight) << ',' << format_real(a.slack) << '\n';
    }
}

nlohmann::json to_json(const AtomicDistribution &dist)
{
    auto atoms = nlohmann::json::array();
    for (const auto &a : dist.atoms()) {
        atoms.push_back({{"position", a.position}, {"weight", a.weight}, {"slack", a.slack}});
    }
    return {{"N", dist.params().N()},
            {"t", dist.t()},
            {"level", dist.level()},
            {"discarded_mass", dist.discarded_mass()},
            {"signed_error", dist.signed_error()},
            {"atoms", atoms}};
}

AtomicDistribution distribution_from_json(const nlohmann::json &j)
{
    try {
        std::vector<Atom> atoms;
        for (const auto &a : j.at("atoms")) {
            atoms.push_back({a.at("position").get<double>(), a.at("weight").get<double>(),
                             a.value("slack", 0.0)});
        }
        return AtomicDistribution(ExpansionParams(j.at("N").get<int>()), j.at("t").get<double>(),
                                  j.at("level").get<std::size_t>(), std::move(atoms),
                                  j.at("discarded_mass").get<double>(), j.value("signed_error", 0.0));
    } catch (const nlohmann::json::exception &e) {
        throw domain_error(std::string("malformed distribution JSON: ") + e.what());
    }
}

namespace
{

template <class Row>
void for_curve(const AtomicDistribution &dist, std::size_t points, Row row)
{
    const auto grid = uniform_grid(points);
    for (auto x : grid) {
        row(x, G_cdf(dist, x), F_cdf(dist, x));
    }
}

} // namespace

void write_curves_csv(std::ostream &os, const AtomicDistribution &dist, std::size_t points)
{
    os << "x,G_estimate,G_lower,G_upper,F_estimate,F_lower,F_upper\n";
    for_curve(dist, points, [&](double x, const Enclosure &g, const Enclosure &f) {
        os << format_real(x) << ',' << format_real(g.estimate) << ',' << format_real(g.lower) << ','
           << format_real(g.upper) << ',' << format_real(f.estimate) << ',' << format_real(f.lower) << ','
           << format_real(f.upper) << '\n';
    });
}

nlohmann::json curves_json(const AtomicDistribution &dist, std::size_t points)
{
    auto rows = nlohmann::json::array();
    for_curve(dist, points, [&](double x, const Enclosure &g, const Enclosure &f) {
        rows.push_back({{"x", x},
                        {"G", {{"estimate", g.estimate}, {"lower", g.lower}, {"upper", g.upper}}},
                        {"F", {{"estimate", f.estimate}, {"lower", f.lower}, {"upper", f.upper}}}});
    });
    return rows;
}

void write_csv(std::ostream &os, const BoundsReport &report)
{
    os << "# beta=" << format_real(report.beta) << '\n';
    os << "# delta=" << format_real(report.delta) << '\n';
    os << "# rate=" << format_real(report.rate) << '\n';
    os << "N,t,n,quantity,observed_lo,observed_hi,bound,margin\n";
    for (const auto &r : report.rows) {
        auto line = [&](const char *q, const Enclosure &e, double bound) {
            os << report.params.N() << ',' << format_real(r.t) << ',' << r.n << ',' << q << ','
               << format_real(e.lower) << ',' << format_real(e.upper) << ',' << format_real(bound) << ','
               << format_real(bound - e.upper) << '\n';
        };
        line("G", r.g_observed, r.g_bound);
        line("F", r.f_observed, r.f_bound);
    }
}

namespace
{

nlohmann::json enclosure_json(const Enclosure &e)
{
    return {{"estimate", e.estimate}, {"lower", e.lower}, {"upper", e.upper}};
}

} // namespace

nlohmann::json to_json(const BoundsReport &report)
{
    auto rows = nlohmann::json::array();
    for (const auto &r : report.rows) {
        rows.push_back({{"t", r.t},
                        {"n", r.n},
                        {"G", {{"observed", enclosure_json(r.g_observed)}, {"bound", r.g_bound}, {"violation", r.g_violation()}}},
                        {"F", {{"observed", enclosure_json(r.f_observed)}, {"bound", r.f_bound}, {"violation", r.f_violation()}}},
                        {"contraction_ok", r.contraction_ok},
                        {"discarded_mass", r.discarded_mass},
                        {"signed_error", r.signed_error}});
    }
    return {{"N", report.params.N()},
            {"beta", report.beta},
            {"delta", report.delta},
            {"rate", report.rate},
            {"violations",
             {{"G", report.g_violations()}, {"F", report.f_violations()}, {"contraction", report.contraction_violations()}}},
            {"rows", rows}};
}

void write_csv(std::ostream &os, const MixingReport &report)
{
    for (const auto &v : report.violations) {
        os << "# violation: " << v << '\n';
    }
    os << "N,n,quantity,kind,value,slack,vacuous\n";
    for (const auto &r : report.rows) {
        os << report.params.N() << ',' << r.n << ',' << r.quantity << ',' << to_string(r.kind) << ','
           << format_real(r.value) << ',' << format_real(r.slack) << ',' << (r.vacuous ? "true" : "false") << '\n';
    }
}

nlohmann::json to_json(const MixingReport &report)
{
    auto rows = nlohmann::json::array();
    for (const auto &r : report.rows) {
        nlohmann::json value = std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(format_real(r.value));
        rows.push_back({{"n", r.n},
                        {"quantity", r.quantity},
                        {"kind", to_string(r.kind)},
                        {"value", value},
                        {"slack", r.slack},
                        {"vacuous", r.vacuous}});
    }
    return {{"N", report.params.N()}, {"K", report.K}, {"rows", rows}, {"violations", report.violations}};
}

namespace
{

nlohmann::json residual_json(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_real(v));
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (auto c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + '"';
}

} // namespace

nlohmann::json to_json(const std::vector<SuiteResult> &results)
{
    auto out = nlohmann::json::array();
    for (const auto &r : results) {
        out.push_back({{"suite", r.name},
                       {"module", r.module},
                       {"status", r.passed ? "pass" : "fail"},
                       {"worst_residual", residual_json(r.worst_residual)},
                       {"tolerance", r.tolerance},
                       {"detail", r.detail}});
    }
    return out;
}

void write_csv(std::ostream &os, const std::vector<SuiteResult> &results)
{
    os << "suite,module,status,worst_residual,tolerance,detail\n";
    for (const auto &r : results) {
        os << r.name << ',' << r.module << ',' << (r.passed ? "pass" : "fail") << ',' << format_real(r.worst_residual)
           << ',' << format_real(r.tolerance) << ',' << csv_field(r.detail) << '\n';
    }
}

} // namespace renyi
