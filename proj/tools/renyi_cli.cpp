#include <renyi/cf_core.hpp>
#include <renyi/chain.hpp>
#include <renyi/errors.hpp>
#include <renyi/levy.hpp>
#include <renyi/mixing.hpp>
#include <renyi/report_io.hpp>
#include <renyi/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace
{

enum exit_code { ok = 0, usage = 2, resource = 3, verification = 4 };

struct RunConfig {
    int N = 2;
    double t = 0;
    double x = 0;
    std::size_t count = 10;
    std::size_t n = 1;
    std::size_t n_max = 5;
    renyi::digit_t digit_cap = 400;
    double weight_floor = 1e-12;
    double bin_width = 1e-5;
    std::string tail = "discard";
    std::size_t t_points = 21;
    std::size_t x_points = 101;
    std::size_t curve_points = 101;
    std::string curves_path;
    renyi::digit_t bruteforce_cap = 80;
    std::uint64_t seed = 0;
    std::size_t mc_paths = 1000000;
    std::vector<std::string> skip;
    bool list = false;
    std::string fault;
    std::string output = "-";
    // empty until parsed; each subcommand has its own default
    std::string format;
};

class Output
{
public:
    explicit Output(const std::string &path)
    {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw renyi::domain_error("cannot open output file " + path);
            }
        }
    }
    std::ostream &stream()
    {
        return file_ ? *file_ : std::cout;
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

void emit_json(const RunConfig &cfg, const nlohmann::json &j)
{
    Output out(cfg.output);
    out.stream() << j.dump(2) << '\n';
}

renyi::PropagationSettings propagation(const RunConfig &cfg)
{
    renyi::PropagationSettings p;
    p.digit_cap = cfg.digit_cap;
    p.weight_floor = cfg.weight_floor;
    p.bin_width = cfg.bin_width;
    p.tail_mode = cfg.tail == "enclose" ? renyi::TailMode::enclose : renyi::TailMode::discard;
    return p;
}

int cmd_digits(const RunConfig &cfg)
{
    const renyi::ExpansionParams params(cfg.N);
    if (!(cfg.x >= 0 && cfg.x < 1)) {
        throw renyi::domain_error("x must lie in [0, 1)");
    }
    const auto e = renyi::digits_of(params, cfg.x, cfg.count);
    const auto back = renyi::eval_forward(e.block, e.remainder);
    const auto error = std::abs(back - cfg.x);
    if (cfg.format == "json") {
        emit_json(cfg, {{"N", cfg.N},
                        {"x", cfg.x},
                        {"digits", e.block.digits()},
                        {"truncated", e.truncated},
                        {"remainder", e.remainder},
                        {"reconstruction", back},
                        {"roundtrip_error", error}});
        return ok;
    }
    Output out(cfg.output);
    auto &os = out.stream();
    for (std::size_t k = 0; k < e.block.size(); ++k) {
        os << (k ? " " : "") << e.block[k];
    }
    os << '\n';
    if (e.truncated) {
        os << "# truncated: an iterate reached 1 after " << e.block.size() << " digits\n";
    }
    os << "reconstruction " << renyi::format_real(back) << '\n';
    os << "roundtrip_error " << renyi::format_real(error) << '\n';
    return ok;
}

int cmd_distribution(const RunConfig &cfg)
{
    const renyi::ExpansionParams params(cfg.N);
    const auto dist = renyi::chain_law(params, cfg.t, cfg.n, propagation(cfg));
    if (cfg.format == "json") {
        auto j = renyi::to_json(dist);
        j["curves"] = renyi::curves_json(dist, cfg.curve_points);
        emit_json(cfg, j);
    } else {
        Output out(cfg.output);
        renyi::write_csv(out.stream(), dist);
    }
    if (!cfg.curves_path.empty()) {
        Output curves(cfg.curves_path);
        renyi::write_curves_csv(curves.stream(), dist, cfg.curve_points);
    }
    return ok;
}

int cmd_bounds(const RunConfig &cfg)
{
    const renyi::ExpansionParams params(cfg.N);
    renyi::BoundsSettings settings;
    settings.propagation.digit_cap = cfg.digit_cap;
    settings.propagation.weight_floor = cfg.weight_floor;
    settings.propagation.bin_width = cfg.bin_width;
    const auto grid = renyi::uniform_grid(cfg.t_points);
    const auto report = renyi::verify_error_bounds(params, grid, cfg.n_max, settings);
    if (cfg.format == "json") {
        emit_json(cfg, renyi::to_json(report));
    } else {
        Output out(cfg.output);
        renyi::write_csv(out.stream(), report);
    }
    const auto violations = report.g_violations() + report.f_violations();
    if (violations > 0) {
        std::cerr << "bounds: " << report.g_violations() << " G and " << report.f_violations()
                  << " F cells exceed the bound beyond certified error\n";
        return verification;
    }
    return ok;
}

int cmd_mixing(const RunConfig &cfg)
{
    const renyi::ExpansionParams params(cfg.N);
    renyi::MixingSettings settings;
    settings.n_max = cfg.n_max;
    settings.t_points = cfg.t_points;
    settings.x_points = cfg.x_points;
    settings.bruteforce_cap = cfg.bruteforce_cap;
    settings.epsilon.propagation.digit_cap = cfg.digit_cap;
    const auto report = renyi::build_mixing_report(params, settings);
    if (cfg.format == "json") {
        emit_json(cfg, renyi::to_json(report));
    } else {
        Output out(cfg.output);
        renyi::write_csv(out.stream(), report);
    }
    for (const auto &v : report.violations) {
        std::cerr << "mixing: " << v << '\n';
    }
    return report.violations.empty() ? ok : verification;
}

int cmd_verify(const RunConfig &cfg)
{
    if (cfg.list) {
        Output out(cfg.output);
        for (const auto &name : renyi::suite_names()) {
            out.stream() << name << '\n';
        }
        return ok;
    }
    renyi::VerifyConfig vc;
    vc.seed = cfg.seed;
    vc.mc_paths = cfg.mc_paths;
    vc.skip = cfg.skip;
    vc.fault = cfg.fault;
    const auto results = renyi::run_verification(vc);
    if (cfg.format == "csv") {
        Output out(cfg.output);
        renyi::write_csv(out.stream(), results);
    } else {
        emit_json(cfg, renyi::to_json(results));
    }
    std::size_t failed = 0;
    for (const auto &r : results) {
        if (!r.passed) {
            ++failed;
            std::cerr << "verify: " << r.name << " failed (residual " << renyi::format_real(r.worst_residual)
                      << " > " << renyi::format_real(r.tolerance) << ")\n";
        }
    }
    return failed == 0 ? ok : verification;
}

void add_common(CLI::App *cmd, RunConfig &cfg, const std::string &default_format)
{
    cmd->add_option("--N", cfg.N, "expansion parameter N >= 2")->capture_default_str();
    cmd->add_option("--format", cfg.format, "output format (default " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--output", cfg.output, "output path, '-' for stdout")->capture_default_str();
}

void add_propagation(CLI::App *cmd, RunConfig &cfg)
{
    cmd->add_option("--cap", cfg.digit_cap, "digit cap M")->capture_default_str();
    cmd->add_option("--floor", cfg.weight_floor, "weight floor")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd->add_option("--bin-width", cfg.bin_width, "bin width for levels >= 3, 0 disables binning")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void check_config(const RunConfig &cfg, const std::string &sub)
{
    if (cfg.N < 2) {
        throw renyi::domain_error("N must be at least 2");
    }
    if (cfg.digit_cap < cfg.N) {
        throw renyi::domain_error("digit cap must be at least N");
    }
    if ((sub == "bounds" || sub == "mixing") && (cfg.t_points < 2 || cfg.x_points < 2)) {
        throw renyi::domain_error("grids need at least 2 points");
    }
    if (sub == "distribution" && cfg.curve_points < 2) {
        throw renyi::domain_error("curves need at least 2 points");
    }
    if (!(cfg.t >= 0 && cfg.t <= 1)) {
        throw renyi::domain_error("t must lie in [0, 1]");
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Metric tools for Renyi-type continued fraction expansions"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto *digits = app.add_subcommand("digits", "digits of x and the round-trip error");
    add_common(digits, cfg, "csv");
    digits->add_option("--x", cfg.x, "point in [0, 1)")->required();
    digits->add_option("--count", cfg.count, "number of digits")->capture_default_str();

    auto *distribution = app.add_subcommand("distribution", "level-n law of the chain started at t");
    add_common(distribution, cfg, "csv");
    add_propagation(distribution, cfg);
    distribution->add_option("--t", cfg.t, "starting point in [0, 1]")->capture_default_str();
    distribution->add_option("--n", cfg.n, "level")->capture_default_str();
    distribution->add_option("--tail", cfg.tail, "tail beyond the digit cap")
        ->check(CLI::IsMember({"discard", "enclose"}))
        ->capture_default_str();
    distribution->add_option("--curve-points", cfg.curve_points, "G/F curve samples")->capture_default_str();
    distribution->add_option("--curves", cfg.curves_path, "also write G/F curves as CSV to this path");

    auto *bounds = app.add_subcommand("bounds", "observed errors against the Levy-type bounds");
    add_common(bounds, cfg, "csv");
    add_propagation(bounds, cfg);
    std::size_t bounds_nmax = 5, bounds_t_points = 21;
    bounds->add_option("--nmax", bounds_nmax, "largest level")->capture_default_str();
    bounds->add_option("--t-points", bounds_t_points, "points of the t grid")->capture_default_str();

    auto *mixing = app.add_subcommand("mixing", "epsilon and psi-mixing values, estimates and bounds");
    add_common(mixing, cfg, "csv");
    mixing->add_option("--cap", cfg.digit_cap, "digit cap M")->capture_default_str();
    std::size_t mixing_nmax = 4, mixing_t_points = 101;
    mixing->add_option("--nmax", mixing_nmax, "largest n")->capture_default_str();
    mixing->add_option("--t-points", mixing_t_points, "points of the t grid")->capture_default_str();
    mixing->add_option("--x-points", cfg.x_points, "points of the x grid")->capture_default_str();
    mixing->add_option("--bf-cap", cfg.bruteforce_cap, "digit cap of the brute-force psi oracle")->capture_default_str();

    auto *verify = app.add_subcommand("verify", "run every invariant suite");
    add_common(verify, cfg, "json");
    verify->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    verify->add_option("--mc-paths", cfg.mc_paths, "Monte Carlo paths")->capture_default_str();
    verify->add_option("--skip", cfg.skip, "suite to leave out (repeatable)");
    verify->add_flag("--list", cfg.list, "print suite names and exit");
    verify->add_option("--inject-fault", cfg.fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const auto code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    const auto *sub = app.get_subcommands().front();
    if (cfg.format.empty()) {
        cfg.format = sub == verify ? "json" : "csv";
    }
    if (sub == bounds) {
        cfg.n_max = bounds_nmax;
        cfg.t_points = bounds_t_points;
    } else if (sub == mixing) {
        cfg.n_max = mixing_nmax;
        cfg.t_points = mixing_t_points;
    }
    try {
        check_config(cfg, sub->get_name());
        if (sub == digits) {
            return cmd_digits(cfg);
        }
        if (sub == distribution) {
            return cmd_distribution(cfg);
        }
        if (sub == bounds) {
            return cmd_bounds(cfg);
        }
        if (sub == mixing) {
            return cmd_mixing(cfg);
        }
        return cmd_verify(cfg);
    } catch (const renyi::resource_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return resource;
    } catch (const renyi::quadrature_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return resource;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return resource;
    }
}
