#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace renyi
{

struct SuiteResult {
    std::string name;
    std::string module;
    bool passed = false;
    // largest violation measure seen; the suite passes iff it is <= tolerance
    double worst_residual = 0;
    double tolerance = 0;
    std::string detail;
};

struct VerifyConfig {
    std::uint64_t seed = 0;
    std::size_t mc_paths = 1000000;
    std::vector<std::string> skip;
    // Test hook: "delta" perturbs the constant fed to the constants suite.
    std::string fault;
};

// All suite names in run order.
std::vector<std::string> suite_names();

// Throws domain_error for an unknown name.
SuiteResult run_suite(const std::string &name, const VerifyConfig &config = {});

// Every suite not listed in config.skip, in run order.
std::vector<SuiteResult> run_verification(const VerifyConfig &config = {});

} // namespace renyi
