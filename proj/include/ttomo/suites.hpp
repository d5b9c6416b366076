// Verification suites: each runs a fixed inventory of identity checks on
// seeded random inputs and returns a report.  Built-in formula mutations
// perturb exactly one check each, for self-testing the harness.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/random.hpp"
#include "ttomo/report.hpp"

namespace ttomo {

struct SuiteConfig {
    std::string suite = "tensor";
    int n = 2;
    GridSpec grid = default_grid(2);
    int sphere_res = 128;
    int samples = 50;       // random lines / points per check
    int ucp_fields = 100;   // seeded fields per margin test
    std::uint64_t seed = kDefaultSeed;
    std::map<std::string, double> tolerances;  // per-check overrides
    std::vector<std::string> mutations;

    double tol(const std::string& check, double fallback) const;
    bool mutated(const std::string& id) const;
    // Throws std::invalid_argument: unknown suite or mutation, non-positive
    // tolerance, n not in {2, 3}, or n = 3 for a 2-D-only suite.
    void validate() const;

    // Keys mirror the fields; absent keys keep the values of `base`.
    static SuiteConfig from_json(const nlohmann::json& j, SuiteConfig base);
    static SuiteConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_ids();

struct MutationInfo {
    std::string id, suite, check, description;
};
const std::vector<MutationInfo>& mutation_table();

// Check failures (including thrown exceptions) are recorded, not propagated.
// Throws std::invalid_argument for an invalid configuration.
VerificationReport run_suite(const std::string& id, const SuiteConfig& cfg);

}  // namespace ttomo
