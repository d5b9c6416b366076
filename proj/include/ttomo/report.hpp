// Verification reports and their JSON / CSV / PPM forms.
//
// JSON schema (keys sorted):
//   { "aggregate_pass": bool, "checks": [ { "anchor", "comparison", "name", "note", "pass",
//     "residual", "tolerance", "wall_time" } ], "header": str, "seed": int, "suite": str }
// "comparison" is "<=" (pass iff residual <= tolerance) or ">" (a margin: pass iff residual > tolerance).
// CSV columns: name,anchor,comparison,residual,tolerance,pass,wall_time,note
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttomo/grid.hpp"

namespace ttomo {

struct CheckResult {
    std::string name;
    std::string anchor;  // the identity or statement the check measures
    double residual = 0;
    double tolerance = 0;
    bool lower_bound = false;  // residual is a margin that must exceed the tolerance
    bool pass = false;
    double wall_time = 0;  // seconds
    std::string note;
};

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::string header;
    std::vector<CheckResult> checks;

    bool pass() const;  // all checks pass (true for an empty report)
    const CheckResult* find(const std::string& name) const;
};

nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);
std::string to_json_string(const VerificationReport& r);  // 2-space indent, sorted keys, trailing newline
std::string to_csv(const VerificationReport& r);

struct HeatmapInfo {
    double min = 0, max = 0;  // of |field| before scaling
    int width = 0, height = 0;
};
// 8-bit grayscale binary PPM of |component|, linear from min to max.  Row 0 is
// the top (largest second coordinate); 2-D fields only.
HeatmapInfo write_ppm(const GridField& f, std::size_t comp, const std::string& path);

// Writes report.json and residuals.csv into `dir` (created if needed).
void emit(const VerificationReport& r, const std::string& dir);

}  // namespace ttomo
