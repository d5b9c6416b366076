// Acceptance run: every suite once at desk-scale defaults, one PASS/FAIL line
// per criterion, then the mutation self-test.  Reports land in acceptance_out/.
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ttomo/report.hpp"
#include "ttomo/suites.hpp"

using namespace ttomo;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::vector<std::pair<std::string, std::string>> checks;  // (report key, check name)
};

}  // namespace

int main() {
    std::map<std::string, VerificationReport> reports;
    auto run = [&](const std::string& key, const std::string& suite, const SuiteConfig& cfg) {
        const auto t0 = std::chrono::steady_clock::now();
        reports[key] = run_suite(suite, cfg);
        emit(reports[key], "acceptance_out/" + key);
        std::printf("[suite %-12s %7.1fs] %s\n", key.c_str(),
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                    reports[key].pass() ? "all checks pass" : "has failures");
        std::fflush(stdout);
    };

    SuiteConfig base;
    for (const auto& id : suite_ids()) run(id, id, base);
    SuiteConfig three = base;
    three.n = 3;
    three.grid = default_grid(3);
    run("diffid_n3", "diffid", three);
    run("xray_n3", "xray", three);

    const std::vector<Criterion> criteria = {
        {1, "gauge: |I^k(dv) + k I^{k-1} v| < 1e-9", {{"xray", "gauge_identity"}, {"xray_n3", "gauge_identity"}}},
        {2, "J from I relative difference < 1e-8", {{"xray", "j_from_i"}, {"xray_n3", "j_from_i"}}},
        {3, "exponential ray series, K = 12, < 1e-8", {{"xray", "exp_series"}, {"xray_n3", "exp_series"}}},
        {4,
         "curl-curl and contracted R^0 identity < 1e-9",
         {{"diffid", "curl_curl"},
          {"diffid", "delta_R_identity"},
          {"diffid_n3", "curl_curl"},
          {"diffid_n3", "delta_R_identity"}}},
        {5,
         "W <-> R round trip and W^m = I < 1e-10",
         {{"diffid", "w_r_roundtrip"},
          {"diffid", "w_identity_k_eq_m"},
          {"diffid_n3", "w_r_roundtrip"},
          {"diffid_n3", "w_identity_k_eq_m"}}},
        {6,
         "normal operator: kernel vs sphere < 5e-3, exact zero divergence, dual forms < 1e-4",
         {{"normal", "kernel_vs_sphere"}, {"normal", "div_exact_zero"}, {"normal", "div_dual_forms"}}},
        {7, "delta N^k dv + k^2 N^{k-1} v < 1e-3, factor within 1%",
         {{"normal", "commute_residual"}, {"normal", "commute_factor"}}},
        {8, "intertwining identity: m=1,k=0 < 2%, m=2 < 5%, runtime <= 5 min",
         {{"normal", "sv_m1_k0"}, {"normal", "sv_m2"}, {"normal", "sv_m2_runtime"}}},
        {9, "half-Laplacian inversion < 2%, c_2 = 4 pi by Fourier oracle",
         {{"normal", "half_laplacian_fourier"}, {"normal", "half_laplacian"}}},
        {10,
         "fractional stack: scalar < 1e-6, semigroup < 1e-3, heat < 1e-8, drift < 1e-3",
         {{"fractional", "scalar_identity"},
          {"fractional", "semigroup_vs_multiplier"},
          {"fractional", "heat_closed_form"},
          {"fractional", "variable_A_drift"}}},
        {11,
         "decomposition: manufactured < 1e-4, div < 1e-4, energy 1e-10, R^0 gauge 1e-6",
         {{"decompose", "manufactured"},
          {"decompose", "div_residual"},
          {"decompose", "energy_identity"},
          {"decompose", "r0_gauge"}}},
        {12, "cone <-> ray < 1e-5, closed-form cone < 1e-6",
         {{"xray", "cone_ray_identity"}, {"xray", "cone_closed_form"}}},
        {13,
         "margins > 1e-8 with zero violations over 100 fields; curl identity < 1e-3",
         {{"ucp", "antilocality_s025"},
          {"ucp", "antilocality_s050"},
          {"ucp", "antilocality_support"},
          {"ucp", "normal_margin"},
          {"ucp", "curl_margin"},
          {"ucp", "curl_identity"},
          {"ucp", "cone_margin"}}},
    };

    int failed = 0;
    std::vector<std::string> lines;
    for (const auto& c : criteria) {
        bool ok = true;
        std::string detail;
        for (const auto& [key, name] : c.checks) {
            const auto* r = reports.at(key).find(name);
            if (!r) {
                ok = false;
                detail += " " + key + "/" + name + "=missing";
                continue;
            }
            ok = ok && r->pass;
            char buf[160];
            std::snprintf(buf, sizeof buf, " %s/%s=%.2e%s%.0e", key.c_str(), name.c_str(), r->residual,
                          r->lower_bound ? ">" : "<=", r->tolerance);
            detail += buf;
            if (!r->pass) detail += "(FAIL)";
        }
        failed += !ok;
        char head[32];
        std::snprintf(head, sizeof head, "criterion %2d: %s", c.id, ok ? "PASS" : "FAIL");
        lines.push_back(std::string(head) + "  " + c.title + " |" + detail);
    }

    // Mutation self-test: each mutation re-runs its own suite and must fail
    // exactly its check while the unmutated run of that suite passed.
    bool mut_ok = true;
    std::string mut_detail;
    for (const auto& m : mutation_table()) {
        SuiteConfig cfg = base;
        cfg.mutations = {m.id};
        auto r = run_suite(m.suite, cfg);
        std::vector<std::string> flipped;
        for (const auto& c : r.checks) {
            const auto* clean = reports.at(m.suite).find(c.name);
            if (!clean || clean->pass != c.pass) flipped.push_back(c.name);
        }
        const bool ok = flipped.size() == 1 && flipped[0] == m.check && !r.find(m.check)->pass;
        mut_ok = mut_ok && ok;
        mut_detail += " " + m.id + (ok ? "=ok" : "=BAD[");
        if (!ok) {
            for (const auto& f : flipped) mut_detail += f + ";";
            mut_detail += "]";
        }
        std::printf("[mutation %-32s] flips %zu check(s)%s\n", m.id.c_str(), flipped.size(), ok ? "" : "  <-- wrong");
        std::fflush(stdout);
    }
    failed += !mut_ok;
    lines.push_back(std::string("criterion 14: ") + (mut_ok ? "PASS" : "FAIL") +
                    "  each mutation flips exactly its own check |" + mut_detail);

    std::printf("\n");
    for (const auto& l : lines) std::printf("%s\n", l.c_str());
    std::printf("\n%d of %zu criteria failed\n", failed, criteria.size() + 1);
    return failed == 0 ? 0 : 1;
}
