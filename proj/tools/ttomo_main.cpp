// ttomo command line: verification suites and operator front ends.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttomo/analytic.hpp"
#include "ttomo/decompose.hpp"
#include "ttomo/fractional.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/normal_op.hpp"
#include "ttomo/random.hpp"
#include "ttomo/report.hpp"
#include "ttomo/suites.hpp"
#include "ttomo/ucp.hpp"
#include "ttomo/xray.hpp"

namespace fs = std::filesystem;
using namespace ttomo;
using nlohmann::json;

namespace {

struct Common {
    std::string config, suite = "all", out = "ttomo_out";
    std::uint64_t seed = kDefaultSeed;
    int n = 2;
    bool seed_set = false, n_set = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON file mirroring SuiteConfig");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "PRNG seed")->each([&](const std::string&) { c.seed_set = true; });
    app->add_option("--n", c.n, "dimension")->check(CLI::IsMember({2, 3}))->each([&](const std::string&) {
        c.n_set = true;
    });
}

SuiteConfig load_config(const Common& c) {
    SuiteConfig cfg;
    if (!c.config.empty()) {
        std::ifstream is(c.config);
        if (!is) throw std::runtime_error("cannot read " + c.config);
        cfg = SuiteConfig::from_json(json::parse(is));
    }
    if (c.n_set && c.n != cfg.n) {
        cfg.n = c.n;
        cfg.grid = default_grid(c.n);
    }
    if (c.seed_set) cfg.seed = c.seed;
    return cfg;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(2) << "\n";
}

// Field input: a TTOMO1 file, or a built-in Gaussian-bump field sampled on the configured grid.
struct FieldInput {
    std::string path, builtin = "bump";
    int rank = 0;
};

void add_field(CLI::App* app, FieldInput& in) {
    app->add_option("--in", in.path, "input TTOMO1 field");
    app->add_option("--field", in.builtin, "built-in field when --in is absent")
        ->check(CLI::IsMember({"gaussian", "bump"}));
    app->add_option("--m", in.rank, "tensor rank of the built-in field")->check(CLI::Range(0, 4));
}

AnalyticField builtin_field(const std::string& name, int n, int m, std::uint64_t seed) {
    const double c0[3] = {0, 0, 0}, c1[3] = {0.3, -0.2, 0.1}, c2[3] = {-0.4, 0.5, -0.3};
    if (name == "gaussian") {
        AnalyticField f(n, m);
        for (std::size_t c = 0; c < f.size(); ++c)
            f[c] = AnalyticScalar::gaussian(n, std::span<const double>(c0, n), 1.0);
        return f;
    }
    return make_bump(n, m, std::span<const double>(c1, n), 1.0, 2, seed) +
           make_bump(n, m, std::span<const double>(c2, n), 0.8, 1, seed + 99);
}

GridField read_field(const FieldInput& in, const SuiteConfig& cfg, bool periodic = true) {
    if (!in.path.empty()) return GridField::load(in.path);
    GridSpec g = cfg.grid;
    g.periodic = periodic;
    return sample(builtin_field(in.builtin, cfg.n, in.rank, cfg.seed), g);
}

void save_with_ppm(const GridField& f, const std::string& stem) {
    f.save(stem + ".ttomo");
    if (f.dim() == 2) {
        auto info = write_ppm(f, 0, stem + ".ppm");
        std::printf("%s.ppm: |f| min %.6e max %.6e\n", stem.c_str(), info.min, info.max);
    }
    std::printf("wrote %s.ttomo\n", stem.c_str());
}

void print_report(const VerificationReport& r) {
    std::printf("suite %s (seed %llu)\n", r.suite.c_str(), static_cast<unsigned long long>(r.seed));
    for (const auto& c : r.checks)
        std::printf("  %-26s %s  residual %.3e %s %.1e  (%.2fs)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.residual, c.lower_bound ? ">" : "<=", c.tolerance, c.wall_time);
    std::printf("  aggregate: %s\n", r.pass() ? "PASS" : "FAIL");
}

json margins_json(const MarginReport& m) {
    return {{"kind", m.kind},         {"fields", m.fields},         {"violations", m.violations},
            {"min", m.min_margin},    {"median", m.median_margin}, {"max", m.max_margin},
            {"residual", m.residual}, {"margins", m.margins}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ttomo: tensor tomography operators and identity checks"};
    app.require_subcommand(1);
    Common com;
    FieldInput in;

    auto* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify, com);
    std::vector<std::string> mutations;
    int ucp_fields = 0;
    verify->add_option("--suite", com.suite, "suite id or 'all'");
    verify->add_option("--mutate", mutations, "enable a built-in formula mutation (self-test)");
    verify->add_option("--ucp-fields", ucp_fields, "seeded fields per margin test");

    auto* transform = app.add_subcommand("transform", "sample a ray transform into CSV");
    add_common(transform, com);
    add_field(transform, in);
    std::string kind = "I";
    double param = 0;
    int angles = 32, offsets = 32;
    transform->add_option("--kind", kind, "I, J, exp or X")->check(CLI::IsMember({"I", "J", "exp", "X"}));
    transform->add_option("--param", param, "k for I, q for J, alpha for exp, s for X");
    transform->add_option("--angles", angles)->check(CLI::PositiveNumber);
    transform->add_option("--offsets", offsets)->check(CLI::PositiveNumber);

    auto* normal = app.add_subcommand("normal", "N^k f by kernel convolution");
    add_common(normal, com);
    add_field(normal, in);
    int k = 0;
    normal->add_option("--k", k)->check(CLI::Range(0, 4));

    auto* fraclap = app.add_subcommand("fraclap", "fractional Laplacian powers");
    add_common(fraclap, com);
    add_field(fraclap, in);
    double s = 0.5;
    std::string method = "multiplier", coeff = "identity";
    fraclap->add_option("--s", s, "power: s > 0 gives (-L)^s, s < 0 gives (-L)^s by the negative-power paths");
    fraclap->add_option("--method", method)->check(CLI::IsMember({"multiplier", "semigroup"}));
    fraclap->add_option("--A", coeff, "coefficient: identity, bump or diag")
        ->check(CLI::IsMember({"identity", "bump", "diag"}));

    auto* decompose = app.add_subcommand("decompose", "solenoidal decomposition f = f~ + d^k v");
    add_common(decompose, com);
    add_field(decompose, in);
    int dk = 1;
    decompose->add_option("--k", dk)->check(CLI::Range(1, 2));

    auto* ucp = app.add_subcommand("demo-ucp", "unique continuation margin demos");
    add_common(ucp, com);
    int fields = 100;
    std::string demo = "all";
    ucp->add_option("--fields", fields)->check(CLI::PositiveNumber);
    ucp->add_option("--kind", demo)
        ->check(CLI::IsMember({"all", "gauge", "antilocality", "support", "annulus", "normal", "curl"}));
    ucp->add_option("--s", s, "Riesz order for the antilocality demos");

    auto* cone = app.add_subcommand("cone", "cone transform chain and margins");
    add_common(cone, com);
    double beta = 0.3;
    cone->add_option("--s", s);
    cone->add_option("--beta", beta, "axis angle (radians)");
    cone->add_option("--fields", fields)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        SuiteConfig cfg = load_config(com);
        fs::create_directories(com.out);

        if (*verify) {
            if (!mutations.empty()) cfg.mutations = mutations;
            if (ucp_fields > 0) cfg.ucp_fields = ucp_fields;
            std::vector<std::string> ids;
            if (com.suite == "all") {
                for (const auto& id : suite_ids())
                    if (cfg.n == 2 || id == "tensor" || id == "diffid" || id == "xray") ids.push_back(id);
            } else {
                ids.push_back(com.suite);
            }
            bool ok = true;
            for (const auto& id : ids) {
                auto r = run_suite(id, cfg);
                print_report(r);
                emit(r, ids.size() > 1 ? com.out + "/" + id : com.out);
                ok = ok && r.pass();
            }
            return ok ? 0 : 1;
        }

        if (*transform) {
            const auto f = in.path.empty() ? builtin_field(in.builtin, cfg.n, in.rank, cfg.seed) : AnalyticField();
            const GridField gf = in.path.empty() ? GridField() : GridField::load(in.path);
            const int n = in.path.empty() ? cfg.n : gf.dim();
            if (!in.path.empty() && kind != "I") throw std::invalid_argument("grid input supports --kind I only");
            if (kind == "X" && in.rank != 0) throw std::invalid_argument("X transform needs a scalar field");
            const double L = in.path.empty() ? cfg.grid.L : gf.grid().L;
            std::vector<Line> lines;
            if (n == 2) {
                for (int a = 0; a < angles; ++a)
                    for (int o = 0; o < offsets; ++o) {
                        const double th = std::numbers::pi * a / angles;
                        const double p = offsets == 1 ? 0.0 : -0.8 * L + 1.6 * L * o / (offsets - 1);
                        const double xi[2] = {std::cos(th), std::sin(th)}, x[2] = {-p * xi[1], p * xi[0]};
                        lines.push_back(Line::make(x, xi));
                    }
            } else {
                Rng rng(cfg.seed);
                for (int i = 0; i < angles * offsets; ++i)
                    lines.push_back(Line::through(rng.uniform_vector(n, -0.8 * L, 0.8 * L), rng.unit_vector(n)));
            }
            const std::string path = com.out + "/transform.csv";
            std::ofstream os(path);
            os.precision(17);
            for (int a = 0; a < n; ++a) os << 'x' << a << ',';
            for (int a = 0; a < n; ++a) os << "xi" << a << ',';
            os << "tag,value\n";
            ScalarFn sf;
            if (kind == "X") sf = as_fn(f[0]);
            for (const auto& l : lines) {
                double v = 0;
                if (kind == "I") v = in.path.empty() ? ray_I(f, int(param), l) : ray_I(gf, int(param), l);
                else if (kind == "J") v = ray_J(f, int(param), l.base(), l.dir());
                else if (kind == "exp") v = ray_exp(f, param, l);
                else v = frac_xray(sf, param, l.base(), l.dir());
                for (int a = 0; a < n; ++a) os << l.x[a] << ',';
                for (int a = 0; a < n; ++a) os << l.xi[a] << ',';
                os << kind << ':' << param << ',' << v << '\n';
            }
            std::printf("wrote %zu lines to %s\n", lines.size(), path.c_str());
            return 0;
        }

        if (*normal) {
            auto f = read_field(in, cfg);
            auto nk = normal_Nk_kernel(f, k, true);
            save_with_ppm(nk, com.out + "/normal_k" + std::to_string(k));
            return 0;
        }

        if (*fraclap) {
            auto f = read_field(in, cfg);
            if (f.rank() != 0) throw std::invalid_argument("fraclap needs a scalar field");
            const auto A = coeff_by_name(coeff, f.dim());
            GridField out;
            if (s == 0) throw std::invalid_argument("--s must be nonzero");
            if (method == "multiplier") {
                if (coeff != "identity") throw std::invalid_argument("the multiplier path needs --A identity");
                out = s > 0 ? frac_laplacian(f, s) : riesz_potential(f, -s);
            } else {
                if (!(s < 0 && s > -1)) throw std::invalid_argument("the semigroup path needs -1 < s < 0");
                out = semigroup_negative_power(f, -s, A);
            }
            save_with_ppm(out, com.out + "/fraclap");
            return 0;
        }

        if (*decompose) {
            if (in.path.empty() && in.rank == 0) in.rank = dk;
            auto f = read_field(in, cfg, false);
            EllipticSolveConfig ecfg;
            ecfg.k = dk;
            auto d = solenoidal_decompose(f, dk, ecfg);
            save_with_ppm(d.f_tilde, com.out + "/f_tilde");
            save_with_ppm(d.v, com.out + "/v");
            write_json(com.out + "/decompose.json", {{"k", dk},
                                                     {"iterations", d.report.iterations},
                                                     {"residual", d.report.residual},
                                                     {"converged", d.report.converged},
                                                     {"div_residual", d.div_residual},
                                                     {"orthogonality", d.orthogonality}});
            std::printf("CG iterations %d, residual %.3e, div residual %.3e\n", d.report.iterations,
                        d.report.residual, d.div_residual);
            return d.report.converged ? 0 : 1;
        }

        if (*ucp || *cone) {
            if (cfg.n != 2) throw std::invalid_argument("the demos run in n = 2");
            UcpConfig u;
            u.seed = cfg.seed;
            u.fields = fields;
            json j{{"header", "Property-based evidence on seeded samples; not a proof."}, {"seed", cfg.seed}};
            bool ok = true;
            auto margin = [&](const std::string& key, const MarginReport& m) {
                j[key] = margins_json(m);
                ok = ok && m.violations == 0 && m.min_margin > u.tau;
                std::printf("%-14s fields %d violations %d min %.3e median %.3e\n", key.c_str(), m.fields,
                            m.violations, m.min_margin, m.median_margin);
            };
            if (*cone) {
                auto c = cone_ucp_demo(s, beta, u);
                j["chain"] = {{"lhs", c.chain_lhs}, {"rhs", c.chain_rhs}, {"residual", c.chain_residual}};
                std::printf("chain: lhs %.12f rhs %.12f residual %.2e\n", c.chain_lhs, c.chain_rhs, c.chain_residual);
                margin("cone", c.margins);
                write_json(com.out + "/cone.json", j);
                return ok ? 0 : 1;
            }
            const bool all = demo == "all";
            if (all || demo == "gauge") {
                auto g = ucp_gauge_demo(1, 0, u);
                j["gauge"] = {{"R_max", g.gauge.R_max},
                              {"I_max", g.gauge.I_max},
                              {"derivatives", g.generic.values},
                              {"first_nonvanishing", g.generic.first_nonvanishing}};
                std::printf("gauge: R %.2e I %.2e, first non-vanishing derivative order %d\n", g.gauge.R_max,
                            g.gauge.I_max, g.generic.first_nonvanishing);
            }
            if (all || demo == "antilocality") margin("antilocality", antilocality_margins(s, u));
            if (all || demo == "support") margin("support", antilocality_margins(s, u, true));
            if (all || demo == "annulus") {
                auto a = annulus_kernel_check(s, u);
                j["annulus"] = {{"riesz", a.riesz}, {"radial", a.radial}, {"rel_diff", a.rel_diff}};
                std::printf("annulus: %.10e vs %.10e\n", a.riesz, a.radial);
            }
            if (all || demo == "normal") margin("normal", normal_margins(u));
            if (all || demo == "curl") margin("curl", curl_margins(u));
            write_json(com.out + "/ucp.json", j);
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
