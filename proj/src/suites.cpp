#include "ttomo/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>

#include "ttomo/analytic.hpp"
#include "ttomo/decompose.hpp"
#include "ttomo/diffops.hpp"
#include "ttomo/fractional.hpp"
#include "ttomo/normal_op.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/tensor.hpp"
#include "ttomo/ucp.hpp"
#include "ttomo/xray.hpp"

namespace ttomo {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

const std::set<std::string> kTwoDimOnly = {"normal", "fractional", "decompose", "ucp"};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
}

class Runner {
public:
    Runner(const std::string& suite, const SuiteConfig& cfg) : cfg_(cfg) {
        rep_.suite = suite;
        rep_.seed = cfg.seed;
        rep_.header = suite == "ucp"
                          ? "Property-based evidence on seeded samples: margins and identity residuals are measured; "
                            "the unique continuation statements themselves are not proved by these runs."
                          : "Identity checks on seeded random inputs; residuals are absolute unless noted.";
    }

    // Seeded stream private to one check.
    Rng rng(const std::string& check) const { return Rng(cfg_.seed).split(fnv1a(rep_.suite + "/" + check)); }

    void check(const std::string& name, const std::string& anchor, double tol,
               const std::function<double(std::string&)>& body, bool lower_bound = false) {
        CheckResult c;
        c.name = name;
        c.anchor = anchor;
        c.tolerance = cfg_.tol(name, tol);
        c.lower_bound = lower_bound;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.residual = body(c.note);
            c.pass = std::isfinite(c.residual) && (lower_bound ? c.residual > c.tolerance : c.residual <= c.tolerance);
        } catch (const std::exception& e) {
            c.residual = NAN;
            c.pass = false;
            c.note = std::string("error: ") + e.what();
        }
        c.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep_.checks.push_back(std::move(c));
    }

    const SuiteConfig& cfg() const { return cfg_; }
    VerificationReport take() { return std::move(rep_); }

private:
    const SuiteConfig& cfg_;
    VerificationReport rep_;
};

std::span<const double> sp(const std::array<double, kMaxDim>& v, int n) {
    return {v.data(), static_cast<std::size_t>(n)};
}

AnalyticField random_field(int n, int m, std::uint64_t seed) {
    const double c1[3] = {0.3, -0.2, 0.1}, c2[3] = {-0.4, 0.5, -0.3};
    return make_bump(n, m, std::span<const double>(c1, n), 1.0, 2, seed) +
           make_bump(n, m, std::span<const double>(c2, n), 0.8, 1, seed + 99);
}

double max_abs(const GenTensor<double>& t) {
    double r = 0.0;
    for (double v : t.data()) r = std::max(r, std::abs(v));
    return r;
}

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- tensor ---------------------------------------------------------------------
void suite_tensor(Runner& R) {
    const int n = R.cfg().n;
    R.check("sym_dim", "dim S^m(R^n) = C(n+m-1, m)", 1e-12, [&](std::string&) {
        double bad = 0;
        for (int m = 0; m <= 5; ++m) {
            if (sym_dim(n, m) != binomial(n + m - 1, m)) ++bad;
            if (SymIndexTable::get(n, m).size() != sym_dim(n, m)) ++bad;
        }
        return bad;
    });
    R.check("compress_roundtrip", "compress(expand(f)) = f", 1e-14, [&](std::string&) {
        auto rng = R.rng("compress_roundtrip");
        double e = 0;
        for (int m = 0; m <= 4; ++m) {
            SymTensor t(n, m);
            for (auto& v : t.data()) v = rng.uniform(-1, 1);
            e = std::max(e, (compress(expand(t)) - t).max_abs());
            e = std::max(e, symmetry_defect(expand(t)));
        }
        return e;
    });
    R.check("dot_duality", "<i_u v, w> = <v, j_u w>", 1e-12, [&](std::string&) {
        auto rng = R.rng("dot_duality");
        double e = 0;
        for (int t = 0; t < R.cfg().samples; ++t) {
            int k = 1 + t % 2, m = t % 3;
            SymTensor u(n, k), v(n, m), w(n, m + k);
            for (auto* x : {&u, &v, &w})
                for (auto& c : x->data()) c = rng.uniform(-1, 1);
            double a = dot(sym_mult(u, v), w), b = dot(v, contract(u, w));
            e = std::max(e, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
        return e;
    });
    R.check("symbol_identity", "j_xi i_xi = |xi|^2/(m+1) I + m/(m+1) i_xi j_xi on S^m", 1e-12, [&](std::string&) {
        const bool mut = R.cfg().mutated("tensor.symbol_identity");
        auto rng = R.rng("symbol_identity");
        double e = 0;
        for (int t = 0; t < R.cfg().samples; ++t) {
            const int m = t % 4;
            auto xi = rng.uniform_vector(n, -1, 1);
            SymTensor x1(n, 1, xi), v(n, m);
            for (auto& c : v.data()) c = rng.uniform(-1, 1);
            double xx = 0;
            for (double a : xi) xx += a * a;
            SymTensor lhs = contract(x1, sym_mult(x1, v));
            SymTensor rhs = (xx / (m + 1)) * v;
            if (m > 0) rhs += ((mut ? 1.0 : double(m) / (m + 1)) * sym_mult(x1, contract(x1, v)));
            e = std::max(e, (lhs - rhs).max_abs());
        }
        return e;
    });
}

// ---- diffid ---------------------------------------------------------------------
void suite_diffid(Runner& R) {
    const int n = R.cfg().n;
    const auto pts = point_cloud(n, R.cfg().samples);
    const int mmax = n == 2 ? 3 : 2;
    R.check("w_r_roundtrip", "W^k = w_from_r(R^k), R^k = ((k+1)/(m+1)) alpha...alpha W^k", 1e-10,
            [&](std::string& note) {
                const bool mut = R.cfg().mutated("diffid.r_from_w_factor");
                double e = 0;
                for (int m = 0; m <= 3; ++m)
                    for (int k = 0; k <= m; ++k) {
                        auto f = random_field(n, m, 40 + 4 * m + k);
                        const double coeff = mut ? binomial(m, k) / double(m - k + 1) : r_from_w_coefficient(m, k);
                        for (int p = 0; p < 3; ++p) {
                            auto x = sp(pts[p], n);
                            auto Rk = saint_venant_R(f, k, x);
                            auto Wk = saint_venant_W(f, k, x);
                            auto W2 = w_from_r(Rk, m, k);
                            auto R2 = r_from_w(Wk, m, k, coeff);
                            for (std::size_t q = 0; q < Wk.size(); ++q) e = std::max(e, std::abs(Wk[q] - W2[q]));
                            for (std::size_t q = 0; q < Rk.size(); ++q) e = std::max(e, std::abs(Rk[q] - R2[q]));
                        }
                    }
                note = "m <= 3, all k <= m";
                return e;
            });
    R.check("w_identity_k_eq_m", "W^m = identity", 1e-10, [&](std::string&) {
        double e = 0;
        for (int m = 0; m <= 3; ++m) {
            auto f = random_field(n, m, 60 + m);
            for (int p = 0; p < 5; ++p) {
                auto x = sp(pts[p], n);
                auto W = saint_venant_W(f, m, x);
                auto F = expand(f(x));
                for (std::size_t q = 0; q < W.size(); ++q) e = std::max(e, std::abs(W[q] - F[q]));
            }
        }
        return e;
    });
    R.check("potentials_annihilated", "R^k(d^{k+1} v) = 0", 1e-9, [&](std::string&) {
        double e = 0;
        for (int m = 1; m <= 3; ++m)
            for (int k = 0; k < m; ++k) {
                auto v = random_field(n, m - k - 1, 80 + 4 * m + k);
                auto f = inner_derivative(v, k + 1);
                for (int p = 0; p < 10; ++p) e = std::max(e, max_abs(saint_venant_R(f, k, sp(pts[p], n))));
            }
        return e;
    });
    R.check("delta_R_identity", "contracted derivatives of R^0 f: sigma/Laplacian/delta expansion", 1e-9,
            [&](std::string& note) {
                double e = 0;
                for (int m = 1; m <= mmax; ++m)
                    for (int ell = 0; ell <= m; ++ell)
                        e = std::max(e, check_delta_R_identity(random_field(n, m, 101 + m), ell, pts));
                note = "m <= " + std::to_string(mmax) + ", ell <= m";
                return e;
            });
    R.check("curl_curl", "laplacian f - grad div f = 2 d_j (R^0 f)_{ij}", 1e-9, [&](std::string&) {
        const double sgn = R.cfg().mutated("diffid.curl_curl_sign") ? -1.0 : 1.0;
        auto f = random_field(n, 1, 130);
        double e = check_curl_curl(f, pts);
        AnalyticJet jet(f, 2);
        for (const auto& p : pts) {
            auto J = jet.eval(2, sp(p, n));
            auto T = assemble_R(J, 1, 0, 1);
            for (int i = 0; i < n; ++i) {
                double lap = 0, gd = 0, dr = 0;
                for (int j = 0; j < n; ++j) {
                    lap += J({i, j, j});
                    gd += J({j, j, i});
                    dr += T({i, j, j});
                }
                e = std::max(e, std::abs(lap - gd - sgn * 2 * dr));
            }
        }
        return e;
    });
    R.check("equivalence_W_R", "W^k f = 0 on U iff R^k f = 0 on U", 0.5, [&](std::string&) {
        double bad = 0;
        auto v = random_field(n, 1, 90);
        if (!equivalence_check(inner_derivative(v, 2), 1, pts, 1e-9)) ++bad;
        if (!equivalence_check(random_field(n, 2, 91), 0, pts, 1e-9)) ++bad;
        return bad;
    });
    R.check("delta_d_gaussian", "delta d exp(-|x|^2) at 0 = -2n", 1e-12, [&](std::string&) {
        const double c[3] = {0, 0, 0};
        AnalyticField g(n, 0);
        g[0] = AnalyticScalar::gaussian(n, std::span<const double>(c, n), 1.0);
        return std::abs(divergence(inner_derivative(g))(std::span<const double>(c, n))[0] + 2.0 * n);
    });
}

// ---- xray -----------------------------------------------------------------------
void suite_xray(Runner& R) {
    const int n = R.cfg().n;
    const double origin[3] = {0, 0, 0};
    R.check("gauge_identity", "I^k(dv) = -k I^{k-1} v", 1e-9, [&](std::string& note) {
        const double sgn = R.cfg().mutated("xray.gauge_sign") ? -1.0 : 1.0;
        auto rng = R.rng("gauge_identity");
        double e = 0;
        for (int m = 1; m <= 3; ++m) {
            auto v = random_field(n, m - 1, 300 + 10 * n + m);
            auto dv = inner_derivative(v);
            for (int i = 0; i < R.cfg().samples; ++i) {
                auto xi = rng.unit_vector(n);
                auto x = rng.uniform_vector(n, -1.5, 1.5);
                Line l = Line::through(x, xi);
                for (int k = 1; k <= m; ++k) e = std::max(e, std::abs(ray_I(dv, k, l) + sgn * k * ray_I(v, k - 1, l)));
            }
        }
        note = std::to_string(R.cfg().samples) + " lines per rank, m <= 3";
        return e;
    });
    R.check("j_from_i", "J^q from I^0..I^q through the binomial relation (relative)", 1e-8, [&](std::string&) {
        auto rng = R.rng("j_from_i");
        std::vector<AnalyticField> fs;
        for (int m = 0; m <= 3; ++m) fs.push_back(random_field(n, m, 500 + m));
        double e = 0;
        for (int i = 0; i < 2 * R.cfg().samples; ++i) {
            const int m = i % 4;
            const int q = static_cast<int>(rng.bits() % (m + 1));
            auto xi = rng.unit_vector(n);
            const double len = rng.uniform(0.5, 2.0);
            for (auto& a : xi) a *= len;
            auto x = rng.uniform_vector(n, -2, 2);
            const double d = ray_J(fs[m], q, x, xi), f = j_from_i(fs[m], q, x, xi);
            e = std::max(e, std::abs(d - f) / std::max(std::abs(d), 1e-3));
        }
        return e;
    });
    R.check("exp_series", "I_exp^a f = sum_{k<=12} a^k/k! I^k f, a = 0.5", 1e-8, [&](std::string&) {
        const bool mut = R.cfg().mutated("xray.exp_series_factorial");
        auto rng = R.rng("exp_series");
        double e = 0;
        for (int i = 0; i < 10; ++i) {
            auto c = rng.uniform_vector(n, -0.5, 0.5);
            AnalyticField f(n, 0);
            f[0] = AnalyticScalar::gaussian(n, c, rng.uniform(0.7, 1.2));
            Line l = Line::through(rng.uniform_vector(n, -1, 1), rng.unit_vector(n));
            double series = 0;
            for (int k = 0; k <= 12; ++k)
                series += std::pow(0.5, k) / (mut ? 1.0 : factorial(k)) * ray_I(f, k, l);
            e = std::max(e, std::abs(ray_exp(f, 0.5, l) - series));
        }
        return e;
    });
    R.check("exp_closed_form", "I_exp^{1/2} exp(-|x|^2) on a line through 0 = sqrt(pi) e^{1/16}", 1e-10,
            [&](std::string&) {
                AnalyticField f(n, 0);
                f[0] = AnalyticScalar::gaussian(n, std::span<const double>(origin, n), 1.0);
                const double e1[3] = {1, 0, 0};
                Line l = Line::make(std::span<const double>(origin, n), std::span<const double>(e1, n));
                return std::abs(ray_exp(f, 0.5, l) - kSqrtPi * std::exp(1.0 / 16));
            });
    R.check("riesz_average_closed_form", "A_{1/2} exp(-|x|^2)(0) = sqrt(pi)/2 and c(2,-1/2) = 1/(2 pi)", 1e-8,
            [&](std::string&) {
                ScalarFn g{2, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, {}, 9.0};
                double e = std::abs(riesz_constant(2, -0.5) - 1 / (2 * kPi));
                return std::max(e, std::abs(riesz_average(g, 0.5, std::span<const double>(origin, 2),
                                                          sphere_quadrature(2, 64)) -
                                            kSqrtPi / 2));
            });
    ScalarFn g2{2, [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, {}, 9.0};
    // The constant relating the whole-line average to A_{(s+1)/2} is reported, not asserted.
    R.check("full_line_ratio", "sphere average of the whole-line |t|^s transform / A_{(s+1)/2} f (reported; > 0)",
            0.0, [&](std::string& note) {
                const double x[2] = {0.2, -0.1};
                const auto quad = sphere_quadrature(2, 64);
                double mn = INFINITY;
                for (double s : {0.2, 0.5}) {
                    const double sigma = (s + 1) / 2;
                    const double ratio = full_line_average(g2, s, x, quad) / riesz_average(g2, sigma, x, quad);
                    note += fmt("s=%.1f: ", s) + fmt("ratio %.10f, ", ratio) +
                            fmt("2/c(2,-sigma) = %.10f; ", 2 / riesz_constant(2, -sigma));
                    mn = std::min(mn, ratio);
                }
                return mn;
            }, true);
    auto one = [](double) { return 1.0; };
    const double e1[2] = {1, 0};
    R.check("cone_ray_identity", "int_0^pi C^k f dpsi = int_S X_{(k+1)/2} f (k = 0, Gaussian, h = 1)", 1e-5,
            [&](std::string& note) {
                const double u[2] = {0.4, -0.3};
                double e = cone_ray_identity(g2, 0.0, std::span<const double>(origin, 2), e1, one).residual;
                e = std::max(e, cone_ray_identity(g2, 0.0, u, e1, one).residual);
                note = "u = 0 and u = (0.4, -0.3)";
                return e;
            });
    R.check("cone_closed_form", "C^0 exp(-|x|^2)(0, beta, psi) = sqrt(pi); both sides of the identity = pi sqrt(pi)",
            1e-6, [&](std::string&) {
                auto rng = R.rng("cone_closed_form");
                double e = 0;
                for (int i = 0; i < 5; ++i) {
                    auto beta = rng.unit_vector(2);
                    double psi = rng.uniform(0.1, 3.0);
                    e = std::max(e, std::abs(cone_transform(g2, 0.0, std::span<const double>(origin, 2), beta, psi) -
                                             kSqrtPi));
                }
                auto id = cone_ray_identity(g2, 0.0, std::span<const double>(origin, 2), e1, one);
                e = std::max(e, std::abs(id.lhs - kPi * kSqrtPi));
                return std::max(e, std::abs(id.rhs - kPi * kSqrtPi));
            });
}

// ---- normal ---------------------------------------------------------------------
AnalyticField nbump(int m, std::uint64_t seed) {
    const double c1[2] = {0.3, -0.2}, c2[2] = {-0.4, 0.5};
    return make_bump(2, m, c1, 1.0, 1, seed) + make_bump(2, m, c2, 0.8, 2, seed + 7);
}

std::vector<std::size_t> interior_nodes(const GridField& f, int count, double r) {
    std::vector<std::size_t> out;
    for (const auto& p : point_cloud(2, count, r)) {
        int j[2];
        for (int a = 0; a < 2; ++a) j[a] = static_cast<int>(std::lround((p[a] + f.grid().L) / f.grid().h()));
        out.push_back(f.index(std::span<const int>(j, 2)));
    }
    return out;
}

void suite_normal(Runner& R) {
    const auto& cfg = R.cfg();
    const auto quad = sphere_quadrature(2, cfg.sphere_res);
    GridSpec g = cfg.grid;
    R.check("kernel_vs_sphere", "N^k by kernel convolution = (I^k)* I^k by sphere quadrature (interior, relative)",
            5e-3, [&](std::string& note) {
                double worst = 0;
                for (int m = 0; m <= 2; ++m)
                    for (int k = 0; k <= m; ++k) {
                        auto f = nbump(m, 40 + m);
                        auto fg = sample(f, g);
                        auto nk = normal_Nk_kernel(fg, k, true);
                        double e = 0, s = 0;
                        for (std::size_t p : interior_nodes(fg, 10, 1.5)) {
                            auto x = fg.position(p);
                            auto ref = normal_Nk(f, k, std::span<const double>(x.data(), 2), quad);
                            for (std::size_t c = 0; c < ref.size(); ++c) {
                                e = std::max(e, std::abs(nk.comp(c)[p] - ref[c]));
                                s = std::max(s, std::abs(ref[c]));
                            }
                        }
                        worst = std::max(worst, e / s);
                        note += fmt("%.1e ", e / s);
                    }
                note = "per (m,k): " + note;
                return worst;
            });
    const auto f2 = nbump(2, 11);
    const auto cloud = point_cloud(2, 4, 1.0);
    R.check("div_exact_zero", "delta^{k+1} N^k f = 0 (contracted exactly)", 1e-300, [&](std::string&) {
        double e = 0;
        for (const auto& p : cloud)
            for (int k = 0; k <= 1; ++k) e = std::max(e, div_r_normal(f2, k, k + 1, sp(p, 2), quad).value.max_abs());
        return e;
    });
    R.check("div_dual_forms", "delta^r N^k f: I-form vs J-form (relative)", 1e-4, [&](std::string&) {
        double e = 0;
        for (const auto& p : cloud)
            for (int k = 0; k <= 2; ++k)
                for (int r = 0; r <= k; ++r)
                    e = std::max(e, div_r_normal(f2, k, r, sp(p, 2), quad, INFINITY).rel_diff);
        return e;
    });
    const auto pts6 = point_cloud(2, 6, 1.0);
    std::vector<CommuteResult> commute;
    R.check("commute_residual", "delta N^k dv = -k^2 N^{k-1} v (relative)", 1e-3, [&](std::string&) {
        double e = 0;
        for (int k = 1; k <= 2; ++k) {
            commute.push_back(check_commute(nbump(k - 1, 70 + k), k, pts6, quad));
            e = std::max(e, commute.back().residual);
        }
        return e;
    });
    R.check("commute_factor", "fitted factor of delta N^k dv against N^{k-1} v is -k^2", 0.01, [&](std::string& note) {
        const bool mut = R.cfg().mutated("normal.commute_factor");
        if (commute.size() != 2) throw std::runtime_error("commute residual check did not complete");
        double e = 0;
        for (int k = 1; k <= 2; ++k) {
            const double target = mut ? -double(k) : -double(k * k);
            e = std::max(e, std::abs(commute[k - 1].ratio / target - 1.0));
            note += fmt("k=%g ", k) + fmt("ratio %.6f; ", commute[k - 1].ratio);
        }
        return e;
    });
    const auto sq = sphere_quadrature(2, 96);
    R.check("sv_m1_k0", "N^0((R^0 f)_ij) = (n-1)(R^0 N^0 f)_ij (pointwise relative)", 0.02, [&](std::string&) {
        return sv_normal_identity(nbump(1, 21), 0, pts6, sq).residual;
    });
    double sv_time = 0;
    R.check("sv_m2", "intertwining identity m! N^0 R^k f = sum_r (-1)^r C(k,r) d^r R^{k-r} G_{m-r}, m = 2", 0.05,
            [&](std::string& note) {
                const auto t0 = std::chrono::steady_clock::now();
                double e = 0;
                for (int k = 0; k <= 2; ++k) {
                    double r = sv_normal_identity(nbump(2, 30 + k), k, point_cloud(2, 3, 1.0), sq).residual;
                    note += fmt("k=%g ", k) + fmt("%.1e; ", r);
                    e = std::max(e, r);
                }
                sv_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                return e;
            });
    R.check("sv_m2_runtime", "m = 2 intertwining identity runtime (seconds)", 300.0,
            [&](std::string&) { return sv_time; });
    R.check("half_laplacian_fourier", "c_2 = 2/c(2,-1/2) = 4 pi; N^0 exp(-|x|^2)(0) = 2 pi^{3/2} (Fourier)", 1e-10,
            [&](std::string&) {
                const double fourier =
                    integrate([](double r) { return 2 * kPi * r * (4 * kPi / r) * kPi * std::exp(-r * r / 4); }, 0,
                              40, 1e-13) /
                    (4 * kPi * kPi);
                AnalyticField gf(2, 0);
                const double o[2] = {0, 0};
                gf[0] = AnalyticScalar::gaussian(2, o, 1.0);
                double e = std::abs(half_laplacian_constant(2) - 4 * kPi);
                e = std::max(e, std::abs(fourier - 2 * std::pow(kPi, 1.5)));
                return std::max(e, std::abs(fourier - normal_Nk(gf, 0, o, sphere_quadrature(2, 64))[0]));
            });
    R.check("half_laplacian", "(-Delta)^{1/2} N^0 f = c_n f (interior, relative to max f)", 0.02,
            [&](std::string& note) {
                const double cn = R.cfg().mutated("normal.half_laplacian_constant") ? 2 * kPi : 4 * kPi;
                AnalyticField gf(2, 0);
                const double o[2] = {0, 0};
                gf[0] = AnalyticScalar::gaussian(2, o, 1.0);
                auto f = sample(gf, g);
                auto inv = invert_N0_by_half_laplacian(f);
                if (!inv.support_ok) throw std::runtime_error("support too close to the box faces");
                double e = 0;
                for (std::size_t p = 0; p < f.points(); ++p) {
                    auto x = f.position(p);
                    if (std::max(std::abs(x[0]), std::abs(x[1])) > g.L / 2) continue;
                    e = std::max(e, std::abs(inv.recovered.comp(0)[p] * inv.c_n / cn - f.comp(0)[p]));
                }
                note = fmt("fitted constant %.5f", inv.fitted);
                return e / f.max_abs();
            });
}

// ---- fractional -----------------------------------------------------------------
GridField fill(const GridSpec& g, const std::function<double(std::span<const double>)>& fn) {
    GridField f(g, 0);
    for (std::size_t p = 0; p < f.points(); ++p) {
        auto x = f.position(p);
        f.comp(0)[p] = fn(std::span<const double>(x.data(), g.dim));
    }
    return f;
}

double r2(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

void suite_fractional(Runner& R) {
    GridSpec g = R.cfg().grid;
    const auto gauss = fill(g, [](std::span<const double> x) { return std::exp(-r2(x)); });
    R.check("scalar_identity", "lambda^{-s} = (1/Gamma(s)) int e^{-t lambda} t^{s-1} dt by log-time quadrature", 1e-6,
            [&](std::string&) {
                double e = 0;
                for (double lambda : {0.5, 1.0, 2.0, 10.0})
                    for (double s : {0.25, 0.5, 0.75}) e = std::max(e, scalar_identity_check(lambda, s));
                return e;
            });
    R.check("semigroup_vs_multiplier", "(-Delta)^{-1/2} by heat semigroup = |xi|^{-1} multiplier (|x| < 3, relative)",
            1e-3, [&](std::string&) {
                auto sg = semigroup_negative_power(gauss, 0.5, coeff_identity(2));
                auto mp = riesz_potential(gauss, 0.5, RieszMode::Periodic);
                double e = 0, m = 0;
                for (std::size_t p = 0; p < gauss.points(); ++p) {
                    auto x = gauss.position(p);
                    if (r2(std::span<const double>(x.data(), 2)) > 9) continue;
                    e = std::max(e, std::abs(sg.comp(0)[p] - mp.comp(0)[p]));
                    m = std::max(m, std::abs(mp.comp(0)[p]));
                }
                return e / m;
            });
    R.check("heat_closed_form", "e^{t Delta} exp(-|x|^2) = exp(-|x|^2/(1+4t)) / (1+4t)^{n/2}", 1e-8,
            [&](std::string&) {
                const double a = R.cfg().mutated("fractional.heat_exponent") ? 2.0 : 4.0;
                double e = 0;
                for (double t : {0.05, 0.1, 0.2}) {
                    auto u = heat_apply(gauss, t, coeff_identity(2));
                    for (std::size_t p = 0; p < u.points(); ++p) {
                        auto x = u.position(p);
                        double ex = std::exp(-r2(std::span<const double>(x.data(), 2)) / (1 + a * t)) / (1 + a * t);
                        e = std::max(e, std::abs(u.comp(0)[p] - ex));
                    }
                }
                return e;
            });
    R.check("variable_A_drift", "mass conservation of div(A grad) heat flow: drift per unit time (relative)", 1e-3,
            [&](std::string& note) {
                GridSpec gs{2, 48, 6.0, true};
                auto f = fill(gs, [](std::span<const double> x) { return std::exp(-r2(x)) * (1 + 0.4 * x[0] - 0.3 * x[1]); });
                auto mass = [&](const GridField& u) {
                    double s = 0;
                    for (double v : u.comp(0)) s += v;
                    return s * gs.h() * gs.h();
                };
                const double t = 0.5;
                HeatStats st;
                auto u = heat_apply(f, t, coeff_bump(2), {}, &st);
                note = "A = bump coefficient, N = 48, steps " + std::to_string(st.steps);
                return std::abs(mass(u) - mass(f)) / std::abs(mass(f)) / t;
            });
    R.check("ellipticity", "bump coefficient is uniformly elliptic (min ratio)", 0.5, [&](std::string&) {
        auto rep = check_ellipticity(coeff_bump(2), 200, 4.0, R.cfg().seed);
        return rep.ok ? rep.min_ratio : 0.0;
    }, true);
}

// ---- decompose ------------------------------------------------------------------
GridField bumps(const GridSpec& g, int rank, Rng rng) {
    GridField f(g, rank);
    for (std::size_t c = 0; c < f.components(); ++c)
        for (int b = 0; b < 3; ++b) {
            double a = rng.uniform(-1, 1), cx = rng.uniform(-1, 1), cy = rng.uniform(-1, 1);
            for (std::size_t p = 0; p < f.points(); ++p) {
                auto x = f.position(p);
                f.comp(c)[p] += a * std::exp(-1.5 * ((x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy)));
            }
        }
    return f;
}

GridField noise(const GridSpec& g, int rank, Rng rng) {
    GridField f(g, rank);
    for (std::size_t c = 0; c < f.components(); ++c)
        for (double& v : f.comp(c)) v = rng.uniform(-1, 1);
    return f;
}

double diff_max(const GridField& a, const GridField& b) {
    GridField d = a;
    d -= b;
    return d.max_abs();
}

void suite_decompose(Runner& R) {
    GridSpec g = R.cfg().grid;
    g.periodic = false;
    EllipticSolveConfig cfg;
    R.check("symbol_example", "min eig of j_xi i_xi on S^1, xi = e1 (n = 2) is 1/2", 1e-12, [&](std::string&) {
        const double e1[2] = {1, 0};
        return std::abs(symbol_positivity(2, 1, 1, e1) - 0.5);
    });
    R.check("symbol_positivity", "min eig of j_{xi^k} i_{xi^k} on S^m > 0 (smallest over a random sweep)", 0.0,
            [&](std::string&) {
                auto rng = R.rng("symbol_positivity");
                double mn = INFINITY;
                for (int t = 0; t < R.cfg().samples; ++t) {
                    auto xi = rng.unit_vector(2);
                    for (int m = 0; m <= 3; ++m)
                        for (int k = 1; k <= 2; ++k) mn = std::min(mn, symbol_positivity(2, m, k, xi));
                }
                return mn;
            }, true);
    R.check("manufactured", "solve (-1)^k delta^k d^k w = h for h from a known w0 (k = 1, m = 1)", 1e-4,
            [&](std::string& note) {
                auto w0 = bumps(g, 1, R.rng("manufactured"));
                apply_mask(w0, cfg.padding);
                auto h = elliptic_apply(w0, 1, cfg.padding);
                SolveReport rep;
                auto w = solve_dk_deltak(h, cfg, &rep);
                note = "CG iterations " + std::to_string(rep.iterations);
                return diff_max(w, w0) / w0.max_abs();
            });
    R.check("uniqueness", "two CG starts: residual of the difference within 10x tolerance", 10 * cfg.tolerance,
            [&](std::string&) {
                auto w0 = bumps(g, 1, R.rng("uniqueness"));
                apply_mask(w0, cfg.padding);
                auto h = elliptic_apply(w0, 1, cfg.padding);
                auto a = solve_dk_deltak(h, cfg);
                auto x0 = noise(g, 1, R.rng("uniqueness-start"));
                auto b = solve_dk_deltak(h, cfg, nullptr, &x0);
                a -= b;
                auto r = elliptic_apply(a, 1, cfg.padding);
                return std::sqrt(grid_inner(r, r) / grid_inner(h, h));
            });
    R.check("self_adjoint", "<Op u, v> = <u, Op v> (relative)", 1e-10, [&](std::string&) {
        double e = 0;
        for (int k = 1; k <= 2; ++k)
            for (int m = 0; m <= 2; ++m) {
                auto u = noise(g, m, R.rng("sa-u" + std::to_string(3 * k + m)));
                auto v = noise(g, m, R.rng("sa-v" + std::to_string(3 * k + m)));
                double a = grid_inner(elliptic_apply(u, k, 2), v), b = grid_inner(u, elliptic_apply(v, k, 2));
                e = std::max(e, std::abs(a - b) / std::abs(a));
            }
        return e;
    });
    R.check("energy_identity", "<(-1)^k delta^k d^k w, w> = <d^k w, d^k w> (relative)", 1e-10, [&](std::string&) {
        const bool mut = R.cfg().mutated("decompose.energy_sign");
        double e = 0;
        for (int k = 1; k <= 2; ++k)
            for (int m = 0; m <= 2; ++m) {
                auto w = noise(g, m, R.rng("en" + std::to_string(3 * k + m)));
                apply_mask(w, 2);
                auto dk = grid_d(w, k);
                auto op = grid_delta(dk, k);
                if (k % 2 && !mut) op *= -1.0;
                apply_mask(op, 2);
                double a = grid_inner(op, w), b = grid_inner(dk, dk);
                e = std::max(e, std::abs(a - b) / b);
            }
        return e;
    });
    auto f = bumps(g, 1, R.rng("decomposition-input"));
    Decomposition dec;
    bool have = false;
    R.check("div_residual", "max |delta^k f~| / max |delta^k f| (k = 1, m = 1)", 1e-4, [&](std::string& note) {
        dec = solenoidal_decompose(f, 1, cfg);
        have = true;
        note = "CG iterations " + std::to_string(dec.report.iterations);
        return dec.div_residual;
    });
    R.check("orthogonality", "|<f~, d^k v>| / <f, f>", 1e-4, [&](std::string&) {
        if (!have) throw std::runtime_error("decomposition failed");
        return dec.orthogonality;
    });
    R.check("r0_gauge", "R^0 f = R^0 f~ (relative to max |R^0 f|)", 1e-6, [&](std::string&) {
        if (!have) throw std::runtime_error("decomposition failed");
        auto a = saint_venant_R0_forward(f), b = saint_venant_R0_forward(dec.f_tilde);
        double e = 0;
        for (std::size_t q = 0; q < a.comps.size(); ++q)
            for (std::size_t p = 0; p < a.comps[q].size(); ++p) e = std::max(e, std::abs(a.comps[q][p] - b.comps[q][p]));
        return e / a.max_abs();
    });
    R.check("pure_potential", "f = d v0 gives f~ = 0 (max |f~| / max |f|)", 1e-3, [&](std::string&) {
        auto v0 = bumps(g, 0, R.rng("pure_potential"));
        apply_mask(v0, 2);
        auto fp = grid_d(v0);
        return solenoidal_decompose(fp, 1, cfg).f_tilde.max_abs() / fp.max_abs();
    });
}

// ---- ucp ------------------------------------------------------------------------
void suite_ucp(Runner& R) {
    UcpConfig u;
    u.seed = R.cfg().seed;
    u.fields = R.cfg().ucp_fields;
    const double tau = u.tau;
    GaugeDemo a;
    bool have_a = false;
    R.check("gauge_lines", "f = d v (m = 1, k = 0): max over lines |I^0 f|", 1e-8, [&](std::string&) {
        a = ucp_gauge_demo(1, 0, u, R.cfg().samples);
        have_a = true;
        return a.gauge.I_max;
    });
    R.check("gauge_saint_venant", "f = d v (m = 1, k = 0): max |R^0 f|", 1e-9, [&](std::string&) {
        if (!have_a) throw std::runtime_error("gauge demo failed");
        return a.gauge.R_max;
    });
    R.check("derivative_probe", "f zeroed on U, non-potential: first non-vanishing derivative order of N^0 f at x0",
            4.0, [&](std::string& note) {
                if (!have_a) throw std::runtime_error("gauge demo failed");
                for (double v : a.generic.values) note += fmt("%.2e ", v);
                note = "|d^j N^0 f|, j = 0..6: " + note + "(reported evidence)";
                return a.generic.first_nonvanishing < 0 ? INFINITY : double(a.generic.first_nonvanishing);
            });
    R.check("derivative_probe_zero", "f = 0: all derivative orders vanish", 1e-300, [&](std::string&) {
        if (!have_a) throw std::runtime_error("gauge demo failed");
        return *std::max_element(a.zero.values.begin(), a.zero.values.end());
    });
    auto margin_note = [](const MarginReport& m) {
        return std::to_string(m.fields) + " fields, " + std::to_string(m.violations) + " violations, median " +
               fmt("%.3e", m.median_margin) + ", max " + fmt("%.3e", m.max_margin);
    };
    for (double s : {0.25, 0.5}) {
        R.check(s == 0.25 ? "antilocality_s025" : "antilocality_s050",
                "f = 0 on U, f != 0: min over fields of max_U |A_s f| / ||f||_1", tau, [&](std::string& note) {
                    auto m = antilocality_margins(s, u);
                    note = margin_note(m);
                    return m.violations ? 0.0 : m.min_margin;
                }, true);
    }
    R.check("antilocality_support", "f supported in U: min over fields of max outside |A_s f| / ||f||_1 (s = 1/2)",
            tau, [&](std::string& note) {
                auto m = antilocality_margins(0.5, u, true);
                note = margin_note(m);
                return m.violations ? 0.0 : m.min_margin;
            }, true);
    R.check("annulus_kernel", "nonnegative annulus bump: A_{1/2} f(x0) = c(2,-1/2) int |y|^{-1} f (relative)", 1e-6,
            [&](std::string& note) {
                auto c = annulus_kernel_check(0.5, u);
                note = fmt("value %.6e", c.riesz);
                return c.riesz > 0 ? c.rel_diff : INFINITY;
            });
    R.check("normal_margin", "f = 0 on U: min over fields of min_E max_E |N^0 f| / ||f||_inf", tau,
            [&](std::string& note) {
                auto m = normal_margins(u);
                note = margin_note(m);
                return m.violations ? 0.0 : m.min_margin;
            }, true);
    MarginReport curl;
    bool have_curl = false;
    R.check("curl_margin", "f = 0 on U (vector): min over fields of min_E max_E |curl N^0 f| / ||f||_inf", tau,
            [&](std::string& note) {
                curl = curl_margins(u);
                have_curl = true;
                note = margin_note(curl);
                return curl.violations ? 0.0 : curl.min_margin;
            }, true);
    R.check("curl_identity", "N^0(curl f) = (n-1) curl(N^0 f) on E (relative, max over fields)", 1e-3,
            [&](std::string&) {
                if (!have_curl) throw std::runtime_error("curl demo failed");
                return curl.residual;
            });
    ConeDemo cone;
    bool have_cone = false;
    R.check("cone_chain", "int_0^pi C^{2s-1} f(u, beta, psi) dpsi = A_s f(u) / c(n,-s) (Gaussian, u = 0, s = 1/2)",
            1e-5, [&](std::string&) {
                cone = cone_ucp_demo(0.5, 0.3, u);
                have_cone = true;
                double rhs = cone.chain_rhs;
                if (R.cfg().mutated("ucp.cone_chain_constant")) rhs *= riesz_constant(2, -0.5);
                return std::abs(cone.chain_lhs - rhs);
            });
    R.check("cone_margin", "f = 0 on U: min over fields of max_U |int C^0 f dpsi| / ||f||_1", tau,
            [&](std::string& note) {
                if (!have_cone) throw std::runtime_error("cone demo failed");
                note = margin_note(cone.margins);
                return cone.margins.violations ? 0.0 : cone.margins.min_margin;
            }, true);
}

}  // namespace

// ---- config -----------------------------------------------------------------------

const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = {"tensor", "diffid", "xray", "normal", "fractional", "decompose", "ucp"};
    return ids;
}

const std::vector<MutationInfo>& mutation_table() {
    static const std::vector<MutationInfo> t = {
        {"tensor.symbol_identity", "tensor", "symbol_identity", "coefficient m/(m+1) replaced by 1"},
        {"diffid.r_from_w_factor", "diffid", "w_r_roundtrip", "R-from-W factor C(m,k)/(m-k+1)"},
        {"diffid.curl_curl_sign", "diffid", "curl_curl", "sign of the 2 d_j R^0 term flipped"},
        {"xray.gauge_sign", "xray", "gauge_identity", "I^k(dv) = +k I^{k-1} v"},
        {"xray.exp_series_factorial", "xray", "exp_series", "1/k! dropped from the series"},
        {"normal.commute_factor", "normal", "commute_factor", "factor -k instead of -k^2"},
        {"normal.half_laplacian_constant", "normal", "half_laplacian", "c_2 = 2 pi instead of 4 pi"},
        {"fractional.heat_exponent", "fractional", "heat_closed_form", "1 + 2t instead of 1 + 4t"},
        {"decompose.energy_sign", "decompose", "energy_identity", "(-1)^k dropped"},
        {"ucp.cone_chain_constant", "ucp", "cone_chain", "1/c(n,-s) normalisation dropped"},
    };
    return t;
}

double SuiteConfig::tol(const std::string& check, double fallback) const {
    auto it = tolerances.find(check);
    return it == tolerances.end() ? fallback : it->second;
}

bool SuiteConfig::mutated(const std::string& id) const {
    return std::find(mutations.begin(), mutations.end(), id) != mutations.end();
}

void SuiteConfig::validate() const {
    const auto& ids = suite_ids();
    if (std::find(ids.begin(), ids.end(), suite) == ids.end() && suite != "all")
        throw std::invalid_argument("unknown suite: " + suite);
    if (n != 2 && n != 3) throw std::invalid_argument("n must be 2 or 3");
    if (n == 3 && kTwoDimOnly.count(suite)) throw std::invalid_argument("suite " + suite + " runs in n = 2 only");
    if (grid.dim != 2 && kTwoDimOnly.count(suite)) throw std::invalid_argument("suite grid must be 2-D");
    grid.validate();
    for (const auto& [k, v] : tolerances)
        if (!(v > 0)) throw std::invalid_argument("tolerance for " + k + " must be positive");
    for (const auto& m : mutations) {
        const auto& t = mutation_table();
        if (std::none_of(t.begin(), t.end(), [&](const MutationInfo& i) { return i.id == m; }))
            throw std::invalid_argument("unknown mutation: " + m);
    }
    if (sphere_res < 8 || samples < 1 || ucp_fields < 1) throw std::invalid_argument("sample counts too small");
}

SuiteConfig SuiteConfig::from_json(const nlohmann::json& j, SuiteConfig b) {
    b.suite = j.value("suite", b.suite);
    b.n = j.value("n", b.n);
    if (j.contains("n") && !j.contains("grid")) b.grid = default_grid(b.n);
    if (j.contains("grid")) {
        const auto& gj = j["grid"];
        b.grid.dim = b.n;
        b.grid.N = gj.value("N", b.grid.N);
        b.grid.L = gj.value("L", b.grid.L);
    }
    b.sphere_res = j.value("sphere_res", b.sphere_res);
    b.samples = j.value("samples", b.samples);
    b.ucp_fields = j.value("ucp_fields", b.ucp_fields);
    b.seed = j.value("seed", b.seed);
    if (j.contains("tolerances")) b.tolerances = j["tolerances"].get<std::map<std::string, double>>();
    if (j.contains("mutations")) b.mutations = j["mutations"].get<std::vector<std::string>>();
    return b;
}

SuiteConfig SuiteConfig::from_json(const nlohmann::json& j) { return from_json(j, SuiteConfig{}); }

nlohmann::json SuiteConfig::to_json() const {
    return {{"suite", suite},     {"n", n},
            {"grid", {{"N", grid.N}, {"L", grid.L}}},
            {"sphere_res", sphere_res}, {"samples", samples},
            {"ucp_fields", ucp_fields}, {"seed", seed},
            {"tolerances", tolerances}, {"mutations", mutations}};
}

VerificationReport run_suite(const std::string& id, const SuiteConfig& cfg_in) {
    SuiteConfig cfg = cfg_in;
    cfg.suite = id;
    cfg.validate();
    if (id == "all") throw std::invalid_argument("run_suite: run the suites one at a time");
    Runner r(id, cfg);
    if (id == "tensor") suite_tensor(r);
    else if (id == "diffid") suite_diffid(r);
    else if (id == "xray") suite_xray(r);
    else if (id == "normal") suite_normal(r);
    else if (id == "fractional") suite_fractional(r);
    else if (id == "decompose") suite_decompose(r);
    else if (id == "ucp") suite_ucp(r);
    return r.take();
}

}  // namespace ttomo
