#include "ttomo/ucp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ttomo/diffops.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/random.hpp"

namespace ttomo {

namespace {

constexpr double kPi = std::numbers::pi;

double dist(std::span<const double> x, const Vec& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
    return std::sqrt(s);
}

// 1 on B(c, r0), 0 outside B(c, r1)
double cutoff(std::span<const double> x, const Disk& U) {
    return 1.0 - smooth_step((dist(x, U.center) - U.r0) / (U.r1 - U.r0));
}

MarginReport summarize(std::string kind, std::vector<double> margins, double tau) {
    MarginReport r;
    r.kind = std::move(kind);
    r.fields = static_cast<int>(margins.size());
    for (double m : margins)
        if (!(m > tau)) ++r.violations;
    if (!margins.empty()) {
        auto s = margins;
        std::sort(s.begin(), s.end());
        r.min_margin = s.front();
        r.max_margin = s.back();
        r.median_margin = s[s.size() / 2];
    }
    r.margins = std::move(margins);
    return r;
}

// points of U used for max_U: the center and four at half radius
std::vector<Vec> u_points(const Disk& U) {
    std::vector<Vec> out{U.center};
    for (int a = 0; a < 4; ++a) {
        double t = a * kPi / 2 + 0.3;
        out.push_back(Vec{U.center[0] + 0.5 * U.r0 * std::cos(t), U.center[1] + 0.5 * U.r0 * std::sin(t), 0});
    }
    return out;
}

std::span<const double> sp(const Vec& v, int n = 2) { return {v.data(), static_cast<std::size_t>(n)}; }

void check_s(double s) {
    if (!(s > 0.0 && s <= 0.5) || s == std::floor(s))
        throw std::invalid_argument("ucp: need 0 < s <= n/4 = 1/2 (n = 2), s not an integer");
}

}  // namespace

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

bool Disk::contains(std::span<const double> x, double shrink) const { return dist(x, center) < r0 * shrink; }

SmoothField from_analytic(const AnalyticField& g, double radius) {
    SmoothField f;
    f.dim = g.dim();
    f.rank = g.rank();
    f.radius = radius;
    f.eval = [g](std::span<const double> x) { return g(x); };
    return f;
}

SmoothField zero_on(const AnalyticField& g, const Disk& U, double radius) {
    SmoothField f = from_analytic(g, radius);
    f.eval = [g, U](std::span<const double> x) {
        double w = 1.0 - cutoff(x, U);
        if (w == 0.0) return SymTensor(g.dim(), g.rank());
        SymTensor v = g(x);
        v *= w;
        return v;
    };
    return f;
}

SmoothField keep_in(const AnalyticField& g, const Disk& U) {
    SmoothField f = from_analytic(g, U.r1);
    f.center = U.center;
    f.eval = [g, U](std::span<const double> x) {
        double w = cutoff(x, U);
        if (w == 0.0) return SymTensor(g.dim(), g.rank());
        SymTensor v = g(x);
        v *= w;
        return v;
    };
    return f;
}

ScalarFn to_scalar_fn(const SmoothField& f, std::size_t comp) {
    ScalarFn s;
    s.dim = f.dim;
    s.center = f.center;
    s.radius = f.radius;
    auto ev = f.eval;
    s.f = [ev, comp](std::span<const double> x) { return ev(x)[comp]; };
    return s;
}

double ray_numeric(const SmoothField& f, int k, std::span<const double> z, std::span<const double> xi, double rel_tol) {
    const int n = f.dim;
    double b = 0.0, c = 0.0;
    for (int i = 0; i < n; ++i) {
        b += (z[i] - f.center[i]) * xi[i];
        c += (z[i] - f.center[i]) * (z[i] - f.center[i]);
    }
    double disc = b * b - (c - f.radius * f.radius);
    if (disc <= 0.0) return 0.0;
    const double lo = -b - std::sqrt(disc), hi = -b + std::sqrt(disc);
    SymTensor P = tensor_power(xi, f.rank);
    Vec y{};
    auto g = [&](double t) {
        for (int i = 0; i < n; ++i) y[i] = z[i] + t * xi[i];
        double v = dot(f(sp(y, n)), P);
        return k == 0 ? v : std::pow(t, k) * v;
    };
    return integrate(g, lo, hi, rel_tol);
}

SymTensor normal_numeric(const SmoothField& f, int k, std::span<const double> x, const SphereQuadrature& quad,
                         double rel_tol) {
    LineFunction g = [&](std::span<const double> z, std::span<const double> xi) {
        return ray_numeric(f, k, z, xi, rel_tol);
    };
    return adjoint_I_star(g, k, f.rank, x, quad);
}

namespace {
template <class F>
void box_nodes(const SmoothField& f, int nodes, F&& visit) {
    if (f.dim != 2) throw std::invalid_argument("ucp norms: n = 2 only");
    std::vector<double> x, y, wx, wy;
    gauss_legendre(nodes, f.center[0] - f.radius, f.center[0] + f.radius, x, wx);
    gauss_legendre(nodes, f.center[1] - f.radius, f.center[1] + f.radius, y, wy);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j) {
            Vec p{x[i], y[j], 0};
            visit(f(sp(p)), wx[i] * wy[j]);
        }
}
}  // namespace

double l1_norm(const SmoothField& f, int nodes) {
    double s = 0.0;
    box_nodes(f, nodes, [&](const SymTensor& v, double w) {
        double a = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c) a += v.table().multiplicity(c) * v[c] * v[c];
        s += w * std::sqrt(a);
    });
    return s;
}

double sup_norm(const SmoothField& f, int nodes) {
    double s = 0.0;
    box_nodes(f, nodes, [&](const SymTensor& v, double) { s = std::max(s, v.max_abs()); });
    return s;
}

std::array<double, 7> derivatives_at_zero(const std::function<double(double)>& g, double h) {
    Eigen::Matrix<double, 7, 7> V;
    Eigen::Matrix<double, 7, 1> y;
    for (int i = 0; i < 7; ++i) {
        double t = (i - 3) * h;
        y(i) = g(t);
        for (int j = 0; j < 7; ++j) V(i, j) = std::pow(t, j);
    }
    Eigen::Matrix<double, 7, 1> a = V.colPivHouseholderQr().solve(y);
    std::array<double, 7> d{};
    for (int j = 0; j < 7; ++j) d[j] = factorial(j) * a(j);
    return d;
}

AnalyticField random_outside_field(int m, const Disk& U, std::uint64_t seed) {
    Rng rng(seed);
    AnalyticField f(2, m);
    for (int b = 0; b < 3; ++b) {
        Vec c{};
        do {
            c[0] = rng.uniform(-3, 3);
            c[1] = rng.uniform(-3, 3);
        } while (dist(sp(c), U.center) < U.r1 + 0.2);
        double w = rng.uniform(0.6, 1.2), amp = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1 : 1);
        f += amp * make_bump(2, m, sp(c), w, 1, rng.bits());
    }
    return f;
}

GaugeDemo ucp_gauge_demo(int m, int k, const UcpConfig& cfg, int lines) {
    if (m < 0 || m > 2 || k < 0 || k > m) throw std::invalid_argument("ucp_gauge_demo: need 0 <= k <= m <= 2");
    GaugeDemo out;
    out.m = m;
    out.k = k;
    Rng rng(cfg.seed);
    if (k + 1 <= m) {
        out.gauge.applicable = true;
        const double c[2] = {0.2, -0.3};
        auto v = make_bump(2, m - k - 1, c, 1.0, 2, rng.bits());
        auto f = inner_derivative(v, k + 1);
        for (const auto& p : point_cloud(2, 50)) {
            const auto r = saint_venant_R(f, k, sp(p));
            for (double x : r.data()) out.gauge.R_max = std::max(out.gauge.R_max, std::abs(x));
        }
        for (int i = 0; i < lines; ++i) {
            auto xi = rng.unit_vector(2);
            auto x = rng.uniform_vector(2, -1.5, 1.5);
            Line l = Line::through(x, xi);
            for (int p = 0; p <= k; ++p) out.gauge.I_max = std::max(out.gauge.I_max, std::abs(ray_I(f, p, l)));
        }
    }
    const auto quad = sphere_quadrature(2, cfg.sphere_res);
    auto probe = [&](const SmoothField& f) {
        DerivativeProbe d;
        const auto& tab = SymIndexTable::get(2, m);
        for (std::size_t c = 0; c < tab.size(); ++c) {
            auto g = [&](double t) {
                Vec x = cfg.U.center;
                x[0] += t;
                return normal_numeric(f, k, sp(x), quad, cfg.line_tol)[c];
            };
            auto dv = derivatives_at_zero(g, 0.25 * cfg.U.r0);
            for (int j = 0; j < 7; ++j) d.values[j] = std::max(d.values[j], std::abs(dv[j]));
        }
        for (int j = 0; j < 7; ++j)
            if (d.values[j] > d.noise_floor) {
                d.first_nonvanishing = j;
                break;
            }
        return d;
    };
    out.generic = probe(zero_on(random_outside_field(m, cfg.U, rng.bits()), cfg.U, 12.0));
    out.zero = probe(zero_on(AnalyticField(2, m), cfg.U, 12.0));
    return out;
}

MarginReport antilocality_margins(double s, const UcpConfig& cfg, bool support_variant) {
    check_s(s);
    const auto quad = sphere_quadrature(2, cfg.sphere_res);
    Rng root(cfg.seed);
    std::vector<Vec> pts;
    if (support_variant) {
        for (int a = 0; a < 5; ++a) {
            double t = 2 * kPi * a / 5 + 0.1, r = cfg.U.r1 + 0.4;
            pts.push_back(Vec{cfg.U.center[0] + r * std::cos(t), cfg.U.center[1] + r * std::sin(t), 0});
        }
    } else {
        pts = u_points(cfg.U);
    }
    std::vector<double> margins;
    for (int i = 0; i < cfg.fields; ++i) {
        Rng rng = root.split(i);
        SmoothField f;
        if (support_variant) {
            AnalyticField g(2, 0);
            for (int b = 0; b < 2; ++b) {
                Vec c{cfg.U.center[0] + rng.uniform(-0.5, 0.5), cfg.U.center[1] + rng.uniform(-0.5, 0.5), 0};
                g += rng.uniform(-1.5, 1.5) * make_bump(2, 0, sp(c), rng.uniform(0.4, 0.8), 1, rng.bits());
            }
            f = keep_in(g, cfg.U);
        } else {
            f = zero_on(random_outside_field(0, cfg.U, rng.bits()), cfg.U, 12.0);
        }
        ScalarFn fn = to_scalar_fn(f);
        double mx = 0.0;
        for (const auto& p : pts) mx = std::max(mx, std::abs(riesz_average(fn, s, sp(p), quad)));
        margins.push_back(mx / l1_norm(f, 160));
    }
    return summarize(support_variant ? "antilocality-support" : "antilocality", std::move(margins), cfg.tau);
}

namespace {
// four small disks E in U, each sampled at its center and two offsets
std::vector<std::vector<Vec>> e_sets(const Disk& U, int per_set) {
    std::vector<std::vector<Vec>> out;
    const double off[4][2] = {{0.5, 0}, {-0.5, 0}, {0, 0.5}, {0, -0.5}};
    for (const auto& o : off) {
        Vec c{U.center[0] + o[0] * U.r0, U.center[1] + o[1] * U.r0, 0};
        std::vector<Vec> e{c};
        if (per_set > 1) e.push_back(Vec{c[0] + U.r0 / 8, c[1], 0});
        if (per_set > 2) e.push_back(Vec{c[0], c[1] + U.r0 / 8, 0});
        out.push_back(e);
    }
    return out;
}
}  // namespace

MarginReport normal_margins(const UcpConfig& cfg) {
    const auto quad = sphere_quadrature(2, cfg.sphere_res);
    Rng root(cfg.seed ^ 0xB0B);
    const auto E = e_sets(cfg.U, 3);
    std::vector<double> margins;
    for (int i = 0; i < cfg.fields; ++i) {
        Rng rng = root.split(i);
        auto f = zero_on(random_outside_field(0, cfg.U, rng.bits()), cfg.U, 12.0);
        double mn = INFINITY;
        for (const auto& e : E) {
            double mx = 0.0;
            for (const auto& p : e) mx = std::max(mx, std::abs(normal_numeric(f, 0, sp(p), quad, cfg.line_tol)[0]));
            mn = std::min(mn, mx);
        }
        margins.push_back(mn / sup_norm(f, 160));
    }
    return summarize("normal", std::move(margins), cfg.tau);
}

MarginReport curl_margins(const UcpConfig& cfg) {
    const auto quad = sphere_quadrature(2, cfg.sphere_res);
    Rng root(cfg.seed ^ 0xC0C);
    const auto E = e_sets(cfg.U, 1);
    std::vector<double> margins;
    double worst = 0.0;
    for (int i = 0; i < cfg.fields; ++i) {
        Rng rng = root.split(i);
        auto f = zero_on(random_outside_field(1, cfg.U, rng.bits()), cfg.U, 12.0);
        // scalar curl d_0 f_1 - d_1 f_0 by central differences
        SmoothField c = f;
        c.rank = 0;
        auto ev = f.eval;
        c.eval = [ev](std::span<const double> x) {
            const double e = 1e-5;
            Vec a{x[0] + e, x[1], 0}, b{x[0] - e, x[1], 0}, u{x[0], x[1] + e, 0}, d{x[0], x[1] - e, 0};
            SymTensor out(2, 0);
            out[0] = (ev(sp(a))[1] - ev(sp(b))[1] - ev(sp(u))[0] + ev(sp(d))[0]) / (2 * e);
            return out;
        };
        auto vecN = [&](double x0, double x1) {
            Vec p{x0, x1, 0};
            return normal_numeric(f, 0, sp(p), quad, cfg.line_tol);
        };
        const double h = 0.05;
        auto dN = [&](const Vec& p, int axis, int comp) {
            double s = 0.0;
            const double w[4] = {1, -8, 8, -1};
            const int o[4] = {-2, -1, 1, 2};
            for (int q = 0; q < 4; ++q) {
                Vec y = p;
                y[axis] += o[q] * h;
                s += w[q] * vecN(y[0], y[1])[comp];
            }
            return s / (12 * h);
        };
        double mn = INFINITY, lhs_max = 0.0, diff = 0.0;
        for (const auto& e : E) {
            double mx = 0.0;
            for (const auto& p : e) {
                double lhs = normal_numeric(c, 0, sp(p), quad, cfg.line_tol)[0];
                double rhs = (2 - 1) * (dN(p, 0, 1) - dN(p, 1, 0));
                mx = std::max(mx, std::abs(rhs));
                lhs_max = std::max(lhs_max, std::abs(lhs));
                diff = std::max(diff, std::abs(lhs - rhs));
            }
            mn = std::min(mn, mx);
        }
        if (lhs_max > 0) worst = std::max(worst, diff / lhs_max);
        margins.push_back(mn / sup_norm(f, 160));
    }
    auto r = summarize("curl", std::move(margins), cfg.tau);
    r.residual = worst;
    return r;
}

AnnulusCheck annulus_kernel_check(double s, const UcpConfig& cfg) {
    check_s(s);
    const Disk U = cfg.U;
    const double a = U.r0, b = U.r1;
    // peak value 1 at the mid radius
    const double top = 4.0 / ((b - a) * (b - a));
    auto psi = [a, b, top](double r) {
        return (r <= a || r >= b) ? 0.0 : std::exp(top - 1.0 / ((r - a) * (b - r)));
    };
    ScalarFn f;
    f.dim = 2;
    f.center = U.center;
    f.radius = b;
    f.f = [psi, U](std::span<const double> x) { return psi(dist(x, U.center)); };
    AnnulusCheck out;
    out.riesz = riesz_average(f, s, sp(U.center), sphere_quadrature(2, cfg.sphere_res));
    out.radial = riesz_constant(2, -s) * 2 * kPi *
                 integrate([&](double r) { return std::pow(r, 2 * s - 1) * psi(r); }, a, b, 1e-13);
    out.rel_diff = std::abs(out.riesz - out.radial) / std::abs(out.radial);
    return out;
}

ConeDemo cone_ucp_demo(double s, double beta_angle, const UcpConfig& cfg) {
    check_s(s);
    const double k = 2 * s - 1;
    const double beta[2] = {std::cos(beta_angle), std::sin(beta_angle)};
    ConeDemo out;
    ScalarFn g;
    g.dim = 2;
    g.radius = 9.0;
    g.f = [](std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };
    const double origin[2] = {0, 0};
    out.chain_lhs = cone_ray_identity(g, k, origin, beta, [](double) { return 1.0; }, 64, 64).lhs;
    out.chain_rhs = riesz_average(g, s, origin, sphere_quadrature(2, 64)) / riesz_constant(2, -s);
    out.chain_residual = std::abs(out.chain_lhs - out.chain_rhs);

    std::vector<double> ps, pw;
    gauss_legendre(32, 0.0, kPi, ps, pw);
    Rng root(cfg.seed ^ 0xC09E);
    const auto pts = u_points(cfg.U);
    std::vector<double> margins;
    for (int i = 0; i < cfg.fields; ++i) {
        Rng rng = root.split(i);
        auto f = zero_on(random_outside_field(0, cfg.U, rng.bits()), cfg.U, 12.0);
        ScalarFn fn = to_scalar_fn(f);
        double mx = 0.0;
        for (const auto& p : pts) {
            double v = 0.0;
            for (std::size_t q = 0; q < ps.size(); ++q) v += pw[q] * cone_transform(fn, k, sp(p), beta, ps[q]);
            mx = std::max(mx, std::abs(v));
        }
        margins.push_back(mx / l1_norm(f, 160));
    }
    out.margins = summarize("cone", std::move(margins), cfg.tau);
    return out;
}

}  // namespace ttomo
