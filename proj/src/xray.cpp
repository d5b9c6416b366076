#include "ttomo/xray.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ttomo {

namespace {

double dotv(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_dims(int n, std::span<const double> x, std::span<const double> xi) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("dimension must be 2 or 3");
    if (static_cast<int>(x.size()) != n || static_cast<int>(xi.size()) != n)
        throw std::invalid_argument("point and direction must have the field dimension");
}

// Distance from a block center beyond which r^{deg + extra} e^{-r^2/w^2}
// drops below `tail`.
double block_radius(const GaussBlock& b, double tail, int extra) {
    if (!b.decays()) throw std::domain_error("field does not decay along lines");
    int deg = 0;
    for (const auto& [e, c] : b.poly) deg = std::max(deg, e[0] + e[1] + e[2]);
    deg += extra;
    const double w = b.width;
    double r = w;
    while (true) {
        double env = std::pow(std::max(1.0, r), deg) * std::exp(-(r * r) / (w * w));
        if (env < tail || r > 200.0 * w) break;
        r += 0.25 * w;
    }
    return r;
}

// Sum of adaptive integrals over panels no wider than `scale`, so narrow
// features inside a long interval cannot slip between the first Kronrod nodes.
double line_integral(const std::function<double(double)>& g, double lo, double hi, double scale, double tol,
                     int depth = 18) {
    if (!(hi > lo)) return 0.0;
    const int pieces = std::clamp(static_cast<int>(std::ceil((hi - lo) / scale)), 1, 4096);
    const double step = (hi - lo) / pieces;
    double s = 0.0;
    for (int i = 0; i < pieces; ++i) s += integrate(g, lo + i * step, lo + (i + 1) * step, tol, depth);
    return s;
}

double min_width(const AnalyticField& f) {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& c : f.comps())
        for (const auto& b : c.blocks()) w = std::min(w, b.width);
    return std::isfinite(w) ? w : 1.0;
}

Vec unit_of(std::span<const double> xi) {
    const double nrm = std::sqrt(dotv(xi, xi));
    if (!(nrm > 0.0)) throw std::invalid_argument("direction must be nonzero");
    Vec u{};
    for (std::size_t i = 0; i < xi.size(); ++i) u[i] = xi[i] / nrm;
    return u;
}

}  // namespace

Line Line::make(std::span<const double> x, std::span<const double> xi, bool tangent) {
    if (x.size() != xi.size() || x.size() < 2 || x.size() > kMaxDim)
        throw std::invalid_argument("Line: x and xi must have equal dimension 2 or 3");
    Line l;
    l.dim = static_cast<int>(x.size());
    l.x = to_vec(x);
    l.xi = to_vec(xi);
    l.tangent = tangent;
    if (std::abs(std::sqrt(dotv(xi, xi)) - 1.0) > 1e-12) throw std::invalid_argument("Line: direction must be unit");
    if (tangent && std::abs(dotv(x, xi)) > 1e-10) throw std::invalid_argument("Line: <x, xi> must vanish");
    return l;
}

Line Line::through(std::span<const double> x, std::span<const double> xi) {
    Vec u = unit_of(xi);
    const int n = static_cast<int>(x.size());
    std::span<const double> us(u.data(), n);
    const double c = dotv(x, us);
    Vec z{};
    for (int i = 0; i < n; ++i) z[i] = x[i] - c * u[i];
    return make(std::span<const double>(z.data(), n), us, true);
}

ScalarFn as_fn(const AnalyticScalar& f, double tail) {
    ScalarFn s;
    s.dim = f.dim();
    s.f = [f](std::span<const double> x) { return f(x); };
    if (f.is_zero()) {
        s.radius = 0.0;
        return s;
    }
    s.center = f.blocks().front().center;
    double r = 0.0;
    for (const auto& b : f.blocks()) {
        double d = 0.0;
        for (int i = 0; i < kMaxDim; ++i) d += (b.center[i] - s.center[i]) * (b.center[i] - s.center[i]);
        r = std::max(r, std::sqrt(d) + block_radius(b, tail, 4));
    }
    s.radius = r;
    return s;
}

ScalarFn as_fn(const GridField& g, std::size_t comp) {
    if (comp >= g.components()) throw std::out_of_range("as_fn: component index");
    ScalarFn s;
    s.dim = g.dim();
    s.f = [g, comp](std::span<const double> x) { return g.interpolate_cubic(comp, x); };
    s.radius = g.grid().L * std::sqrt(static_cast<double>(g.dim()));
    return s;
}

std::pair<double, double> support_interval(const ScalarFn& f, std::span<const double> x, std::span<const double> xi) {
    const int n = f.dim;
    check_dims(n, x, xi);
    const double a = dotv(xi, xi);
    if (!(a > 0.0)) throw std::invalid_argument("direction must be nonzero");
    double b = 0.0, c = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = x[i] - f.center[i];
        b += d * xi[i];
        c += d * d;
    }
    c -= f.radius * f.radius;
    const double disc = b * b - a * c;
    if (disc <= 0.0) return {1.0, 0.0};
    const double r = std::sqrt(disc);
    return {(-b - r) / a, (-b + r) / a};
}

std::pair<double, double> support_interval(const AnalyticField& f, std::span<const double> x,
                                           std::span<const double> xi, double tail) {
    const double a = std::sqrt(dotv(xi, xi));
    if (!(a > 0.0)) throw std::invalid_argument("direction must be nonzero");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& comp : f.comps()) {
        for (const auto& b : comp.blocks()) {
            double ta = 0.0;
            for (int i = 0; i < f.dim(); ++i) ta += (b.center[i] - x[i]) * xi[i];
            ta /= a * a;
            const double r = block_radius(b, tail, 8) / a;
            lo = std::min(lo, ta - r);
            hi = std::max(hi, ta + r);
        }
    }
    return {lo, hi};
}

double projected(const AnalyticField& f, std::span<const double> x, std::span<const double> xi, double t) {
    const int n = f.dim();
    Vec p{};
    for (int i = 0; i < n; ++i) p[i] = x[i] + t * xi[i];
    SymTensor v = f(std::span<const double>(p.data(), n));
    return dot(v, tensor_power(xi, f.rank()));
}

namespace {

// int t^k e^{alpha t} <f(x + t xi), xi^m> dt along arbitrary xi.
double moment_exact(const AnalyticField& f, int k, std::span<const double> x, std::span<const double> xi,
                    double alpha) {
    const SymTensor P = tensor_power(xi, f.rank());
    const auto& tab = f.table();
    double s = 0.0;
    for (std::size_t c = 0; c < f.size(); ++c) {
        if (f[c].is_zero()) continue;
        s += tab.multiplicity(c) * P[c] * f[c].line_moment(k, x, xi, alpha);
    }
    return s;
}

double moment_numeric(const AnalyticField& f, int k, std::span<const double> x, std::span<const double> xi,
                      double alpha, const QuadratureSpec& q) {
    auto [lo, hi] = support_interval(f, x, xi, q.tail);
    if (!(hi > lo)) return 0.0;
    if (alpha != 0.0) {
        // e^{alpha t} shifts each Gaussian peak by alpha w^2 / (2 |xi|^2)
        double shift = 0.0;
        const double a2 = dotv(xi, xi);
        for (const auto& comp : f.comps())
            for (const auto& b : comp.blocks()) shift = std::max(shift, std::abs(alpha) * b.width * b.width / (2 * a2));
        if (alpha > 0) hi += shift; else lo -= shift;
    }
    auto g = [&](double t) { return std::pow(t, k) * std::exp(alpha * t) * projected(f, x, xi, t); };
    const double scale = min_width(f) / std::sqrt(dotv(xi, xi));
    return line_integral(g, lo, hi, scale, q.line_tol, q.line_depth);
}

}  // namespace

double ray_I(const AnalyticField& f, int k, const Line& line, RayMethod method, const QuadratureSpec& q) {
    if (k < 0) throw std::invalid_argument("ray_I: k must be non-negative");
    if (line.dim != f.dim()) throw std::invalid_argument("ray_I: line and field dimension differ");
    if (std::abs(dotv(line.dir(), line.dir()) - 1.0) > 1e-12) throw std::invalid_argument("ray_I: non-unit direction");
    if (method == RayMethod::Exact) return moment_exact(f, k, line.base(), line.dir(), 0.0);
    return moment_numeric(f, k, line.base(), line.dir(), 0.0, q);
}

double ray_I(const GridField& f, int k, const Line& line, const QuadratureSpec& q) {
    if (k < 0) throw std::invalid_argument("ray_I: k must be non-negative");
    if (line.dim != f.dim()) throw std::invalid_argument("ray_I: line and field dimension differ");
    const int n = f.dim();
    const double L = f.grid().L;
    // clip the line to the box
    double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < n; ++i) {
        const double d = line.xi[i], x = line.x[i];
        if (std::abs(d) < 1e-15) {
            if (std::abs(x) > L) return 0.0;
            continue;
        }
        double a = (-L - x) / d, b = (L - x) / d;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    }
    if (!(hi > lo)) return 0.0;
    const SymTensor P = tensor_power(line.dir(), f.rank());
    auto g = [&](double t) {
        Vec p{};
        for (int i = 0; i < n; ++i) p[i] = line.x[i] + t * line.xi[i];
        return std::pow(t, k) * dot(f.interpolate(std::span<const double>(p.data(), n)), P);
    };
    // multilinear data: panels of one cell keep the kinks at panel edges mostly
    return line_integral(g, lo, hi, f.grid().h(), std::max(q.line_tol, 1e-9), 8);
}

double ray_J(const AnalyticField& f, int q, std::span<const double> x, std::span<const double> xi, RayMethod method,
             const QuadratureSpec& spec) {
    check_dims(f.dim(), x, xi);
    if (q < 0) throw std::invalid_argument("ray_J: q must be non-negative");
    if (!(dotv(xi, xi) > 0.0)) throw std::invalid_argument("ray_J: xi must be nonzero");
    if (method == RayMethod::Exact) return moment_exact(f, q, x, xi, 0.0);
    return moment_numeric(f, q, x, xi, 0.0, spec);
}

std::vector<double> j_from_i_weights(int q) {
    if (q < 0) throw std::invalid_argument("j_from_i_weights: q must be non-negative");
    std::vector<double> w(q + 1);
    for (int l = 0; l <= q; ++l) w[l] = ((q - l) % 2 ? -1.0 : 1.0) * static_cast<double>(binomial(q, l));
    return w;
}

double j_from_i(const AnalyticField& f, int q, std::span<const double> x, std::span<const double> xi,
                RayMethod method) {
    check_dims(f.dim(), x, xi);
    const double a2 = dotv(xi, xi);
    if (!(a2 > 0.0)) throw std::invalid_argument("j_from_i: xi must be nonzero");
    const double a = std::sqrt(a2), xx = dotv(x, xi);
    const int n = f.dim(), m = f.rank();
    Vec z{}, u{};
    for (int i = 0; i < n; ++i) {
        z[i] = x[i] - xx / a2 * xi[i];
        u[i] = xi[i] / a;
    }
    const Line line = Line::make(std::span<const double>(z.data(), n), std::span<const double>(u.data(), n));
    const auto w = j_from_i_weights(q);
    double s = 0.0;
    for (int l = 0; l <= q; ++l)
        s += w[l] * std::pow(a, l) * std::pow(xx, q - l) * ray_I(f, l, line, method);
    return std::pow(a, m - 2 * q - 1) * s;
}

double ray_exp(const AnalyticField& f, double alpha, const Line& line, RayMethod method, const QuadratureSpec& q) {
    if (line.dim != f.dim()) throw std::invalid_argument("ray_exp: line and field dimension differ");
    if (!std::isfinite(alpha)) throw std::domain_error("ray_exp: alpha must be finite");
    if (method == RayMethod::Exact) return moment_exact(f, 0, line.base(), line.dir(), alpha);
    return moment_numeric(f, 0, line.base(), line.dir(), alpha, q);
}

SeriesCheck exp_series_check(const AnalyticField& f, double alpha, const Line& line, int K) {
    if (K < 0) throw std::invalid_argument("exp_series_check: K must be non-negative");
    SeriesCheck r;
    r.direct = ray_exp(f, alpha, line, RayMethod::Numeric);
    double fact = 1.0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) fact *= k;
        r.series += std::pow(alpha, k) / fact * ray_I(f, k, line, RayMethod::Exact);
    }
    r.residual = std::abs(r.direct - r.series);
    // Tail: sum_{k>K} |alpha|^k / k! int |t|^k |F(t)| dt, summed until negligible.
    auto [lo, hi] = support_interval(f, line.base(), line.dir());
    const double scale = min_width(f);
    double term_fact = fact;
    for (int k = K + 1; k <= K + 40; ++k) {
        term_fact *= k;
        auto g = [&](double t) { return std::pow(std::abs(t), k) * std::abs(projected(f, line.base(), line.dir(), t)); };
        const double term = std::pow(std::abs(alpha), k) / term_fact * line_integral(g, lo, hi, scale, 1e-8, 10);
        r.tail_bound += term;
        if (term < 1e-18 * std::max(1.0, r.tail_bound) && k > K + 2) break;
    }
    return r;
}

double riesz_constant(int n, double s) {
    return std::pow(2.0, 2 * s) * std::tgamma(0.5 * (n + 2 * s)) /
           (std::pow(std::numbers::pi, 0.5 * n) * std::abs(std::tgamma(-s)));
}

double frac_xray(const ScalarFn& f, double s, std::span<const double> x, std::span<const double> xi,
                 double rel_tol) {
    const int n = f.dim;
    if (!(s > 0.0 && s < 0.5 * n)) throw std::invalid_argument("frac_xray: need 0 < s < n/2");
    if (!f.f) return 0.0;
    auto [lo, hi] = support_interval(f, x, xi);
    lo = std::max(lo, 0.0);
    if (!(hi > lo)) return 0.0;
    Vec p{};
    auto at = [&](double tau) {
        for (int i = 0; i < n; ++i) p[i] = x[i] + tau * xi[i];
        return f.f(std::span<const double>(p.data(), n));
    };
    const double scale = 0.5;
    double total = 0.0;
    if (lo < 1.0) {
        // tau in (0, min(1, hi)) with u = tau^{2s}: int tau^{2s-1} g dtau = (1/2s) int g(u^{1/2s}) du
        const double top = std::pow(std::min(1.0, hi), 2 * s);
        auto g = [&](double u) { return at(std::pow(u, 0.5 / s)); };
        total += line_integral(g, 0.0, top, top, rel_tol) / (2 * s);
    }
    if (hi > 1.0) {
        auto g = [&](double tau) { return std::pow(tau, 2 * s - 1) * at(tau); };
        total += line_integral(g, std::max(1.0, lo), hi, scale, rel_tol);
    }
    return total;
}

double riesz_average(const ScalarFn& f, double s, std::span<const double> x, const SphereQuadrature& quad) {
    if (quad.dim != f.dim) throw std::invalid_argument("riesz_average: quadrature dimension differs");
    if (!(s > 0.0 && s < 0.5 * f.dim)) throw std::invalid_argument("riesz_average: need 0 < s < n/2");
    double acc = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q)
        acc += quad.weights[q] * frac_xray(f, s, x, std::span<const double>(quad.nodes[q].data(), f.dim));
    return riesz_constant(f.dim, -s) * acc;
}

double frac_xray_full(const ScalarFn& f, double s, std::span<const double> x, std::span<const double> xi) {
    if (!(s > -1.0 && s < f.dim - 1.0)) throw std::invalid_argument("frac_xray_full: need -1 < s < n - 1");
    const double sigma = 0.5 * (s + 1.0);
    Vec m{};
    for (std::size_t i = 0; i < xi.size(); ++i) m[i] = -xi[i];
    return frac_xray(f, sigma, x, xi) + frac_xray(f, sigma, x, std::span<const double>(m.data(), xi.size()));
}

double full_line_average(const ScalarFn& f, double s, std::span<const double> x, const SphereQuadrature& quad) {
    if (quad.dim != f.dim) throw std::invalid_argument("full_line_average: quadrature dimension differs");
    double acc = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q)
        acc += quad.weights[q] * frac_xray_full(f, s, x, std::span<const double>(quad.nodes[q].data(), f.dim));
    return acc;
}

double critical_average(const AnalyticScalar& f, std::span<const double> x, const SphereQuadrature& quad) {
    const int n = f.dim();
    if (quad.dim != n) throw std::invalid_argument("critical_average: quadrature dimension differs");
    if (std::abs(f.integral()) > 1e-10) throw std::domain_error("critical_average: input must have zero mean");
    const ScalarFn fn = as_fn(f);
    double acc = 0.0;
    Vec p{};
    for (std::size_t q = 0; q < quad.size(); ++q) {
        std::span<const double> xi(quad.nodes[q].data(), n);
        auto [lo, hi] = support_interval(fn, x, xi);
        lo = std::max(lo, 0.0);
        if (!(hi > lo)) continue;
        auto g = [&](double tau) {
            if (tau <= 0.0) return 0.0;
            for (int i = 0; i < n; ++i) p[i] = x[i] + tau * xi[i];
            return (-2.0 * std::log(tau) - kEulerGamma) * std::pow(tau, n - 1) * f(std::span<const double>(p.data(), n));
        };
        acc += quad.weights[q] * line_integral(g, lo, hi, 0.5, 1e-12);
    }
    return acc / (std::tgamma(0.5 * n) * std::pow(4.0 * std::numbers::pi, 0.5 * n));
}

double cone_transform(const ScalarFn& f, double k, std::span<const double> u, std::span<const double> beta, double psi,
                      int azimuth_nodes) {
    const int n = f.dim;
    check_dims(n, u, beta);
    if (!(psi > 0.0 && psi < std::numbers::pi)) throw std::invalid_argument("cone_transform: psi must lie in (0, pi)");
    if (!(k > -1.0 && k < n - 1.0)) throw std::invalid_argument("cone_transform: need -1 < k < n - 1");
    if (std::abs(dotv(beta, beta) - 1.0) > 1e-12) throw std::invalid_argument("cone_transform: beta must be unit");
    if (!f.f) return 0.0;
    // On each generator the weight r^{k-n+2} times the surface Jacobian is r^k = r^{2s-1}.
    const double s = 0.5 * (k + 1.0);
    if (n == 2) {
        const double c = std::cos(psi), sn = std::sin(psi);
        double total = 0.0;
        for (double sg : {1.0, -1.0}) {
            Vec d{c * beta[0] - sg * sn * beta[1], sg * sn * beta[0] + c * beta[1], 0.0};
            total += frac_xray(f, s, u, std::span<const double>(d.data(), 2));
        }
        return total;
    }
    // orthonormal frame (beta, e1, e2)
    Vec e1{}, e2{};
    {
        int j = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(beta[i]) < std::abs(beta[j])) j = i;
        Vec t{};
        t[j] = 1.0;
        double bt = beta[j];
        for (int i = 0; i < 3; ++i) e1[i] = t[i] - bt * beta[i];
        double nr = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
        for (auto& v : e1) v /= nr;
        e2 = {beta[1] * e1[2] - beta[2] * e1[1], beta[2] * e1[0] - beta[0] * e1[2], beta[0] * e1[1] - beta[1] * e1[0]};
    }
    const double c = std::cos(psi), sn = std::sin(psi), dphi = 2.0 * std::numbers::pi / azimuth_nodes;
    double total = 0.0;
    for (int j = 0; j < azimuth_nodes; ++j) {
        const double phi = (j + 0.5) * dphi;
        Vec d{};
        for (int i = 0; i < 3; ++i) d[i] = c * beta[i] + sn * (std::cos(phi) * e1[i] + std::sin(phi) * e2[i]);
        total += dphi * frac_xray(f, s, u, std::span<const double>(d.data(), 3));
    }
    return sn * total;
}

ConeRayResult cone_ray_identity(const ScalarFn& f, double k, std::span<const double> u, std::span<const double> beta,
                                const std::function<double(double)>& h, int psi_nodes, int sphere_res) {
    const int n = f.dim;
    ConeRayResult r;
    std::vector<double> ps, pw;
    gauss_legendre(psi_nodes, 0.0, std::numbers::pi, ps, pw);
    for (int i = 0; i < psi_nodes; ++i) r.lhs += pw[i] * cone_transform(f, k, u, beta, ps[i], sphere_res) * h(std::cos(ps[i]));
    const auto quad = sphere_quadrature(n, sphere_res);
    const double s = 0.5 * (k + 1.0);
    for (std::size_t q = 0; q < quad.size(); ++q) {
        std::span<const double> sig(quad.nodes[q].data(), n);
        if (!f.f) break;
        r.rhs += quad.weights[q] * frac_xray(f, s, u, sig) * h(dotv(sig, beta));
    }
    r.residual = std::abs(r.lhs - r.rhs);
    return r;
}

SymTensor adjoint_I_star(const LineFunction& g, int k, int m, std::span<const double> x, const SphereQuadrature& quad) {
    const int n = quad.dim;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("adjoint_I_star: dimension mismatch");
    if (k < 0 || m < 0) throw std::invalid_argument("adjoint_I_star: k, m must be non-negative");
    SymTensor out(n, m);
    Vec z{};
    for (std::size_t q = 0; q < quad.size(); ++q) {
        std::span<const double> xi(quad.nodes[q].data(), n);
        const double c = dotv(x, xi);
        for (int i = 0; i < n; ++i) z[i] = x[i] - c * xi[i];
        const double v = g(std::span<const double>(z.data(), n), xi);
        if (v == 0.0) continue;
        SymTensor P = tensor_power(xi, m);
        P *= quad.weights[q] * std::pow(c, k) * v;
        out += P;
    }
    return out;
}

}  // namespace ttomo
