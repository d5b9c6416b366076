#include "ttomo/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "ttomo/fft.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/random.hpp"
#include "ttomo/xray.hpp"

namespace ttomo {

// ---- coefficients -------------------------------------------------------------

EllipticCoeff coeff_identity(int n) {
    EllipticCoeff A;
    A.dim = n;
    A.name = "identity";
    A.a = [n](std::span<const double>) {
        Matrix3 m{};
        for (int i = 0; i < n; ++i) m[i * 3 + i] = 1.0;
        return m;
    };
    A.ellipticity = 1.0;
    A.identity = true;
    return A;
}

EllipticCoeff coeff_bump(int n) {
    EllipticCoeff A;
    A.dim = n;
    A.name = "bump";
    A.a = [n](std::span<const double> x) {
        double r2 = 0.0, q2 = 0.0;
        const double c[3] = {0.5, -0.3, 0.2};
        for (int i = 0; i < n; ++i) {
            r2 += x[i] * x[i];
            q2 += (x[i] - c[i]) * (x[i] - c[i]);
        }
        Matrix3 m{};
        const double d = 1.0 + 0.5 * std::exp(-q2), o = 0.25 * std::exp(-r2);
        for (int i = 0; i < n; ++i) m[i * 3 + i] = d;
        m[1] = m[3] = o;
        return m;
    };
    // eigenvalues lie in [1 - 0.25, 1.5 + 0.25]
    A.ellipticity = 0.5;
    A.identity = false;
    return A;
}

EllipticCoeff coeff_diag(int n) {
    EllipticCoeff A;
    A.dim = n;
    A.name = "diag";
    A.a = [](std::span<const double>) {
        Matrix3 m{};
        m[0] = 1.0;
        m[4] = 2.0;
        m[8] = 1.5;
        return m;
    };
    A.ellipticity = 0.5;
    A.identity = false;
    return A;
}

EllipticCoeff coeff_by_name(const std::string& name, int n) {
    if (name == "identity") return coeff_identity(n);
    if (name == "bump") return coeff_bump(n);
    if (name == "diag") return coeff_diag(n);
    throw std::invalid_argument("unknown coefficient '" + name + "' (identity, bump, diag)");
}

EllipticityReport check_ellipticity(const EllipticCoeff& A, int samples, double r, std::uint64_t seed) {
    const int n = A.dim;
    Rng rng(seed);
    EllipticityReport rep;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    for (int k = 0; k < samples; ++k) {
        const auto x = rng.uniform_vector(n, -r, r);
        const auto xi = rng.unit_vector(n);
        const Matrix3 m = A(x);
        double q = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                q += xi[i] * m[i * 3 + j] * xi[j];
                rep.asymmetry = std::max(rep.asymmetry, std::abs(m[i * 3 + j] - m[j * 3 + i]));
            }
        rep.min_ratio = std::min(rep.min_ratio, q);
        rep.max_ratio = std::max(rep.max_ratio, q);
    }
    const double c = A.ellipticity;
    rep.ok = rep.asymmetry == 0.0 && rep.min_ratio >= c && rep.max_ratio <= 1.0 / c;
    return rep;
}

// ---- spectral operators ------------------------------------------------------------

namespace {

std::vector<int> dims_of(const GridSpec& g) { return std::vector<int>(g.dim, g.N); }

// |kappa|^2 per FFT bin of the N^n grid, period 2L.
std::vector<double> kappa2(const GridSpec& g) {
    const int n = g.dim, N = g.N;
    std::vector<double> k1(N);
    for (int j = 0; j < N; ++j) k1[j] = wavenumber(j, N, 2.0 * g.L);
    std::vector<double> out(g.points());
    for (std::size_t p = 0; p < out.size(); ++p) {
        std::size_t q = p;
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
            const double k = k1[q % N];
            q /= N;
            s += k * k;
        }
        out[p] = s;
    }
    return out;
}

std::vector<double> apply_multiplier(const GridSpec& g, const std::vector<double>& u,
                                     const std::function<double(double)>& symbol_of_k2) {
    FFT fft(dims_of(g));
    std::vector<cplx> a(u.begin(), u.end());
    fft.forward(a);
    const auto k2 = kappa2(g);
    for (std::size_t p = 0; p < a.size(); ++p) a[p] *= symbol_of_k2(k2[p]);
    fft.inverse(a);
    std::vector<double> out(u.size());
    const double sc = 1.0 / static_cast<double>(a.size());
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p].real() * sc;
    return out;
}

void check_decay(const GridField& f, const SpectralOptions& opt, SpectralDiag* diag) {
    const double b = boundary_max(f), m = f.max_abs();
    const bool ok = b <= opt.decay_tol * std::max(m, 1e-300);
    if (diag) {
        diag->boundary_max = b;
        diag->support_ok = ok;
    }
    if (!ok && opt.require_decay)
        throw std::domain_error("field does not decay at the box boundary (max " + std::to_string(b) + ")");
}

double box_mass(const GridField& f, std::size_t c) {
    double s = 0.0;
    for (double v : f.comp(c)) s += v;
    return s * std::pow(f.grid().h(), f.dim());
}

}  // namespace

double boundary_max(const GridField& f) {
    const int n = f.dim(), N = f.grid().N;
    double b = 0.0;
    std::array<int, 3> j{};
    for (std::size_t p = 0; p < f.points(); ++p) {
        f.unindex(p, std::span<int>(j.data(), n));
        bool edge = false;
        for (int a = 0; a < n; ++a) edge = edge || j[a] == 0 || j[a] == N - 1;
        if (!edge) continue;
        for (std::size_t c = 0; c < f.components(); ++c) b = std::max(b, std::abs(f.comp(c)[p]));
    }
    return b;
}

GridField frac_laplacian(const GridField& f, double s, const SpectralOptions& opt, SpectralDiag* diag) {
    if (!(s > 0.0)) throw std::invalid_argument("frac_laplacian: s must be positive");
    check_decay(f, opt, diag);
    GridField out(f.grid(), f.rank());
    for (std::size_t c = 0; c < f.components(); ++c)
        out.comp(c) = apply_multiplier(f.grid(), f.comp(c), [s](double k2) { return std::pow(k2, s); });
    return out;
}

GridField riesz_potential(const GridField& f, double s, RieszMode mode, const SpectralOptions& opt,
                          SpectralDiag* diag) {
    const int n = f.dim();
    if (!(s > 0.0 && s < 0.5 * n)) throw std::invalid_argument("riesz_potential: need 0 < s < n/2");
    check_decay(f, opt, diag);
    if (diag) diag->zero_mode_mass = f.components() ? box_mass(f, 0) : 0.0;
    GridField out(f.grid(), f.rank());
    if (mode == RieszMode::Periodic) {
        for (std::size_t c = 0; c < f.components(); ++c)
            out.comp(c) = apply_multiplier(f.grid(), f.comp(c),
                                           [s](double k2) { return k2 > 0.0 ? std::pow(k2, -s) : 0.0; });
        return out;
    }
    const double d = 2.0 * s - n;
    auto K = [d](std::span<const double> z) {
        double r2 = 0.0;
        for (double v : z) r2 += v * v;
        return std::pow(r2, 0.5 * d);
    };
    const double gauss = sphere_area(n) * std::tgamma(s) / 2.0;
    const double Z = lattice_origin_constant(n, K, d, gauss);
    PaddedConvolver conv(f.grid());
    const auto kh = conv.transform_kernel(K, d, Z);
    const double cns = riesz_constant(n, -s);
    for (std::size_t c = 0; c < f.components(); ++c) {
        auto fh = conv.transform_field(f.comp(c));
        for (std::size_t p = 0; p < fh.size(); ++p) fh[p] *= kh[p];
        out.comp(c) = conv.inverse(std::move(fh));
        for (double& v : out.comp(c)) v *= cns;
    }
    return out;
}

// ---- discrete operator ---------------------------------------------------------------

DivAGrad::DivAGrad(const GridSpec& g, const EllipticCoeff& A) : g_(g), n_(g.dim) {
    g.validate();
    if (A.dim != g.dim) throw std::invalid_argument("DivAGrad: coefficient dimension differs from grid");
    GridField probe(g, 0);
    a_.resize(g.points());
    for (std::size_t p = 0; p < a_.size(); ++p) {
        const auto x = probe.position(p);
        a_[p] = A(std::span<const double>(x.data(), n_));
    }
    for (int a = 0; a < n_; ++a)
        for (int d = 0; d < 2; ++d) {
            nb_[a][d].resize(g.points());
            for (std::size_t p = 0; p < g.points(); ++p) nb_[a][d][p] = static_cast<std::uint32_t>(shift(p, a, d ? 1 : -1));
        }
    const double h2 = g.h() * g.h();
    diag_.assign(g.points(), 0.0);
    for (std::size_t p = 0; p < a_.size(); ++p) {
        double d = 0.0;
        for (int i = 0; i < n_; ++i) {
            d += a_[p][i * 3 + i] + 0.5 * a_[shift(p, i, -1)][i * 3 + i] + 0.5 * a_[shift(p, i, +1)][i * 3 + i];
            for (int j = 0; j < n_; ++j)
                if (j != i) d += a_[p][i * 3 + j];
        }
        diag_[p] = d > 0.0 ? d / h2 : 1.0 / h2;
    }
}

std::size_t DivAGrad::shift(std::size_t p, int axis, int dir) const {
    const int N = g_.N;
    std::size_t stride = 1;
    for (int a = n_ - 1; a > axis; --a) stride *= N;
    const int j = static_cast<int>((p / stride) % N);
    const int jn = (j + dir + N) % N;
    return p + (static_cast<std::ptrdiff_t>(jn) - j) * static_cast<std::ptrdiff_t>(stride);
}

void DivAGrad::apply(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t P = u.size();
    const double h2 = g_.h() * g_.h();
    out.assign(P, 0.0);
    std::vector<double> v(P), w(P);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const auto &jp = nb_[j][1], &jm = nb_[j][0], &ip = nb_[i][1], &im = nb_[i][0];
            for (std::size_t p = 0; p < P; ++p) {
                const double a = a_[p][i * 3 + j];
                v[p] = a * (u[jp[p]] - u[p]);
                w[p] = a * (u[p] - u[jm[p]]);
            }
            for (std::size_t p = 0; p < P; ++p) out[p] += 0.5 * ((v[p] - v[im[p]]) + (w[ip[p]] - w[p])) / h2;
        }
}

int DivAGrad::solve_shifted(double c, const std::vector<double>& b, std::vector<double>& x, double tol,
                            int max_iter) const {
    const std::size_t P = b.size();
    if (x.size() != P) x = b;
    std::vector<double> r(P), z(P), d(P), Ad(P), Lx(P);
    auto op = [&](const std::vector<double>& in, std::vector<double>& o) {
        apply(in, Lx);
        for (std::size_t p = 0; p < P; ++p) o[p] = in[p] - c * Lx[p];
    };
    op(x, Ad);
    double bn = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
        r[p] = b[p] - Ad[p];
        bn += b[p] * b[p];
    }
    bn = std::sqrt(bn);
    if (bn == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    auto precond = [&](const std::vector<double>& in, std::vector<double>& o) {
        for (std::size_t p = 0; p < P; ++p) o[p] = in[p] / (1.0 + c * diag_[p]);
    };
    double r0 = 0.0;
    for (double v : r) r0 += v * v;
    if (std::sqrt(r0) <= tol * bn) return 0;
    precond(r, z);
    d = z;
    double rz = 0.0;
    for (std::size_t p = 0; p < P; ++p) rz += r[p] * z[p];
    for (int it = 1; it <= max_iter; ++it) {
        op(d, Ad);
        double dAd = 0.0;
        for (std::size_t p = 0; p < P; ++p) dAd += d[p] * Ad[p];
        const double alpha = rz / dAd;
        double rn = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            x[p] += alpha * d[p];
            r[p] -= alpha * Ad[p];
            rn += r[p] * r[p];
        }
        if (std::sqrt(rn) <= tol * bn) return it;
        precond(r, z);
        double rz2 = 0.0;
        for (std::size_t p = 0; p < P; ++p) rz2 += r[p] * z[p];
        const double beta = rz2 / rz;
        rz = rz2;
        for (std::size_t p = 0; p < P; ++p) d[p] = z[p] + beta * d[p];
    }
    throw std::runtime_error("heat step: CG did not converge");
}

// ---- heat semigroup ---------------------------------------------------------------

namespace {

double max_abs(const std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

// One TR-BDF2 step: trapezoid to t + gamma dt, then BDF2.  Both stages solve
// (I - c L) with c = (1 - 1/sqrt 2) dt; L-stable, so stiff modes are damped.
void trbdf2_step(const DivAGrad& L, const std::vector<double>& u, double dt, std::vector<double>& out, double cg_tol,
                 int cg_max, HeatStats& st) {
    const double gamma = 2.0 - std::numbers::sqrt2;
    const double c = 0.5 * gamma * dt;
    const std::size_t P = u.size();
    std::vector<double> Lu, rhs(P), mid;
    L.apply(u, Lu);
    for (std::size_t p = 0; p < P; ++p) rhs[p] = u[p] + c * Lu[p];
    mid = u;
    st.cg_iterations += L.solve_shifted(c, rhs, mid, cg_tol, cg_max);
    const double a = 1.0 / (gamma * (2.0 - gamma)), b = (1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma));
    for (std::size_t p = 0; p < P; ++p) rhs[p] = a * mid[p] - b * u[p];
    out = mid;
    st.cg_iterations += L.solve_shifted(c, rhs, out, cg_tol, cg_max);
}

}  // namespace

void heat_evolve(const GridField& f, std::span<const double> ts, const EllipticCoeff& A, const HeatOptions& opt,
                 const std::function<void(std::size_t, const std::vector<double>&)>& visit, HeatStats* stats) {
    if (f.components() != 1) throw std::invalid_argument("heat_evolve: scalar field expected");
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!(ts[i] > 0.0) || (i > 0 && ts[i] < ts[i - 1])) throw std::invalid_argument("heat: times must be positive and sorted");
    HeatStats st;
    if (A.identity) {
        FFT fft(dims_of(f.grid()));
        std::vector<cplx> a(f.comp(0).begin(), f.comp(0).end());
        fft.forward(a);
        const auto k2 = kappa2(f.grid());
        std::vector<cplx> b(a.size());
        const double sc = 1.0 / static_cast<double>(a.size());
        std::vector<double> u(a.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            for (std::size_t p = 0; p < a.size(); ++p) b[p] = a[p] * std::exp(-ts[i] * k2[p]);
            fft.inverse(b);
            for (std::size_t p = 0; p < u.size(); ++p) u[p] = b[p].real() * sc;
            visit(i, u);
        }
        if (stats) *stats = st;
        return;
    }
    const DivAGrad L(f.grid(), A);
    std::vector<double> u = f.comp(0), big, half, tmp;
    double t = 0.0;
    const double h = f.grid().h();
    double dt = opt.dt0 > 0.0 ? opt.dt0 : h * h / 8.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        while (t < ts[i] * (1 - 1e-14)) {
            if (st.steps + st.rejected > opt.max_steps) throw std::runtime_error("heat: step limit reached");
            const double step = std::min(dt, ts[i] - t);
            trbdf2_step(L, u, step, big, opt.cg_tol, opt.cg_max_iter, st);
            trbdf2_step(L, u, 0.5 * step, tmp, opt.cg_tol, opt.cg_max_iter, st);
            trbdf2_step(L, tmp, 0.5 * step, half, opt.cg_tol, opt.cg_max_iter, st);
            double err = 0.0;
            for (std::size_t p = 0; p < u.size(); ++p) err = std::max(err, std::abs(big[p] - half[p]));
            err /= std::max(max_abs(u), 1e-300);
            const double allowed = opt.tol;
            if (err <= allowed) {
                // Richardson: the extrapolated value stays L-stable for TR-BDF2
                for (std::size_t p = 0; p < u.size(); ++p) u[p] = (4.0 * half[p] - big[p]) / 3.0;
                t += step;
                ++st.steps;
            } else {
                ++st.rejected;
            }
            const double fac = err > 0.0 ? 0.9 * std::cbrt(allowed / err) : 2.0;
            dt = step * std::clamp(fac, 0.2, 2.0);
        }
        visit(i, u);
    }
    if (stats) *stats = st;
}

GridField heat_apply(const GridField& f, double t, const EllipticCoeff& A, const HeatOptions& opt, HeatStats* stats) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_apply: t must be positive");
    GridField out(f.grid(), f.rank());
    const double ts[1] = {t};
    for (std::size_t c = 0; c < f.components(); ++c) {
        GridField fc(f.grid(), 0);
        fc.comp(0) = f.comp(c);
        heat_evolve(fc, ts, A, opt, [&](std::size_t, const std::vector<double>& u) { out.comp(c) = u; }, stats);
    }
    return out;
}

// ---- time quadrature -----------------------------------------------------------------

TimeQuadrature time_quadrature(double s, double lambda_min, double lambda_max, double hv) {
    if (!(s > 0.0)) throw std::invalid_argument("time_quadrature: s must be positive");
    if (!(lambda_min > 0.0 && lambda_max >= lambda_min)) throw std::invalid_argument("time_quadrature: bad spectrum bounds");
    TimeQuadrature q;
    q.s = s;
    q.hv = hv;
    q.t0 = 1e-8 / lambda_max;
    q.t_max = 23.0 / lambda_min;  // e^{-lambda_min T} ~ 1e-10
    const double a = std::log(q.t0);
    const int J = static_cast<int>(std::ceil((std::log(q.t_max) - a) / hv));
    for (int j = 0; j <= J; ++j) {
        const double t = std::exp(a + j * hv);
        q.nodes.push_back(t);
        double w = hv * std::pow(t, s);
        if (j == 0) w = hv * std::pow(t, s) / (1.0 - std::exp(-s * hv));
        else if (j == J) w *= 0.5;
        q.weights.push_back(w);
    }
    q.t_max = q.nodes.back();
    return q;
}

double scalar_identity(const TimeQuadrature& q, double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * std::exp(-q.nodes[i] * lambda);
    // exponential tail beyond t_max
    acc += std::pow(q.t_max, q.s - 1.0) * std::exp(-lambda * q.t_max) / lambda;
    return acc / std::tgamma(q.s);
}

double scalar_identity_check(double lambda, double s) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scalar_identity_check: lambda must be positive");
    const auto q = time_quadrature(s, std::min(lambda, 0.5), std::max(lambda, 10.0));
    const double exact = std::pow(lambda, -s);
    return std::abs(scalar_identity(q, lambda) - exact) / exact;
}

GridField semigroup_negative_power(const GridField& f, double s, const EllipticCoeff& A, double tail_tol,
                                   const HeatOptions& opt, SemigroupDiag* diag) {
    const GridSpec& g = f.grid();
    const int n = g.dim;
    if (!(s > 0.0 && s < 0.5 * n)) throw std::invalid_argument("semigroup_negative_power: need 0 < s < n/2");
    if (f.components() != 1) throw std::invalid_argument("semigroup_negative_power: scalar field expected");
    if (A.dim != n) throw std::invalid_argument("semigroup_negative_power: coefficient dimension differs");
    const double pi = std::numbers::pi, h = g.h();
    // spectrum of -div A grad on the periodic box (lowest nonzero mode, Nyquist)
    const double lam_min = A.ellipticity * std::pow(pi / g.L, 2);
    const double lam_max = n * 4.0 / (h * h) / A.ellipticity;
    const auto q = time_quadrature(s, lam_min, lam_max);
    const std::size_t P = f.points();
    double mean = 0.0;
    for (double v : f.comp(0)) mean += v;
    mean /= static_cast<double>(P);
    SemigroupDiag dg;
    dg.zero_mode_mass = mean * std::pow(2.0 * g.L, n);

    GridField out(g, 0);
    std::vector<double>& acc = out.comp(0);
    acc.assign(P, 0.0);
    std::vector<double> prev, last;
    double t_prev = 0.0;
    auto visit = [&](std::size_t i, const std::vector<double>& u) {
        for (std::size_t p = 0; p < P; ++p) acc[p] += q.weights[i] * (u[p] - mean);
        prev.swap(last);
        last = u;
        if (i + 1 < q.nodes.size()) t_prev = q.nodes[i];
    };

    if (A.identity) {
        heat_evolve(f, q.nodes, A, opt, visit, &dg.heat);
    } else {
        // e^{tL} f = f + tLf + t^2 L^2 f / 2 while t * lam_max is tiny; stepping after that
        const DivAGrad L(g, A);
        std::vector<double> Lf, LLf;
        L.apply(f.comp(0), Lf);
        L.apply(Lf, LLf);
        std::size_t i = 0;
        std::vector<double> u(P);
        for (; i < q.nodes.size() && q.nodes[i] * lam_max < 1e-3; ++i) {
            const double t = q.nodes[i];
            for (std::size_t p = 0; p < P; ++p) u[p] = f.comp(0)[p] + t * Lf[p] + 0.5 * t * t * LLf[p];
            visit(i, u);
        }
        if (i < q.nodes.size()) {
            // restart stepping from the last series node
            GridField start(g, 0);
            double t_start = 0.0;
            if (i > 0) {
                t_start = q.nodes[i - 1];
                start.comp(0) = u;
            } else {
                start.comp(0) = f.comp(0);
            }
            std::vector<double> rel(q.nodes.begin() + i, q.nodes.end());
            for (double& t : rel) t -= t_start;
            const std::size_t off = i;
            heat_evolve(start, rel, A, opt, [&](std::size_t j, const std::vector<double>& v) { visit(off + j, v); },
                        &dg.heat);
        }
    }
    // tail beyond t_max: (u(T) - mean) decays like e^{-lam (t - T)}, lam fitted from the last two nodes
    double nl = 0.0, np = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
        nl = std::max(nl, std::abs(last[p] - mean));
        np = std::max(np, std::abs(prev[p] - mean));
    }
    const double T = q.nodes.back();
    double lam = lam_min;
    if (nl > 0.0 && np > nl) lam = std::max(lam_min, std::log(np / nl) / (T - t_prev));
    const double tw = std::pow(T, s - 1.0) / lam;
    double tail = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
        const double tp = tw * (last[p] - mean);
        acc[p] += tp;
        tail = std::max(tail, std::abs(tp));
    }
    const double gs = 1.0 / std::tgamma(s);
    for (double& v : acc) v *= gs;
    dg.tail = tail * gs / std::max(max_abs(acc), 1e-300);
    if (diag) *diag = dg;
    if (dg.tail > tail_tol) throw std::runtime_error("semigroup_negative_power: tail estimate exceeds tolerance");
    return out;
}

// ---- weighted average -----------------------------------------------------------------

WeightColumn::WeightColumn(const GridSpec& g, const EllipticCoeff& A, double s, std::span<const double> x,
                           double bump_width, const HeatOptions& opt)
    : g_(g), s_(s), x_(to_vec(x)) {
    const int n = g.dim;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("WeightColumn: point dimension");
    const double h = g.h();
    const double w = bump_width > 0.0 ? bump_width : 3.0 * h;
    if (w > 4.0 * h) throw std::invalid_argument("WeightColumn: bump wider than 4h does not resolve the kernel column");
    GridField bump(g, 0);
    const double norm = std::pow(std::numbers::pi * w * w, -0.5 * n);
    for (std::size_t p = 0; p < bump.points(); ++p) {
        const auto y = bump.position(p);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += (y[i] - x_[i]) * (y[i] - x_[i]);
        bump.comp(0)[p] = norm * std::exp(-r2 / (w * w));
    }
    col_ = semigroup_negative_power(bump, s, A, 1e-4, opt);
}

double WeightColumn::column(std::span<const double> y) const { return col_.interpolate(0, y); }

double WeightColumn::weight(std::span<const double> y) const {
    const int n = g_.dim;
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += (y[i] - x_[i]) * (y[i] - x_[i]);
    return std::pow(r2, 0.5 * (n - 1)) * column(y) / riesz_constant(n, -s_);
}

double weight_eval(std::span<const double> x, std::span<const double> y, double s, const EllipticCoeff& A,
                   const GridSpec& g) {
    const int n = g.dim;
    if (A.identity) {
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += (y[i] - x[i]) * (y[i] - x[i]);
        return std::pow(r2, s - 0.5);  // |y - x|^{2s-1}
    }
    return WeightColumn(g, A, s, x).weight(y);
}

double weighted_transform_AsA(const GridField& f, double s, std::span<const double> x, const EllipticCoeff& A) {
    const GridSpec& g = f.grid();
    const int n = g.dim;
    if (!(s > 0.0 && s < 0.5 * n)) throw std::invalid_argument("weighted_transform_AsA: need 0 < s < n/2");
    if (f.components() != 1) throw std::invalid_argument("weighted_transform_AsA: scalar field expected");
    if (A.identity) {
        const auto quad = sphere_quadrature(n, 64);
        return riesz_average(as_fn(f), s, x, quad);
    }
    const WeightColumn col(g, A, s, x);
    double acc = 0.0;
    for (std::size_t p = 0; p < f.points(); ++p) acc += col.field().comp(0)[p] * f.comp(0)[p];
    return acc * std::pow(g.h(), n);
}

}  // namespace ttomo
