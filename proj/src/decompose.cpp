#include "ttomo/decompose.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ttomo {

namespace {

std::size_t stride(const GridSpec& g, int a) { return ipow(g.N, g.dim - 1 - a); }

int coord(const GridSpec& g, std::size_t p, int a) { return static_cast<int>((p / stride(g, a)) % g.N); }

// (u(p + e_a) - u(p)) / h, u = 0 outside the box
std::vector<double> fwd(const std::vector<double>& u, const GridSpec& g, int a) {
    const std::size_t s = stride(g, a);
    const double ih = 1.0 / g.h();
    std::vector<double> out(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) {
        double next = coord(g, p, a) + 1 < g.N ? u[p + s] : 0.0;
        out[p] = (next - u[p]) * ih;
    }
    return out;
}

// transpose of fwd: (v(p - e_a) - v(p)) / h
void fwd_T_add(const std::vector<double>& v, const GridSpec& g, int a, std::vector<double>& out) {
    const std::size_t s = stride(g, a);
    const double ih = 1.0 / g.h();
    for (std::size_t p = 0; p < v.size(); ++p) {
        double prev = coord(g, p, a) > 0 ? v[p - s] : 0.0;
        out[p] += (prev - v[p]) * ih;
    }
}

bool interior(const GridSpec& g, std::size_t p, int pad) {
    for (int a = 0; a < g.dim; ++a) {
        int j = coord(g, p, a);
        if (j < pad || j >= g.N - pad) return false;
    }
    return true;
}

std::vector<double> weights(int n, int m) {
    const auto& t = SymIndexTable::get(n, m);
    std::vector<double> w(t.size());
    for (std::size_t c = 0; c < t.size(); ++c) w[c] = t.multiplicity(c);
    return w;
}

// Jacobi diagonal of the masked operator by probing colour classes that are
// further apart than the stencil reach 2k.
GridField op_diagonal(const GridSpec& g, int rank, int k, int pad) {
    GridField diag(g, rank);
    const int period = 2 * k + 1;
    const std::size_t ncol = ipow(period, g.dim);
    for (std::size_t c = 0; c < diag.components(); ++c) {
        for (std::size_t col = 0; col < ncol; ++col) {
            GridField e(g, rank);
            for (std::size_t p = 0; p < e.points(); ++p) {
                std::size_t id = 0;
                for (int a = 0; a < g.dim; ++a) id = id * period + coord(g, p, a) % period;
                if (id == col) e.comp(c)[p] = 1.0;
            }
            apply_mask(e, pad);
            GridField r = elliptic_apply(e, k, pad);
            for (std::size_t p = 0; p < e.points(); ++p)
                if (e.comp(c)[p] != 0.0) diag.comp(c)[p] = r.comp(c)[p];
        }
    }
    return diag;
}

}  // namespace

void EllipticSolveConfig::validate() const {
    if (k < 1 || k > 2) throw std::invalid_argument("EllipticSolveConfig: k must be 1 or 2");
    if (!(tolerance > 0)) throw std::invalid_argument("EllipticSolveConfig: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("EllipticSolveConfig: max_iterations must be positive");
    if (padding < k) throw std::invalid_argument("EllipticSolveConfig: padding must be >= k");
}

GridField grid_d(const GridField& u) {
    const int n = u.dim(), m = u.rank();
    const auto& g = u.grid();
    GridField out(g, m + 1);
    const auto& tin = SymIndexTable::get(n, m);
    const auto& tout = SymIndexTable::get(n, m + 1);
    // D+_a u_c for every (a, c) once
    std::vector<std::vector<std::vector<double>>> D(n);
    for (int a = 0; a < n; ++a)
        for (std::size_t c = 0; c < tin.size(); ++c) D[a].push_back(fwd(u.comp(c), g, a));
    std::vector<int> rest(m);
    for (std::size_t c = 0; c < tout.size(); ++c) {
        auto s = tout.multiset(c);
        auto& o = out.comp(c);
        for (int a = 0; a <= m; ++a) {
            for (int b = 0, q = 0; b <= m; ++b)
                if (b != a) rest[q++] = s[b];
            const auto& src = D[s[a]][tin.compress(rest)];
            for (std::size_t p = 0; p < o.size(); ++p) o[p] += src[p];
        }
        for (double& v : o) v /= (m + 1);
    }
    return out;
}

GridField grid_d(const GridField& u, int times) {
    GridField r = u;
    for (int i = 0; i < times; ++i) r = grid_d(r);
    return r;
}

GridField grid_dT(const GridField& w) {
    const int n = w.dim(), m = w.rank() - 1;
    if (m < 0) throw std::invalid_argument("grid_dT: rank must be positive");
    const auto& g = w.grid();
    GridField out(g, m);
    const auto& tout = SymIndexTable::get(n, m);
    const auto& tin = SymIndexTable::get(n, m + 1);
    std::vector<int> idx(m + 1);
    for (std::size_t c = 0; c < tout.size(); ++c) {
        auto s = tout.multiset(c);
        std::copy(s.begin(), s.end(), idx.begin());
        for (int j = 0; j < n; ++j) {
            idx[m] = j;
            fwd_T_add(w.comp(tin.compress(idx)), g, j, out.comp(c));
        }
    }
    return out;
}

GridField grid_delta(const GridField& w) {
    GridField r = grid_dT(w);
    r *= -1.0;
    return r;
}

GridField grid_delta(const GridField& w, int times) {
    GridField r = w;
    for (int i = 0; i < times; ++i) r = grid_delta(r);
    return r;
}

double grid_inner(const GridField& a, const GridField& b) {
    if (!(a.grid() == b.grid()) || a.rank() != b.rank()) throw std::invalid_argument("grid_inner: shape mismatch");
    auto w = weights(a.dim(), a.rank());
    double s = 0.0;
    for (std::size_t c = 0; c < a.components(); ++c) {
        double sc = 0.0;
        const auto &x = a.comp(c), &y = b.comp(c);
        for (std::size_t p = 0; p < x.size(); ++p) sc += x[p] * y[p];
        s += w[c] * sc;
    }
    return s * std::pow(a.grid().h(), a.dim());
}

void apply_mask(GridField& u, int padding) {
    if (padding <= 0) return;
    for (std::size_t p = 0; p < u.points(); ++p)
        if (!interior(u.grid(), p, padding))
            for (std::size_t c = 0; c < u.components(); ++c) u.comp(c)[p] = 0.0;
}

GridField elliptic_apply(const GridField& w, int k, int padding) {
    GridField x = w;
    apply_mask(x, padding);
    x = grid_d(x, k);
    for (int i = 0; i < k; ++i) x = grid_dT(x);
    apply_mask(x, padding);
    return x;
}

GridField solve_dk_deltak(const GridField& h, const EllipticSolveConfig& cfg, SolveReport* report, const GridField* x0) {
    cfg.validate();
    if (h.rank() < 0) throw std::invalid_argument("solve_dk_deltak: bad rank");
    const int k = cfg.k, pad = cfg.padding;
    if (2 * pad >= h.grid().N) throw std::invalid_argument("solve_dk_deltak: padding leaves no interior");
    GridField b = h;
    apply_mask(b, pad);
    GridField x(h.grid(), h.rank());
    if (x0) {
        if (!(x0->grid() == h.grid()) || x0->rank() != h.rank())
            throw std::invalid_argument("solve_dk_deltak: initial guess shape mismatch");
        x = *x0;
        apply_mask(x, pad);
    }
    SolveReport rep;
    const double bnorm = std::sqrt(grid_inner(b, b));
    if (bnorm == 0.0 && !x0) {
        rep.converged = true;
        if (report) *report = rep;
        return x;
    }
    const double scale = bnorm > 0 ? bnorm : 1.0;

    GridField diag = op_diagonal(h.grid(), h.rank(), k, pad);
    auto precond = [&](const GridField& r) {
        GridField z = r;
        for (std::size_t c = 0; c < z.components(); ++c)
            for (std::size_t p = 0; p < z.points(); ++p) {
                double d = diag.comp(c)[p];
                z.comp(c)[p] = d > 0 ? z.comp(c)[p] / d : 0.0;
            }
        return z;
    };
    auto axpy = [](GridField& y, double a, const GridField& x) {
        for (std::size_t c = 0; c < y.components(); ++c) {
            auto& yc = y.comp(c);
            const auto& xc = x.comp(c);
            for (std::size_t p = 0; p < yc.size(); ++p) yc[p] += a * xc[p];
        }
    };

    GridField r = b;
    axpy(r, -1.0, elliptic_apply(x, k, pad));
    double rnorm = std::sqrt(grid_inner(r, r));
    rep.residual = rnorm / scale;
    if (rep.residual <= cfg.tolerance) {
        rep.converged = true;
        if (report) *report = rep;
        return x;
    }
    GridField z = precond(r);
    GridField pdir = z;
    double rz = grid_inner(r, z);
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        GridField q = elliptic_apply(pdir, k, pad);
        double alpha = rz / grid_inner(pdir, q);
        axpy(x, alpha, pdir);
        axpy(r, -alpha, q);
        rnorm = std::sqrt(grid_inner(r, r));
        rep.iterations = it;
        rep.residual = rnorm / scale;
        if (rep.residual <= cfg.tolerance) {
            rep.converged = true;
            break;
        }
        z = precond(r);
        double rz_new = grid_inner(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t c = 0; c < pdir.components(); ++c) {
            auto& pc = pdir.comp(c);
            const auto& zc = z.comp(c);
            for (std::size_t p = 0; p < pc.size(); ++p) pc[p] = zc[p] + beta * pc[p];
        }
    }
    if (report) *report = rep;
    if (!rep.converged) throw std::runtime_error("solve_dk_deltak: CG did not converge");
    return x;
}

Decomposition solenoidal_decompose(const GridField& f, int k, const EllipticSolveConfig& cfg) {
    const int m = f.rank();
    if (k < 1 || k > m) throw std::invalid_argument("solenoidal_decompose: need 1 <= k <= m");
    if (k > 2) throw std::invalid_argument("solenoidal_decompose: k > 2 not supported");
    EllipticSolveConfig c = cfg;
    c.k = k;
    c.padding = std::max(c.padding, k);
    c.validate();

    GridField rhs = f;
    for (int i = 0; i < k; ++i) rhs = grid_dT(rhs);  // (-1)^k delta^k f
    Decomposition out;
    out.v = solve_dk_deltak(rhs, c, &out.report);
    out.f_tilde = f;
    out.f_tilde -= grid_d(out.v, k);

    GridField div_t = grid_delta(out.f_tilde, k);
    GridField div_f = grid_delta(f, k);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!interior(f.grid(), p, c.padding)) continue;
        for (std::size_t q = 0; q < div_t.components(); ++q) {
            num = std::max(num, std::abs(div_t.comp(q)[p]));
            den = std::max(den, std::abs(div_f.comp(q)[p]));
        }
    }
    out.div_residual = den > 0 ? num / den : num;
    double ff = grid_inner(f, f);
    out.orthogonality = ff > 0 ? std::abs(grid_inner(out.f_tilde, grid_d(out.v, k))) / ff : 0.0;
    return out;
}

GridTensorField saint_venant_R0_forward(const GridField& f) {
    const int n = f.dim(), m = f.rank();
    if (m < 1 || m > 3) throw std::invalid_argument("saint_venant_R0_forward: need 1 <= m <= 3");
    const auto& g = f.grid();
    const auto& tf = SymIndexTable::get(n, m);
    // forward derivatives of order m of every component, by derivative multiset
    std::vector<std::vector<std::vector<std::vector<double>>>> d(m + 1);  // [order][deriv slot][comp]
    d[0].push_back({});
    for (std::size_t c = 0; c < tf.size(); ++c) d[0][0].push_back(f.comp(c));
    for (int r = 1; r <= m; ++r) {
        const auto& tab = SymIndexTable::get(n, r);
        const auto& prev = SymIndexTable::get(n, r - 1);
        for (std::size_t s = 0; s < tab.size(); ++s) {
            auto ms = tab.multiset(s);
            std::vector<int> parent(ms.begin(), ms.end() - 1);
            const auto& src = d[r - 1][prev.compress(parent)];
            std::vector<std::vector<double>> level;
            for (const auto& comp : src) level.push_back(fwd(comp, g, ms.back()));
            d[r].push_back(std::move(level));
        }
    }
    const auto& tb = SymIndexTable::get(n, m);
    GridTensorField out{g, 2 * m, {}};
    out.comps.assign(ipow(n, 2 * m), std::vector<double>(f.points()));
    GenTensor<double> J(n, 2 * m);
    const std::size_t nb = ipow(n, m);
    for (std::size_t p = 0; p < f.points(); ++p) {
        for (std::size_t q = 0; q < J.size(); ++q) J[q] = d[m][tb.from_flat(q % nb)][tf.from_flat(q / nb)][p];
        auto R = assemble_R(J, m, 0);
        for (std::size_t q = 0; q < R.size(); ++q) out.comps[q][p] = R[q];
    }
    return out;
}

double symbol_positivity(int n, int m, int k, std::span<const double> xi) {
    if (n < 2 || n > kMaxDim || m < 0 || k < 0 || static_cast<int>(xi.size()) != n)
        throw std::invalid_argument("symbol_positivity: bad arguments");
    double norm = 0.0;
    for (double v : xi) norm += v * v;
    if (norm == 0.0) throw std::invalid_argument("symbol_positivity: xi must be nonzero");
    SymTensor xk = tensor_power(xi, k);
    const auto& t = SymIndexTable::get(n, m);
    const int N = static_cast<int>(t.size());
    // B is the operator in compressed coordinates; W^{1/2} B W^{-1/2} is symmetric.
    Eigen::MatrixXd A(N, N);
    for (int c = 0; c < N; ++c) {
        SymTensor e(n, m);
        e[c] = 1.0;
        SymTensor img = contract(xk, sym_mult(xk, e));
        for (int r = 0; r < N; ++r)
            A(r, c) = img[r] * std::sqrt(t.multiplicity(r) / t.multiplicity(c));
    }
    Eigen::MatrixXd S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace ttomo
