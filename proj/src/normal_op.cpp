#include "ttomo/normal_op.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "ttomo/diffops.hpp"
#include "ttomo/fft.hpp"
#include "ttomo/fractional.hpp"
#include "ttomo/xray.hpp"

namespace ttomo {

namespace {

void check_point(int n, std::span<const double> x) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point dimension differs from field dimension");
}

double dotv(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Lines through z = x - <x,xi>xi are tangent up to rounding; re-validate loosely.
double ray_at(const AnalyticField& f, int k, std::span<const double> z, std::span<const double> xi) {
    return ray_I(f, k, Line::through(z, xi), RayMethod::Exact);
}

using Counts = std::array<int, kMaxDim>;

Counts counts_of(std::span<const int> idx) {
    Counts c{};
    for (int i : idx) ++c[i];
    return c;
}

// All count vectors of length n summing to d.
void compositions(int n, int d, std::vector<Counts>& out, Counts cur = {}, int axis = 0) {
    if (axis == n - 1) {
        cur[axis] = d;
        out.push_back(cur);
        return;
    }
    for (int c = 0; c <= d; ++c) {
        cur[axis] = c;
        compositions(n, d - c, out, cur, axis + 1);
    }
}

double multinomial(const Counts& c, int n) {
    int total = 0;
    double den = 1.0;
    for (int a = 0; a < n; ++a) {
        total += c[a];
        den *= factorial(c[a]);
    }
    return factorial(total) / den;
}

// 4th-order central stencils for derivative orders 0, 1, 2 on offsets -2..2.
const double kStencil[3][5] = {{0, 0, 1, 0, 0}, {1, -8, 0, 8, -1}, {-1, 16, -30, 16, -1}};
const double kStencilScale[3] = {1.0, 12.0, 12.0};

// Jet J[a (rank s), b (rank D)] = d_b F_a of a tensor-valued F by finite differences.
GenTensor<double> fd_jet(const std::function<SymTensor(std::span<const double>)>& F, int n, int s, int D,
                         std::span<const double> x, double h) {
    if (D > 2) throw std::invalid_argument("finite-difference jet is limited to order 2");
    std::map<Counts, SymTensor> cache;
    auto eval = [&](const Counts& off) -> const SymTensor& {
        auto it = cache.find(off);
        if (it != cache.end()) return it->second;
        Vec y{};
        for (int a = 0; a < n; ++a) y[a] = x[a] + off[a] * h;
        return cache.emplace(off, F(std::span<const double>(y.data(), n))).first->second;
    };
    const auto& dt = SymIndexTable::get(n, D);
    std::vector<SymTensor> deriv(dt.size(), SymTensor(n, s));
    for (std::size_t c = 0; c < dt.size(); ++c) {
        const Counts cnt = counts_of(dt.multiset(c));
        double scale = 1.0;
        for (int a = 0; a < n; ++a) scale *= kStencilScale[cnt[a]] * std::pow(h, cnt[a]);
        // tensor product over axes of the per-axis stencils
        std::size_t combos = ipow(5, n);
        for (std::size_t t = 0; t < combos; ++t) {
            Counts off{};
            double w = 1.0;
            std::size_t u = t;
            for (int a = 0; a < n; ++a) {
                const int o = static_cast<int>(u % 5);
                u /= 5;
                off[a] = o - 2;
                w *= kStencil[cnt[a]][o];
            }
            if (w == 0.0) continue;
            SymTensor v = eval(off);
            v *= w / scale;
            deriv[c] += v;
        }
    }
    GenTensor<double> J(n, s + D);
    std::vector<int> idx(s + D);
    const auto& st = SymIndexTable::get(n, s);
    for (std::size_t f = 0; f < J.size(); ++f) {
        J.unflat(f, idx);
        const std::size_t a = st.compress(std::span<const int>(idx.data(), s));
        const std::size_t b = dt.compress(std::span<const int>(idx.data() + s, D));
        J[f] = deriv[b][a];
    }
    return J;
}

double max_abs(const GenTensor<double>& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

SymTensor KernelSpec::operator()(std::span<const double> z) const {
    if (l < 0 || l > k || k > m) throw std::invalid_argument("KernelSpec: need 0 <= l <= k <= m");
    const double r = std::sqrt(dotv(z, z));
    if (r == 0.0) throw std::domain_error("KernelSpec: kernel is singular at z = 0");
    SymTensor t = tensor_power(z, order());
    t *= std::pow(r, -exponent());
    return t;
}

SymTensor normal_Nk(const AnalyticField& f, int k, std::span<const double> x, const SphereQuadrature& quad) {
    const int n = f.dim(), m = f.rank();
    if (k < 0 || k > m) throw std::invalid_argument("normal_Nk: need 0 <= k <= m");
    if (quad.dim != n) throw std::invalid_argument("normal_Nk: quadrature dimension differs");
    check_point(n, x);
    auto g = [&](std::span<const double> z, std::span<const double> xi) { return ray_at(f, k, z, xi); };
    return adjoint_I_star(g, k, m, x, quad);
}

GridField normal_Nk_kernel(const GridField& f, int k, bool compact_support) {
    const int n = f.dim(), m = f.rank();
    if (k < 0 || k > m) throw std::invalid_argument("normal_Nk_kernel: need 0 <= k <= m");
    if (k > n - 1 && !compact_support)
        throw std::domain_error("normal_Nk_kernel: k > n - 1 converges only for compactly supported fields");
    const GridSpec& g = f.grid();
    const auto& tab = SymIndexTable::get(n, m);
    PaddedConvolver conv(g);

    std::vector<std::vector<cplx>> fh(tab.size());
    bool any = false;
    for (std::size_t J = 0; J < tab.size(); ++J) {
        any = any || std::any_of(f.comp(J).begin(), f.comp(J).end(), [](double v) { return v != 0.0; });
        fh[J] = conv.transform_field(f.comp(J));
    }
    GridField out(g, m);
    if (!any) return out;

    std::map<std::pair<Counts, int>, std::vector<cplx>> kernels;
    auto kernel_hat = [&](const Counts& Q, int e) -> const std::vector<cplx>& {
        auto key = std::make_pair(Q, e);
        auto it = kernels.find(key);
        if (it != kernels.end()) return it->second;
        int deg = 0;
        for (int a = 0; a < n; ++a) deg += Q[a];
        const double d = deg - e;
        KernelFn K = [Q, e, n](std::span<const double> z) {
            double r2 = 0.0, num = 1.0;
            for (int a = 0; a < n; ++a) {
                r2 += z[a] * z[a];
                num *= std::pow(z[a], Q[a]);
            }
            return num * std::pow(r2, -0.5 * e);
        };
        const std::vector<int> qe(Q.begin(), Q.begin() + n);
        const double gauss = sphere_monomial_moment(n, qe) * std::tgamma(0.5 * (n + d)) / 2.0;
        const double Z = lattice_origin_constant(n, K, d, gauss);
        return kernels.emplace(key, conv.transform_kernel(K, d, Z)).first->second;
    };

    std::vector<Vec> pos(f.points());
    for (std::size_t p = 0; p < pos.size(); ++p) pos[p] = f.position(p);

    for (int l = 0; l <= k; ++l) {
        const int e = 2 * m + 2 * k - 2 * l + n - 1;
        const double cl = 2.0 * static_cast<double>(binomial(k, l)) * ((l % 2) ? -1.0 : 1.0);
        std::vector<Counts> alphas;
        compositions(n, 2 * k - l, alphas);
        for (const auto& al : alphas) {
            const double ca = cl * multinomial(al, n);
            for (std::size_t I = 0; I < tab.size(); ++I) {
                const Counts ci = counts_of(tab.multiset(I));
                std::vector<cplx> spec(fh[0].size(), cplx(0.0, 0.0));
                for (std::size_t J = 0; J < tab.size(); ++J) {
                    const Counts cj = counts_of(tab.multiset(J));
                    Counts Q{};
                    for (int a = 0; a < n; ++a) Q[a] = ci[a] + cj[a] + al[a];
                    const auto& kh = kernel_hat(Q, e);
                    const double mult = tab.multiplicity(J);
                    for (std::size_t p = 0; p < spec.size(); ++p) spec[p] += mult * fh[J][p] * kh[p];
                }
                const auto conv_I = conv.inverse(std::move(spec));
                auto& o = out.comp(I);
                for (std::size_t p = 0; p < o.size(); ++p) {
                    double xa = 1.0;
                    for (int a = 0; a < n; ++a) xa *= std::pow(pos[p][a], al[a]);
                    o[p] += ca * xa * conv_I[p];
                }
            }
        }
    }
    return out;
}

DivNormal div_r_normal(const AnalyticField& f, int k, int r, std::span<const double> x, const SphereQuadrature& quad,
                       double agree_tol) {
    const int n = f.dim(), m = f.rank();
    if (k < 0 || k > m) throw std::invalid_argument("div_r_normal: need 0 <= k <= m");
    if (r < 0 || r > k + 1) throw std::invalid_argument("div_r_normal: need 0 <= r <= k + 1");
    if (r > m) throw std::invalid_argument("div_r_normal: r exceeds the tensor rank");
    check_point(n, x);
    DivNormal res;
    if (r == k + 1) {
        res.value = res.j_form = SymTensor(n, m - r);
        return res;
    }
    const double pre = factorial(k) / factorial(k - r);
    auto g = [&](std::span<const double> z, std::span<const double> xi) { return ray_at(f, k, z, xi); };
    res.value = adjoint_I_star(g, k - r, m - r, x, quad);
    res.value *= pre;

    SymTensor jf(n, m - r);
    for (std::size_t q = 0; q < quad.size(); ++q) {
        std::span<const double> xi(quad.nodes[q].data(), n);
        const double c = dotv(x, xi);
        double acc = 0.0;
        for (int l = 0; l <= k; ++l)
            acc += static_cast<double>(binomial(k, l)) * std::pow(c, 2 * k - r - l) *
                   ray_J(f, l, x, xi, RayMethod::Exact);
        SymTensor P = tensor_power(xi, m - r);
        P *= quad.weights[q] * acc * pre;
        jf += P;
    }
    res.j_form = jf;
    const double scale = std::max(res.value.max_abs(), 1e-300);
    res.rel_diff = (res.value - res.j_form).max_abs() / scale;
    if (res.value.max_abs() == 0.0 && res.j_form.max_abs() == 0.0) res.rel_diff = 0.0;
    if (res.rel_diff > agree_tol) throw std::runtime_error("div_r_normal: I-form and J-form disagree");
    return res;
}

CommuteResult check_commute(const AnalyticField& v, int k, std::span<const std::array<double, kMaxDim>> pts,
                            const SphereQuadrature& quad, double fd_step) {
    const int n = v.dim(), m = v.rank() + 1;
    if (k < 1 || k > m) throw std::invalid_argument("check_commute: need 1 <= k <= m");
    const AnalyticField dv = inner_derivative(v);
    double num = 0.0, den = 0.0, worst = 0.0, scale = 0.0;
    for (const auto& p : pts) {
        std::span<const double> x(p.data(), n);
        // delta N^k dv through the jet of N^k dv
        auto F = [&](std::span<const double> y) { return normal_Nk(dv, k, y, quad); };
        const auto J = fd_jet(F, n, m, 1, x, fd_step);
        SymTensor lhs(n, m - 1);
        const auto& tab = SymIndexTable::get(n, m - 1);
        std::vector<int> idx(m + 1);
        for (std::size_t c = 0; c < tab.size(); ++c) {
            const auto ms = tab.multiset(c);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                idx[0] = j;
                for (int a = 0; a < m - 1; ++a) idx[1 + a] = ms[a];
                idx[m] = j;
                acc += J(idx);
            }
            lhs[c] = acc;
        }
        const SymTensor rhs = normal_Nk(v, k - 1, x, quad);
        for (std::size_t c = 0; c < tab.size(); ++c) {
            const double w = tab.multiplicity(c);
            num += w * lhs[c] * rhs[c];
            den += w * rhs[c] * rhs[c];
            worst = std::max(worst, std::abs(lhs[c] + k * k * rhs[c]));
            scale = std::max(scale, std::abs(k * k * rhs[c]));
        }
    }
    CommuteResult res;
    res.residual = scale > 0.0 ? worst / scale : worst;
    res.ratio = den > 0.0 ? num / den : 0.0;
    return res;
}

double sv_coefficient(int l, int s, int n) {
    if (l < 0 || 2 * l > s) throw std::invalid_argument("sv_coefficient: need 0 <= 2l <= s");
    double prod = 1.0;
    for (int p = 0; p <= s - l - 1; ++p) prod *= n - 1 + 2 * p;
    return prod * ((l % 2) ? -1.0 : 1.0) * factorial(s) / (std::ldexp(1.0, l) * factorial(l) * factorial(s - 2 * l));
}

SvIdentityResult sv_normal_identity(const AnalyticField& f, int k, std::span<const std::array<double, kMaxDim>> pts,
                                    const SphereQuadrature& quad, double fd_step) {
    const int n = f.dim(), m = f.rank();
    if (m > 2) throw std::invalid_argument("sv_normal_identity: rank cap m <= 2 exceeded");
    if (k < 0 || k > m) throw std::invalid_argument("sv_normal_identity: need 0 <= k <= m");
    const int M = m - k;
    const SymTensor e2 = metric_tensor(n);

    // LHS ingredients: N^0 of every derivative component d_b f_a, |b| = M
    const auto& ft = SymIndexTable::get(n, m);
    const auto& bt = SymIndexTable::get(n, M);
    std::vector<std::vector<AnalyticField>> dcomp(ft.size());
    for (std::size_t a = 0; a < ft.size(); ++a)
        for (std::size_t b = 0; b < bt.size(); ++b) {
            AnalyticScalar s = f[a];
            for (int ax : bt.multiset(b)) s = s.derivative(ax);
            dcomp[a].push_back(AnalyticField(n, 0, {s}));
        }

    // G_{m-r}(y)
    auto G = [&](int r, std::span<const double> y) {
        const int s = m - r;
        SymTensor H(n, s);
        for (int p = 0; p <= r; ++p) {
            const SymTensor dn = div_r_normal(f, p, p, y, quad).value;  // rank m - p
            SymTensor t = r - p > 0 ? contract(tensor_power(y, r - p), dn) : dn;
            t *= ((r - p) % 2 ? -1.0 : 1.0) * static_cast<double>(binomial(r, p)) / factorial(p);
            H += t;
        }
        SymTensor out(n, s);
        for (int l = 0; 2 * l <= s; ++l) {
            SymTensor t = H;
            for (int j = 0; j < l; ++j) t = contract(e2, t);
            for (int j = 0; j < l; ++j) t = sym_mult(e2, t);
            t *= sv_coefficient(l, s, n);
            out += t;
        }
        return out;
    };

    SvIdentityResult res;
    std::vector<double> diff;
    std::vector<int> idx;
    for (const auto& p : pts) {
        std::span<const double> x(p.data(), n);
        GenTensor<double> Jn(n, m + M);
        idx.resize(m + M);
        // evaluate N^0 once per compressed (a, b)
        std::vector<std::vector<double>> nv(ft.size(), std::vector<double>(bt.size()));
        for (std::size_t a = 0; a < ft.size(); ++a)
            for (std::size_t b = 0; b < bt.size(); ++b) nv[a][b] = normal_Nk(dcomp[a][b], 0, x, quad)[0];
        for (std::size_t fl = 0; fl < Jn.size(); ++fl) {
            Jn.unflat(fl, idx);
            Jn[fl] = nv[ft.compress(std::span<const int>(idx.data(), m))][bt.compress(std::span<const int>(idx.data() + m, M))];
        }
        GenTensor<double> lhs = assemble_R(Jn, m, k);
        lhs *= factorial(m);

        GenTensor<double> rhs(n, 2 * M + k);
        for (int r = 0; r <= k; ++r) {
            auto F = [&](std::span<const double> y) { return G(r, y); };
            const auto Jg = fd_jet(F, n, m - r, M + r, x, fd_step);
            auto T = assemble_R(Jg, m - r, k - r, r);
            std::vector<int> perm(2 * M + k);
            for (int a = 0; a < 2 * M + k; ++a) {
                if (a < 2 * M) perm[a] = a;
                else if (a < 2 * M + r) perm[a] = 2 * M + (k - r) + (a - 2 * M);
                else perm[a] = 2 * M + (a - 2 * M - r);
            }
            auto piece = permute(T, perm);
            piece *= ((r % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(k, r));
            rhs += piece;
        }
        if (k > 1) {
            std::vector<int> ipos(k);
            for (int i = 0; i < k; ++i) ipos[i] = 2 * M + i;
            rhs = symmetrize(rhs, std::span<const int>(ipos));
        }
        double d = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) d = std::max(d, std::abs(lhs[i] - rhs[i]));
        diff.push_back(d);
        res.lhs_scale = std::max(res.lhs_scale, max_abs(lhs));
    }
    const double sc = res.lhs_scale > 0.0 ? res.lhs_scale : 1.0;
    for (double d : diff) {
        res.pointwise.push_back(d / sc);
        res.residual = std::max(res.residual, d / sc);
    }
    return res;
}

double half_laplacian_constant(int n) { return 2.0 / riesz_constant(n, -0.5); }

HalfLapInversion invert_N0_by_half_laplacian(const GridField& f, double margin) {
    const int n = f.dim();
    if (n != 2 && n != 3) throw std::invalid_argument("invert_N0_by_half_laplacian: n must be 2 or 3");
    if (f.rank() != 0) throw std::invalid_argument("invert_N0_by_half_laplacian: scalar field expected");
    const GridSpec& g = f.grid();
    HalfLapInversion res;
    res.c_n = half_laplacian_constant(n);

    const double fmax = f.max_abs();
    for (std::size_t p = 0; p < f.points() && fmax > 0.0; ++p) {
        const auto x = f.position(p);
        bool near = false;
        for (int a = 0; a < n; ++a) near = near || std::abs(x[a]) > g.L - margin;
        if (near && std::abs(f.comp(0)[p]) > 1e-6 * fmax) {
            res.support_ok = false;
            break;
        }
    }

    GridSpec big = g;
    big.N = 2 * g.N;
    big.L = 2 * g.L;
    GridField fe(big, 0);
    const int off = g.N / 2;
    std::array<int, kMaxDim> j{}, je{};
    for (std::size_t p = 0; p < f.points(); ++p) {
        f.unindex(p, std::span<int>(j.data(), n));
        for (int a = 0; a < n; ++a) je[a] = j[a] + off;
        fe.comp(0)[fe.index(std::span<const int>(je.data(), n))] = f.comp(0)[p];
    }
    const GridField nf = normal_Nk_kernel(fe, 0);
    SpectralOptions opt;
    opt.require_decay = false;  // N^0 f decays like |x|^{1-n}
    const GridField hl = frac_laplacian(nf, 0.5, opt);

    res.recovered = GridField(g, 0);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < f.points(); ++p) {
        f.unindex(p, std::span<int>(j.data(), n));
        for (int a = 0; a < n; ++a) je[a] = j[a] + off;
        const double v = hl.comp(0)[fe.index(std::span<const int>(je.data(), n))];
        res.recovered.comp(0)[p] = v / res.c_n;
        num += v * f.comp(0)[p];
        den += f.comp(0)[p] * f.comp(0)[p];
    }
    res.fitted = den > 0.0 ? num / den : 0.0;
    return res;
}

}  // namespace ttomo
