#include "ttomo/diffops.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ttomo {

namespace {

void check_k(int m, int k) {
    if (k < 0 || k > m) throw std::out_of_range("Saint-Venant order k must satisfy 0 <= k <= m");
}

std::vector<int> iota_vec(int from, int count) {
    std::vector<int> v(count);
    std::iota(v.begin(), v.end(), from);
    return v;
}

}  // namespace

// ---- symbolic operators -------------------------------------------------------

AnalyticField inner_derivative(const AnalyticField& f) {
    const int n = f.dim(), m = f.rank();
    AnalyticField out(n, m + 1);
    const auto& to = out.table();
    const auto& tf = f.table();
    std::vector<AnalyticField> grad;
    for (int a = 0; a < n; ++a) grad.push_back(f.derivative(a));
    std::vector<int> rest;
    for (std::size_t c = 0; c < to.size(); ++c) {
        auto I = to.multiset(c);
        AnalyticScalar acc(n);
        // sym over all slots: average over which position carries the derivative
        for (int s = 0; s <= m; ++s) {
            if (s > 0 && I[s] == I[s - 1]) continue;
            int count = 0;
            for (int v : I) count += (v == I[s]);
            rest.assign(I.begin(), I.end());
            rest.erase(rest.begin() + s);
            acc += grad[I[s]][tf.compress(rest)] * (static_cast<double>(count) / (m + 1));
        }
        out[c] = acc;
    }
    return out;
}

AnalyticField inner_derivative(const AnalyticField& f, int times) {
    AnalyticField r = f;
    for (int i = 0; i < times; ++i) r = inner_derivative(r);
    return r;
}

AnalyticField divergence(const AnalyticField& f) {
    const int n = f.dim(), m = f.rank();
    if (m < 1) throw std::invalid_argument("divergence of a rank-0 field");
    AnalyticField out(n, m - 1);
    const auto& to = out.table();
    const auto& tf = f.table();
    for (std::size_t c = 0; c < to.size(); ++c) {
        auto I = to.multiset(c);
        AnalyticScalar acc(n);
        for (int j = 0; j < n; ++j) {
            std::vector<int> idx(I.begin(), I.end());
            idx.push_back(j);
            acc += f[tf.compress(idx)].derivative(j);
        }
        out[c] = acc;
    }
    return out;
}

AnalyticField divergence(const AnalyticField& f, int times) {
    AnalyticField r = f;
    for (int i = 0; i < times; ++i) r = divergence(r);
    return r;
}

AnalyticScalar laplacian(const AnalyticScalar& f) {
    AnalyticScalar acc(f.dim());
    for (int j = 0; j < f.dim(); ++j) acc += f.derivative(j).derivative(j);
    return acc;
}

AnalyticField laplacian(const AnalyticField& f, int times) {
    AnalyticField r = f;
    for (int t = 0; t < times; ++t)
        for (std::size_t c = 0; c < r.size(); ++c) r[c] = laplacian(r[c]);
    return r;
}

AnalyticJet::AnalyticJet(const AnalyticField& f, int order) : base_(f), order_(order) {
    const int n = f.dim();
    d_.resize(order + 1);
    d_[0].push_back(f);
    for (int r = 1; r <= order; ++r) {
        const auto& tab = SymIndexTable::get(n, r);
        const auto& prev = SymIndexTable::get(n, r - 1);
        d_[r].reserve(tab.size());
        for (std::size_t c = 0; c < tab.size(); ++c) {
            auto s = tab.multiset(c);
            std::vector<int> parent(s.begin(), s.end() - 1);
            d_[r].push_back(d_[r - 1][prev.compress(parent)].derivative(s.back()));
        }
    }
}

GenTensor<double> AnalyticJet::eval(int r, std::span<const double> x) const {
    if (r < 0 || r > order_) throw std::out_of_range("jet order not available");
    const int n = base_.dim(), m = base_.rank();
    const auto& tf = base_.table();
    const auto& tb = SymIndexTable::get(n, r);
    std::vector<double> vals(tf.size() * tb.size());
    for (std::size_t b = 0; b < tb.size(); ++b)
        for (std::size_t c = 0; c < tf.size(); ++c) vals[b * tf.size() + c] = d_[r][b][c](x);
    GenTensor<double> J(n, m + r);
    const std::size_t nb = ipow(n, r);
    for (std::size_t f = 0; f < J.size(); ++f) {
        const std::size_t fa = f / nb, fb = f % nb;
        J[f] = vals[tb.from_flat(fb) * tf.size() + tf.from_flat(fa)];
    }
    return J;
}

// ---- assembly -----------------------------------------------------------------

GenTensor<double> assemble_R(const GenTensor<double>& J, int m, int k, int extra) {
    check_k(m, k);
    const int M = m - k;
    if (J.rank() != m + M + extra) throw std::invalid_argument("assemble_R: jet rank mismatch");
    std::vector<int> perm(J.rank());
    for (int j = 0; j < M; ++j) {
        perm[2 * j] = j;
        perm[2 * j + 1] = m + j;
    }
    for (int i = 0; i < k; ++i) perm[2 * M + i] = M + i;
    for (int e = 0; e < extra; ++e) perm[2 * M + k + e] = m + M + e;
    auto T = permute(J, perm);
    for (int j = 0; j < M; ++j) T = alternate(T, 2 * j, 2 * j + 1);
    return T;
}

GenTensor<double> assemble_W(const GenTensor<double>& J, int m, int k) {
    check_k(m, k);
    const int M = m - k;
    if (J.rank() != m + M) throw std::invalid_argument("assemble_W: jet rank mismatch");
    GenTensor<double> W(J.dim(), 2 * M + k);
    std::vector<int> perm(J.rank());
    for (int ell = 0; ell <= M; ++ell) {
        for (int j = 0; j < M; ++j) perm[j] = (j < M - ell) ? j : m + (j - (M - ell));
        for (int j = 0; j < M; ++j) perm[M + j] = (j < ell) ? (M - ell + j) : m + j;
        for (int i = 0; i < k; ++i) perm[2 * M + i] = M + i;
        auto T = permute(J, perm);
        T *= ((ell % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(M, ell));
        W += T;
    }
    auto p = iota_vec(0, M), q = iota_vec(M, M + k);
    W = symmetrize(W, std::span<const int>(p));
    W = symmetrize(W, std::span<const int>(q));
    return W;
}

GenTensor<double> saint_venant_R(const AnalyticField& f, int k, std::span<const double> x) {
    check_k(f.rank(), k);
    AnalyticJet jet(f, f.rank() - k);
    return assemble_R(jet.eval(f.rank() - k, x), f.rank(), k);
}

GenTensor<double> saint_venant_W(const AnalyticField& f, int k, std::span<const double> x) {
    check_k(f.rank(), k);
    AnalyticJet jet(f, f.rank() - k);
    return assemble_W(jet.eval(f.rank() - k, x), f.rank(), k);
}

GenTensor<double> w_from_r(const GenTensor<double>& R, int m, int k) {
    check_k(m, k);
    const int M = m - k;
    std::vector<int> perm(R.rank());
    for (int j = 0; j < M; ++j) {
        perm[j] = 2 * j;
        perm[M + j] = 2 * j + 1;
    }
    for (int i = 0; i < k; ++i) perm[2 * M + i] = 2 * M + i;
    auto W = permute(R, perm);
    auto p = iota_vec(0, M), q = iota_vec(M, M + k);
    W = symmetrize(W, std::span<const int>(q));
    W = symmetrize(W, std::span<const int>(p));
    W *= std::ldexp(1.0, M);
    return W;
}

GenTensor<double> r_from_w(const GenTensor<double>& W, int m, int k, double coeff) {
    check_k(m, k);
    const int M = m - k;
    std::vector<int> perm(W.rank());
    for (int j = 0; j < M; ++j) {
        perm[2 * j] = j;
        perm[2 * j + 1] = M + j;
    }
    for (int i = 0; i < k; ++i) perm[2 * M + i] = 2 * M + i;
    auto R = permute(W, perm);
    for (int j = 0; j < M; ++j) R = alternate(R, 2 * j, 2 * j + 1);
    R *= coeff;
    return R;
}

double r_from_w_coefficient(int m, int k) {
    check_k(m, k);
    return static_cast<double>(k + 1) / static_cast<double>(m + 1);
}

static double max_abs(const GenTensor<double>& t) {
    double r = 0.0;
    for (double v : t.data()) r = std::max(r, std::abs(v));
    return r;
}

bool equivalence_check(const AnalyticField& f, int k, std::span<const std::array<double, kMaxDim>> pts,
                       double tol) {
    check_k(f.rank(), k);
    AnalyticJet jet(f, f.rank() - k);
    double wmax = 0.0, rmax = 0.0;
    for (const auto& p : pts) {
        auto J = jet.eval(f.rank() - k, p);
        wmax = std::max(wmax, max_abs(assemble_W(J, f.rank(), k)));
        rmax = std::max(rmax, max_abs(assemble_R(J, f.rank(), k)));
    }
    return (wmax < tol) == (rmax < tol);
}

double check_delta_R_identity(const AnalyticField& f, int ell, std::span<const std::array<double, kMaxDim>> pts) {
    const int n = f.dim(), m = f.rank();
    if (m > 3) throw std::invalid_argument("delta-R identity check is capped at rank 3");
    if (ell < 0 || ell > m) throw std::out_of_range("need 0 <= ell <= m");
    const int out_rank = ell + 2 * (m - ell);

    AnalyticJet lhs_jet(f, m + ell);
    // RHS pieces: h_p = laplacian^{ell-p} delta^p f, with jets of order (m - ell) + p
    std::vector<AnalyticJet> rhs_jets;
    for (int p = 0; p <= ell; ++p) rhs_jets.emplace_back(laplacian(divergence(f, p), ell - p), (m - ell) + p);

    double worst = 0.0;
    std::vector<int> out_idx(out_rank), t_idx(2 * m + ell), c(ell);
    for (const auto& x : pts) {
        // LHS: d/dx_{j1..jl} (R^0 f)_{i1 j1 ... il jl ...}
        auto T = assemble_R(lhs_jet.eval(m + ell, x), m, 0, ell);
        GenTensor<double> lhs(n, out_rank);
        const std::size_t nc = ipow(n, ell);
        for (std::size_t fo = 0; fo < lhs.size(); ++fo) {
            lhs.unflat(fo, out_idx);
            double acc = 0.0;
            for (std::size_t fc = 0; fc < nc; ++fc) {
                std::size_t g = fc;
                for (int a = ell - 1; a >= 0; --a) {
                    c[a] = static_cast<int>(g % n);
                    g /= n;
                }
                for (int j = 0; j < ell; ++j) {
                    t_idx[2 * j] = out_idx[j];
                    t_idx[2 * j + 1] = c[j];
                }
                for (int j = ell; j < m; ++j) {
                    t_idx[2 * j] = out_idx[ell + 2 * (j - ell)];
                    t_idx[2 * j + 1] = out_idx[ell + 2 * (j - ell) + 1];
                }
                for (int a = 0; a < ell; ++a) t_idx[2 * m + a] = c[a];
                acc += T(t_idx);
            }
            lhs[fo] = acc;
        }

        GenTensor<double> rhs(n, out_rank);
        for (int p = 0; p <= ell; ++p) {
            const int mp = m - p, kp = ell - p, M = m - ell;
            auto Tp = assemble_R(rhs_jets[p].eval(M + p, x), mp, kp, p);
            // reorder (pairs, I, c) -> (c, I, pairs)
            std::vector<int> perm(out_rank);
            for (int a = 0; a < out_rank; ++a) {
                if (a < p) perm[a] = 2 * M + kp + a;
                else if (a < ell) perm[a] = 2 * M + (a - p);
                else perm[a] = a - ell;
            }
            auto piece = permute(Tp, perm);
            piece *= ((p % 2) ? -1.0 : 1.0) * static_cast<double>(binomial(ell, p));
            rhs += piece;
        }
        auto first = iota_vec(0, ell);
        rhs = symmetrize(rhs, std::span<const int>(first));
        rhs *= std::ldexp(1.0, -ell);

        for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
    }
    return worst;
}

double check_curl_curl(const AnalyticField& f, std::span<const std::array<double, kMaxDim>> pts) {
    if (f.rank() != 1) throw std::invalid_argument("curl-curl check needs a vector field");
    const int n = f.dim();
    AnalyticJet jet(f, 2);
    double worst = 0.0;
    for (const auto& x : pts) {
        auto J = jet.eval(2, x);  // J[a, b, c] = d_b d_c f_a
        auto T = assemble_R(J, 1, 0, 1);  // (p q, c)
        for (int i = 0; i < n; ++i) {
            double lap = 0.0, graddiv = 0.0, divR = 0.0;
            for (int j = 0; j < n; ++j) {
                lap += J({i, j, j});
                graddiv += J({j, j, i});
                divR += T({i, j, j});
            }
            worst = std::max(worst, std::abs(lap - graddiv - 2.0 * divR));
            if (n == 3) {
                // classical: curl curl f = grad div f - laplacian f
                auto curl_of = [&](auto&& g, int a) {
                    int b = (a + 1) % 3, c = (a + 2) % 3;
                    return g(c, b) - g(b, c);  // g(comp, axis) = d_axis (field)_comp
                };
                // (curl curl f)_i = eps_ijk d_j (curl f)_k, with d_j (curl f)_k from J
                auto dcurl = [&](int k, int j) {
                    return curl_of([&](int comp, int axis) { return J({comp, axis, j}); }, k);
                };
                double cc = curl_of([&](int comp, int axis) { return dcurl(comp, axis); }, i);
                worst = std::max(worst, std::abs(lap - graddiv + cc));
            }
        }
    }
    return worst;
}

// ---- grid path ------------------------------------------------------------------

std::vector<double> grid_partial(const GridSpec& g, const std::vector<double>& u, int axis) {
    if (g.N < 8) throw std::invalid_argument("grid too coarse for the derivative stencil (N < 8)");
    if (axis < 0 || axis >= g.dim) throw std::out_of_range("derivative axis out of range");
    const std::size_t stride = ipow(g.N, g.dim - 1 - axis);
    const double inv = 1.0 / (2.0 * g.h());
    const int N = g.N;
    std::vector<double> d(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) {
        const int j = static_cast<int>((p / stride) % N);
        const std::size_t base = p - static_cast<std::size_t>(j) * stride;
        auto at = [&](int q) { return u[base + static_cast<std::size_t>(q) * stride]; };
        if (g.periodic) {
            d[p] = (at((j + 1) % N) - at((j + N - 1) % N)) * inv;
        } else if (j == 0) {
            d[p] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv;
        } else if (j == N - 1) {
            d[p] = (3.0 * at(N - 1) - 4.0 * at(N - 2) + at(N - 3)) * inv;
        } else {
            d[p] = (at(j + 1) - at(j - 1)) * inv;
        }
    }
    return d;
}

GridField grid_partial(const GridField& f, int axis) {
    GridField out(f.grid(), f.rank());
    for (std::size_t c = 0; c < f.components(); ++c) out.comp(c) = grid_partial(f.grid(), f.comp(c), axis);
    return out;
}

GridField inner_derivative(const GridField& f) {
    const int n = f.dim(), m = f.rank();
    GridField out(f.grid(), m + 1);
    const auto& to = SymIndexTable::get(n, m + 1);
    const auto& tf = SymIndexTable::get(n, m);
    std::vector<GridField> grad;
    for (int a = 0; a < n; ++a) grad.push_back(grid_partial(f, a));
    std::vector<int> rest;
    for (std::size_t c = 0; c < to.size(); ++c) {
        auto I = to.multiset(c);
        auto& dst = out.comp(c);
        for (int s = 0; s <= m; ++s) {
            if (s > 0 && I[s] == I[s - 1]) continue;
            int count = 0;
            for (int v : I) count += (v == I[s]);
            rest.assign(I.begin(), I.end());
            rest.erase(rest.begin() + s);
            const auto& src = grad[I[s]].comp(tf.compress(rest));
            const double w = static_cast<double>(count) / (m + 1);
            for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += w * src[p];
        }
    }
    return out;
}

GridField divergence(const GridField& f) {
    const int n = f.dim(), m = f.rank();
    if (m < 1) throw std::invalid_argument("divergence of a rank-0 field");
    GridField out(f.grid(), m - 1);
    const auto& to = SymIndexTable::get(n, m - 1);
    const auto& tf = SymIndexTable::get(n, m);
    for (std::size_t c = 0; c < to.size(); ++c) {
        auto I = to.multiset(c);
        auto& dst = out.comp(c);
        for (int j = 0; j < n; ++j) {
            std::vector<int> idx(I.begin(), I.end());
            idx.push_back(j);
            auto d = grid_partial(f.grid(), f.comp(tf.compress(idx)), j);
            for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += d[p];
        }
    }
    return out;
}

GenTensor<double> GridTensorField::at(std::size_t p) const {
    GenTensor<double> t(grid.dim, rank);
    for (std::size_t f = 0; f < t.size(); ++f) t[f] = comps[f][p];
    return t;
}

double GridTensorField::max_abs() const {
    double r = 0.0;
    for (const auto& c : comps)
        for (double v : c) r = std::max(r, std::abs(v));
    return r;
}

GridTensorField saint_venant_R(const GridField& f, int k) {
    const int n = f.dim(), m = f.rank();
    check_k(m, k);
    const int M = m - k;
    // all derivatives of order M, by compressed derivative multiset
    std::vector<std::vector<GridField>> d(M + 1);
    d[0].push_back(f);
    for (int r = 1; r <= M; ++r) {
        const auto& tab = SymIndexTable::get(n, r);
        const auto& prev = SymIndexTable::get(n, r - 1);
        for (std::size_t c = 0; c < tab.size(); ++c) {
            auto s = tab.multiset(c);
            std::vector<int> parent(s.begin(), s.end() - 1);
            d[r].push_back(grid_partial(d[r - 1][prev.compress(parent)], s.back()));
        }
    }
    const auto& tf = SymIndexTable::get(n, m);
    const auto& tb = SymIndexTable::get(n, M);
    GridTensorField out{f.grid(), 2 * M + k, {}};
    out.comps.assign(ipow(n, 2 * M + k), std::vector<double>(f.points()));
    GenTensor<double> J(n, m + M);
    const std::size_t nb = ipow(n, M);
    for (std::size_t p = 0; p < f.points(); ++p) {
        for (std::size_t q = 0; q < J.size(); ++q)
            J[q] = d[M][tb.from_flat(q % nb)].comp(tf.from_flat(q / nb))[p];
        auto R = assemble_R(J, m, k);
        for (std::size_t q = 0; q < R.size(); ++q) out.comps[q][p] = R[q];
    }
    return out;
}

}  // namespace ttomo
