// Symmetric and general tensors on R^n.
//
// SymTensor keeps one entry per multiset of indices, ordered lexicographically
// over sorted index tuples.  GenTensor is a dense n^rank array used for the
// mixed-symmetry objects produced by the Saint-Venant operators.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttomo {

std::size_t binomial(int n, int k);
std::size_t ipow(int base, int exp);
double factorial(int k);

// Number of independent components of a symmetric rank-m tensor on R^n.
std::size_t sym_dim(int n, int m);

// Index bookkeeping for compressed symmetric storage.  Shared, immutable,
// built once per (n, m).
class SymIndexTable {
public:
    static const SymIndexTable& get(int n, int m);

    int dim() const { return n_; }
    int rank() const { return m_; }
    std::size_t size() const { return mult_.size(); }

    // Sorted index tuple of compressed slot c.
    std::span<const int> multiset(std::size_t c) const {
        return {sets_.data() + c * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
    }
    // Number of full-index tuples that map to slot c: m! / prod(count_i!).
    double multiplicity(std::size_t c) const { return mult_[c]; }
    // Compressed slot of an arbitrary (unsorted) index tuple.
    std::size_t compress(std::span<const int> idx) const;
    // Compressed slot of a flat dense index (row-major, n^m).
    std::size_t from_flat(std::size_t flat) const;

    SymIndexTable(int n, int m);

private:
    std::size_t rank_sorted(std::span<const int> sorted) const;

    int n_, m_;
    std::vector<int> sets_;
    std::vector<double> mult_;
    std::vector<std::uint32_t> flat_map_;  // empty when n^m is large
};

template <class T>
class GenTensor;

class SymTensor {
public:
    SymTensor() : SymTensor(1, 0) {}
    SymTensor(int dim, int rank);
    SymTensor(int dim, int rank, std::vector<double> data);

    int dim() const { return n_; }
    int rank() const { return m_; }
    std::size_t size() const { return data_.size(); }
    const SymIndexTable& table() const { return *table_; }

    double operator[](std::size_t c) const { return data_[c]; }
    double& operator[](std::size_t c) { return data_[c]; }
    double at(std::span<const int> idx) const { return data_[table_->compress(idx)]; }
    double at(std::initializer_list<int> idx) const {
        return at(std::span<const int>(idx.begin(), idx.size()));
    }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    SymTensor& operator+=(const SymTensor& o);
    SymTensor& operator-=(const SymTensor& o);
    SymTensor& operator*=(double a);
    double max_abs() const;

private:
    int n_, m_;
    const SymIndexTable* table_;
    std::vector<double> data_;
};

SymTensor operator+(SymTensor a, const SymTensor& b);
SymTensor operator-(SymTensor a, const SymTensor& b);
SymTensor operator*(double a, SymTensor b);

// xi^{(x) m}
SymTensor tensor_power(std::span<const double> xi, int m);
// Full-index contraction <f, g>, weighting each slot by its multiplicity.
double dot(const SymTensor& f, const SymTensor& g);
// i_u v = sym(u (x) v)
SymTensor sym_mult(const SymTensor& u, const SymTensor& v);
// j_u w: contract the last rank(u) slots of w with u.
SymTensor contract(const SymTensor& u, const SymTensor& w);
// Kronecker delta as a rank-2 symmetric tensor.  Only k = 2 is supported.
SymTensor metric_tensor(int n, int k = 2);

// Multiset helpers used by several modules.
std::vector<int> merge_sorted(std::span<const int> a, std::span<const int> b);

// ---------------------------------------------------------------------------
// Dense general tensor.  T must support T{}, +=, and multiplication by double.

template <class T>
class GenTensor {
public:
    GenTensor() = default;
    GenTensor(int dim, int rank) : n_(dim), r_(rank), data_(ipow(dim, rank)) {}

    int dim() const { return n_; }
    int rank() const { return r_; }
    std::size_t size() const { return data_.size(); }

    std::size_t flat(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int a = 0; a < r_; ++a) f = f * n_ + static_cast<std::size_t>(idx[a]);
        return f;
    }
    void unflat(std::size_t f, std::span<int> idx) const {
        for (int a = r_ - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(f % n_);
            f /= n_;
        }
    }
    std::vector<int> unflat(std::size_t f) const {
        std::vector<int> idx(r_);
        unflat(f, idx);
        return idx;
    }

    T& operator[](std::size_t f) { return data_[f]; }
    const T& operator[](std::size_t f) const { return data_[f]; }
    T& operator()(std::span<const int> idx) { return data_[flat(idx)]; }
    const T& operator()(std::span<const int> idx) const { return data_[flat(idx)]; }
    T& operator()(std::initializer_list<int> idx) {
        return data_[flat(std::span<const int>(idx.begin(), idx.size()))];
    }
    const T& operator()(std::initializer_list<int> idx) const {
        return data_[flat(std::span<const int>(idx.begin(), idx.size()))];
    }

    std::vector<std::vector<int>>& sym_groups() { return groups_; }
    const std::vector<std::vector<int>>& sym_groups() const { return groups_; }

    GenTensor& operator+=(const GenTensor& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    GenTensor& operator*=(double a) {
        for (auto& v : data_) v = v * a;
        return *this;
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

private:
    void check_same(const GenTensor& o) const {
        if (o.n_ != n_ || o.r_ != r_) throw std::invalid_argument("GenTensor shape mismatch");
    }

    int n_ = 1, r_ = 0;
    std::vector<T> data_{T{}};
    std::vector<std::vector<int>> groups_;
};

namespace detail {
inline void check_positions(int rank, std::span<const int> pos) {
    for (int p : pos)
        if (p < 0 || p >= rank) throw std::out_of_range("tensor index position out of range");
    std::vector<int> s(pos.begin(), pos.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw std::invalid_argument("repeated tensor index position");
}
}  // namespace detail

// sigma over the listed slot positions.
template <class T>
GenTensor<T> symmetrize(const GenTensor<T>& t, std::span<const int> pos) {
    detail::check_positions(t.rank(), pos);
    GenTensor<T> out(t.dim(), t.rank());
    const int p = static_cast<int>(pos.size());
    if (p <= 1) {
        out = t;
        return out;
    }
    std::vector<int> perm(p);
    std::vector<std::vector<int>> perms;
    std::iota(perm.begin(), perm.end(), 0);
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    const double w = 1.0 / static_cast<double>(perms.size());
    std::vector<int> idx(t.rank()), src(t.rank());
    for (std::size_t f = 0; f < t.size(); ++f) {
        t.unflat(f, idx);
        T acc{};
        for (const auto& pi : perms) {
            src = idx;
            for (int a = 0; a < p; ++a) src[pos[a]] = idx[pos[pi[a]]];
            acc += t(src);
        }
        out[f] = acc * w;
    }
    out.sym_groups() = t.sym_groups();
    out.sym_groups().emplace_back(pos.begin(), pos.end());
    return out;
}

template <class T>
GenTensor<T> symmetrize(const GenTensor<T>& t, std::initializer_list<int> pos) {
    return symmetrize(t, std::span<const int>(pos.begin(), pos.size()));
}

template <class T>
GenTensor<T> symmetrize_all(const GenTensor<T>& t) {
    std::vector<int> pos(t.rank());
    std::iota(pos.begin(), pos.end(), 0);
    return symmetrize(t, std::span<const int>(pos));
}

// alpha(i1 i2) u = (u - u with slots i1, i2 swapped) / 2
template <class T>
GenTensor<T> alternate(const GenTensor<T>& t, int i1, int i2) {
    const int pos[2] = {i1, i2};
    detail::check_positions(t.rank(), pos);
    GenTensor<T> out(t.dim(), t.rank());
    std::vector<int> idx(t.rank());
    for (std::size_t f = 0; f < t.size(); ++f) {
        t.unflat(f, idx);
        std::swap(idx[i1], idx[i2]);
        T v = t[f];
        v += t(idx) * -1.0;
        out[f] = v * 0.5;
    }
    for (const auto& g : t.sym_groups()) {
        bool hit = std::find(g.begin(), g.end(), i1) != g.end() ||
                   std::find(g.begin(), g.end(), i2) != g.end();
        if (!hit) out.sym_groups().push_back(g);
    }
    return out;
}

// out(j_0..j_{r-1}) = t(j_{inv(0)}...): slot a of the output is slot perm[a] of the input.
template <class T>
GenTensor<T> permute(const GenTensor<T>& t, std::span<const int> perm) {
    if (static_cast<int>(perm.size()) != t.rank())
        throw std::invalid_argument("permutation length mismatch");
    detail::check_positions(t.rank(), perm);
    GenTensor<T> out(t.dim(), t.rank());
    std::vector<int> idx(t.rank()), src(t.rank());
    for (std::size_t f = 0; f < out.size(); ++f) {
        out.unflat(f, idx);
        for (int a = 0; a < t.rank(); ++a) src[perm[a]] = idx[a];
        out[f] = t(src);
    }
    return out;
}

// Trace over slots a and b (a != b).
template <class T>
GenTensor<T> contract_pair(const GenTensor<T>& t, int a, int b) {
    const int pos[2] = {a, b};
    detail::check_positions(t.rank(), pos);
    GenTensor<T> out(t.dim(), t.rank() - 2);
    std::vector<int> idx(out.rank()), src(t.rank());
    for (std::size_t f = 0; f < out.size(); ++f) {
        out.unflat(f, idx);
        T acc{};
        for (int c = 0; c < t.dim(); ++c) {
            int q = 0;
            for (int s = 0; s < t.rank(); ++s) src[s] = (s == a || s == b) ? c : idx[q++];
            acc += t(src);
        }
        out[f] = acc;
    }
    return out;
}

template <class T>
GenTensor<T> expand_sym(const std::vector<T>& comps, int n, int m) {
    const auto& tab = SymIndexTable::get(n, m);
    GenTensor<T> out(n, m);
    for (std::size_t f = 0; f < out.size(); ++f) out[f] = comps[tab.from_flat(f)];
    if (m > 1) {
        std::vector<int> g(m);
        std::iota(g.begin(), g.end(), 0);
        out.sym_groups().push_back(g);
    }
    return out;
}

// Canonical compressed view: reads the sorted-index representative.
template <class T>
std::vector<T> compress_sym(const GenTensor<T>& t) {
    const auto& tab = SymIndexTable::get(t.dim(), t.rank());
    std::vector<T> out(tab.size());
    for (std::size_t c = 0; c < tab.size(); ++c) out[c] = t(tab.multiset(c));
    return out;
}

GenTensor<double> expand(const SymTensor& s);
SymTensor compress(const GenTensor<double>& t);
// Max over declared groups and adjacent-pair swaps of |t - swapped t|.
double symmetry_defect(const GenTensor<double>& t);

}  // namespace ttomo
