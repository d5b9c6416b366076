#include "ttomo/tensor.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ttomo {

std::size_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

std::size_t ipow(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
    return r;
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

std::size_t sym_dim(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("sym_dim: need n >= 1, m >= 0");
    return binomial(n + m - 1, m);
}

SymIndexTable::SymIndexTable(int n, int m) : n_(n), m_(m) {
    const std::size_t count = sym_dim(n, m);
    sets_.reserve(count * static_cast<std::size_t>(m));
    mult_.reserve(count);
    std::vector<int> cur(m, 0);
    const double mfact = factorial(m);
    for (;;) {
        sets_.insert(sets_.end(), cur.begin(), cur.end());
        double denom = 1.0;
        for (int a = 0; a < m;) {
            int b = a;
            while (b < m && cur[b] == cur[a]) ++b;
            denom *= factorial(b - a);
            a = b;
        }
        mult_.push_back(mfact / denom);
        // next nondecreasing tuple in lexicographic order
        int pos = m - 1;
        while (pos >= 0 && cur[pos] == n - 1) --pos;
        if (pos < 0) break;
        ++cur[pos];
        for (int q = pos + 1; q < m; ++q) cur[q] = cur[pos];
    }
    const std::size_t full = ipow(n, m);
    if (full <= (1u << 20)) {
        flat_map_.resize(full);
        std::vector<int> idx(m);
        for (std::size_t f = 0; f < full; ++f) {
            std::size_t g = f;
            for (int a = m - 1; a >= 0; --a) {
                idx[a] = static_cast<int>(g % n);
                g /= n;
            }
            std::sort(idx.begin(), idx.end());
            flat_map_[f] = static_cast<std::uint32_t>(rank_sorted(idx));
        }
    }
}

const SymIndexTable& SymIndexTable::get(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("SymIndexTable: need n >= 1, m >= 0");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<SymIndexTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, m}];
    if (!slot) slot = std::make_unique<SymIndexTable>(n, m);
    return *slot;
}

// Lexicographic rank of a nondecreasing tuple among all nondecreasing tuples.
std::size_t SymIndexTable::rank_sorted(std::span<const int> s) const {
    std::size_t r = 0;
    int lo = 0;
    for (int p = 0; p < m_; ++p) {
        const int rest = m_ - p - 1;
        for (int v = lo; v < s[p]; ++v) r += binomial(n_ - v + rest - 1, rest);
        lo = s[p];
    }
    return r;
}

std::size_t SymIndexTable::compress(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != m_) throw std::invalid_argument("index length != rank");
    for (int i : idx)
        if (i < 0 || i >= n_) throw std::out_of_range("tensor index out of range");
    if (!flat_map_.empty()) {
        std::size_t f = 0;
        for (int i : idx) f = f * n_ + static_cast<std::size_t>(i);
        return flat_map_[f];
    }
    std::vector<int> s(idx.begin(), idx.end());
    std::sort(s.begin(), s.end());
    return rank_sorted(s);
}

std::size_t SymIndexTable::from_flat(std::size_t flat) const {
    if (!flat_map_.empty()) return flat_map_[flat];
    std::vector<int> idx(m_);
    for (int a = m_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n_);
        flat /= n_;
    }
    std::sort(idx.begin(), idx.end());
    return rank_sorted(idx);
}

SymTensor::SymTensor(int dim, int rank)
    : n_(dim), m_(rank), table_(&SymIndexTable::get(dim, rank)), data_(table_->size(), 0.0) {}

SymTensor::SymTensor(int dim, int rank, std::vector<double> data)
    : n_(dim), m_(rank), table_(&SymIndexTable::get(dim, rank)), data_(std::move(data)) {
    if (data_.size() != table_->size()) throw std::invalid_argument("SymTensor: data length != sym_dim");
}

static void check_shape(const SymTensor& a, const SymTensor& b) {
    if (a.dim() != b.dim() || a.rank() != b.rank()) throw std::invalid_argument("SymTensor shape mismatch");
}

SymTensor& SymTensor::operator+=(const SymTensor& o) {
    check_shape(*this, o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}
SymTensor& SymTensor::operator-=(const SymTensor& o) {
    check_shape(*this, o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}
SymTensor& SymTensor::operator*=(double a) {
    for (auto& v : data_) v *= a;
    return *this;
}
double SymTensor::max_abs() const {
    double r = 0.0;
    for (double v : data_) r = std::max(r, std::abs(v));
    return r;
}

SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
SymTensor operator*(double a, SymTensor b) { return b *= a; }

SymTensor tensor_power(std::span<const double> xi, int m) {
    const int n = static_cast<int>(xi.size());
    SymTensor out(n, m);
    const auto& tab = out.table();
    for (std::size_t c = 0; c < tab.size(); ++c) {
        double p = 1.0;
        for (int i : tab.multiset(c)) p *= xi[i];
        out[c] = p;
    }
    return out;
}

double dot(const SymTensor& f, const SymTensor& g) {
    check_shape(f, g);
    const auto& tab = f.table();
    double s = 0.0;
    for (std::size_t c = 0; c < tab.size(); ++c) s += tab.multiplicity(c) * f[c] * g[c];
    return s;
}

std::vector<int> merge_sorted(std::span<const int> a, std::span<const int> b) {
    std::vector<int> out(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
    return out;
}

// (i_u v)_I averages u_{I_S} v_{I \ S} over the position subsets S of size k.
// For a sorted multiset I this equals a sum over sub-multisets J of I with the
// hypergeometric weight prod C(c_i, j_i) / C(m+k, k).
SymTensor sym_mult(const SymTensor& u, const SymTensor& v) {
    if (u.dim() != v.dim()) throw std::invalid_argument("sym_mult: dim mismatch");
    const int n = u.dim(), k = u.rank(), m = v.rank();
    SymTensor out(n, m + k);
    const auto& tab = out.table();
    const double total = static_cast<double>(binomial(m + k, k));
    std::vector<int> counts(n), take(n), sub, rest;
    for (std::size_t c = 0; c < tab.size(); ++c) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int i : tab.multiset(c)) ++counts[i];
        // enumerate take[i] in [0, counts[i]] with sum k
        std::fill(take.begin(), take.end(), 0);
        double acc = 0.0;
        for (;;) {
            int s = 0;
            for (int i = 0; i < n; ++i) s += take[i];
            if (s == k) {
                double w = 1.0;
                sub.clear();
                rest.clear();
                for (int i = 0; i < n; ++i) {
                    w *= static_cast<double>(binomial(counts[i], take[i]));
                    for (int q = 0; q < take[i]; ++q) sub.push_back(i);
                    for (int q = take[i]; q < counts[i]; ++q) rest.push_back(i);
                }
                acc += w * u.at(sub) * v.at(rest);
            }
            int i = 0;
            while (i < n && take[i] == counts[i]) take[i++] = 0;
            if (i == n) break;
            ++take[i];
        }
        out[c] = acc / total;
    }
    return out;
}

SymTensor contract(const SymTensor& u, const SymTensor& w) {
    if (u.dim() != w.dim()) throw std::invalid_argument("contract: dim mismatch");
    const int k = u.rank(), m = w.rank() - k;
    if (m < 0) throw std::invalid_argument("contract: rank(w) < rank(u)");
    SymTensor out(w.dim(), m);
    const auto& to = out.table();
    const auto& tu = u.table();
    const auto& tw = w.table();
    for (std::size_t c = 0; c < to.size(); ++c) {
        double acc = 0.0;
        for (std::size_t j = 0; j < tu.size(); ++j) {
            auto idx = merge_sorted(to.multiset(c), tu.multiset(j));
            acc += tu.multiplicity(j) * u[j] * w[tw.compress(idx)];
        }
        out[c] = acc;
    }
    return out;
}

SymTensor metric_tensor(int n, int k) {
    if (k != 2)
        throw std::invalid_argument("metric_tensor: only k = 2 (the Kronecker delta) is defined");
    SymTensor e(n, 2);
    for (int i = 0; i < n; ++i) {
        const int idx[2] = {i, i};
        e[e.table().compress(idx)] = 1.0;
    }
    return e;
}

GenTensor<double> expand(const SymTensor& s) { return expand_sym(s.data(), s.dim(), s.rank()); }

SymTensor compress(const GenTensor<double>& t) {
    return SymTensor(t.dim(), t.rank(), compress_sym(t));
}

double symmetry_defect(const GenTensor<double>& t) {
    double worst = 0.0;
    std::vector<int> idx(t.rank());
    for (const auto& g : t.sym_groups()) {
        for (std::size_t a = 0; a + 1 < g.size(); ++a) {
            for (std::size_t f = 0; f < t.size(); ++f) {
                t.unflat(f, idx);
                std::swap(idx[g[a]], idx[g[a + 1]]);
                worst = std::max(worst, std::abs(t[f] - t(idx)));
            }
        }
    }
    return worst;
}

}  // namespace ttomo
