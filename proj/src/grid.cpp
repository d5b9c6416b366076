#include "ttomo/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ttomo {

void GridSpec::validate() const {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dimension must be 1..3");
    if (N < 4) throw std::invalid_argument("grid needs N >= 4");
    if (!(L > 0)) throw std::invalid_argument("grid needs L > 0");
}

GridSpec default_grid(int n) {
    if (n == 2) return {2, 128, 6.0, true};
    if (n == 3) return {3, 48, 5.0, true};
    throw std::invalid_argument("default grids exist for n = 2, 3");
}

GridField::GridField(const GridSpec& g, int rank) : g_(g), m_(rank) {
    g.validate();
    data_.assign(sym_dim(g.dim, rank), std::vector<double>(g.points(), 0.0));
}

std::size_t GridField::index(std::span<const int> j) const {
    std::size_t p = 0;
    for (int a = 0; a < g_.dim; ++a) p = p * g_.N + static_cast<std::size_t>(j[a]);
    return p;
}

void GridField::unindex(std::size_t p, std::span<int> j) const {
    for (int a = g_.dim - 1; a >= 0; --a) {
        j[a] = static_cast<int>(p % g_.N);
        p /= g_.N;
    }
}

std::array<double, kMaxDim> GridField::position(std::size_t p) const {
    int j[kMaxDim] = {0, 0, 0};
    unindex(p, j);
    std::array<double, kMaxDim> x{};
    for (int a = 0; a < g_.dim; ++a) x[a] = g_.node(j[a]);
    return x;
}

SymTensor GridField::value(std::size_t p) const {
    SymTensor t(g_.dim, m_);
    for (std::size_t c = 0; c < data_.size(); ++c) t[c] = data_[c][p];
    return t;
}

double GridField::interpolate(std::size_t c, std::span<const double> x) const {
    const int n = g_.dim;
    const double h = g_.h();
    int base[kMaxDim];
    double frac[kMaxDim];
    for (int a = 0; a < n; ++a) {
        double s = (x[a] + g_.L) / h;
        double fl = std::floor(s);
        base[a] = static_cast<int>(fl);
        frac[a] = s - fl;
    }
    const auto& d = data_[c];
    double total = 0.0;
    int j[kMaxDim];
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        bool inside = true;
        for (int a = 0; a < n; ++a) {
            int bit = (corner >> a) & 1;
            w *= bit ? frac[a] : 1.0 - frac[a];
            int q = base[a] + bit;
            if (g_.periodic) {
                q %= g_.N;
                if (q < 0) q += g_.N;
            } else if (q < 0 || q >= g_.N) {
                inside = false;
            }
            j[a] = q;
        }
        if (inside && w != 0.0) total += w * d[index(std::span<const int>(j, n))];
    }
    return total;
}

double GridField::interpolate_cubic(std::size_t c, std::span<const double> x) const {
    const int n = g_.dim;
    const double h = g_.h();
    int base[kMaxDim];
    double w[kMaxDim][4];
    for (int a = 0; a < n; ++a) {
        const double s = (x[a] + g_.L) / h;
        const double fl = std::floor(s);
        base[a] = static_cast<int>(fl) - 1;
        const double t = s - fl;  // nodes at -1, 0, 1, 2
        w[a][0] = -t * (t - 1) * (t - 2) / 6;
        w[a][1] = (t + 1) * (t - 1) * (t - 2) / 2;
        w[a][2] = -(t + 1) * t * (t - 2) / 2;
        w[a][3] = (t + 1) * t * (t - 1) / 6;
    }
    const auto& d = data_[c];
    double total = 0.0;
    int j[kMaxDim];
    const int corners = 1 << (2 * n);
    for (int corner = 0; corner < corners; ++corner) {
        double wt = 1.0;
        bool inside = true;
        for (int a = 0; a < n; ++a) {
            const int o = (corner >> (2 * a)) & 3;
            wt *= w[a][o];
            int q = base[a] + o;
            if (g_.periodic) {
                q %= g_.N;
                if (q < 0) q += g_.N;
            } else if (q < 0 || q >= g_.N) {
                inside = false;
            }
            j[a] = q;
        }
        if (inside && wt != 0.0) total += wt * d[index(std::span<const int>(j, n))];
    }
    return total;
}

SymTensor GridField::interpolate(std::span<const double> x) const {
    SymTensor t(g_.dim, m_);
    for (std::size_t c = 0; c < data_.size(); ++c) t[c] = interpolate(c, x);
    return t;
}

double GridField::max_abs() const {
    double r = 0.0;
    for (const auto& c : data_)
        for (double v : c) r = std::max(r, std::abs(v));
    return r;
}

GridField& GridField::operator+=(const GridField& o) {
    if (!(o.g_ == g_) || o.m_ != m_) throw std::invalid_argument("GridField shape mismatch");
    for (std::size_t c = 0; c < data_.size(); ++c)
        for (std::size_t p = 0; p < data_[c].size(); ++p) data_[c][p] += o.data_[c][p];
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    if (!(o.g_ == g_) || o.m_ != m_) throw std::invalid_argument("GridField shape mismatch");
    for (std::size_t c = 0; c < data_.size(); ++c)
        for (std::size_t p = 0; p < data_[c].size(); ++p) data_[c][p] -= o.data_[c][p];
    return *this;
}

GridField& GridField::operator*=(double a) {
    for (auto& c : data_)
        for (double& v : c) v *= a;
    return *this;
}

void GridField::save(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little, "TTOMO1 writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    char header[160];
    std::snprintf(header, sizeof header, "TTOMO1 %d %d %d %.17g %d %zu\n", g_.dim, m_, g_.N, g_.L,
                  g_.periodic ? 1 : 0, data_.size());
    out << header;
    for (const auto& c : data_)
        out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

GridField GridField::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing TTOMO1 header in " + path);
    std::istringstream hs(line);
    std::string magic;
    GridSpec g;
    int m = 0, periodic = 0;
    std::size_t ncomp = 0;
    if (!(hs >> magic >> g.dim >> m >> g.N >> g.L >> periodic >> ncomp) || magic != "TTOMO1")
        throw std::runtime_error("malformed TTOMO1 header in " + path);
    g.periodic = periodic != 0;
    GridField f(g, m);
    if (ncomp != f.components()) throw std::runtime_error("TTOMO1 component count does not match rank");
    for (auto& c : f.data_) {
        in.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated TTOMO1 payload in " + path);
    }
    return f;
}

GridField sample(const AnalyticField& f, const GridSpec& g) {
    if (f.dim() != g.dim) throw std::invalid_argument("sample: field/grid dimension mismatch");
    GridField out(g, f.rank());
    for (std::size_t p = 0; p < out.points(); ++p) {
        auto x = out.position(p);
        for (std::size_t c = 0; c < f.size(); ++c) out.comp(c)[p] = f[c](x);
    }
    return out;
}

GridField sample(const std::function<SymTensor(std::span<const double>)>& f, const GridSpec& g, int rank) {
    GridField out(g, rank);
    for (std::size_t p = 0; p < out.points(); ++p) {
        auto x = out.position(p);
        auto v = f(std::span<const double>(x.data(), g.dim));
        for (std::size_t c = 0; c < out.components(); ++c) out.comp(c)[p] = v[c];
    }
    return out;
}

static double radical_inverse(int base, int i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

std::vector<std::array<double, kMaxDim>> point_cloud(int n, int count, double r) {
    static const int bases[kMaxDim] = {2, 3, 5};
    std::vector<std::array<double, kMaxDim>> pts(count);
    for (int i = 0; i < count; ++i)
        for (int a = 0; a < n; ++a) pts[i][a] = -r + 2.0 * r * radical_inverse(bases[a], i + 1);
    return pts;
}

}  // namespace ttomo
