#include "ttomo/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "ttomo/random.hpp"

namespace ttomo {

namespace {

void check_dim(int n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("analytic fields support dimensions 1..3");
}

// Univariate polynomial product.
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// int_R u^j exp(-A u^2) du
double gauss_moment(int j, double A) {
    if (j % 2) return 0.0;
    return std::tgamma(0.5 * (j + 1)) / std::pow(A, 0.5 * (j + 1));
}

}  // namespace

AnalyticScalar AnalyticScalar::gaussian(int dim, std::span<const double> center, double width, double coeff) {
    if (!(width > 0)) throw std::invalid_argument("gaussian width must be positive");
    AnalyticScalar f(dim);
    f.add_term(center, width, Exponent{}, coeff);
    return f;
}

AnalyticScalar AnalyticScalar::monomial(int dim, const Exponent& e, double coeff) {
    AnalyticScalar f(dim);
    const Vec zero{};
    f.add_term(std::span<const double>(zero.data(), dim), std::numeric_limits<double>::infinity(), e, coeff);
    return f;
}

GaussBlock& AnalyticScalar::block_for(const Vec& center, double width) {
    for (auto& b : blocks_)
        if (b.width == width && b.center == center) return b;
    blocks_.push_back(GaussBlock{center, width, {}});
    return blocks_.back();
}

void AnalyticScalar::add_term(std::span<const double> center, double width, const Exponent& e, double c) {
    check_dim(n_);
    if (!(width > 0)) throw std::invalid_argument("term width must be positive");
    if (c == 0.0) return;
    for (int i = n_; i < kMaxDim; ++i)
        if (e[i] != 0) throw std::invalid_argument("exponent uses an axis beyond the dimension");
    auto& b = block_for(to_vec(center.first(n_)), width);
    b.poly[e] += c;
}

double AnalyticScalar::operator()(std::span<const double> x) const {
    double total = 0.0;
    for (const auto& b : blocks_) {
        double y[kMaxDim] = {0, 0, 0}, r2 = 0.0;
        for (int i = 0; i < n_; ++i) {
            y[i] = x[i] - b.center[i];
            r2 += y[i] * y[i];
        }
        double g = b.decays() ? std::exp(-r2 / (b.width * b.width)) : 1.0;
        if (g == 0.0) continue;
        double s = 0.0;
        for (const auto& [e, c] : b.poly) {
            double p = c;
            for (int i = 0; i < n_; ++i)
                for (int q = 0; q < e[i]; ++q) p *= y[i];
            s += p;
        }
        total += g * s;
    }
    return total;
}

AnalyticScalar AnalyticScalar::derivative(int axis) const {
    if (axis < 0 || axis >= std::max(n_, 1)) throw std::out_of_range("derivative axis out of range");
    AnalyticScalar d(n_);
    for (const auto& b : blocks_) {
        GaussBlock nb{b.center, b.width, {}};
        const double k = b.decays() ? -2.0 / (b.width * b.width) : 0.0;
        for (const auto& [e, c] : b.poly) {
            if (e[axis] > 0) {
                Exponent f = e;
                --f[axis];
                nb.poly[f] += c * e[axis];
            }
            if (k != 0.0) {
                Exponent f = e;
                ++f[axis];
                nb.poly[f] += c * k;
            }
        }
        for (auto it = nb.poly.begin(); it != nb.poly.end();)
            it = (it->second == 0.0) ? nb.poly.erase(it) : std::next(it);
        if (!nb.poly.empty()) d.blocks_.push_back(std::move(nb));
    }
    return d;
}

AnalyticScalar AnalyticScalar::shifted(std::span<const double> shift) const {
    AnalyticScalar r = *this;
    for (auto& b : r.blocks_)
        for (int i = 0; i < n_; ++i) b.center[i] += shift[i];
    return r;
}

double AnalyticScalar::line_moment(int k, std::span<const double> x, std::span<const double> xi,
                                   double alpha) const {
    if (k < 0) throw std::invalid_argument("moment order must be non-negative");
    double xi2 = 0.0;
    for (int i = 0; i < n_; ++i) xi2 += xi[i] * xi[i];
    if (xi2 == 0.0) throw std::invalid_argument("line direction must be nonzero");
    double total = 0.0;
    for (const auto& b : blocks_) {
        if (b.poly.empty()) continue;
        if (!b.decays()) throw std::domain_error("line moment of a non-decaying term");
        const double w2 = b.width * b.width;
        double y0[kMaxDim] = {0, 0, 0}, y0xi = 0.0, y02 = 0.0;
        for (int i = 0; i < n_; ++i) {
            y0[i] = x[i] - b.center[i];
            y0xi += y0[i] * xi[i];
            y02 += y0[i] * y0[i];
        }
        // exponent -(A t^2 + B t + C) after folding e^{alpha t} into B
        const double A = xi2 / w2, B = 2.0 * y0xi / w2 - alpha, C = y02 / w2;
        const double tc = -B / (2.0 * A);
        const double logscale = -C + B * B / (4.0 * A);
        double yc[kMaxDim] = {0, 0, 0};
        for (int i = 0; i < n_; ++i) yc[i] = y0[i] + tc * xi[i];
        // Q(u) = (u + tc)^k P(yc + u xi), t = u + tc
        std::vector<double> tk{1.0};
        for (int q = 0; q < k; ++q) tk = poly_mul(tk, {tc, 1.0});
        std::vector<double> P{0.0};
        for (const auto& [e, c] : b.poly) {
            std::vector<double> term{c};
            for (int i = 0; i < n_; ++i)
                for (int q = 0; q < e[i]; ++q) term = poly_mul(term, {yc[i], xi[i]});
            if (term.size() > P.size()) P.resize(term.size(), 0.0);
            for (std::size_t j = 0; j < term.size(); ++j) P[j] += term[j];
        }
        auto Q = poly_mul(tk, P);
        double s = 0.0;
        for (std::size_t j = 0; j < Q.size(); ++j)
            if (Q[j] != 0.0) s += Q[j] * gauss_moment(static_cast<int>(j), A);
        total += s * std::exp(logscale);
    }
    return total;
}

double AnalyticScalar::integral() const {
    double total = 0.0;
    for (const auto& b : blocks_) {
        if (b.poly.empty()) continue;
        if (!b.decays()) throw std::domain_error("integral of a non-decaying term");
        for (const auto& [e, c] : b.poly) {
            double p = c;
            for (int i = 0; i < n_; ++i) {
                if (e[i] % 2) {
                    p = 0.0;
                    break;
                }
                p *= std::tgamma(0.5 * (e[i] + 1)) * std::pow(b.width, e[i] + 1);
            }
            total += p;
        }
    }
    return total;
}

AnalyticScalar& AnalyticScalar::operator+=(const AnalyticScalar& o) {
    if (o.blocks_.empty()) return *this;
    if (n_ == 0) n_ = o.n_;
    if (o.n_ != n_) throw std::invalid_argument("AnalyticScalar dimension mismatch");
    for (const auto& b : o.blocks_) {
        auto& mine = block_for(b.center, b.width);
        for (const auto& [e, c] : b.poly) mine.poly[e] += c;
    }
    return *this;
}

AnalyticScalar& AnalyticScalar::operator*=(double a) {
    if (a == 0.0) {
        blocks_.clear();
        return *this;
    }
    for (auto& b : blocks_)
        for (auto& [e, c] : b.poly) c *= a;
    return *this;
}

void AnalyticScalar::prune(double tol) {
    for (auto& b : blocks_)
        for (auto it = b.poly.begin(); it != b.poly.end();)
            it = (std::abs(it->second) <= tol) ? b.poly.erase(it) : std::next(it);
    std::erase_if(blocks_, [](const GaussBlock& b) { return b.poly.empty(); });
}

AnalyticField::AnalyticField(int dim, int rank) : n_(dim), m_(rank), comps_(sym_dim(dim, rank), AnalyticScalar(dim)) {
    check_dim(dim);
}

AnalyticField::AnalyticField(int dim, int rank, std::vector<AnalyticScalar> comps)
    : n_(dim), m_(rank), comps_(std::move(comps)) {
    check_dim(dim);
    if (comps_.size() != sym_dim(dim, rank)) throw std::invalid_argument("AnalyticField: component count != sym_dim");
}

SymTensor AnalyticField::operator()(std::span<const double> x) const {
    SymTensor t(n_, m_);
    for (std::size_t c = 0; c < comps_.size(); ++c) t[c] = comps_[c](x);
    return t;
}

AnalyticField AnalyticField::derivative(int axis) const {
    AnalyticField d(n_, m_);
    for (std::size_t c = 0; c < comps_.size(); ++c) d.comps_[c] = comps_[c].derivative(axis);
    return d;
}

AnalyticField AnalyticField::shifted(std::span<const double> shift) const {
    AnalyticField d(n_, m_);
    for (std::size_t c = 0; c < comps_.size(); ++c) d.comps_[c] = comps_[c].shifted(shift);
    return d;
}

AnalyticField& AnalyticField::operator+=(const AnalyticField& o) {
    if (o.n_ != n_ || o.m_ != m_) throw std::invalid_argument("AnalyticField shape mismatch");
    for (std::size_t c = 0; c < comps_.size(); ++c) comps_[c] += o.comps_[c];
    return *this;
}

AnalyticField& AnalyticField::operator*=(double a) {
    for (auto& c : comps_) c *= a;
    return *this;
}

AnalyticField operator+(AnalyticField a, const AnalyticField& b) { return a += b; }
AnalyticField operator-(AnalyticField a, const AnalyticField& b) { return a += -1.0 * b; }
AnalyticField operator*(double s, AnalyticField a) { return a *= s; }

AnalyticField make_bump(int n, int m, std::span<const double> center, double width, int degree,
                        std::uint64_t seed) {
    if (!(width > 0) || !std::isfinite(width)) throw std::invalid_argument("make_bump: width must be positive");
    if (degree < 0 || degree > 8) throw std::invalid_argument("make_bump: degree must be in [0, 8]");
    check_dim(n);
    if (static_cast<int>(center.size()) < n) throw std::invalid_argument("make_bump: center too short");
    Rng rng(seed);
    AnalyticField f(n, m);
    std::vector<Exponent> exps;
    Exponent e{};
    // all exponents with total degree <= degree, in a fixed order
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; b <= (n > 1 ? degree - a : 0); ++b)
            for (int c = 0; c <= (n > 2 ? degree - a - b : 0); ++c) {
                e = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c)};
                exps.push_back(e);
            }
    for (std::size_t comp = 0; comp < f.size(); ++comp) {
        AnalyticScalar s(n);
        for (const auto& ex : exps) {
            const bool is_const = ex == Exponent{};
            double c = (m == 0 && is_const) ? 1.0 : rng.uniform(-1.0, 1.0);
            s.add_term(center, width, ex, c);
        }
        f[comp] = s;
    }
    return f;
}

}  // namespace ttomo
