// Gaussian-times-polynomial fields with exact derivatives, line moments and
// whole-space integrals.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "ttomo/tensor.hpp"

namespace ttomo {

constexpr int kMaxDim = 3;
using Exponent = std::array<std::uint8_t, kMaxDim>;
using Vec = std::array<double, kMaxDim>;

inline Vec to_vec(std::span<const double> x) {
    Vec v{};
    for (std::size_t i = 0; i < x.size() && i < kMaxDim; ++i) v[i] = x[i];
    return v;
}

// P(x - a) * exp(-|x - a|^2 / w^2).  w = +inf gives a bare polynomial.
struct GaussBlock {
    Vec center{};
    double width = std::numeric_limits<double>::infinity();
    std::map<Exponent, double> poly;

    bool decays() const { return std::isfinite(width); }
};

class AnalyticScalar {
public:
    AnalyticScalar() = default;  // the zero function, any dimension
    explicit AnalyticScalar(int dim) : n_(dim) {}

    static AnalyticScalar gaussian(int dim, std::span<const double> center, double width, double coeff = 1.0);
    static AnalyticScalar monomial(int dim, const Exponent& e, double coeff = 1.0);
    static AnalyticScalar constant(int dim, double c) { return monomial(dim, Exponent{}, c); }

    int dim() const { return n_; }
    bool is_zero() const { return blocks_.empty(); }
    const std::vector<GaussBlock>& blocks() const { return blocks_; }

    // Adds c * (x - center)^e * exp(-|x - center|^2 / w^2).
    void add_term(std::span<const double> center, double width, const Exponent& e, double c);

    double operator()(std::span<const double> x) const;
    AnalyticScalar derivative(int axis) const;
    AnalyticScalar shifted(std::span<const double> shift) const;  // g(x) = f(x - shift)

    // int t^k e^{alpha t} f(x + t xi) dt over R, exactly.
    double line_moment(int k, std::span<const double> x, std::span<const double> xi, double alpha = 0.0) const;
    // int_{R^n} f
    double integral() const;

    AnalyticScalar& operator+=(const AnalyticScalar& o);
    AnalyticScalar& operator*=(double a);
    AnalyticScalar operator*(double a) const {
        AnalyticScalar r = *this;
        return r *= a;
    }
    AnalyticScalar operator+(const AnalyticScalar& o) const {
        AnalyticScalar r = *this;
        return r += o;
    }
    AnalyticScalar operator-(const AnalyticScalar& o) const { return *this + o * -1.0; }

    // Drop coefficients with |c| <= tol (exact cancellations leave tiny residue).
    void prune(double tol = 0.0);

private:
    GaussBlock& block_for(const Vec& center, double width);

    int n_ = 0;
    std::vector<GaussBlock> blocks_;
};

// Rank-m symmetric tensor field with AnalyticScalar components.
class AnalyticField {
public:
    AnalyticField() = default;
    AnalyticField(int dim, int rank);
    AnalyticField(int dim, int rank, std::vector<AnalyticScalar> comps);

    int dim() const { return n_; }
    int rank() const { return m_; }
    std::size_t size() const { return comps_.size(); }
    const SymIndexTable& table() const { return SymIndexTable::get(n_, m_); }

    AnalyticScalar& operator[](std::size_t c) { return comps_[c]; }
    const AnalyticScalar& operator[](std::size_t c) const { return comps_[c]; }
    const AnalyticScalar& at(std::span<const int> idx) const { return comps_[table().compress(idx)]; }
    const std::vector<AnalyticScalar>& comps() const { return comps_; }

    SymTensor operator()(std::span<const double> x) const;
    AnalyticField derivative(int axis) const;
    AnalyticField shifted(std::span<const double> shift) const;

    AnalyticField& operator+=(const AnalyticField& o);
    AnalyticField& operator*=(double a);

private:
    int n_ = 1, m_ = 0;
    std::vector<AnalyticScalar> comps_{AnalyticScalar(1)};
};

AnalyticField operator+(AnalyticField a, const AnalyticField& b);
AnalyticField operator-(AnalyticField a, const AnalyticField& b);
AnalyticField operator*(double s, AnalyticField a);

// Random Gaussian-times-polynomial field sharing one center and width.  A
// scalar field has constant coefficient 1, so degree 0 gives exp(-|x-a|^2/w^2).
AnalyticField make_bump(int n, int m, std::span<const double> center, double width, int degree,
                        std::uint64_t seed);

}  // namespace ttomo
