// Sampled tensor fields on the box [-L, L)^n and the TTOMO1 file format.
#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/tensor.hpp"

namespace ttomo {

struct GridSpec {
    int dim = 2;
    int N = 128;      // points per axis
    double L = 6.0;   // half-width
    bool periodic = true;

    double h() const { return 2.0 * L / N; }
    std::size_t points() const { return ipow(N, dim); }
    double node(int j) const { return -L + j * h(); }
    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

GridSpec default_grid(int n);

class GridField {
public:
    GridField() = default;
    GridField(const GridSpec& g, int rank);

    const GridSpec& grid() const { return g_; }
    int dim() const { return g_.dim; }
    int rank() const { return m_; }
    std::size_t components() const { return data_.size(); }
    std::size_t points() const { return g_.points(); }

    std::vector<double>& comp(std::size_t c) { return data_[c]; }
    const std::vector<double>& comp(std::size_t c) const { return data_[c]; }

    // Flat point index, axis 0 slowest.
    std::size_t index(std::span<const int> j) const;
    void unindex(std::size_t p, std::span<int> j) const;
    std::array<double, kMaxDim> position(std::size_t p) const;

    SymTensor value(std::size_t p) const;
    // Multilinear interpolation; zero outside the box unless periodic.
    SymTensor interpolate(std::span<const double> x) const;
    double interpolate(std::size_t c, std::span<const double> x) const;
    // Tensor-product 4-point Lagrange interpolation, O(h^4) on smooth data.
    double interpolate_cubic(std::size_t c, std::span<const double> x) const;

    double max_abs() const;
    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double a);

    void save(const std::string& path) const;
    static GridField load(const std::string& path);

private:
    GridSpec g_;
    int m_ = 0;
    std::vector<std::vector<double>> data_;
};

GridField sample(const AnalyticField& f, const GridSpec& g);
GridField sample(const std::function<SymTensor(std::span<const double>)>& f, const GridSpec& g, int rank);

// Deterministic low-discrepancy points in [-r, r]^n (Halton, bases 2, 3, 5).
std::vector<std::array<double, kMaxDim>> point_cloud(int n, int count = 50, double r = 2.0);

}  // namespace ttomo
