// Inner derivative d, divergence delta, Laplacian, and the Saint-Venant
// operators R^k and W^k, on analytic fields (exact) and grid fields (finite
// differences).
//
// Index layouts of the paired outputs, with M = m - k:
//   R^k f : (p1 q1 p2 q2 ... pM qM, i1 ... ik)
//   W^k f : (p1 ... pM, q1 ... qM, i1 ... ik)
#pragma once

#include <array>
#include <span>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/tensor.hpp"

namespace ttomo {

// ---- symbolic operators on analytic fields --------------------------------
AnalyticField inner_derivative(const AnalyticField& f);
AnalyticField inner_derivative(const AnalyticField& f, int times);
AnalyticField divergence(const AnalyticField& f);
AnalyticField divergence(const AnalyticField& f, int times);
AnalyticScalar laplacian(const AnalyticScalar& f);
AnalyticField laplacian(const AnalyticField& f, int times = 1);

// All partial derivatives of f up to a fixed order, evaluated on demand.
class AnalyticJet {
public:
    AnalyticJet(const AnalyticField& f, int order);
    int order() const { return order_; }
    const AnalyticField& field() const { return base_; }
    // J[a1..am, b1..br] = d^r f_{a} / dx_{b1}...dx_{br}
    GenTensor<double> eval(int r, std::span<const double> x) const;

private:
    AnalyticField base_;
    int order_;
    std::vector<std::vector<AnalyticField>> d_;  // [order][compressed derivative multiset]
};

// ---- assembly from a jet ----------------------------------------------------
// J has rank m + (m - k) + extra; the trailing `extra` derivative slots are
// carried through unchanged after the R^k (resp. W^k) slots.
GenTensor<double> assemble_R(const GenTensor<double>& J, int m, int k, int extra = 0);
GenTensor<double> assemble_W(const GenTensor<double>& J, int m, int k);

GenTensor<double> saint_venant_R(const AnalyticField& f, int k, std::span<const double> x);
GenTensor<double> saint_venant_W(const AnalyticField& f, int k, std::span<const double> x);

// Conversions between the two forms.
GenTensor<double> w_from_r(const GenTensor<double>& R, int m, int k);
// alpha(p1 q1)...alpha(pM qM) W, scaled by `coeff`.
GenTensor<double> r_from_w(const GenTensor<double>& W, int m, int k, double coeff);
// Factor that makes r_from_w invert w_from_r: (k + 1) / (m + 1).
double r_from_w_coefficient(int m, int k);

// (max|W^k f| < tol) == (max|R^k f| < tol) over the points.
bool equivalence_check(const AnalyticField& f, int k, std::span<const std::array<double, kMaxDim>> pts,
                       double tol);

// Residual of the contracted-derivative identity for R^0 (both sides from
// exact derivatives), max over the points.
double check_delta_R_identity(const AnalyticField& f, int ell, std::span<const std::array<double, kMaxDim>> pts);
// Curl-curl form: laplacian f - grad(delta f) - 2 d_j (R^0 f)_{ij}, max over points.
double check_curl_curl(const AnalyticField& f, std::span<const std::array<double, kMaxDim>> pts);

// ---- grid path ----------------------------------------------------------------
// Second-order central differences; one-sided second-order stencils at the
// edges of a non-periodic box.
std::vector<double> grid_partial(const GridSpec& g, const std::vector<double>& u, int axis);
GridField grid_partial(const GridField& f, int axis);
GridField inner_derivative(const GridField& f);
GridField divergence(const GridField& f);

// A GenTensor per grid point, stored component-major.
struct GridTensorField {
    GridSpec grid;
    int rank = 0;
    std::vector<std::vector<double>> comps;  // n^rank arrays of grid values

    GenTensor<double> at(std::size_t p) const;
    double max_abs() const;
};

GridTensorField saint_venant_R(const GridField& f, int k);

}  // namespace ttomo
