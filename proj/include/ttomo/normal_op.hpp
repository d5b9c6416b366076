// Normal operators N^k = (I^k)* I^k: the sphere (adjoint) path on analytic
// fields, the convolution path on grids, divergences delta^r N^k, the
// derivative commutation check, the Saint-Venant intertwining identity and
// recovery of f from N^0 f with (-Delta)^{1/2}.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/tensor.hpp"

namespace ttomo {

// Xi(z) = z^{(2m+2k-l)} / |z|^{2m+2k-2l+n-1}, homogeneous of degree l - n + 1.
struct KernelSpec {
    int n = 2, m = 0, k = 0, l = 0;

    int exponent() const { return 2 * m + 2 * k - 2 * l + n - 1; }
    int order() const { return 2 * m + 2 * k - l; }
    int homogeneity() const { return l - n + 1; }
    SymTensor operator()(std::span<const double> z) const;
};

// Sphere path: sum_q w_q <x,xi>^k xi^m I^k f(x - <x,xi>xi, xi).
SymTensor normal_Nk(const AnalyticField& f, int k, std::span<const double> x, const SphereQuadrature& quad);

// Convolution path 2 sum_l C(k,l)(-1)^l x^{(2k-l)} (f * Xi_l) on the grid.
// k > n - 1 needs `compact_support` (the kernels no longer decay).
GridField normal_Nk_kernel(const GridField& f, int k, bool compact_support = false);

struct DivNormal {
    SymTensor value;   // I^k form
    SymTensor j_form;  // sum over J^l
    double rel_diff = 0;
};
// delta^r N^k f(x), rank m - r.  r = k + 1 gives the exact zero.  Throws
// std::runtime_error if the two forms differ by more than `agree_tol` (relative).
DivNormal div_r_normal(const AnalyticField& f, int k, int r, std::span<const double> x, const SphereQuadrature& quad,
                       double agree_tol = 1e-4);

struct CommuteResult {
    double residual = 0;  // max |delta N^k dv + k^2 N^{k-1} v| / max |k^2 N^{k-1} v|
    double ratio = 0;     // least-squares factor of delta N^k dv against N^{k-1} v (expect -k^2)
};
// v has rank m - 1, 1 <= k <= m.  delta by 4th-order central differences of step `fd_step`.
CommuteResult check_commute(const AnalyticField& v, int k, std::span<const std::array<double, kMaxDim>> pts,
                            const SphereQuadrature& quad, double fd_step = 0.02);

// c_{l,s} = prod_{p<s-l}(n-1+2p) (-1)^l s! / (2^l l! (s-2l)!)
double sv_coefficient(int l, int s, int n);

struct SvIdentityResult {
    double residual = 0;   // max_x |LHS - RHS| / max_x |LHS|
    double lhs_scale = 0;  // max_x |LHS|
    std::vector<double> pointwise;  // |LHS - RHS| / max_x |LHS| per point
};
// m! N^0 (R^k f)  vs  sigma(i) sum_r (-1)^r C(k,r) d^r R^{k-r}(G_{m-r}).  m <= 2.
SvIdentityResult sv_normal_identity(const AnalyticField& f, int k, std::span<const std::array<double, kMaxDim>> pts,
                                    const SphereQuadrature& quad, double fd_step = 0.02);

// c_n in (-Delta)^{1/2} N^0 f = c_n f; equals 2 / c(n, -1/2).
double half_laplacian_constant(int n);

struct HalfLapInversion {
    GridField recovered;  // (-Delta)^{1/2} N^0 f / c_n on the input grid
    double c_n = 0;
    double fitted = 0;    // least-squares constant of (-Delta)^{1/2} N^0 f against f
    bool support_ok = true;
};
// N^0 by convolution on a box of twice the half-width, then the |xi| multiplier.
// support_ok is false when the numerical support {|f| > 1e-6 max|f|} comes within
// `margin` of the box faces.
HalfLapInversion invert_N0_by_half_laplacian(const GridField& f, double margin = 2.0);

}  // namespace ttomo
