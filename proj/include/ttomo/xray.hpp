// Line-integral transforms: momentum ray transforms I^k and J^q, the
// exponential ray transform, half-line weighted transforms X_s and their
// sphere averages, the log-weighted critical average, cone transforms and the
// adjoint (I^k)*.
#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/tensor.hpp"

namespace ttomo {

struct Line {
    int dim = 2;
    Vec x{};
    Vec xi{};
    bool tangent = true;  // (x, xi) lies on T S^{n-1}: |xi| = 1 and <x, xi> = 0

    // Validates |xi| = 1 (1e-12) and, when `tangent`, |<x, xi>| < 1e-10.
    static Line make(std::span<const double> x, std::span<const double> xi, bool tangent = true);
    // The line through x with direction xi, re-based at the point closest to the origin.
    static Line through(std::span<const double> x, std::span<const double> xi);
    std::span<const double> base() const { return {x.data(), static_cast<std::size_t>(dim)}; }
    std::span<const double> dir() const { return {xi.data(), static_cast<std::size_t>(dim)}; }
};

enum class RayMethod { Exact, Numeric };

enum class RayTag { I, J, X, Exp };

// Sampled transform values; `param` holds k, q, s or alpha according to `tag`.
struct RayData {
    RayTag tag = RayTag::I;
    double param = 0;
    std::vector<std::pair<Line, double>> samples;
};

// Scalar function numerically supported in the ball B(center, radius).
struct ScalarFn {
    int dim = 2;
    std::function<double(std::span<const double>)> f;
    Vec center{};
    double radius = 10.0;
};

ScalarFn as_fn(const AnalyticScalar& f, double tail = 1e-16);
ScalarFn as_fn(const GridField& f, std::size_t comp = 0);

// Parameter interval where x + t xi meets the support ball; empty if lo > hi.
std::pair<double, double> support_interval(const ScalarFn& f, std::span<const double> x, std::span<const double> xi);
// Same for an analytic field: covers every Gaussian block to `tail`.
std::pair<double, double> support_interval(const AnalyticField& f, std::span<const double> x,
                                           std::span<const double> xi, double tail = 1e-16);

// <f(x + t xi), xi^m> as a function of t.
double projected(const AnalyticField& f, std::span<const double> x, std::span<const double> xi, double t);

// I^k f on a line of T S^{n-1}.
double ray_I(const AnalyticField& f, int k, const Line& line, RayMethod method = RayMethod::Exact,
             const QuadratureSpec& q = {});
double ray_I(const GridField& f, int k, const Line& line, const QuadratureSpec& q = {});

// J^q f(x, xi) for any xi != 0, by direct integration along x + t xi.
double ray_J(const AnalyticField& f, int q, std::span<const double> x, std::span<const double> xi,
             RayMethod method = RayMethod::Numeric, const QuadratureSpec& spec = {});
// J^q from I^0..I^q on the re-based unit line, through the binomial relation.
double j_from_i(const AnalyticField& f, int q, std::span<const double> x, std::span<const double> xi,
                RayMethod method = RayMethod::Exact);
// Signed binomial weights (-1)^{q-l} C(q, l), l = 0..q.
std::vector<double> j_from_i_weights(int q);

// int e^{alpha t} <f(x + t xi), xi^m> dt
double ray_exp(const AnalyticField& f, double alpha, const Line& line, RayMethod method = RayMethod::Numeric,
               const QuadratureSpec& q = {});
struct SeriesCheck {
    double direct = 0, series = 0, residual = 0, tail_bound = 0;
};
SeriesCheck exp_series_check(const AnalyticField& f, double alpha, const Line& line, int K);

// c(n, s) = 2^{2s} Gamma((n + 2s)/2) / (pi^{n/2} |Gamma(-s)|)
double riesz_constant(int n, double s);
constexpr double kEulerGamma = 0.57721566490153286061;

// X_s f(x, xi) = int_0^inf tau^{2s-1} f(x + tau xi) dtau, 0 < s < n/2.
double frac_xray(const ScalarFn& f, double s, std::span<const double> x, std::span<const double> xi,
                 double rel_tol = 1e-12);
// A_s f(x) = c(n, -s) int_S X_s f(x, xi) dS
double riesz_average(const ScalarFn& f, double s, std::span<const double> x, const SphereQuadrature& quad);
// Whole-line |t|^s weighted transform and its sphere integral (no constant).
double frac_xray_full(const ScalarFn& f, double s, std::span<const double> x, std::span<const double> xi);
double full_line_average(const ScalarFn& f, double s, std::span<const double> x, const SphereQuadrature& quad);

// Log-weighted average for the critical exponent s = n/2.  Needs int f = 0.
double critical_average(const AnalyticScalar& f, std::span<const double> x, const SphereQuadrature& quad);

// Cone transform with vertex u, axis beta, opening angle psi in (0, pi),
// weight |x - u|^{k - n + 2}, k in (-1, n - 1).
double cone_transform(const ScalarFn& f, double k, std::span<const double> u, std::span<const double> beta, double psi,
                      int azimuth_nodes = 64);
struct ConeRayResult {
    double lhs = 0, rhs = 0, residual = 0;
};
// int_0^pi C^k f(u, beta, psi) h(cos psi) dpsi  vs  int_S X_{(k+1)/2} f(u, sigma) h(sigma . beta) dsigma
ConeRayResult cone_ray_identity(const ScalarFn& f, double k, std::span<const double> u, std::span<const double> beta,
                                const std::function<double(double)>& h, int psi_nodes = 64, int sphere_res = 64);

// (I^k)* g at x, where g(z, xi) is evaluated at projected points z.
using LineFunction = std::function<double(std::span<const double>, std::span<const double>)>;
SymTensor adjoint_I_star(const LineFunction& g, int k, int m, std::span<const double> x, const SphereQuadrature& quad);

}  // namespace ttomo
