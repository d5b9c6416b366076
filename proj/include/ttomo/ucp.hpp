// Property-based evidence for the unique continuation statements: fields that
// vanish on a disk U (smooth cutoff), numeric ray and normal operators for
// them, and the margin tests.  These demos measure margins on seeded samples;
// they do not prove anything about all fields.
#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/tensor.hpp"
#include "ttomo/xray.hpp"

namespace ttomo {

// C^inf step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

// U = B(center, r0); the cutoff climbs from 0 to 1 between r0 and r1.
struct Disk {
    Vec center{};
    double r0 = 1.0, r1 = 1.6;
    bool contains(std::span<const double> x, double shrink = 1.0) const;
};

// Smooth tensor field numerically supported in B(center, radius).
struct SmoothField {
    int dim = 2, rank = 0;
    std::function<SymTensor(std::span<const double>)> eval;
    Vec center{};
    double radius = 9.0;

    SymTensor operator()(std::span<const double> x) const { return eval(x); }
};

SmoothField from_analytic(const AnalyticField& g, double radius = 9.0);
// (1 - chi_U) g: vanishes on U.
SmoothField zero_on(const AnalyticField& g, const Disk& U, double radius = 9.0);
// chi_U g: supported in B(center, r1).
SmoothField keep_in(const AnalyticField& g, const Disk& U);
ScalarFn to_scalar_fn(const SmoothField& f, std::size_t comp = 0);

// I^k f on the line z + t xi by adaptive quadrature over the support ball.
double ray_numeric(const SmoothField& f, int k, std::span<const double> z, std::span<const double> xi,
                   double rel_tol = 1e-10);
// N^k f(x) = (I^k)* I^k f(x).
SymTensor normal_numeric(const SmoothField& f, int k, std::span<const double> x, const SphereQuadrature& quad,
                         double rel_tol = 1e-10);

// Norms by tensor Gauss-Legendre on the support box (n = 2).
double l1_norm(const SmoothField& f, int nodes = 96);
double sup_norm(const SmoothField& f, int nodes = 96);

// Derivatives d^j/dt^j g(t) at 0, j = 0..6, from the degree-6 interpolant on t = -3h..3h.
std::array<double, 7> derivatives_at_zero(const std::function<double(double)>& g, double h);

struct UcpConfig {
    std::uint64_t seed = 0x5EED;
    int fields = 100;
    double tau = 1e-8;
    Disk U{};
    int sphere_res = 32;
    double line_tol = 1e-9;
};

// Random Gaussian-bump field of rank m, bumps centered in [-3, 3]^2 \ B(U, r1).
AnalyticField random_outside_field(int m, const Disk& U, std::uint64_t seed);

struct GaugeDirection {
    bool applicable = false;  // needs k + 1 <= m
    double R_max = 0;         // max |R^k f| over the point cloud
    double I_max = 0;         // max |I^p f|, p <= k, over the test lines
};
struct DerivativeProbe {
    std::array<double, 7> values{};  // max over components of |d^j N^k f| along e1 at the U center
    int first_nonvanishing = -1;     // -1 if all below the noise floor
    double noise_floor = 1e-6;
};
struct GaugeDemo {
    int m = 0, k = 0;
    GaugeDirection gauge;
    DerivativeProbe generic;  // f non-potential, zeroed on U
    DerivativeProbe zero;     // f = 0
};
// m <= 2, 0 <= k <= m.
GaugeDemo ucp_gauge_demo(int m, int k, const UcpConfig& cfg, int lines = 50);

struct MarginReport {
    std::string kind;
    int fields = 0, violations = 0;
    double min_margin = 0, median_margin = 0, max_margin = 0;
    double residual = 0;  // identity residual where one is checked, else 0
    std::vector<double> margins;
};

// max_U |A_s f| / ||f||_1 over fields vanishing on U.  With `support_variant`,
// f is supported in U and the maximum is taken on an annulus outside it.
MarginReport antilocality_margins(double s, const UcpConfig& cfg, bool support_variant = false);
// min over four small disks E in U of max_E |N^0 f|, over ||f||_inf.
MarginReport normal_margins(const UcpConfig& cfg);
// Vector fields zeroed on U: margin of curl(N^0 f) on E, and the residual of
// N^0(curl f) = (n - 1) curl(N^0 f) (relative, max over fields).
MarginReport curl_margins(const UcpConfig& cfg);

struct AnnulusCheck {
    double riesz = 0;   // A_s f at the U center by the sphere average
    double radial = 0;  // c(2,-s) 2 pi int r^{2s-1} psi(r) dr
    double rel_diff = 0;
};
// Nonnegative radial bump on the annulus r0 < |x - center| < r1 around U.
AnnulusCheck annulus_kernel_check(double s, const UcpConfig& cfg);

struct ConeDemo {
    double chain_lhs = 0, chain_rhs = 0, chain_residual = 0;  // Gaussian at u = 0
    MarginReport margins;  // max_U |int_0^pi C^{2s-1} f dpsi| / ||f||_1
};
ConeDemo cone_ucp_demo(double s, double beta_angle, const UcpConfig& cfg);

}  // namespace ttomo
