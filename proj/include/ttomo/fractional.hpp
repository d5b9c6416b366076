// Fourier fractional Laplacian and Riesz potential on the periodic box, heat
// semigroups (exact Gauss-Weierstrass factor, or TR-BDF2 stepping for a
// variable coefficient), negative powers by time quadrature, and the heat-kernel
// weighted average.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ttomo/analytic.hpp"
#include "ttomo/grid.hpp"

namespace ttomo {

using Matrix3 = std::array<double, 9>;  // row-major, leading n x n block used

// Smooth symmetric coefficient field A(x).
struct EllipticCoeff {
    int dim = 2;
    std::string name = "identity";
    std::function<Matrix3(std::span<const double>)> a;
    double ellipticity = 1.0;  // c with c|xi|^2 <= xi.A xi <= |xi|^2 / c
    bool identity = true;      // enables the exact Fourier heat path

    Matrix3 operator()(std::span<const double> x) const { return a(x); }
};

EllipticCoeff coeff_identity(int n);
// (1 + 0.5 exp(-|x - a|^2)) I + 0.25 exp(-|x|^2) (e1 e2^T + e2 e1^T)
EllipticCoeff coeff_bump(int n);
// diag(1, 2[, 1.5])
EllipticCoeff coeff_diag(int n);
EllipticCoeff coeff_by_name(const std::string& name, int n);

struct EllipticityReport {
    double min_ratio = 0, max_ratio = 0, asymmetry = 0;
    bool ok = false;
};
// Samples xi.A(x)xi / |xi|^2 on `samples` seeded (x, xi) pairs in [-r, r]^n.
EllipticityReport check_ellipticity(const EllipticCoeff& A, int samples = 200, double r = 4.0,
                                    std::uint64_t seed = 0x5EED);

struct SpectralOptions {
    bool require_decay = true;  // throw if |f| on the box faces exceeds decay_tol * max|f|
    double decay_tol = 1e-12;
};
struct SpectralDiag {
    double zero_mode_mass = 0;  // int f over the box, dropped by |xi|^{-2s}
    double boundary_max = 0;    // max |f| on the outermost grid layer
    bool support_ok = true;
};

double boundary_max(const GridField& f);

// Multiplier |xi|^{2s} with frequencies 2 pi j / (2L).
GridField frac_laplacian(const GridField& f, double s, const SpectralOptions& opt = {}, SpectralDiag* diag = nullptr);

enum class RieszMode { Periodic, FreeSpace };
// Periodic: multiplier |xi|^{-2s} with the zero mode mapped to 0.
// FreeSpace: zero-padded convolution with c(n,-s)|z|^{2s-n} and a corrected origin weight.
GridField riesz_potential(const GridField& f, double s, RieszMode mode = RieszMode::Periodic,
                          const SpectralOptions& opt = {}, SpectralDiag* diag = nullptr);

// ---- heat semigroup -----------------------------------------------------------
struct HeatOptions {
    double tol = 1e-8;       // local error per step (step doubling), relative to max|u|
    double dt0 = 0.0;        // first step; 0 picks h^2 / 8
    double cg_tol = 1e-10;
    int cg_max_iter = 5000;
    int max_steps = 200000;
};
struct HeatStats {
    int steps = 0, rejected = 0, cg_iterations = 0;
};

// Discrete conservative operator sum_ij 1/2 [D-_i a_ij D+_j + D+_i a_ij D-_j] on the periodic grid.
class DivAGrad {
public:
    DivAGrad(const GridSpec& g, const EllipticCoeff& A);
    const GridSpec& grid() const { return g_; }
    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    // Solves (I - c L) x = b by Jacobi-preconditioned CG; returns iterations.
    int solve_shifted(double c, const std::vector<double>& b, std::vector<double>& x, double tol, int max_iter) const;

private:
    GridSpec g_;
    int n_;
    std::vector<std::array<double, 9>> a_;  // per node
    std::vector<double> diag_;             // diagonal of -L
    std::array<std::array<std::vector<std::uint32_t>, 2>, 3> nb_;  // [axis][dir]: periodic neighbor
    std::size_t shift(std::size_t p, int axis, int dir) const;
};

GridField heat_apply(const GridField& f, double t, const EllipticCoeff& A, const HeatOptions& opt = {},
                     HeatStats* stats = nullptr);
// Evolves f and records the state at increasing times `ts` (callback per time).
void heat_evolve(const GridField& f, std::span<const double> ts, const EllipticCoeff& A, const HeatOptions& opt,
                 const std::function<void(std::size_t, const std::vector<double>&)>& visit, HeatStats* stats = nullptr);

// ---- negative powers by time quadrature --------------------------------------------
// Trapezoid in v = log t on [log t0, log T]; the first node also carries the
// geometric sum of the nodes below t0, where e^{-t lambda} = 1 to t0 * lambda_max.
struct TimeQuadrature {
    double s = 0.5, t0 = 0, t_max = 0, hv = 0.25;
    std::vector<double> nodes, weights;  // weights for dt / t^{1-s}, without 1/Gamma(s)
};
TimeQuadrature time_quadrature(double s, double lambda_min, double lambda_max, double hv = 0.25);
double scalar_identity(const TimeQuadrature& q, double lambda);  // approximates lambda^{-s}
double scalar_identity_check(double lambda, double s);           // |approx - lambda^{-s}| / lambda^{-s}

struct SemigroupDiag {
    double tail = 0;            // estimated contribution beyond t_max, relative to max|result|
    double zero_mode_mass = 0;
    HeatStats heat;
};
// (1/Gamma(s)) int_0^inf (e^{tL} f - mean f) dt / t^{1-s}
GridField semigroup_negative_power(const GridField& f, double s, const EllipticCoeff& A, double tail_tol = 1e-6,
                                   const HeatOptions& opt = {}, SemigroupDiag* diag = nullptr);

// ---- heat-kernel weighted average --------------------------------------------------
// Column of (1/Gamma(s)) int k_t^A(x, .) dt / t^{1-s}, from a Gaussian bump of
// width `bump_width` (default 3h) centered at grid node x.
class WeightColumn {
public:
    WeightColumn(const GridSpec& g, const EllipticCoeff& A, double s, std::span<const double> x, double bump_width = 0,
                 const HeatOptions& opt = {});
    // w(x, y) = |y - x|^{n-1} column(y) / c(n,-s)
    double weight(std::span<const double> y) const;
    double column(std::span<const double> y) const;
    const GridField& field() const { return col_; }
    const Vec& center() const { return x_; }

private:
    GridSpec g_;
    double s_;
    Vec x_{};
    GridField col_;
};

double weight_eval(std::span<const double> x, std::span<const double> y, double s, const EllipticCoeff& A,
                   const GridSpec& g);
// A_s^A f(x) = (1/Gamma(s)) int column(y) f(y) dy.  A identity uses the closed-form kernel.
double weighted_transform_AsA(const GridField& f, double s, std::span<const double> x, const EllipticCoeff& A);

}  // namespace ttomo
