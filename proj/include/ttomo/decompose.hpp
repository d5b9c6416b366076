// Solenoidal-potential decomposition f = f~ + d^k v on a box.  The discrete d
// symmetrizes forward differences of the zero-extended field; delta = -d^T in
// the inner product h^n sum_p sum_I f_I g_I, so (-1)^k delta^k d^k = (d^k)^T d^k
// is symmetric positive definite on the padded interior.
#pragma once

#include <span>
#include <vector>

#include "ttomo/diffops.hpp"
#include "ttomo/grid.hpp"

namespace ttomo {

struct EllipticSolveConfig {
    int k = 1;
    double tolerance = 1e-10;  // relative residual target
    int max_iterations = 50000;
    int padding = 2;  // unknowns vanish within `padding` cells of the faces; >= k
    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    double residual = 0;  // final relative residual
    bool converged = false;
};

// Discrete operators (forward differences, zero extension).
GridField grid_d(const GridField& u);
GridField grid_d(const GridField& u, int times);
GridField grid_dT(const GridField& w);  // adjoint of grid_d
GridField grid_delta(const GridField& w);  // -grid_dT
GridField grid_delta(const GridField& w, int times);
double grid_inner(const GridField& a, const GridField& b);

// Zero the cells within `padding` of the faces.
void apply_mask(GridField& u, int padding);

// (-1)^k delta^k d^k w, restricted to the padded interior.
GridField elliptic_apply(const GridField& w, int k, int padding);

// CG for (-1)^k delta^k d^k w = h, Jacobi preconditioned.  `x0` is the initial
// guess (zero when null).  Throws std::runtime_error without convergence.
GridField solve_dk_deltak(const GridField& h, const EllipticSolveConfig& cfg, SolveReport* report = nullptr,
                          const GridField* x0 = nullptr);

struct Decomposition {
    GridField f_tilde, v;
    SolveReport report;
    double div_residual = 0;   // max|delta^k f~| / max|delta^k f| on the padded interior
    double orthogonality = 0;  // |<f~, d^k v>| / <f, f>
};
Decomposition solenoidal_decompose(const GridField& f, int k, const EllipticSolveConfig& cfg = {});

// R^0 with the same forward differences, so that R^0 d v = 0 exactly.  m <= 3.
GridTensorField saint_venant_R0_forward(const GridField& f);

// Smallest eigenvalue of j_{xi^k} i_{xi^k} on S^m (self-adjoint for the weighted inner product).
double symbol_positivity(int n, int m, int k, std::span<const double> xi);

}  // namespace ttomo
