// Line, sphere and fixed-rule quadratures.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ttomo/analytic.hpp"

namespace ttomo {

struct QuadratureSpec {
    double line_tol = 1e-12;   // relative tolerance for adaptive line integrals
    int line_depth = 18;       // max bisection depth
    int sphere_res = 64;       // angular resolution (see sphere_quadrature)
    double tail = 1e-16;       // envelope level where line integrals are truncated
};

struct SphereQuadrature {
    int dim = 2;
    int exactness = 0;  // spherical polynomials up to this degree integrate exactly
    std::vector<std::array<double, kMaxDim>> nodes;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

// n = 2: `res` equispaced angles (trapezoid, exact to degree res - 1).
// n = 3: Gauss-Legendre in cos(theta) times a uniform azimuth, exact to degree res.
SphereQuadrature sphere_quadrature(int n, int res);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int p, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Adaptive 15-point Gauss-Kronrod on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12,
                 int max_depth = 18, double* err = nullptr);

// Surface area of S^{n-1}.
double sphere_area(int n);

}  // namespace ttomo
