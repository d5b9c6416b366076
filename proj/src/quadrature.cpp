#include "ttomo/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace ttomo {

double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

void gauss_legendre(int p, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    if (p < 1) throw std::invalid_argument("gauss_legendre: need p >= 1");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> tab(
        gsl_integration_glfixed_table_alloc(static_cast<size_t>(p)), gsl_integration_glfixed_table_free);
    if (!tab) throw std::runtime_error("gsl_integration_glfixed_table_alloc failed");
    x.resize(p);
    w.resize(p);
    for (int i = 0; i < p; ++i) gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &x[i], &w[i], tab.get());
}

SphereQuadrature sphere_quadrature(int n, int res) {
    SphereQuadrature q;
    q.dim = n;
    if (n == 2) {
        if (res < 3) throw std::invalid_argument("sphere_quadrature: need res >= 3");
        q.exactness = res - 1;
        const double dphi = 2.0 * std::numbers::pi / res;
        for (int j = 0; j < res; ++j) {
            // half-step offset keeps the coordinate axes off the node set
            double phi = (j + 0.5) * dphi;
            q.nodes.push_back({std::cos(phi), std::sin(phi), 0.0});
            q.weights.push_back(dphi);
        }
    } else if (n == 3) {
        if (res < 2) throw std::invalid_argument("sphere_quadrature: need res >= 2");
        q.exactness = res;
        const int p = res / 2 + 1, az = res + 1;
        std::vector<double> z, wz;
        gauss_legendre(p, -1.0, 1.0, z, wz);
        const double dphi = 2.0 * std::numbers::pi / az;
        for (int i = 0; i < p; ++i) {
            const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
            for (int j = 0; j < az; ++j) {
                double phi = (j + 0.5) * dphi;
                q.nodes.push_back({s * std::cos(phi), s * std::sin(phi), z[i]});
                q.weights.push_back(wz[i] * dphi);
            }
        }
    } else {
        throw std::invalid_argument("sphere_quadrature supports n = 2, 3");
    }
    return q;
}

// Globally adaptive: split the panel with the largest error estimate until the
// summed estimate drops below rel_tol * max(|I|, int |f|).  Measuring against
// int |f| keeps odd or cancelling integrands from refining forever.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth,
                 double* err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double a, b, value, error, l1;
        int depth;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto eval = [&](double lo, double hi, int depth) {
        Panel p{lo, hi, 0.0, 0.0, 0.0, depth};
        p.value = GK::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
        return p;
    };
    std::priority_queue<Panel> heap;
    heap.push(eval(a, b, 0));
    double value = heap.top().value, error = heap.top().error, l1 = heap.top().l1;
    const std::size_t max_panels = 4096;
    while (error > rel_tol * std::max(std::abs(value), l1) && heap.size() < max_panels) {
        Panel top = heap.top();
        if (top.depth >= max_depth) break;
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        Panel left = eval(top.a, mid, top.depth + 1), right = eval(mid, top.b, top.depth + 1);
        value += left.value + right.value - top.value;
        error += left.error + right.error - top.error;
        l1 += left.l1 + right.l1 - top.l1;
        heap.push(left);
        heap.push(right);
    }
    if (err) *err = error;
    return value;
}

}  // namespace ttomo
