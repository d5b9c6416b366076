#include <cmath>

#include "doctest.h"
#include "ttomo/decompose.hpp"
#include "ttomo/random.hpp"

using namespace ttomo;

namespace {

GridSpec box(int N = 64, double L = 4.0) {
    GridSpec g;
    g.dim = 2;
    g.N = N;
    g.L = L;
    g.periodic = false;
    return g;
}

// sum of Gaussian bumps per component, numerically compact inside [-L+1, L-1]
GridField bumps(const GridSpec& g, int rank, std::uint64_t seed) {
    Rng rng(seed);
    GridField f(g, rank);
    for (std::size_t c = 0; c < f.components(); ++c) {
        for (int b = 0; b < 3; ++b) {
            double a = rng.uniform(-1, 1), cx = rng.uniform(-1, 1), cy = rng.uniform(-1, 1);
            for (std::size_t p = 0; p < f.points(); ++p) {
                auto x = f.position(p);
                double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
                f.comp(c)[p] += a * std::exp(-1.5 * r2);
            }
        }
    }
    return f;
}

GridField random_field(const GridSpec& g, int rank, std::uint64_t seed) {
    Rng rng(seed);
    GridField f(g, rank);
    for (std::size_t c = 0; c < f.components(); ++c)
        for (double& v : f.comp(c)) v = rng.uniform(-1, 1);
    return f;
}

double max_diff(const GridField& a, const GridField& b) {
    GridField d = a;
    d -= b;
    return d.max_abs();
}

}  // namespace

TEST_CASE("symbol positivity") {
    std::vector<double> xi{0.6, -0.8};
    CHECK(symbol_positivity(2, 0, 1, xi) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> e1{1.0, 0.0};
    CHECK(symbol_positivity(2, 1, 1, e1) == doctest::Approx(0.5).epsilon(1e-14));
    // j_xi i_xi = |xi|^2/(m+1) + m/(m+1) i_xi j_xi: the minimum is |xi|^2/(m+1) on ker j_xi
    std::vector<double> x3{0.3, -1.2, 0.7};
    double n2 = 0.09 + 1.44 + 0.49;
    CHECK(symbol_positivity(3, 2, 1, x3) == doctest::Approx(n2 / 3.0).epsilon(1e-12));

    Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        int n = 2 + t % 2;
        auto v = rng.uniform_vector(n, -1, 1);
        for (int m = 0; m <= 3; ++m)
            for (int k = 1; k <= 2; ++k) CHECK(symbol_positivity(n, m, k, v) > 0.0);
    }
    std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(symbol_positivity(2, 1, 1, zero), std::invalid_argument);
}

TEST_CASE("config validation") {
    EllipticSolveConfig c;
    c.k = 2;
    c.padding = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.padding = 2;
    c.tolerance = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("d^T is the adjoint of d; energy identity") {
    auto g = box(24);
    for (int m = 0; m <= 2; ++m) {
        auto u = random_field(g, m, 1 + m);
        auto w = random_field(g, m + 1, 7 + m);
        double lhs = grid_inner(grid_d(u), w), rhs = grid_inner(u, grid_dT(w));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs) + 1e-12);
    }
    for (int k = 1; k <= 2; ++k)
        for (int m = 0; m <= 2; ++m) {
            auto u = random_field(g, m, 3 + m), v = random_field(g, m, 5 + m);
            apply_mask(u, k);
            apply_mask(v, k);
            double a = grid_inner(elliptic_apply(u, k, k), v), b = grid_inner(u, elliptic_apply(v, k, k));
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
            auto dk = grid_d(u, k);
            double e1 = grid_inner(elliptic_apply(u, k, k), u), e2 = grid_inner(dk, dk);
            CHECK(std::abs(e1 - e2) <= 1e-10 * e2);
            CHECK(e1 > 0);
            // (-1)^k delta^k d^k agrees with the (d^T)^k d^k form
            auto viadelta = grid_delta(dk, k);
            if (k % 2) viadelta *= -1.0;
            apply_mask(viadelta, k);
            CHECK(max_diff(viadelta, elliptic_apply(u, k, k)) <= 1e-10 * viadelta.max_abs());
        }
}

TEST_CASE("forward d of a polynomial") {
    // D+ of a linear scalar is exact away from the upper faces
    auto g = box(16);
    GridField u(g, 0);
    for (std::size_t p = 0; p < u.points(); ++p) {
        auto x = u.position(p);
        u.comp(0)[p] = 2 * x[0] - 3 * x[1];
    }
    auto du = grid_d(u);
    std::array<int, 2> j{5, 7};
    auto p = u.index(j);
    CHECK(du.comp(0)[p] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(du.comp(1)[p] == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("manufactured solution") {
    auto g = box(64);
    EllipticSolveConfig cfg;
    cfg.k = 1;
    cfg.padding = 2;
    auto w0 = bumps(g, 1, 21);
    apply_mask(w0, cfg.padding);
    auto h = elliptic_apply(w0, 1, cfg.padding);
    SolveReport rep;
    auto w = solve_dk_deltak(h, cfg, &rep);
    CHECK(rep.converged);
    CHECK(rep.residual <= cfg.tolerance);
    CHECK(max_diff(w, w0) / w0.max_abs() < 1e-4);

    // uniqueness: a random start converges to the same w
    auto x0 = random_field(g, 1, 99);
    auto w2 = solve_dk_deltak(h, cfg, nullptr, &x0);
    CHECK(max_diff(w, w2) / w0.max_abs() < 1e-6);

    GridField zero(g, 1);
    auto wz = solve_dk_deltak(zero, cfg);
    CHECK(wz.max_abs() == 0.0);

    EllipticSolveConfig tight = cfg;
    tight.max_iterations = 3;
    CHECK_THROWS_AS(solve_dk_deltak(h, tight), std::runtime_error);
}

TEST_CASE("manufactured solution, k = 2") {
    auto g = box(32);
    EllipticSolveConfig cfg;
    cfg.k = 2;
    cfg.padding = 2;
    auto w0 = bumps(g, 0, 5);
    apply_mask(w0, 2);
    auto h = elliptic_apply(w0, 2, 2);
    auto w = solve_dk_deltak(h, cfg);
    CHECK(max_diff(w, w0) / w0.max_abs() < 1e-4);
}

TEST_CASE("decomposition of a Gaussian vector field") {
    auto g = box(64);
    auto f = bumps(g, 1, 3);
    EllipticSolveConfig cfg;
    auto dec = solenoidal_decompose(f, 1, cfg);
    CHECK(dec.div_residual < 1e-4);
    CHECK(dec.orthogonality < 1e-4);
    CHECK(dec.v.rank() == 0);

    auto R = saint_venant_R0_forward(f), Rt = saint_venant_R0_forward(dec.f_tilde);
    double scale = R.max_abs(), diff = 0;
    for (std::size_t q = 0; q < R.comps.size(); ++q)
        for (std::size_t p = 0; p < R.comps[q].size(); ++p)
            diff = std::max(diff, std::abs(R.comps[q][p] - Rt.comps[q][p]));
    CHECK(diff <= 1e-6 * scale);

    // idempotent
    auto again = solenoidal_decompose(dec.f_tilde, 1, cfg);
    CHECK(again.v.max_abs() < 1e-6 * dec.v.max_abs());
    CHECK(max_diff(again.f_tilde, dec.f_tilde) < 1e-6 * f.max_abs());
}

TEST_CASE("pure potential and solenoidal inputs") {
    auto g = box(64);
    auto v0 = bumps(g, 0, 8);
    apply_mask(v0, 2);
    auto f = grid_d(v0);
    auto dec = solenoidal_decompose(f, 1);
    CHECK(dec.f_tilde.max_abs() < 1e-3 * f.max_abs());
    CHECK(max_diff(dec.v, v0) < 1e-4 * v0.max_abs());

    // f = (D-_1 psi, -D-_0 psi) has backward divergence zero
    auto psi = bumps(g, 0, 9);
    GridField s(g, 1);
    const double h = g.h();
    for (std::size_t p = 0; p < s.points(); ++p) {
        std::array<int, 2> j{};
        s.unindex(p, j);
        auto at = [&](int a, int b) { return (a < 0 || b < 0) ? 0.0 : psi.comp(0)[s.index(std::array<int, 2>{a, b})]; };
        s.comp(0)[p] = (at(j[0], j[1]) - at(j[0], j[1] - 1)) / h;
        s.comp(1)[p] = -(at(j[0], j[1]) - at(j[0] - 1, j[1])) / h;
    }
    CHECK(grid_dT(s).max_abs() < 1e-12 * s.max_abs() / h);
    auto ds = solenoidal_decompose(s, 1);
    CHECK(ds.v.max_abs() < 1e-12 * s.max_abs());
    CHECK(max_diff(ds.f_tilde, s) < 1e-12 * s.max_abs());
}

TEST_CASE("rank-2 decomposition, k = 1 and k = 2") {
    auto g = box(32);
    auto f = bumps(g, 2, 4);
    for (int k = 1; k <= 2; ++k) {
        auto dec = solenoidal_decompose(f, k);
        CHECK(dec.div_residual < 1e-4);
        CHECK(dec.orthogonality < 1e-4);
        CHECK(dec.v.rank() == 2 - k);
    }
    CHECK_THROWS_AS(solenoidal_decompose(f, 3), std::invalid_argument);
    CHECK_THROWS_AS(solenoidal_decompose(f, 0), std::invalid_argument);
}
