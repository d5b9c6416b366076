#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "ttomo/diffops.hpp"
#include "ttomo/xray.hpp"

using namespace ttomo;

namespace {
const double kOrigin[3] = {0, 0, 0};
const double kSqrtPi = std::sqrt(std::numbers::pi);

AnalyticField gaussian_field(int n, double w = 1.0) {
    AnalyticField f(n, 0);
    f[0] = AnalyticScalar::gaussian(n, std::span<const double>(kOrigin, n), w);
    return f;
}

AnalyticField random_field(int n, int m, std::uint64_t seed) {
    const double c1[3] = {0.3, -0.2, 0.1}, c2[3] = {-0.4, 0.5, -0.3};
    return make_bump(n, m, std::span<const double>(c1, n), 1.0, 2, seed) +
           make_bump(n, m, std::span<const double>(c2, n), 0.8, 1, seed + 99);
}

Line random_line(std::mt19937_64& g, int n) {
    auto xi = testutil::random_unit(g, n);
    auto x = testutil::random_vec(g, n, -1.5, 1.5);
    return Line::through(x, xi);
}

double radial_fn(std::span<const double> x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + (x.size() > 2 ? x[2] * x[2] : 0))); }
}  // namespace

TEST_CASE("line validation") {
    const double x[2] = {0, 0}, bad[2] = {1, 1}, e1[2] = {1, 0}, off[2] = {1, 0};
    CHECK_THROWS_AS(Line::make(x, bad), std::invalid_argument);
    CHECK_THROWS_AS(Line::make(off, e1), std::invalid_argument);
    CHECK_NOTHROW(Line::make(off, e1, false));
    const Line l = Line::through(std::vector<double>{2, 3}, std::vector<double>{0, 2});
    CHECK(l.x[0] == doctest::Approx(2));
    CHECK(std::abs(l.x[1]) < 1e-15);
    CHECK(l.xi[1] == doctest::Approx(1));
}

TEST_CASE("ray_I examples") {
    const double e1[2] = {1, 0};
    const Line l = Line::make(std::span<const double>(kOrigin, 2), e1);
    const auto f = gaussian_field(2);
    CHECK(std::abs(ray_I(f, 0, l) - kSqrtPi) < 1e-14);
    CHECK(std::abs(ray_I(f, 0, l, RayMethod::Numeric) - kSqrtPi) < 1e-12);
    CHECK(std::abs(ray_I(f, 2, l) - kSqrtPi / 2) < 1e-14);
    CHECK_THROWS_AS(ray_I(f, -1, l), std::invalid_argument);

    // gradient field integrates to zero on every line
    auto g = testutil::rng(3);
    const auto p = random_field(2, 0, 17);
    const auto grad = inner_derivative(p);
    for (int i = 0; i < 20; ++i) {
        const Line li = random_line(g, 2);
        CHECK(std::abs(ray_I(grad, 0, li)) < 1e-12);
    }

    // non-decaying input is rejected
    AnalyticField poly(2, 0);
    poly[0] = AnalyticScalar::constant(2, 1.0);
    CHECK_THROWS_AS(ray_I(poly, 0, l), std::domain_error);
    CHECK_THROWS_AS(ray_I(poly, 0, l, RayMethod::Numeric), std::domain_error);
}

TEST_CASE("exact and numeric ray_I agree") {
    auto g = testutil::rng(5);
    for (int n = 2; n <= 3; ++n)
        for (int m = 0; m <= 3; ++m) {
            const auto f = random_field(n, m, 100 + 10 * n + m);
            for (int i = 0; i < 4; ++i) {
                const Line l = random_line(g, n);
                for (int k = 0; k <= 3; ++k) {
                    const double a = ray_I(f, k, l), b = ray_I(f, k, l, RayMethod::Numeric);
                    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
                }
            }
        }
}

TEST_CASE("gauge relation for potential fields") {
    auto g = testutil::rng(11);
    double worst = 0;
    for (int n = 2; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m) {
            const auto v = random_field(n, m - 1, 300 + 10 * n + m);
            const auto dv = inner_derivative(v);
            for (int i = 0; i < 10; ++i) {
                const Line l = random_line(g, n);
                for (int k = 1; k <= m; ++k)
                    worst = std::max(worst, std::abs(ray_I(dv, k, l) + k * ray_I(v, k - 1, l)));
            }
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("J versus I") {
    auto g = testutil::rng(21);
    const auto w = j_from_i_weights(2);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == 1);
    CHECK(w[1] == -2);
    CHECK(w[2] == 1);
    CHECK(j_from_i_weights(3) == std::vector<double>{-1, 3, -3, 1});

    // restriction to the tangent bundle
    const auto f = random_field(2, 2, 7);
    for (int i = 0; i < 5; ++i) {
        const Line l = random_line(g, 2);
        for (int q = 0; q <= 2; ++q) {
            CHECK(ray_J(f, q, l.base(), l.dir(), RayMethod::Exact) == ray_I(f, q, l));
            CHECK(std::abs(j_from_i(f, q, l.base(), l.dir()) - ray_I(f, q, l)) < 1e-12);
        }
    }

    // |xi| = 2, m = 1, q = 1
    const auto f1 = random_field(2, 1, 8);
    for (int i = 0; i < 10; ++i) {
        auto xi = testutil::random_unit(g, 2);
        for (auto& v : xi) v *= 2;
        const auto x = testutil::random_vec(g, 2, -2, 2);
        const double direct = ray_J(f1, 1, x, xi), formula = j_from_i(f1, 1, x, xi);
        CHECK(std::abs(direct - formula) <= 1e-8 * std::max(std::abs(direct), 1e-3));
    }
    const std::vector<double> zero{0, 0}, x{1, 1};
    CHECK_THROWS_AS(ray_J(f1, 0, x, zero), std::invalid_argument);
    CHECK_THROWS_AS(j_from_i(f1, 0, x, zero), std::invalid_argument);
}

TEST_CASE("translation equivariance") {
    auto g = testutil::rng(31);
    const auto f = random_field(3, 2, 9);
    const double a[3] = {0.4, -0.7, 0.25};
    const auto fa = f.shifted(a);
    for (int i = 0; i < 10; ++i) {
        const auto xi = testutil::random_unit(g, 3);
        const auto x = testutil::random_vec(g, 3, -1, 1);
        std::vector<double> xs(3);
        for (int j = 0; j < 3; ++j) xs[j] = x[j] - a[j];
        for (int q = 0; q <= 2; ++q)
            CHECK(std::abs(ray_J(fa, q, x, xi, RayMethod::Exact) - ray_J(f, q, xs, xi, RayMethod::Exact)) < 1e-10);
    }
}

TEST_CASE("joint vanishing of I and J moments") {
    // fields d^{k+1} w have I^l = 0 for l <= k; generic fields do not
    auto g = testutil::rng(41);
    const int n = 2, m = 3, k = 1;
    const auto pot = inner_derivative(random_field(n, m - k - 1, 51), k + 1);
    const auto gen = random_field(n, m, 52);
    std::vector<Line> lines;
    for (int i = 0; i < 12; ++i) lines.push_back(random_line(g, n));
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pts;
    for (int i = 0; i < 12; ++i) {
        auto xi = testutil::random_unit(g, n);
        for (auto& v : xi) v *= testutil::uniform(g, 0.5, 2.0);
        pts.emplace_back(testutil::random_vec(g, n, -1.5, 1.5), xi);
    }
    auto maxI = [&](const AnalyticField& f) {
        double r = 0;
        for (const auto& l : lines)
            for (int q = 0; q <= k; ++q) r = std::max(r, std::abs(ray_I(f, q, l)));
        return r;
    };
    auto maxJ = [&](const AnalyticField& f) {
        double r = 0;
        for (const auto& [x, xi] : pts)
            for (int q = 0; q <= k; ++q) r = std::max(r, std::abs(j_from_i(f, q, x, xi)));
        return r;
    };
    const double eps = 1e-8;
    CHECK(maxI(pot) < eps);
    CHECK(maxJ(pot) < eps);
    CHECK(maxI(gen) > eps);
    CHECK(maxJ(gen) > eps);
}

TEST_CASE("exponential ray transform") {
    const double e1[2] = {1, 0};
    const Line l = Line::make(std::span<const double>(kOrigin, 2), e1);
    const auto f = gaussian_field(2);
    CHECK(std::abs(ray_exp(f, 0.0, l) - ray_I(f, 0, l)) < 1e-12);
    const double closed = kSqrtPi * std::exp(1.0 / 16);
    CHECK(std::abs(ray_exp(f, 0.5, l) - closed) < 1e-11);
    CHECK(std::abs(ray_exp(f, 0.5, l, RayMethod::Exact) - closed) < 1e-13);
    const auto sc = exp_series_check(f, 0.5, l, 12);
    CHECK(sc.residual < 1e-8);
    CHECK(sc.tail_bound < 1e-8);
    CHECK(sc.residual <= sc.tail_bound + 1e-12);

    // odd profile along the line: I_exp^{-a} = -I_exp^{a}
    AnalyticField odd(2, 0);
    odd[0].add_term(std::span<const double>(kOrigin, 2), 1.0, Exponent{1, 0, 0}, 1.0);
    for (double a : {0.3, 0.9})
        CHECK(std::abs(ray_exp(odd, a, l) + ray_exp(odd, -a, l)) < 1e-12);
}

TEST_CASE("fractional half-line transform and Riesz average") {
    ScalarFn g{2, radial_fn, {}, 9.0};
    const double e1[2] = {1, 0};
    CHECK(std::abs(frac_xray(g, 0.5, std::span<const double>(kOrigin, 2), e1) - kSqrtPi / 2) < 1e-12);
    // Gamma(s)/2 for other s
    for (double s : {0.25, 0.75, 0.9})
        CHECK(std::abs(frac_xray(g, s, std::span<const double>(kOrigin, 2), e1) - std::tgamma(s) / 2) < 1e-10);
    CHECK_THROWS_AS(frac_xray(g, 1.0, std::span<const double>(kOrigin, 2), e1), std::invalid_argument);
    CHECK_THROWS_AS(frac_xray(g, 0.0, std::span<const double>(kOrigin, 2), e1), std::invalid_argument);
    ScalarFn zero{2, [](std::span<const double>) { return 0.0; }, {}, 5.0};
    CHECK(frac_xray(zero, 0.5, std::span<const double>(kOrigin, 2), e1) == 0.0);

    CHECK(std::abs(riesz_constant(2, -0.5) - 1 / (2 * std::numbers::pi)) < 1e-15);
    const auto quad = sphere_quadrature(2, 64);
    CHECK(std::abs(riesz_average(g, 0.5, std::span<const double>(kOrigin, 2), quad) - kSqrtPi / 2) < 1e-10);
    CHECK(riesz_average(zero, 0.5, std::span<const double>(kOrigin, 2), quad) == 0.0);

    // s = 1/2: both half lines together give I^0
    auto r = testutil::rng(61);
    const auto f = random_field(2, 0, 62);
    const auto fn = as_fn(f[0]);
    for (int i = 0; i < 5; ++i) {
        const Line l = random_line(r, 2);
        std::vector<double> mxi{-l.xi[0], -l.xi[1]};
        const double both = frac_xray(fn, 0.5, l.base(), l.dir()) + frac_xray(fn, 0.5, l.base(), mxi);
        CHECK(std::abs(both - ray_I(f, 0, l)) < 1e-10);
    }

    // Riesz average against the kernel integral c(n,-s) int |y|^{2s-n} f(x+y) dy in polar form
    const double x0[2] = {0.3, -0.2};
    const double s = 0.3;
    std::vector<double> rn, rw;
    gauss_legendre(120, 0.0, 1.0, rn, rw);
    double kernel = 0;
    for (int a = 0; a < 256; ++a) {
        const double th = 2 * std::numbers::pi * a / 256;
        for (std::size_t i = 0; i < rn.size(); ++i) {
            // r = 12 u^{1/2s}: dr r^{2s-1} = 12^{2s} du / (2s)
            const double rr = 12 * std::pow(rn[i], 1 / (2 * s));
            const double p[2] = {x0[0] + rr * std::cos(th), x0[1] + rr * std::sin(th)};
            kernel += rw[i] * (2 * std::numbers::pi / 256) * std::pow(12.0, 2 * s) / (2 * s) * fn.f(p);
        }
    }
    kernel *= riesz_constant(2, -s);
    CHECK(std::abs(riesz_average(fn, s, x0, quad) - kernel) < 1e-7);
}

TEST_CASE("whole-line |t|^s average is a multiple of the half-line average") {
    ScalarFn g{2, radial_fn, {}, 9.0};
    const auto quad = sphere_quadrature(2, 64);
    const double x[2] = {0.2, 0.1};
    for (double s : {-0.5, 0.0, 0.4}) {
        const double sigma = (s + 1) / 2;
        const double ratio = full_line_average(g, s, x, quad) / riesz_average(g, sigma, x, quad);
        CHECK(std::abs(ratio - 2 / riesz_constant(2, -sigma)) < 1e-9 * ratio);
    }
}

TEST_CASE("critical average") {
    CHECK(std::abs(kEulerGamma - 0.577215) < 1e-6);  // 6 significant figures
    const double a[2] = {0.5, 0.0}, b[2] = {-0.3, 0.4};
    const auto f = AnalyticScalar::gaussian(2, a, 1.0) - AnalyticScalar::gaussian(2, b, 1.0);
    const double x[2] = {0.1, 0.2};
    const auto quad = sphere_quadrature(2, 64);
    const double val = critical_average(f, x, quad);

    // Cartesian oracle: four quadrants with a Duffy split at the singular corner.
    std::vector<double> un, uw, vn, vw;
    gauss_legendre(60, 0.0, 1.0, un, uw);
    gauss_legendre(60, 0.0, 1.0, vn, vw);
    const double R = 9.0;
    double direct = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int tri = 0; tri < 2; ++tri)
                for (int seg = 0; seg < 3; ++seg) {
                    // radial coordinate u in [lo, hi] (as fraction of R), graded near 0
                    const double lo = seg == 0 ? 0.0 : (seg == 1 ? 0.05 : 0.3), hi = seg == 0 ? 0.05 : (seg == 1 ? 0.3 : 1.0);
                    for (std::size_t i = 0; i < un.size(); ++i)
                        for (std::size_t j = 0; j < vn.size(); ++j) {
                            const double u = R * (lo + (hi - lo) * un[i]), v = vn[j];
                            const double p = tri == 0 ? u : u * v, q = tri == 0 ? u * v : u;
                            const double y[2] = {sx * p, sy * q};
                            const double r = std::hypot(y[0], y[1]);
                            const double pt[2] = {x[0] + y[0], x[1] + y[1]};
                            direct += R * (hi - lo) * uw[i] * vw[j] * u * (-2 * std::log(r) - kEulerGamma) * f(pt);
                        }
                }
    direct /= 4 * std::numbers::pi;  // Gamma(1) (4 pi)^1
    CHECK(std::abs(val - direct) < 1e-6);

    // radial and centered at x: one radial integral
    const auto rad = AnalyticScalar::gaussian(2, x, 1.0) - AnalyticScalar::gaussian(2, x, 2.0, 0.25);
    double radial = 0;
    const double edges[] = {0.0, 1e-4, 1e-2, 0.2, 1.0, 4.0, 20.0};
    for (int e = 0; e + 1 < 7; ++e) {
        std::vector<double> rn, rw;
        gauss_legendre(60, edges[e], edges[e + 1], rn, rw);
        for (std::size_t i = 0; i < rn.size(); ++i) {
            const double r = rn[i];
            radial += rw[i] * (-2 * std::log(r) - kEulerGamma) * r * (std::exp(-r * r) - 0.25 * std::exp(-r * r / 4));
        }
    }
    radial *= 2 * std::numbers::pi / (4 * std::numbers::pi);
    CHECK(std::abs(critical_average(rad, x, quad) - radial) < 1e-8);

    CHECK_THROWS_AS(critical_average(AnalyticScalar::gaussian(2, a, 1.0), x, quad), std::domain_error);
}

TEST_CASE("cone transform") {
    ScalarFn g2{2, radial_fn, {}, 9.0};
    ScalarFn g3{3, radial_fn, {}, 9.0};
    auto r = testutil::rng(71);
    for (int i = 0; i < 5; ++i) {
        const auto beta = testutil::random_unit(r, 2);
        const double psi = testutil::uniform(r, 0.1, 3.0);
        CHECK(std::abs(cone_transform(g2, 0.0, std::span<const double>(kOrigin, 2), beta, psi) - kSqrtPi) < 1e-11);
        const auto b3 = testutil::random_unit(r, 3);
        CHECK(std::abs(cone_transform(g3, 0.0, std::span<const double>(kOrigin, 3), b3, psi) -
                       2 * std::numbers::pi * std::sin(psi) * kSqrtPi / 2) < 1e-10);
    }
    const double e1[2] = {1, 0};
    CHECK_THROWS_AS(cone_transform(g2, 0.0, std::span<const double>(kOrigin, 2), e1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cone_transform(g2, 0.0, std::span<const double>(kOrigin, 2), e1, std::numbers::pi),
                    std::invalid_argument);
    ScalarFn zero{2, [](std::span<const double>) { return 0.0; }, {}, 5.0};
    CHECK(cone_transform(zero, 0.0, std::span<const double>(kOrigin, 2), e1, 1.0) == 0.0);

    auto one = [](double) { return 1.0; };
    const auto id = cone_ray_identity(g2, 0.0, std::span<const double>(kOrigin, 2), e1, one);
    const double closed = std::numbers::pi * kSqrtPi;
    CHECK(std::abs(id.lhs - closed) < 1e-6);
    CHECK(std::abs(id.rhs - closed) < 1e-6);
    CHECK(id.residual < 1e-6);

    const double u[2] = {0.4, -0.3};
    CHECK(cone_ray_identity(g2, 0.0, u, e1, one).residual < 1e-5);
    CHECK(cone_ray_identity(g2, 0.5, u, e1, [](double c) { return 1 + c * c; }).residual < 1e-5);
    const double u3[3] = {0.2, 0.1, -0.3}, b3[3] = {0, 0, 1};
    CHECK(cone_ray_identity(g3, 0.5, u3, b3, one, 48, 32).residual < 1e-5);
}

TEST_CASE("adjoint of I^k") {
    const auto quad = sphere_quadrature(2, 64);
    const double x[2] = {0.3, 0.4};
    auto zero = [](std::span<const double>, std::span<const double>) { return 0.0; };
    CHECK(adjoint_I_star(zero, 1, 2, x, quad).max_abs() == 0.0);
    auto one = [](std::span<const double>, std::span<const double>) { return 1.0; };
    CHECK(std::abs(adjoint_I_star(one, 0, 0, x, quad)[0] - 2 * std::numbers::pi) < 1e-12);

    // <I^1 f, g> on T S^1 vs <f, (I^1)^* g> on R^2, n = 2, m = 1
    const auto f = random_field(2, 1, 81);
    const double bc[2] = {0.2, -0.1};
    auto g = [&](std::span<const double> z, std::span<const double> xi) {
        const double d0 = z[0] - bc[0], d1 = z[1] - bc[1];
        return (1 + 0.5 * xi[0]) * std::exp(-(d0 * d0 + d1 * d1));
    };
    double lhs = 0;
    std::vector<double> sn, sw;
    gauss_legendre(80, -8, 8, sn, sw);
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const double xi[2] = {quad.nodes[q][0], quad.nodes[q][1]};
        for (std::size_t i = 0; i < sn.size(); ++i) {
            const double z[2] = {-sn[i] * xi[1], sn[i] * xi[0]};
            const Line l = Line::make(z, xi);
            lhs += quad.weights[q] * sw[i] * ray_I(f, 1, l) * g(z, xi);
        }
    }
    double rhs = 0;
    std::vector<double> pn, pw;
    gauss_legendre(80, -7, 7, pn, pw);
    for (std::size_t i = 0; i < pn.size(); ++i)
        for (std::size_t j = 0; j < pn.size(); ++j) {
            const double p[2] = {pn[i], pn[j]};
            rhs += pw[i] * pw[j] * dot(f(p), adjoint_I_star(g, 1, 1, p, quad));
        }
    CHECK(std::abs(lhs - rhs) < 1e-4 * std::abs(lhs));
}

TEST_CASE("grid ray transform") {
    const auto f = random_field(2, 1, 91);
    GridSpec gs;
    gs.N = 128;
    gs.periodic = false;
    const auto gf = sample(f, gs);
    auto r = testutil::rng(92);
    for (int i = 0; i < 5; ++i) {
        const Line l = random_line(r, 2);
        const double a = ray_I(f, 0, l), b = ray_I(gf, 0, l);
        CHECK(std::abs(a - b) < 5e-3 * std::max(1.0, std::abs(a)));
    }
}
