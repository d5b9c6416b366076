#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "ttomo/analytic.hpp"
#include "ttomo/grid.hpp"
#include "ttomo/quadrature.hpp"
#include "ttomo/random.hpp"

using namespace ttomo;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
const double kOrigin[3] = {0, 0, 0};

// Evaluate each stored term independently of AnalyticScalar::operator().
double term_sum(const AnalyticScalar& f, std::span<const double> x) {
    double s = 0;
    for (const auto& b : f.blocks())
        for (const auto& [e, c] : b.poly) {
            double p = c, r2 = 0;
            for (int i = 0; i < f.dim(); ++i) {
                double y = x[i] - b.center[i];
                p *= std::pow(y, e[i]);
                r2 += y * y;
            }
            s += p * std::exp(-r2 / (b.width * b.width));
        }
    return s;
}
}  // namespace

TEST_CASE("make_bump basics") {
    auto g = make_bump(2, 0, kOrigin, 1.0, 0, 7);
    const double x[2] = {0.3, -0.4};
    CHECK(g[0](x) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
    auto a = make_bump(2, 2, kOrigin, 0.8, 2, 42), b = make_bump(2, 2, kOrigin, 0.8, 2, 42);
    for (std::size_t c = 0; c < a.size(); ++c) {
        const auto& ba = a[c].blocks()[0].poly;
        const auto& bb = b[c].blocks()[0].poly;
        CHECK(ba == bb);
    }
    auto d2 = make_bump(2, 0, kOrigin, 1.3, 2, 9);
    auto r = testutil::rng(10);
    for (int i = 0; i < 10; ++i) {
        auto p = testutil::random_vec(r, 2, -2, 2);
        CHECK(d2[0](p) == doctest::Approx(term_sum(d2[0], p)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(make_bump(2, 0, kOrigin, 0.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_bump(2, 0, kOrigin, 1.0, -1, 1), std::invalid_argument);
}

TEST_CASE("exact derivatives") {
    auto g = AnalyticScalar::gaussian(2, kOrigin, 1.0);
    CHECK(g.derivative(0)(kOrigin) == 0.0);
    AnalyticScalar xg(2);
    xg.add_term(kOrigin, 1.0, {1, 0, 0}, 1.0);
    CHECK(xg.derivative(0)(kOrigin) == doctest::Approx(1.0));

    const double c[3] = {0.2, -0.1, 0.3};
    auto f = make_bump(3, 1, c, 0.9, 3, 5);
    auto r = testutil::rng(11);
    const double h = 1e-5;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        auto p = testutil::random_vec(r, 3, -1.5, 1.5);
        for (int ax = 0; ax < 3; ++ax) {
            auto d = f.derivative(ax)(p);
            auto pp = p, pm = p;
            pp[ax] += h;
            pm[ax] -= h;
            auto fp = f(pp), fm = f(pm);
            for (std::size_t k = 0; k < d.size(); ++k) worst = std::max(worst, std::abs(d[k] - (fp[k] - fm[k]) / (2 * h)));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("line moments") {
    auto g = AnalyticScalar::gaussian(2, kOrigin, 1.0);
    const double xi[2] = {1, 0};
    CHECK(g.line_moment(0, kOrigin, xi) == doctest::Approx(kSqrtPi).epsilon(1e-15));
    CHECK(std::abs(g.line_moment(1, kOrigin, xi)) < 1e-16);
    CHECK(g.line_moment(2, kOrigin, xi) == doctest::Approx(kSqrtPi / 2).epsilon(1e-15));

    const double c[2] = {0.4, -0.3};
    auto f = make_bump(2, 0, c, 0.7, 3, 3)[0];
    auto r = testutil::rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        auto x = testutil::random_vec(r, 2, -1, 1);
        auto d = testutil::random_unit(r, 2);
        for (int k = 0; k <= 6; ++k) {
            auto integrand = [&](double t) {
                double p[2] = {x[0] + t * d[0], x[1] + t * d[1]};
                return std::pow(t, k) * f(p);
            };
            double num = integrate(integrand, -12, 12, 1e-14);
            double ex = f.line_moment(k, x, d);
            CHECK(std::abs(ex - num) <= 1e-9 * std::max(1.0, std::abs(num)));
        }
    }
    auto poly = AnalyticScalar::monomial(2, {1, 0, 0});
    CHECK_THROWS_AS(poly.line_moment(0, kOrigin, xi), std::domain_error);
}

TEST_CASE("whole-space integral") {
    auto g = AnalyticScalar::gaussian(2, kOrigin, 1.0);
    CHECK(g.integral() == doctest::Approx(std::numbers::pi));
    AnalyticScalar q(2);
    q.add_term(kOrigin, 2.0, {2, 0, 0}, 1.0);
    // int x^2 e^{-x^2/4} dx * int e^{-y^2/4} dy = (sqrt(pi) * 4) * (2 sqrt(pi))
    CHECK(q.integral() == doctest::Approx(8 * std::numbers::pi));
}

TEST_CASE("sampling, file round trip and interpolation order") {
    const double c[2] = {0.1, 0.2};
    auto f = make_bump(2, 1, c, 1.0, 1, 8);
    GridSpec gs{2, 32, 4.0, false};
    auto gf = sample(f, gs);
    auto x = gf.position(gf.index(std::vector<int>{5, 7}));
    CHECK(gf.value(gf.index(std::vector<int>{5, 7})).data() == f(x).data());

    auto path = std::filesystem::temp_directory_path() / "ttomo_roundtrip.bin";
    gf.save(path.string());
    auto back = GridField::load(path.string());
    CHECK(back.grid() == gs);
    for (std::size_t k = 0; k < gf.components(); ++k) CHECK(back.comp(k) == gf.comp(k));
    {
        std::FILE* fp = std::fopen(path.string().c_str(), "wb");
        std::fputs("TTOMO2 2 1 32 4 0 2\n", fp);
        std::fclose(fp);
    }
    CHECK_THROWS_AS(GridField::load(path.string()), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(GridField::load("/nonexistent/ttomo.bin"), std::runtime_error);

    // RMS over many points: a max over a few fixed points depends on where
    // they fall inside their cells and gives a noisy rate.
    auto pts = point_cloud(2, 2000, 2.0);
    double errs[3];
    int k = 0;
    for (int N : {32, 64, 128}) {
        auto s = sample(f, GridSpec{2, N, 4.0, false});
        double e = 0;
        for (auto& p : pts) {
            auto a = s.interpolate(p), b = f(p);
            for (std::size_t q = 0; q < a.size(); ++q) e += (a[q] - b[q]) * (a[q] - b[q]);
        }
        errs[k++] = std::sqrt(e / pts.size());
    }
    CHECK(std::log2(errs[0] / errs[1]) > 1.8);
    CHECK(std::log2(errs[1] / errs[2]) > 1.8);
}

TEST_CASE("point cloud and rng determinism") {
    auto p = point_cloud(3, 50, 2.0);
    CHECK(p.size() == 50);
    for (auto& q : p)
        for (int a = 0; a < 3; ++a) CHECK(std::abs(q[a]) <= 2.0);
    Rng a(123), b(123);
    CHECK(a.bits() == b.bits());
    CHECK(a.split(4).bits() == b.split(4).bits());
    CHECK(Rng(1).split(1).bits() != Rng(1).split(2).bits());
}
