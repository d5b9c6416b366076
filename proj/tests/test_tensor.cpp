#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_util.hpp"
#include "ttomo/tensor.hpp"

using namespace ttomo;
using testutil::uniform;

namespace {

// Full-index contraction by explicit loops over n^m tuples.
double brute_dot(const SymTensor& f, const SymTensor& g) {
    auto F = expand(f), G = expand(g);
    double s = 0;
    for (std::size_t i = 0; i < F.size(); ++i) s += F[i] * G[i];
    return s;
}

// sigma(all) of u (x) v by summing over every permutation of m+k slots.
GenTensor<double> brute_sym_mult(const SymTensor& u, const SymTensor& v) {
    const int n = u.dim(), k = u.rank(), m = v.rank();
    GenTensor<double> out(n, m + k);
    std::vector<int> idx(m + k), perm(m + k);
    for (std::size_t f = 0; f < out.size(); ++f) {
        out.unflat(f, idx);
        std::iota(perm.begin(), perm.end(), 0);
        double acc = 0;
        int cnt = 0;
        do {
            std::vector<int> a, b;
            for (int q = 0; q < k; ++q) a.push_back(idx[perm[q]]);
            for (int q = k; q < m + k; ++q) b.push_back(idx[perm[q]]);
            acc += u.at(a) * v.at(b);
            ++cnt;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out[f] = acc / cnt;
    }
    return out;
}

}  // namespace

TEST_CASE("sym_dim counts multisets") {
    CHECK(sym_dim(2, 0) == 1);
    CHECK(sym_dim(2, 2) == 3);
    CHECK(sym_dim(3, 4) == 15);
    for (int n = 1; n <= 4; ++n)
        for (int m = 0; m <= 5; ++m) CHECK(SymIndexTable::get(n, m).size() == sym_dim(n, m));
    CHECK_THROWS_AS(sym_dim(0, 1), std::invalid_argument);
}

TEST_CASE("index table ordering and multiplicities") {
    const auto& t = SymIndexTable::get(2, 2);
    CHECK(t.multiset(0)[0] == 0);
    CHECK(t.multiset(0)[1] == 0);
    CHECK(t.multiset(1)[0] == 0);
    CHECK(t.multiset(1)[1] == 1);
    CHECK(t.multiset(2)[0] == 1);
    CHECK(t.multiplicity(1) == 2.0);
    for (int n = 1; n <= 3; ++n)
        for (int m = 0; m <= 5; ++m) {
            const auto& tab = SymIndexTable::get(n, m);
            double total = 0;
            for (std::size_t c = 0; c < tab.size(); ++c) {
                total += tab.multiplicity(c);
                CHECK(tab.compress(tab.multiset(c)) == c);
            }
            CHECK(total == doctest::Approx(std::pow(n, m)));
        }
}

TEST_CASE("compress/expand round trip is exact and expansion is symmetric") {
    auto g = testutil::rng(1);
    for (int n = 1; n <= 3; ++n)
        for (int m = 0; m <= 5; ++m) {
            auto s = testutil::random_sym(g, n, m);
            auto e = expand(s);
            CHECK(compress(e).data() == s.data());
            CHECK(symmetry_defect(e) == 0.0);
        }
}

TEST_CASE("tensor_power") {
    const double e1[2] = {1, 0};
    auto p = tensor_power(e1, 3);
    CHECK(p.at({0, 0, 0}) == 1.0);
    CHECK(p.max_abs() == 1.0);
    CHECK(p.at({0, 0, 1}) == 0.0);
    auto s = tensor_power(e1, 0);
    CHECK(s.size() == 1);
    CHECK(s[0] == 1.0);
    const double xi[2] = {1, 2};
    auto q = tensor_power(xi, 2);
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 2.0);
    CHECK(q[2] == 4.0);
}

TEST_CASE("dot with multiplicities") {
    SymTensor f(2, 2, {1, 1, 1});
    CHECK(dot(f, f) == 4.0);
    CHECK(dot(f, SymTensor(2, 2)) == 0.0);
    auto g = testutil::rng(2);
    for (int n = 1; n <= 3; ++n)
        for (int m = 0; m <= 4; ++m) {
            auto a = testutil::random_sym(g, n, m), b = testutil::random_sym(g, n, m);
            double bd = brute_dot(a, b);
            CHECK(std::abs(dot(a, b) - bd) <= 1e-13 * std::max(1.0, std::abs(bd)));
            auto xi = testutil::random_vec(g, n), eta = testutil::random_vec(g, n);
            double xe = std::inner_product(xi.begin(), xi.end(), eta.begin(), 0.0);
            CHECK(dot(tensor_power(xi, m), tensor_power(eta, m)) == doctest::Approx(std::pow(xe, m)).epsilon(1e-13));
        }
    CHECK_THROWS_AS(dot(SymTensor(2, 1), SymTensor(2, 2)), std::invalid_argument);
}

TEST_CASE("symmetrize") {
    GenTensor<double> t(2, 2);
    t({0, 1}) = 1.0;
    auto s = symmetrize_all(t);
    CHECK(s({0, 1}) == 0.5);
    CHECK(s({1, 0}) == 0.5);
    CHECK(s({0, 0}) == 0.0);
    auto ss = symmetrize_all(s);
    CHECK(ss.data() == s.data());

    auto g = testutil::rng(3);
    GenTensor<double> r(3, 3);
    for (auto& v : r.data()) v = uniform(g);
    auto p = symmetrize(r, {0, 1});
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) CHECK(p({a, b, c}) == doctest::Approx(0.5 * (r({a, b, c}) + r({b, a, c}))));
    double mx = 0, mp = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        mx = std::max(mx, std::abs(r[i]));
        mp = std::max(mp, std::abs(p[i]));
    }
    CHECK(mp <= mx);
    auto pp = symmetrize(p, {0, 1});
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(pp[i] == doctest::Approx(p[i]).epsilon(1e-15));
    CHECK(symmetry_defect(p) < 1e-15);
    CHECK_THROWS_AS(symmetrize(r, {0, 3}), std::out_of_range);
}

TEST_CASE("alternate") {
    auto g = testutil::rng(4);
    GenTensor<double> r(3, 2);
    for (auto& v : r.data()) v = uniform(g);
    auto a = alternate(r, 0, 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(a({i, j}) == doctest::Approx(0.5 * (r({i, j}) - r({j, i}))));
    auto aa = alternate(a, 0, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(aa[i] == a[i]);
    auto z = alternate(symmetrize(r, {0, 1}), 0, 1);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);
    CHECK_THROWS(alternate(r, 0, 0));
    CHECK_THROWS_AS(alternate(r, 0, 2), std::out_of_range);
}

TEST_CASE("sym_mult and contract agree with brute force and are dual") {
    auto e = metric_tensor(2);
    SymTensor one(2, 0, {1.0});
    auto s = sym_mult(e, one);
    CHECK(s.data() == e.data());
    CHECK_THROWS(metric_tensor(2, 3));

    auto g = testutil::rng(5);
    for (int n = 2; n <= 3; ++n)
        for (int k = 0; k <= 2; ++k)
            for (int m = 0; m <= 3; ++m) {
                auto u = testutil::random_sym(g, n, k), v = testutil::random_sym(g, n, m);
                auto got = expand(sym_mult(u, v));
                auto want = brute_sym_mult(u, v);
                for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
            }
    // j_xi(xi^{m+1}) = |xi|^2 xi^{m-1}... with u = xi, w = xi^{m+1}: result |xi|^2 xi^m
    auto xi = testutil::random_vec(g, 3);
    double nrm2 = 0;
    for (double x : xi) nrm2 += x * x;
    auto c = contract(tensor_power(xi, 1), tensor_power(xi, 3));
    auto want = tensor_power(xi, 2);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(nrm2 * want[i]).epsilon(1e-14));

    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 2, k = trial % 3, m = (trial / 3) % 3;
        auto u = testutil::random_sym(g, n, k), v = testutil::random_sym(g, n, m);
        auto w = testutil::random_sym(g, n, m + k);
        worst = std::max(worst, std::abs(dot(sym_mult(u, v), w) - dot(v, contract(u, w))));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("general tensor permute and trace") {
    auto g = testutil::rng(6);
    GenTensor<double> r(2, 3);
    for (auto& v : r.data()) v = uniform(g);
    const int perm[3] = {2, 0, 1};
    auto p = permute(r, perm);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) CHECK(p({a, b, c}) == r({b, c, a}));
    auto t = contract_pair(r, 0, 2);
    for (int b = 0; b < 2; ++b) CHECK(t({b}) == doctest::Approx(r({0, b, 0}) + r({1, b, 1})));
}
