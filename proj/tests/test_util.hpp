// Small helpers shared by the unit tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ttomo/tensor.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double a = -1.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(g);
}

inline ttomo::SymTensor random_sym(std::mt19937_64& g, int n, int m) {
    ttomo::SymTensor t(n, m);
    for (auto& v : t.data()) v = uniform(g);
    return t;
}

inline std::vector<double> random_vec(std::mt19937_64& g, int n, double a = -1.0, double b = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(g, a, b);
    return v;
}

inline std::vector<double> random_unit(std::mt19937_64& g, int n) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    double s = 0;
    for (auto& x : v) {
        x = nd(g);
        s += x * x;
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
}

}  // namespace testutil
