// Seeded randomness: every stream derives from one 64-bit seed.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ttomo {

constexpr std::uint64_t kDefaultSeed = 0x5EED;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = kDefaultSeed) : seed_(seed), eng_(splitmix64(seed)) {}

    // Independent child stream; same (seed, stream) always gives the same child.
    Rng split(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream + 1))); }

    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    double normal() { return std::normal_distribution<double>()(eng_); }
    std::uint64_t bits() { return eng_(); }
    std::vector<double> unit_vector(int n);
    std::vector<double> uniform_vector(int n, double a, double b);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

inline std::vector<double> Rng::unit_vector(int n) {
    std::vector<double> v(n);
    double s = 0.0;
    do {
        s = 0.0;
        for (auto& x : v) {
            x = normal();
            s += x * x;
        }
    } while (s < 1e-20);
    s = std::sqrt(s);
    for (auto& x : v) x /= s;
    return v;
}

inline std::vector<double> Rng::uniform_vector(int n, double a, double b) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(a, b);
    return v;
}

}  // namespace ttomo
