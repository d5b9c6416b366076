#include "ttomo/fft.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ttomo {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FFT::FFT(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("FFT: no dimensions");
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("FFT: dimensions must be positive");
        size_ *= static_cast<std::size_t>(d);
    }
    buf_.resize(size_);
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !inv_) throw std::runtime_error("FFT: planning failed");
}

FFT::~FFT() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void FFT::forward(std::vector<cplx>& a) const {
    if (a.size() != size_) throw std::invalid_argument("FFT: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void FFT::inverse(std::vector<cplx>& a) const {
    if (a.size() != size_) throw std::invalid_argument("FFT: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(static_cast<fftw_plan>(inv_), p, p);
}

double wavenumber(int j, int N, double period) {
    const int jj = j <= N / 2 ? j : j - N;
    return 2.0 * std::numbers::pi * jj / period;
}


double sphere_monomial_moment(int n, std::span<const int> e) {
    double num = 2.0;
    int tot = 0;
    for (int i = 0; i < n; ++i) {
        const int a = i < static_cast<int>(e.size()) ? e[i] : 0;
        if (a % 2) return 0.0;
        num *= std::tgamma(0.5 * (a + 1));
        tot += a;
    }
    return num / std::tgamma(0.5 * (tot + n));
}

double lattice_origin_constant(int n, const KernelFn& K, double d, double gauss_integral) {
    if (n < 2 || n > 3) throw std::invalid_argument("lattice_origin_constant: n must be 2 or 3");
    if (!(d > -n)) throw std::invalid_argument("lattice_origin_constant: kernel not locally integrable");
    // eps levels halve; the last level fixes the lattice radius
    const std::vector<double> eps = n == 2 ? std::vector<double>{0.2, 0.1, 0.05, 0.025}
                                           : std::vector<double>{0.4, 0.2, 0.1};
    const int R = static_cast<int>(std::ceil(7.0 / eps.back())) + 1;
    std::vector<double> sums(eps.size(), 0.0);
    std::array<double, 3> z{};
    std::array<int, 3> j{-R, -R, -R};
    if (n == 2) j[2] = 0;
    const int R2 = R * R;
    while (true) {
        int r2 = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];
        if (r2 > 0 && r2 <= R2) {
            for (int i = 0; i < 3; ++i) z[i] = j[i];
            const double k = K(std::span<const double>(z.data(), n));
            for (std::size_t e = 0; e < eps.size(); ++e) sums[e] += k * std::exp(-eps[e] * eps[e] * r2);
        }
        int a = n - 1;
        while (a >= 0 && ++j[a] > R) j[a--] = -R;
        if (a < 0) break;
    }
    std::vector<double> Z(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) Z[e] = std::pow(eps[e], -n - d) * gauss_integral - sums[e];
    // Richardson: error expands in eps^2, ratio 4 per level
    for (std::size_t lvl = 1; lvl < Z.size(); ++lvl) {
        const double f = std::pow(4.0, static_cast<double>(lvl));
        for (std::size_t e = Z.size() - 1; e >= lvl; --e) Z[e] = (f * Z[e] - Z[e - 1]) / (f - 1);
    }
    return Z.back();
}

PaddedConvolver::PaddedConvolver(const GridSpec& g) : g_(g), M_(2 * g.N) {
    g.validate();
    fft_ = std::make_unique<FFT>(std::vector<int>(g.dim, M_));
}

std::vector<cplx> PaddedConvolver::transform_field(const std::vector<double>& f) const {
    const int n = g_.dim, N = g_.N;
    if (f.size() != g_.points()) throw std::invalid_argument("PaddedConvolver: field size mismatch");
    std::vector<cplx> a(fft_->size(), 0.0);
    std::array<int, 3> j{};
    for (std::size_t p = 0; p < f.size(); ++p) {
        std::size_t q = p, pad = 0;
        for (int ax = n - 1; ax >= 0; --ax) {
            j[ax] = static_cast<int>(q % N);
            q /= N;
        }
        for (int ax = 0; ax < n; ++ax) pad = pad * M_ + j[ax];
        a[pad] = f[p];
    }
    fft_->forward(a);
    return a;
}

std::vector<cplx> PaddedConvolver::transform_kernel(const KernelFn& K, double d, double Z) const {
    const int n = g_.dim, N = g_.N;
    const double h = g_.h(), w = std::pow(h, n);
    std::vector<cplx> a(fft_->size(), 0.0);
    std::array<double, 3> z{};
    for (std::size_t p = 0; p < a.size(); ++p) {
        std::size_t q = p;
        bool origin = true;
        for (int ax = n - 1; ax >= 0; --ax) {
            int jj = static_cast<int>(q % M_);
            q /= M_;
            const int o = jj < N ? jj : jj - M_;
            z[ax] = o * h;
            origin = origin && o == 0;
        }
        a[p] = origin ? std::pow(h, n + d) * Z : w * K(std::span<const double>(z.data(), n));
    }
    fft_->forward(a);
    return a;
}

std::vector<double> PaddedConvolver::inverse(std::vector<cplx> spec) const {
    const int n = g_.dim, N = g_.N;
    fft_->inverse(spec);
    const double scale = 1.0 / static_cast<double>(fft_->size());
    std::vector<double> out(g_.points());
    std::array<int, 3> j{};
    for (std::size_t p = 0; p < out.size(); ++p) {
        std::size_t q = p, pad = 0;
        for (int ax = n - 1; ax >= 0; --ax) {
            j[ax] = static_cast<int>(q % N);
            q /= N;
        }
        for (int ax = 0; ax < n; ++ax) pad = pad * M_ + j[ax];
        out[p] = spec[pad].real() * scale;
    }
    return out;
}

}  // namespace ttomo
