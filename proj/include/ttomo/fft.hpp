// Thin FFTW wrapper (complex n-d transforms on row-major arrays) and
// zero-padded convolution with homogeneous kernels.
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ttomo/grid.hpp"

namespace ttomo {

using cplx = std::complex<double>;

class FFT {
public:
    explicit FFT(std::vector<int> dims);
    ~FFT();
    FFT(const FFT&) = delete;
    FFT& operator=(const FFT&) = delete;

    std::size_t size() const { return size_; }
    const std::vector<int>& dims() const { return dims_; }

    void forward(std::vector<cplx>& a) const;
    // Unnormalized inverse; divide by size() to invert forward().
    void inverse(std::vector<cplx>& a) const;

private:
    std::vector<int> dims_;
    std::size_t size_ = 1;
    void* fwd_ = nullptr;
    void* inv_ = nullptr;
    mutable std::vector<cplx> buf_;
};

// Angular wavenumber of FFT bin j on a periodic axis of length `period`.
double wavenumber(int j, int N, double period);

using KernelFn = std::function<double(std::span<const double>)>;

// Integral of omega^e over S^{n-1} (zero unless every exponent is even).
double sphere_monomial_moment(int n, std::span<const int> e);

// Origin weight Z for a kernel K homogeneous of degree d > -n: with it,
//   h^n sum_{j != 0} K(hj) g(hj) + h^{n+d} Z g(0)
// is a high-order rule for int K g.  Z = lim (int K e^{-eps^2|z|^2} - sum' K(j) e^{-eps^2|j|^2})
// as eps -> 0, found by Richardson extrapolation in eps^2.  `gauss_integral` is
// int K(z) e^{-|z|^2} dz.
double lattice_origin_constant(int n, const KernelFn& K, double d, double gauss_integral);

// Linear (non-circular) convolution on the grid via zero padding to 2N per axis.
class PaddedConvolver {
public:
    explicit PaddedConvolver(const GridSpec& g);
    const GridSpec& grid() const { return g_; }
    std::vector<cplx> transform_field(const std::vector<double>& f) const;
    // Samples K at all padded offsets (weight h^n), with origin weight h^{n+d} Z.
    std::vector<cplx> transform_kernel(const KernelFn& K, double d, double Z) const;
    // Inverse transform, cropped back to the N^n grid.
    std::vector<double> inverse(std::vector<cplx> spec) const;

private:
    GridSpec g_;
    int M_;
    std::unique_ptr<FFT> fft_;
};

}  // namespace ttomo
