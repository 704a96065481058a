#pragma once

#include <complex>
#include <vector>

#include "elastoborn/calculus.hpp"
#include "elastoborn/field.hpp"
#include "elastoborn/parallel.hpp"

namespace elastoborn::detail {

using cplx = std::complex<double>;

// Full complex 3D transform as 1D passes along each axis, one plan per length.
void fft3(std::vector<cplx>& data, int N, bool inverse);
// Same, restricted to one axis.
void fft1_axis(std::vector<cplx>& data, int N, int axis, bool inverse);

// Unnormalized 1D transform of a contiguous line.
void fft1_axis_line(std::vector<cplx>& line, bool inverse);

std::vector<cplx> to_complex(const ScalarField& f);
// Real part, scaled by 1/N^(number of transformed axes).
void from_complex(const std::vector<cplx>& c, ScalarField& out, double scale);

// (i k)^order along one axis with the Nyquist policy applied; defined with
// the spectral derivatives.
std::vector<cplx> axis_factor(int N, double h, int order, Nyquist nyq);

// Angular wavenumber of FFT index j on an N-point grid of spacing h.
inline double wavenumber(int j, int N, double h) {
    int m = j <= N / 2 ? j : j - N;
    return 2.0 * 3.14159265358979323846 * m / (N * h);
}

// Calls fn(base, stride) for every grid line along `axis`, in parallel.
template <class Fn>
void for_each_line(int N, int axis, Fn&& fn) {
    const std::size_t NN = std::size_t(N) * N;
    const std::size_t stride = axis == 0 ? NN : (axis == 1 ? std::size_t(N) : 1);
    parallel_for(NN, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t line = b0; line < b1; ++line) {
            std::size_t a = line / N, b = line % N, base;
            if (axis == 0) base = a * N + b;
            else if (axis == 1) base = a * NN + b;
            else base = (a * N + b) * N;
            fn(base, stride);
        }
    });
}

}  // namespace elastoborn::detail
