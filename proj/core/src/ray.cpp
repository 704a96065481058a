#include <cmath>
#include <sstream>

#include "elastoborn/calculus.hpp"
#include "elastoborn/error.hpp"
#include "fft.hpp"

namespace elastoborn {

using detail::cplx;

namespace {

constexpr double kBdf[7] = {147.0 / 60.0, -6.0, 15.0 / 2.0, -20.0 / 3.0, 15.0 / 4.0, -6.0 / 5.0, 1.0 / 6.0};

void require_rayable(const ScalarField& f) {
    if (f.support == Support::general)
        throw Error("ray antiderivative needs a compact-in-omega or upstream-vanishing input");
}

// Node j of a line, counted from the upstream end.
inline std::size_t node(std::size_t base, std::size_t stride, int N, int sign, int j) {
    return base + std::size_t(sign > 0 ? j : N - 1 - j) * stride;
}

// Spectral antiderivative of one line (in upstream order) from its first node:
// G_j = tot*j/N + p_j - p_0, p the periodic antiderivative of f - tot/(2L).
void fourier_line(const std::vector<double>& f, std::vector<double>& g, double h, std::vector<cplx>& work,
                  const std::vector<double>& kinv) {
    const int N = int(f.size());
    double tot = 0.0;
    for (double x : f) tot += x;
    tot *= h;
    const double mean = tot / (N * h);
    for (int j = 0; j < N; ++j) work[j] = f[j] - mean;
    detail::fft1_axis_line(work, false);
    for (int j = 0; j < N; ++j) work[j] *= cplx(0.0, -kinv[j]);
    detail::fft1_axis_line(work, true);
    const double p0 = work[0].real() / N;
    for (int j = 0; j < N; ++j) g[j] = tot * j / N + work[j].real() / N - p0;
}

std::vector<double> inverse_wavenumbers(int N, double h) {
    std::vector<double> kinv(N, 0.0);
    for (int j = 1; j < N; ++j)
        if (j != N / 2) kinv[j] = 1.0 / detail::wavenumber(j, N, h);
    return kinv;
}

}  // namespace

ScalarField ray_antiderivative(const ScalarField& f, const Axis& theta, RayRule rule) {
    require_rayable(f);
    const int N = f.grid.N;
    const double h = f.grid.h();
    ScalarField g(f.grid, Support::upstream);
    if (rule == RayRule::upwind) {
        detail::for_each_line(N, theta.axis, [&](std::size_t base, std::size_t st) {
            double prev[7] = {0, 0, 0, 0, 0, 0, 0};  // prev[m] = g_{j-m}
            for (int j = 0; j < N; ++j) {
                std::size_t idx = node(base, st, N, theta.sign, j);
                double acc = h * f.v[idx];
                for (int m = 1; m <= 6; ++m) acc -= kBdf[m] * prev[m];
                double gj = acc / kBdf[0];
                for (int m = 6; m > 1; --m) prev[m] = prev[m - 1];
                prev[1] = gj;
                g.v[idx] = gj;
            }
        });
        return g;
    }
    if (f.support != Support::compact) throw Error("fourier ray rule needs a compact-in-omega input");
    const auto kinv = inverse_wavenumbers(N, h);
    detail::for_each_line(N, theta.axis, [&](std::size_t base, std::size_t st) {
        std::vector<double> line(N), out(N);
        std::vector<cplx> work(N);
        for (int j = 0; j < N; ++j) line[j] = f.v[node(base, st, N, theta.sign, j)];
        fourier_line(line, out, h, work, kinv);
        for (int j = 0; j < N; ++j) g.v[node(base, st, N, theta.sign, j)] = out[j];
    });
    return g;
}

ScalarField ray_derivative(const ScalarField& g, const Axis& theta, RayRule rule) {
    const int N = g.grid.N;
    const double h = g.grid.h();
    ScalarField f(g.grid, g.support);
    if (rule == RayRule::upwind) {
        detail::for_each_line(N, theta.axis, [&](std::size_t base, std::size_t st) {
            for (int j = 0; j < N; ++j) {
                double acc = 0.0;
                for (int m = 0; m <= 6 && m <= j; ++m) acc += kBdf[m] * g.v[node(base, st, N, theta.sign, j - m)];
                f.v[node(base, st, N, theta.sign, j)] = acc / h;
            }
        });
        return f;
    }
    // Remove the linear ramp between the flat ends, differentiate the
    // periodic remainder spectrally, add the slope back.
    std::vector<double> kk(N);
    for (int j = 0; j < N; ++j) kk[j] = j == N / 2 ? 0.0 : detail::wavenumber(j, N, h);
    detail::for_each_line(N, theta.axis, [&](std::size_t base, std::size_t st) {
        std::vector<cplx> work(N);
        double g0 = g.v[node(base, st, N, theta.sign, 0)];
        double slope = (g.v[node(base, st, N, theta.sign, N - 1)] - g0) / (N * h);
        for (int j = 0; j < N; ++j) work[j] = g.v[node(base, st, N, theta.sign, j)] - g0 - slope * h * j;
        detail::fft1_axis_line(work, false);
        for (int j = 0; j < N; ++j) work[j] *= cplx(0.0, kk[j]);
        detail::fft1_axis_line(work, true);
        for (int j = 0; j < N; ++j) f.v[node(base, st, N, theta.sign, j)] = slope + work[j].real() / N;
    });
    return f;
}

ScalarField ray_antiderivative2(const ScalarField& f, const Axis& theta, RayRule rule) {
    if (rule == RayRule::upwind) return ray_antiderivative(ray_antiderivative(f, theta, rule), theta, rule);
    require_rayable(f);
    // L^{-2} f = s L^{-1} f - L^{-1}(s f), s the coordinate along theta.
    const Grid& gr = f.grid;
    const int N = gr.N;
    ScalarField sf = f;
    std::vector<double> s(N);
    for (int i = 0; i < N; ++i) s[i] = theta.sign * gr.x(i);
    const std::size_t st = gr.stride(theta.axis);
    for (std::size_t i = 0; i < sf.size(); ++i) sf.v[i] *= s[(i / st) % N];
    ScalarField a = ray_antiderivative(f, theta, rule), b = ray_antiderivative(sf, theta, rule);
    for (std::size_t i = 0; i < a.size(); ++i) a.v[i] = s[(i / st) % N] * a.v[i] - b.v[i];
    return a;
}

ScalarField double_antiderivative(const ScalarField& g, std::array<int, 2> axes, RayRule rule,
                                  std::vector<std::string>* warnings) {
    if (axes[0] == axes[1] || axes[0] < 0 || axes[0] > 2 || axes[1] < 0 || axes[1] > 2)
        throw Error("double_antiderivative: axes must be two distinct axes");
    ScalarField first = ray_antiderivative(g, Axis{axes[0], 1}, rule);
    // lines along the second axis stay inside the support of g
    first.support = g.support;
    ScalarField f = ray_antiderivative(first, Axis{axes[1], 1}, rule);
    const Grid& gr = f.grid;
    const int N = gr.N;
    double fmax = max_abs(f), leak = 0.0;
    for (int a : axes) {
        const std::size_t st = gr.stride(a);
        for (std::size_t i = 0; i < f.size(); ++i)
            if (int((i / st) % N) == N - 1) leak = std::max(leak, std::abs(f.v[i]));
    }
    if (fmax > 0.0 && leak > 1e-6 * fmax) {
        std::ostringstream os;
        os << "double_antiderivative: support leakage, downstream face value " << leak << " vs max " << fmax;
        if (warnings) warnings->push_back(os.str());
    }
    f.support = leak <= 1e-6 * fmax ? Support::compact : Support::upstream;
    return f;
}

ScalarField antiderivative_periodic(const ScalarField& f, int axis) {
    const Grid& gr = f.grid;
    const int N = gr.N;
    const auto kinv = inverse_wavenumbers(N, gr.h());
    std::vector<unsigned char> outer(N);
    int nout = 0;
    for (int i = 0; i < N; ++i) nout += (outer[i] = std::abs(gr.x(i)) >= 1.0);
    ScalarField g(gr, f.support);
    detail::for_each_line(N, axis, [&](std::size_t base, std::size_t st) {
        std::vector<cplx> work(N);
        for (int j = 0; j < N; ++j) work[j] = f.v[base + j * st];
        detail::fft1_axis_line(work, false);
        for (int j = 0; j < N; ++j) work[j] *= cplx(0.0, -kinv[j]);
        detail::fft1_axis_line(work, true);
        double m = 0.0;
        for (int j = 0; j < N; ++j)
            if (outer[j]) m += work[j].real();
        m /= nout;
        for (int j = 0; j < N; ++j) g.v[base + j * st] = (work[j].real() - m) / N;
    });
    return g;
}

}  // namespace elastoborn
