#include <cmath>
#include <map>
#include <mutex>

#include "elastoborn/calculus.hpp"
#include "elastoborn/error.hpp"
#include "elastoborn/parallel.hpp"
#include "fft.hpp"

namespace elastoborn {

using detail::cplx;

std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m) {
    const int n = int(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k > 0; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k > 0; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

namespace detail {

// (i k~)^order along one axis with the Nyquist policy applied.
std::vector<cplx> axis_factor(int N, double h, int order, Nyquist nyq) {
    std::vector<cplx> f(N, 1.0);
    if (order == 0) return f;
    bool drop = nyq == Nyquist::band_limited || order % 2 == 1;
    for (int j = 0; j < N; ++j) {
        double k = detail::wavenumber(j, N, h);
        if (j == N / 2 && drop) k = 0.0;
        f[j] = std::pow(cplx(0.0, k), order);
    }
    return f;
}

}  // namespace detail

using detail::axis_factor;

namespace {

struct Stencil {
    std::vector<int> start;
    std::vector<std::vector<double>> w;
};

// m-th derivative, 6th order: 2p+1 centered points with p = 3 + (m-1)/2,
// 2p+2 one-sided points within p nodes of a face. Weights in units of h^-m.
const Stencil& stencil(int N, int m) {
    static std::map<std::pair<int, int>, Stencil> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(N, m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const int p = 3 + (m - 1) / 2;
    if (N < 2 * p + 2) throw Error("grid too small for fd stencil of order " + std::to_string(m));
    Stencil s;
    s.start.resize(N);
    s.w.resize(N);
    for (int i = 0; i < N; ++i) {
        int b, n;
        if (i < p) b = 0, n = 2 * p + 2;
        else if (i >= N - p) b = N - 2 * p - 2, n = 2 * p + 2;
        else b = i - p, n = 2 * p + 1;
        std::vector<double> xs(n);
        for (int k = 0; k < n; ++k) xs[k] = b + k;
        s.start[i] = b;
        s.w[i] = fornberg_weights(double(i), xs, m);
    }
    return cache.emplace(key, std::move(s)).first->second;
}

void fd_axis(const std::vector<double>& in, std::vector<double>& out, int N, int axis, int m, double h) {
    const Stencil& st = stencil(N, m);
    const double scale = std::pow(h, -m);
    const std::size_t NN = std::size_t(N) * N;
    const std::size_t stride = axis == 0 ? NN : (axis == 1 ? std::size_t(N) : 1);
    parallel_for(NN, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t line = b0; line < b1; ++line) {
            std::size_t a = line / N, b = line % N, base;
            if (axis == 0) base = a * N + b;
            else if (axis == 1) base = a * NN + b;
            else base = (a * N + b) * N;
            for (int i = 0; i < N; ++i) {
                const auto& w = st.w[i];
                std::size_t j0 = base + std::size_t(st.start[i]) * stride;
                double acc = 0.0;
                for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * in[j0 + k * stride];
                out[base + i * stride] = acc * scale;
            }
        }
    });
}

void require_periodic(const ScalarField& f) {
    if (f.support != Support::compact) throw Error("non-periodic field: spectral backend needs a compact-in-omega input");
}

ScalarField diff_spectral(const ScalarField& f, const MultiIndex& beta, Nyquist nyq) {
    require_periodic(f);
    const int N = f.grid.N;
    auto c = detail::to_complex(f);
    int naxes = 0;
    for (int a = 0; a < 3; ++a) {
        if (beta[a] == 0) continue;
        ++naxes;
        detail::fft1_axis(c, N, a, false);
        auto fac = axis_factor(N, f.grid.h(), beta[a], nyq);
        const std::size_t st = f.grid.stride(a);
        parallel_for(c.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) c[i] *= fac[(i / st) % N];
        });
        detail::fft1_axis(c, N, a, true);
    }
    ScalarField out(f.grid, f.support);
    detail::from_complex(c, out, 1.0 / std::pow(double(N), naxes));
    return out;
}

ScalarField diff_fd(const ScalarField& f, const MultiIndex& beta) {
    std::vector<double> cur = f.v, tmp(f.size());
    for (int a = 0; a < 3; ++a) {
        if (beta[a] == 0) continue;
        fd_axis(cur, tmp, f.grid.N, a, beta[a], f.grid.h());
        cur.swap(tmp);
    }
    ScalarField out(f.grid, f.support);
    out.v = std::move(cur);
    return out;
}

}  // namespace

ScalarField diff(const ScalarField& f, const MultiIndex& beta, Backend backend, Nyquist nyq) {
    for (int b : beta)
        if (b < 0) throw Error("negative derivative order");
    if (beta == MultiIndex{0, 0, 0}) return f;
    return backend == Backend::spectral ? diff_spectral(f, beta, nyq) : diff_fd(f, beta);
}

ScalarField laplacian(const ScalarField& f, Backend backend, Nyquist nyq) {
    return apply_symbol(f, SymbolPolynomial::laplacian(), backend, nyq);
}

ScalarField apply_symbol(const ScalarField& f, const SymbolPolynomial& p, Backend backend, Nyquist nyq) {
    if (backend == Backend::fd) {
        ScalarField out(f.grid, f.support);
        for (const auto& [b, c] : p.terms()) out.axpy(c, diff_fd(f, b));
        out.support = f.support;
        return out;
    }
    require_periodic(f);
    const Grid& g = f.grid;
    const int N = g.N;
    int maxo = 0;
    for (const auto& t : p.terms())
        for (int b : t.first) maxo = std::max(maxo, b);
    std::vector<std::vector<cplx>> fac(maxo + 1);
    for (int o = 0; o <= maxo; ++o) fac[o] = axis_factor(N, g.h(), o, nyq);
    auto c = detail::to_complex(f);
    detail::fft3(c, N, false);
    parallel_for(std::size_t(N) * N, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t l = b0; l < b1; ++l) {
            int i1 = int(l / N), i2 = int(l % N);
            for (int i3 = 0; i3 < N; ++i3) {
                cplx s = 0.0;
                for (const auto& [b, cf] : p.terms()) s += cf * fac[b[0]][i1] * fac[b[1]][i2] * fac[b[2]][i3];
                c[l * N + i3] *= s;
            }
        }
    });
    detail::fft3(c, N, true);
    ScalarField out(g, f.support);
    detail::from_complex(c, out, 1.0 / (double(N) * N * N));
    return out;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

namespace {

double sum_sq(const ScalarField& f, Region region) {
    const Grid& g = f.grid;
    const int N = g.N;
    return ordered_sum(f.size(), [&](std::size_t i) {
        if (region == Region::omega) {
            double x = g.x(int(i / (std::size_t(N) * N))), y = g.x(int((i / N) % N)), z = g.x(int(i % N));
            if (x * x + y * y + z * z >= 1.0) return 0.0;
        }
        return f.v[i] * f.v[i];
    });
}

ScalarField hs_weighted(const ScalarField& f, double s) {
    const Grid& g = f.grid;
    const int N = g.N;
    auto c = detail::to_complex(f);
    detail::fft3(c, N, false);
    std::vector<double> k2(N);
    for (int j = 0; j < N; ++j) {
        double k = detail::wavenumber(j, N, g.h());
        k2[j] = k * k;
    }
    parallel_for(c.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            double m = 1.0 + k2[i / (std::size_t(N) * N)] + k2[(i / N) % N] + k2[i % N];
            c[i] *= std::pow(m, 0.5 * s);
        }
    });
    detail::fft3(c, N, true);
    ScalarField out(g, f.support);
    detail::from_complex(c, out, 1.0 / (double(N) * N * N));
    return out;
}

}  // namespace

double norm(const ScalarField& f, NormKind kind, Region region) {
    double h3 = std::pow(f.grid.h(), 3);
    if (kind.type == NormKind::Hs && kind.s != 0.0) return std::sqrt(h3 * sum_sq(hs_weighted(f, kind.s), region));
    return std::sqrt(h3 * sum_sq(f, region));
}

double norm(const VectorField& f, NormKind kind, Region region) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        double n = norm(f[a], kind, region);
        s += n * n;
    }
    return std::sqrt(s);
}

double inner(const ScalarField& a, const ScalarField& b, Region region) {
    const Grid& g = a.grid;
    const int N = g.N;
    double s = ordered_sum(a.size(), [&](std::size_t i) {
        if (region == Region::omega) {
            double x = g.x(int(i / (std::size_t(N) * N))), y = g.x(int((i / N) % N)), z = g.x(int(i % N));
            if (x * x + y * y + z * z >= 1.0) return 0.0;
        }
        return a.v[i] * b.v[i];
    });
    return s * std::pow(g.h(), 3);
}

double rel_error(const ScalarField& a, const ScalarField& b, Region region) {
    double d = norm(a - b, {}, region), n = norm(b, {}, region);
    return n > 0.0 ? d / n : d;
}

double rel_error(const VectorField& a, const VectorField& b, Region region) {
    double d = norm(a - b, {}, region), n = norm(b, {}, region);
    return n > 0.0 ? d / n : d;
}

}  // namespace elastoborn
