#include <cmath>
#include <sstream>

#include "elastoborn/calculus.hpp"
#include "elastoborn/error.hpp"
#include "elastoborn/parallel.hpp"
#include "fft.hpp"

namespace elastoborn {

using detail::cplx;

double smooth_taper(double r, double r0, double r1) {
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    double s = (r - r0) / (r1 - r0);
    double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
}

double invert_residual(const ScalarField& u, const ScalarField& g, const SymbolPolynomial& p, Nyquist nyq) {
    ScalarField pu = u;
    pu.support = Support::compact;
    return rel_error(apply_symbol(pu, p, Backend::spectral, nyq), g, Region::omega);
}

ScalarField invert_symbol(const ScalarField& g, const SymbolPolynomial& p, const InvertOptions& opt) {
    if (!p.elliptic()) throw Error("not elliptic: " + p.to_string());
    const Grid& gr = g.grid;
    const int N = gr.N;
    if (g.is_zero()) return ScalarField(gr, Support::compact);

    auto c = detail::to_complex(g);
    if (opt.truncate_radius > 0.0) {
        const double r2 = opt.truncate_radius * opt.truncate_radius;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k) {
                    double x = gr.x(i), y = gr.x(j), z = gr.x(k);
                    if (x * x + y * y + z * z > r2) c[gr.index(i, j, k)] = 0.0;
                }
    }
    detail::fft3(c, N, false);

    int maxo = 0;
    for (const auto& t : p.terms())
        for (int b : t.first) maxo = std::max(maxo, b);
    std::vector<std::vector<cplx>> fac(maxo + 1);
    for (int o = 0; o <= maxo; ++o) fac[o] = detail::axis_factor(N, gr.h(), o, opt.nyquist);
    parallel_for(std::size_t(N) * N, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t l = b0; l < b1; ++l) {
            int i1 = int(l / N), i2 = int(l % N);
            for (int i3 = 0; i3 < N; ++i3) {
                cplx s = 0.0;
                for (const auto& [b, cf] : p.terms()) s += cf * fac[b[0]][i1] * fac[b[1]][i2] * fac[b[2]][i3];
                std::size_t idx = l * N + i3;
                c[idx] = (idx == 0 || std::abs(s) == 0.0) ? cplx(0.0) : c[idx] / s;
            }
        }
    });
    detail::fft3(c, N, true);
    ScalarField u(gr, Support::compact);
    detail::from_complex(c, u, 1.0 / (double(N) * N * N));

    // constant mode: zero mean over the outer shell
    const double edge = gr.L - 4.0 * gr.h();
    double sum = 0.0;
    std::size_t cnt = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                double m = std::max({std::abs(gr.x(i)), std::abs(gr.x(j)), std::abs(gr.x(k))});
                if (m >= edge - 1e-12) {
                    sum += u.v[gr.index(i, j, k)];
                    ++cnt;
                }
            }
    const double mean = sum / double(cnt);
    for (double& x : u.v) x -= mean;

    if (opt.taper_radius > 1.0) {
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k) {
                    double x = gr.x(i), y = gr.x(j), z = gr.x(k);
                    u.v[gr.index(i, j, k)] *= smooth_taper(std::sqrt(x * x + y * y + z * z), 1.0, opt.taper_radius);
                }
    }

    if (opt.residual_tol > 0.0) {
        double r = invert_residual(u, g, p, opt.nyquist);
        if (!(r <= opt.residual_tol)) {
            std::ostringstream os;
            os << "residual too large: " << r << " > " << opt.residual_tol << " for " << p.to_string();
            throw Error(os.str());
        }
    }
    return u;
}

}  // namespace elastoborn
