#include "elastoborn/iso.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "elastoborn/bump.hpp"
#include "elastoborn/error.hpp"
#include "elastoborn/parallel.hpp"

namespace elastoborn {

namespace {

using Poly = SymbolPolynomial;

Poly d(int a, int n = 1) {
    MultiIndex b{0, 0, 0};
    b[a] = n;
    return Poly::partial(b);
}

const Poly& lap() {
    static const Poly p = Poly::laplacian();
    return p;
}

Poly L(const Axis& th) { return Poly::directional(th); }

// (a x grad)_i = e_ijk a_j d_k
std::array<Poly, 3> cross_grad(const Axis& a) {
    std::array<Poly, 3> out;
    const auto v = a.vec();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int e = levi(i, j, k);
                if (e && v[j] != 0.0) out[i] = out[i] + d(k) * (e * v[j]);
            }
    return out;
}

std::array<double, 3> cross(const Axis& a, const Axis& b) {
    const auto u = a.vec(), v = b.vec();
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

ScalarField apply(const ScalarField& f, const Poly& p, const DataFunctionalOptions& opt) {
    if (p.terms().empty() || f.is_zero()) return ScalarField(f.grid);
    return apply_symbol(f, p, opt.backend, opt.nyquist);
}

ScalarField lap_fd(const ScalarField& f) { return laplacian(f, Backend::fd); }

// F0 + (lap/2) L^-1 F1 + ((lap/2) L^-1)^2 F2, fd Laplacians on ray-integrated fields
ScalarField combine_sources(const ScalarField& F0, const ScalarField& F1, const ScalarField& F2, const Axis& th,
                            RayRule rule) {
    ScalarField out = F0;
    if (rule == RayRule::upwind) {
        // Horner form: (lap/2) L^-1 [F1 + (lap/2) L^-1 F2]
        ScalarField inner = F1 + 0.5 * lap_fd(ray_antiderivative(F2, th, rule));
        out += 0.5 * lap_fd(ray_antiderivative(inner, th, rule));
    } else {
        out += 0.5 * lap_fd(ray_antiderivative(F1, th, rule));
        out += 0.25 * lap_fd(lap_fd(ray_antiderivative2(F2, th, rule)));
    }
    out.support = Support::upstream;
    return out;
}

constexpr int kStencilHalfWidth = 3;  // second-derivative fd stencil
static_assert(kDataMaskMargin == 2 * kStencilHalfWidth);

void require_compact(const ScalarField& f, const char* name) {
    if (f.support != Support::compact) throw Error(std::string(name) + " must be compact-in-omega");
}

void require_same(const Grid& a, const Grid& b) {
    if (a != b) throw Error("grid mismatch between lambda, mu and rho");
}

}  // namespace

std::vector<unsigned char> interior_mask(const Grid& g, int margin) {
    const int N = g.N;
    std::vector<unsigned char> m(g.size(), 0);
    for (int i = margin; i < N - margin; ++i)
        for (int j = margin; j < N - margin; ++j)
            for (int k = margin; k < N - margin; ++k) m[g.index(i, j, k)] = 1;
    return m;
}

bool mask_covers(const Grid& g, const std::vector<unsigned char>& mask, double radius) {
    const int N = g.N;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                double r2 = g.x(i) * g.x(i) + g.x(j) * g.x(j) + g.x(k) * g.x(k);
                if (r2 <= radius * radius && !mask[g.index(i, j, k)]) return false;
            }
    return true;
}

SourceTriple p_sources(const ScalarField& lam, const ScalarField& mu, const ScalarField& rho, const Background& bg,
                       const Axis& th, const DataFunctionalOptions& opt) {
    require_same(lam.grid, mu.grid);
    require_same(lam.grid, rho.grid);
    require_compact(lam, "lambda");
    require_compact(mu, "mu");
    require_compact(rho, "rho");
    const double cp2 = bg.cp2();
    const Poly Lt = L(th);
    SourceTriple s;
    s.kind = Mode::P;
    s.F[0] = -1.0 * (apply(lam, lap(), opt) + apply(mu, 2.0 * Lt * Lt, opt));
    s.F[1] = apply(2.0 * lam + 4.0 * mu - cp2 * rho, Lt, opt);
    s.F[2] = -1.0 * (lam + 2.0 * mu - cp2 * rho);
    for (auto& f : s.F) f.support = Support::compact;
    return s;
}

SourceTriple s_sources(const ScalarField& lam, const ScalarField& mu, const ScalarField& rho, const Background& bg,
                       const Axis& th, const Axis& al, const DataFunctionalOptions& opt) {
    require_same(lam.grid, mu.grid);
    require_same(lam.grid, rho.grid);
    require_compact(mu, "mu");
    require_compact(rho, "rho");
    if (th.axis == al.axis) throw Error("alpha must be orthogonal to theta");
    const Grid& g = mu.grid;
    const ScalarField nu = mu - bg.cs2() * rho;
    const auto tg = cross_grad(th), ag = cross_grad(al);
    const auto txa = cross(th, al);
    const double s2 = opt.g2 == G2Orientation::theta_cross_alpha ? 1.0 : -1.0;
    SourceTriple s;
    s.kind = Mode::S;
    for (auto& G : s.G) G = VectorField(g);
    for (int i = 0; i < 3; ++i) {
        // G0 = -[(th x grad)(al.grad) + (al x grad)(th.grad)] mu
        s.G[0][i] = apply(mu, -1.0 * (tg[i] * L(al) + ag[i] * L(th)), opt);
        // G1 = (th x al)(th.grad) mu - (al x grad) nu
        s.G[1][i] = apply(mu, L(th) * txa[i], opt) - apply(nu, ag[i], opt);
        // G2 = s (th x al) nu
        s.G[2][i] = (s2 * txa[i]) * nu;
        for (int r = 0; r < 3; ++r) s.G[r][i].support = Support::compact;
    }
    return s;
}

DataFunctional data_functional_p(const ScalarField& lam, const ScalarField& mu, const ScalarField& rho,
                                 const Background& bg, const Axis& th, const DataFunctionalOptions& opt) {
    DataFunctional D;
    D.kind = Mode::P;
    D.theta = th;
    D.options = opt;
    D.sources = p_sources(lam, mu, rho, bg, th, opt);
    const auto& F = D.sources->F;
    D.field = combine_sources(F[0], F[1], F[2], th, opt.rule);
    D.mask_margin = kDataMaskMargin;
    D.mask = interior_mask(lam.grid, D.mask_margin);
    return D;
}

DataFunctional data_functional_s(const ScalarField& lam, const ScalarField& mu, const ScalarField& rho,
                                 const Background& bg, const Axis& th, const Axis& al,
                                 const DataFunctionalOptions& opt) {
    DataFunctional D;
    D.kind = Mode::S;
    D.theta = th;
    D.alpha = al;
    D.options = opt;
    D.sources = s_sources(lam, mu, rho, bg, th, al, opt);
    const auto& G = D.sources->G;
    VectorField v(mu.grid, Support::upstream);
    for (int i = 0; i < 3; ++i) v[i] = combine_sources(G[0][i], G[1][i], G[2][i], th, opt.rule);
    D.field = std::move(v);
    D.mask_margin = kDataMaskMargin;
    D.mask = interior_mask(mu.grid, D.mask_margin);
    return D;
}

namespace {

ScalarField ltheta2(const ScalarField& F0, const ScalarField& F1, const ScalarField& F2, const Axis& th,
                    const DataFunctionalOptions& opt) {
    const Poly Lt = L(th);
    ScalarField out = apply(F0, Lt * Lt, opt);
    out += apply(F1, 0.5 * lap() * Lt, opt);
    out += apply(F2, 0.25 * lap() * lap(), opt);
    out.support = Support::compact;
    return out;
}

}  // namespace

ScalarField ltheta2_p(const DataFunctional& D) {
    if (!D.sources || D.kind != Mode::P) throw Error("ltheta2_p: P functional with sources required");
    const auto& F = D.sources->F;
    return ltheta2(F[0], F[1], F[2], D.theta, D.options);
}

VectorField ltheta2_s(const DataFunctional& D) {
    if (!D.sources || D.kind != Mode::S) throw Error("ltheta2_s: S functional with sources required");
    const auto& G = D.sources->G;
    VectorField out;
    for (int i = 0; i < 3; ++i) out[i] = ltheta2(G[0][i], G[1][i], G[2][i], D.theta, D.options);
    return out;
}

Reconstruction reconstruct(const DataFunctional& Dp, const DataFunctional& Ds, const Background& bg,
                           const ReconstructOptions& opt) {
    if (Dp.kind != Mode::P || Ds.kind != Mode::S) throw Error("reconstruct: expected a P and an S functional");
    const Axis e1{0, 1}, e2{1, 1};
    if (!(Dp.theta == e1) || !(Ds.theta == e1) || !(Ds.alpha == e2))
        throw Error("reconstruct: requires theta = e1 and alpha = e2");
    const Grid& g = Dp.scalar().grid;
    if (g != Ds.vector().grid()) throw Error("reconstruct: functionals live on different grids");

    const bool sources = opt.use_sources && Dp.sources && Ds.sources;
    const int margin = std::max(Dp.mask_margin, Ds.mask_margin) + (sources ? 0 : kStencilHalfWidth);
    auto mask = interior_mask(g, margin);
    if (!mask_covers(g, mask, 1.2)) {
        std::ostringstream os;
        os << "mask too small: valid region (margin " << margin << " nodes at N = " << g.N
           << ") does not cover 1.2*omega";
        throw Error(os.str());
    }

    Reconstruction R;
    const double cs2 = bg.cs2(), cp2 = bg.cp2();
    const Nyquist nyq = opt.invert.nyquist;
    auto ap = [&](const ScalarField& f, const Poly& p) { return apply_symbol(f, p, Backend::spectral, nyq); };

    // stage 1: the alpha component of D_s is d2 d3 mu
    ScalarField ds2 = Ds.vector()[1];
    ds2.support = Support::compact;
    if (opt.periodic_stage1) {
        R.mu = antiderivative_periodic(antiderivative_periodic(ds2, 1), 2);
    } else {
        R.mu = double_antiderivative(ds2, {1, 2}, RayRule::upwind, &R.warnings);
    }
    R.mu.support = Support::compact;
    if (opt.mu_taper_radius > 1.0) {
        for (int i = 0; i < g.N; ++i)
            for (int j = 0; j < g.N; ++j)
                for (int k = 0; k < g.N; ++k) {
                    double r = std::sqrt(g.x(i) * g.x(i) + g.x(j) * g.x(j) + g.x(k) * g.x(k));
                    R.mu.at(i, j, k) *= smooth_taper(r, 1.0, opt.mu_taper_radius);
                }
    }

    // d1^2 of the data
    ScalarField l2p;
    ScalarField l2s3;
    if (sources) {
        l2p = ltheta2_p(Dp);
        l2s3 = ltheta2_s(Ds)[2];
    } else {
        l2p = diff(Dp.scalar(), {2, 0, 0}, Backend::fd);
        l2s3 = diff(Ds.vector()[2], {2, 0, 0}, Backend::fd);
        for (std::size_t n = 0; n < l2p.size(); ++n)
            if (!mask[n]) l2p[n] = l2s3[n] = 0.0;
    }
    l2p.support = l2s3.support = Support::compact;

    // stage 2: third component carries (d1^2 + s lap/2)(lap/2)(-c_s^2 rho)
    const double s2 = Ds.options.g2 == G2Orientation::theta_cross_alpha ? 1.0 : -1.0;
    const Poly d11 = d(0, 2), d22 = d(1, 2);
    const Poly A_mu = d11 * d11 - d11 * d22 + lap() * d11 + 0.25 * s2 * lap() * lap();
    const Poly P_rho = (d11 + 0.5 * s2 * lap()) * (0.5 * lap());
    ScalarField g2 = l2s3 - ap(R.mu, A_mu);
    R.rho = (-1.0 / cs2) * invert_symbol(g2, P_rho, opt.invert);

    // stage 3: d1^2 D_p = -lap^2/4 lambda + mu and rho terms
    const Poly B_mu = 2.0 * (d11 * lap() - d11 * d11 - 0.25 * lap() * lap());
    const Poly B_rho = cp2 * (0.25 * lap() * lap() - 0.5 * lap() * d11);
    ScalarField hs = l2p - ap(R.mu, B_mu) - ap(R.rho, B_rho);
    R.lambda = invert_symbol(-4.0 * hs, Poly::bilaplacian(), opt.invert);
    return R;
}

TripleErrors triple_errors(const Reconstruction& r, const ScalarField& lam, const ScalarField& mu,
                           const ScalarField& rho) {
    return {rel_error(r.lambda, lam), rel_error(r.mu, mu), rel_error(r.rho, rho)};
}

IsoTriple random_triple(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    IsoTriple t;
    t.lambda = bump_field(g, random_bumps(rng));
    t.mu = bump_field(g, random_bumps(rng));
    t.rho = bump_field(g, random_bumps(rng));
    return t;
}

double masked_sobolev_norm(const ScalarField& f, int s, const std::vector<unsigned char>& mask) {
    const Grid& g = f.grid;
    const auto ball = ball_mask(g, 1.0);
    double total = 0.0;
    for (int a = 0; a <= s; ++a)
        for (int b = 0; a + b <= s; ++b)
            for (int c = 0; a + b + c <= s; ++c) {
                const int k = a + b + c;
                double w = std::tgamma(k + 1.0) / (std::tgamma(a + 1.0) * std::tgamma(b + 1.0) * std::tgamma(c + 1.0));
                ScalarField df = k ? diff(f, {a, b, c}, Backend::fd) : f;
                double acc = 0.0;
                for (std::size_t n = 0; n < df.size(); ++n)
                    if (mask[n] && ball[n]) acc += df[n] * df[n];
                total += w * acc;
            }
    const double h = g.h();
    return std::sqrt(total * h * h * h);
}

double masked_sobolev_norm(const VectorField& f, int s, const std::vector<unsigned char>& mask) {
    double t = 0.0;
    for (int i = 0; i < 3; ++i) {
        double n = masked_sobolev_norm(f[i], s, mask);
        t += n * n;
    }
    return std::sqrt(t);
}

StabilitySample stability_sample(const IsoTriple& t, const Background& bg, const DataFunctionalOptions& opt) {
    auto ratio = [&](const ScalarField& lam, const ScalarField& mu, const ScalarField& rho, double& in, double& dn) {
        in = norm(lam, NormKind::hs(4)) + norm(mu, NormKind::hs(4)) + norm(rho, NormKind::hs(4));
        auto Dp = data_functional_p(lam, mu, rho, bg, {0, 1}, opt);
        auto Ds = data_functional_s(lam, mu, rho, bg, {0, 1}, {1, 1}, opt);
        dn = masked_sobolev_norm(Dp.scalar(), 4, Dp.mask) + masked_sobolev_norm(Ds.vector(), 4, Ds.mask);
        return dn > 0.0 ? in / dn : INFINITY;
    };
    StabilitySample s;
    s.ratio = ratio(t.lambda, t.mu, t.rho, s.input_norm, s.data_norm);
    double i7, d7;
    s.scaled_ratio = ratio(7.0 * t.lambda, 7.0 * t.mu, 7.0 * t.rho, i7, d7);
    return s;
}

StabilityReport stability_ratio(int sample_count, std::uint64_t seed, const Background& bg, const Grid& g,
                                const DataFunctionalOptions& opt) {
    if (sample_count < 10) throw Error("stability: at least 10 samples required");
    StabilityReport rep;
    std::vector<double> r;
    rep.min_data_to_input = INFINITY;
    std::vector<StabilitySample> all(sample_count);
    parallel_for(all.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const std::uint64_t sd = seed + std::uint64_t(k);
            all[k] = stability_sample(random_triple(g, sd), bg, opt);
            all[k].seed = sd;
        }
    });
    for (const auto& s : all) {
        r.push_back(s.ratio);
        rep.max_homogeneity_dev = std::max(rep.max_homogeneity_dev, std::abs(s.scaled_ratio - s.ratio) / s.ratio);
        rep.min_data_to_input = std::min(rep.min_data_to_input, s.data_norm / s.input_norm);
        rep.samples.push_back(s);
    }
    std::sort(r.begin(), r.end());
    rep.max_ratio = r.back();
    const std::size_t n = r.size();
    rep.median_ratio = n % 2 ? r[n / 2] : 0.5 * (r[n / 2 - 1] + r[n / 2]);
    return rep;
}

Eigen::MatrixXcd iso_symbol_matrix(const FrequencySample& s, const Background& bg, G2Orientation g2) {
    const double cp2 = bg.cp2(), cs2 = bg.cs2();
    const double sg = g2 == G2Orientation::theta_cross_alpha ? 1.0 : -1.0;
    const Poly d11 = d(0, 2), d22 = d(1, 2), D = lap();
    const Poly d13 = d(0) * d(2);
    std::array<std::array<Poly, 3>, 4> rows;
    rows[0] = {-0.25 * D * D, 2.0 * (d11 * D - d11 * d11 - 0.25 * D * D), cp2 * (0.25 * D * D - 0.5 * D * d11)};
    rows[1] = {Poly(), -1.0 * (d11 * d13 + 0.5 * D * d13), 0.5 * cs2 * d13 * D};
    rows[2] = {Poly(), d11 * d(1) * d(2), Poly()};
    rows[3] = {Poly(), d11 * d11 - d11 * d22 + D * d11 + 0.25 * sg * D * D, -cs2 * (d11 + 0.5 * sg * D) * (0.5 * D)};
    Eigen::MatrixXcd M(4, 3);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c) M(r, c) = rows[r][c](s.xi);
    return M;
}

}  // namespace elastoborn
