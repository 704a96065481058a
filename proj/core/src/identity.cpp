#include "elastoborn/identity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "elastoborn/error.hpp"
#include "elastoborn/parallel.hpp"

namespace elastoborn {

std::string param_name(int col) {
    if (col == kVoigtSlots) return "rho";
    auto [A, B] = slot_pair(col);
    return "c" + std::to_string(A + 1) + std::to_string(B + 1);
}

bool guard_ok(const FrequencySample& s, double delta) {
    double r = std::sqrt(s.xi[0] * s.xi[0] + s.xi[1] * s.xi[1] + s.xi[2] * s.xi[2]);
    if (!(r > 0.0)) return false;
    for (double x : s.xi)
        if (std::abs(x) < delta * r) return false;
    return true;
}

namespace {

using Poly = SymbolPolynomial;
using SVec = std::array<Poly, 3>;
using Row = std::array<Poly, kParams>;

bool empty(const Poly& p) { return p.terms().empty(); }

SVec const_vec(const Axis& a) {
    SVec v;
    v[a.axis] = Poly::constant(a.sign);
    return v;
}

SVec grad_vec() {
    return {Poly::partial({1, 0, 0}), Poly::partial({0, 1, 0}), Poly::partial({0, 0, 1})};
}

// u_p = e_ipq w_q for a fixed i
SVec levi_vec(int i, const SVec& w) {
    SVec u;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
            int e = levi(i, p, q);
            if (e && !empty(w[q])) u[p] = u[p] + w[q] * double(e);
        }
    return u;
}

Poly dot(const SVec& a, const SVec& b) {
    Poly s;
    for (int i = 0; i < 3; ++i)
        if (!empty(a[i]) && !empty(b[i])) s = s + a[i] * b[i];
    return s;
}

// sum over all 81 index tuples of c_ijkl a_i b_j c_k d_l, resolved to storage slots
void add_contraction(Row& row, const Poly& coef, const SVec& a, const SVec& b, const SVec& c, const SVec& d) {
    std::array<Poly, kVoigtSlots> acc;
    for (int i = 0; i < 3; ++i) {
        if (empty(a[i])) continue;
        for (int j = 0; j < 3; ++j) {
            if (empty(b[j])) continue;
            Poly ab = a[i] * b[j];
            for (int k = 0; k < 3; ++k) {
                if (empty(c[k])) continue;
                Poly abc = ab * c[k];
                for (int l = 0; l < 3; ++l) {
                    if (empty(d[l])) continue;
                    int s = voigt_slot(voigt(i, j), voigt(k, l));
                    acc[s] = acc[s] + abc * d[l];
                }
            }
        }
    }
    for (int s = 0; s < kVoigtSlots; ++s)
        if (!empty(acc[s])) row[s] = row[s] + coef * acc[s];
}

void add_rho(Row& row, const Poly& p) {
    if (!empty(p)) row[kVoigtSlots] = row[kVoigtSlots] + p;
}

// zero data in the pp channel: w0 = 0
Row pp_row(const Background& bg, const Axis& th) {
    const double cp2 = bg.cp2();
    const SVec T = const_vec(th), K = grad_vec();
    const Poly L = Poly::directional(th), D = Poly::laplacian();
    Row r;
    add_contraction(r, 4.0 * L * L, K, K, T, T);
    add_contraction(r, D * D, T, T, T, T);
    add_contraction(r, -4.0 * L * D, K, T, T, T);
    add_rho(r, -cp2 * D * D + 2.0 * cp2 * L * L * D);
    return r;
}

// zero data in the sp channel: w0 = w-1 = 0
Row spa_row(const Background& bg, const Axis& th, const Axis& al) {
    const double cp2 = bg.cp2(), cs2 = bg.cs2();
    const SVec T = const_vec(th), A = const_vec(al), K = grad_vec();
    const Poly L = Poly::directional(th);
    Row r;
    add_contraction(r, 2.0 * cp2 / (cp2 - cs2) * L, T, T, T, A);
    add_contraction(r, Poly::constant(-2.0), K, T, T, A);
    add_rho(r, cs2 * Poly::directional(al));
    return r;
}

Row spb_row(const Background& bg, const Axis& th, const Axis& al) {
    const double cp2 = bg.cp2(), cs2 = bg.cs2();
    const SVec T = const_vec(th), A = const_vec(al), K = grad_vec();
    Row r;
    add_contraction(r, cp2 / (cp2 - cs2) * Poly::laplacian(), T, T, T, A);
    add_contraction(r, Poly::constant(-1.0), K, K, T, A);
    return r;
}

// zero data in the ps channel: w0 = w-1 = 0, component i of the curl
Row psa_row(const Background& bg, const Axis& th, int i) {
    const double cp2 = bg.cp2(), cs2 = bg.cs2();
    const SVec T = const_vec(th), K = grad_vec();
    const SVec u = levi_vec(i, T), uK = levi_vec(i, K);
    const Poly L = Poly::directional(th);
    Row r;
    add_contraction(r, -2.0 * cs2 / (cp2 - cs2) * L, u, T, T, T);
    add_contraction(r, Poly::constant(-1.0), uK, T, T, T);
    add_contraction(r, Poly::constant(-1.0), u, K, T, T);
    add_rho(r, cp2 * dot(uK, T));
    return r;
}

Row psb_row(const Background& bg, const Axis& th, int i) {
    const double cp2 = bg.cp2(), cs2 = bg.cs2();
    const SVec T = const_vec(th), K = grad_vec();
    const SVec u = levi_vec(i, T), uK = levi_vec(i, K);
    Row r;
    add_contraction(r, cs2 / (cp2 - cs2) * Poly::laplacian(), u, T, T, T);
    add_contraction(r, Poly::constant(1.0), uK, K, T, T);
    return r;
}

// zero data in the ss channel: trace of v' vanishes, component i
Row ss_row(const Background& bg, const Axis& th, const Axis& al, int i) {
    const double cs2 = bg.cs2();
    const SVec T = const_vec(th), A = const_vec(al), K = grad_vec();
    const SVec u = levi_vec(i, T), uK = levi_vec(i, K);
    const Poly L = Poly::directional(th), D = Poly::laplacian();
    Row r;
    add_contraction(r, 4.0 * L * L, uK, K, T, A);
    add_contraction(r, D * D, u, T, T, A);
    add_contraction(r, -2.0 * L * D, uK, T, T, A);
    add_contraction(r, -2.0 * L * D, u, K, T, A);
    add_rho(r, -cs2 * D * D * dot(u, A) + 2.0 * cs2 * L * D * dot(uK, A));
    return r;
}

const std::array<Permutation, 6> kPerms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};

std::string perm_label(const Permutation& p) {
    return std::to_string(p[0] + 1) + std::to_string(p[1] + 1) + std::to_string(p[2] + 1);
}

std::string ax(const Axis& a) { return "e" + std::to_string(a.axis + 1); }

}  // namespace

std::vector<IdentityRow> identity_rows(const Background& bg, const IdentityOptions& opt) {
    std::vector<IdentityRow> rows;
    std::set<std::tuple<std::string, int, int, int>> seen;
    auto push = [&](const std::string& fam, const Axis& th, const Axis& al, int comp, const Permutation& p, Row ops) {
        if (!seen.insert({fam, th.axis, al.axis, comp}).second) return;
        IdentityRow r;
        r.family = fam;
        r.theta = th;
        r.alpha = al;
        r.component = comp;
        std::string l = fam;
        if (comp >= 0) l += "_" + std::to_string(comp + 1);
        l += "(" + ax(th);
        if (fam != "PP" && fam.substr(0, 2) != "PS") l += "," + ax(al);
        l += ")[" + perm_label(p) + "]";
        r.label = l;
        r.ops = std::move(ops);
        rows.push_back(std::move(r));
    };
    // templates theta = e1, alpha = e2 and components i = 1, 2, 3, moved by sigma
    for (const auto& p : kPerms) {
        const Axis th{p[0], 1}, al{p[1], 1};
        if (opt.include_pp) push("PP", th, Axis{}, -1, p, pp_row(bg, th));
        if (opt.include_sp) {
            push("SPa", th, al, -1, p, spa_row(bg, th, al));
            push("SPb", th, al, -1, p, spb_row(bg, th, al));
        }
        for (int i = 0; i < 3; ++i) {
            const int ci = p[i];
            if (opt.include_ps) {
                push("PSa", th, Axis{}, ci, p, psa_row(bg, th, ci));
                push("PSb", th, Axis{}, ci, p, psb_row(bg, th, ci));
            }
            if (opt.include_ss) push("SS", th, al, ci, p, ss_row(bg, th, al, ci));
        }
    }
    return rows;
}

Eigen::MatrixXcd SymbolMatrix::normalized() const { return scale.asDiagonal() * M; }

SymbolMatrix symbol_matrix(const FrequencySample& s, const std::vector<IdentityRow>& rows) {
    if (!guard_ok(s)) {
        std::ostringstream os;
        os << "degenerate frequency: xi = (" << s.xi[0] << ", " << s.xi[1] << ", " << s.xi[2]
           << ") fails the coordinate-plane guard";
        throw Error(os.str());
    }
    SymbolMatrix S;
    const int m = int(rows.size());
    S.M.resize(m, kParams);
    S.scale.resize(m);
    for (int r = 0; r < m; ++r) {
        double sup = 0.0;
        for (int c = 0; c < kParams; ++c) {
            S.M(r, c) = rows[r].ops[c](s.xi);
            sup = std::max(sup, std::abs(S.M(r, c)));
        }
        S.scale(r) = sup > 0.0 ? 1.0 / sup : 1.0;
        S.labels.push_back(rows[r].label);
    }
    return S;
}

SymbolMatrix symbol_matrix(const FrequencySample& s, const Background& bg, const IdentityOptions& opt) {
    return symbol_matrix(s, identity_rows(bg, opt));
}

double sigma_min(const Eigen::MatrixXcd& A) {
    if (A.rows() < A.cols()) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues().minCoeff();
}

namespace {

// First two Sobol dimensions: van der Corput and the x + 1 polynomial.
struct Sobol2 {
    std::array<std::uint32_t, 32> v1{}, v2{};
    std::uint32_t x1 = 0, x2 = 0;
    std::uint32_t n = 0;
    Sobol2() {
        std::uint32_t m = 1;
        for (int k = 0; k < 32; ++k) {
            v1[k] = 1u << (31 - k);
            if (k > 0) m = (m << 1) ^ m;
            v2[k] = m << (31 - k);
        }
    }
    // gray-code update; the first call returns point 1 (point 0 is the origin)
    std::pair<std::uint32_t, std::uint32_t> next() {
        int c = 0;
        while ((n >> c) & 1u) ++c;
        x1 ^= v1[c];
        x2 ^= v2[c];
        ++n;
        return {x1, x2};
    }
};

}  // namespace

std::vector<FrequencySample> sphere_samples(int count, std::uint64_t seed, double radius) {
    std::mt19937_64 rng(seed);
    // digital shift
    const std::uint32_t s1 = std::uint32_t(rng() >> 32), s2 = std::uint32_t(rng() >> 32);
    Sobol2 sob;
    std::vector<FrequencySample> out;
    const double inv = 1.0 / 4294967296.0;
    while (int(out.size()) < count) {
        auto [a, b] = sob.next();
        double u = ((a ^ s1) + 0.5) * inv, v = ((b ^ s2) + 0.5) * inv;
        double z = 1.0 - 2.0 * u, r = std::sqrt(std::max(0.0, 1.0 - z * z)), phi = 2.0 * M_PI * v;
        FrequencySample fs{{radius * r * std::cos(phi), radius * r * std::sin(phi), radius * z}};
        if (guard_ok(fs)) out.push_back(fs);
    }
    return out;
}

KernelReport kernel_certificate(const std::vector<FrequencySample>& samples, const Background& bg, double tolerance,
                                const IdentityOptions& opt) {
    if (int(samples.size()) < kMinKernelSamples)
        throw Error("kernel certificate needs at least " + std::to_string(kMinKernelSamples) + " samples");
    for (const auto& s : samples)
        if (!guard_ok(s)) throw Error("degenerate frequency in kernel sample set");
    const auto rows = identity_rows(bg, opt);
    KernelReport rep;
    rep.tolerance = tolerance;
    rep.rows = int(rows.size());
    rep.samples.resize(samples.size());
    parallel_for(samples.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            rep.samples[i].xi = samples[i];
            rep.samples[i].sigma_min = sigma_min(symbol_matrix(samples[i], rows).normalized());
        }
    });
    rep.min_sigma = INFINITY;
    for (const auto& s : rep.samples) rep.min_sigma = std::min(rep.min_sigma, s.sigma_min);
    if (samples.empty()) rep.min_sigma = 0.0;
    rep.pass = !samples.empty() && rep.min_sigma > tolerance;
    return rep;
}

namespace {

int col(int A, int B) { return voigt_slot(A - 1, B - 1); }

Eigen::VectorXcd unit(int c) {
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(kParams);
    t(c) = 1.0;
    return t;
}

}  // namespace

std::vector<EliminationStep> elimination_targets(const FrequencySample& s, const Background& bg) {
    std::vector<EliminationStep> st;
    auto add = [&](std::string name, Eigen::VectorXcd t) { st.push_back({std::move(name), std::move(t), 0.0, false}); };
    const std::complex<double> I(0.0, 1.0);

    add("c1112 - c2221", unit(col(1, 6)) - unit(col(2, 6)));
    add("d1 c3221 - d2 c3112", I * s.xi[0] * unit(col(4, 6)) - I * s.xi[1] * unit(col(5, 6)));
    add("2 c1212 - cs^2 rho", 2.0 * unit(col(6, 6)) - bg.cs2() * unit(kVoigtSlots));
    add("c1212", unit(col(6, 6)));
    add("rho", unit(kVoigtSlots));
    add("c2312", unit(col(4, 6)));
    add("c3112", unit(col(5, 6)));
    add("c1112", unit(col(1, 6)));
    add("c2221", unit(col(2, 6)));
    add("c3312", unit(col(3, 6)));
    for (int A = 1; A <= 6; ++A) add("c" + std::to_string(A) + "5 (ij13)", unit(col(A, 5)));
    for (int A = 1; A <= 6; ++A) add("c" + std::to_string(A) + "4 (ij23)", unit(col(A, 4)));
    add("c1111 - c3311", unit(col(1, 1)) - unit(col(1, 3)));
    add("c1111 - c2211", unit(col(1, 1)) - unit(col(1, 2)));
    add("c1111", unit(col(1, 1)));
    add("c2211", unit(col(1, 2)));
    add("c3311", unit(col(1, 3)));
    add("c2222", unit(col(2, 2)));
    add("c3333", unit(col(3, 3)));
    add("c2233", unit(col(2, 3)));
    for (int c = 0; c < kParams; ++c) add("unit " + param_name(c), unit(c));
    return st;
}

namespace {

// Orthonormal basis of the row space of M (as columns).
Eigen::MatrixXcd rowspace_basis(const Eigen::MatrixXcd& M, double rank_tol) {
    if (M.rows() == 0) return Eigen::MatrixXcd(M.cols(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M.transpose(), Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv(rank) > rank_tol * sv(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

double projection_residual(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& t) {
    const double tn = t.norm();
    if (tn == 0.0) return 0.0;
    const Eigen::VectorXcd r = t - U * (U.adjoint() * t);
    return r.norm() / tn;
}

}  // namespace

double rowspace_residual(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& t, double rank_tol) {
    return projection_residual(rowspace_basis(M, rank_tol), t);
}

std::vector<EliminationStep> elimination_replay(const FrequencySample& s, const Background& bg,
                                                const IdentityOptions& opt, double tol) {
    const Eigen::MatrixXcd U = rowspace_basis(symbol_matrix(s, bg, opt).normalized(), 1e-10);
    auto steps = elimination_targets(s, bg);
    for (auto& st : steps) {
        st.residual = projection_residual(U, st.target);
        st.pass = st.residual <= tol;
    }
    return steps;
}

std::map<std::string, ScalarField> evaluate_zero_data_identities(const Perturbation& P, const Background& bg,
                                                                 Backend backend, const IdentityOptions& opt) {
    const auto rows = identity_rows(bg, opt);
    std::map<std::string, ScalarField> out;
    for (const auto& r : rows) {
        ScalarField f(P.grid());
        for (int c = 0; c < kParams; ++c) {
            if (r.ops[c].terms().empty()) continue;
            const ScalarField& src = c < kVoigtSlots ? P.C.slot(c) : P.rho;
            if (src.is_zero()) continue;
            f += apply_symbol(src, r.ops[c], backend);
        }
        out.emplace(r.label, std::move(f));
    }
    return out;
}

std::map<std::string, ScalarField> elimination_fields(const Perturbation& P, const Background& bg) {
    std::map<std::string, ScalarField> out;
    out.emplace("2 c1212 - cs^2 rho", 2.0 * P.C.voigt_component(6, 6) - bg.cs2() * P.rho);
    out.emplace("c1112 - c2221", P.C.voigt_component(1, 6) - P.C.voigt_component(2, 6));
    return out;
}

}  // namespace elastoborn
