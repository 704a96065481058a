#include "elastoborn/tensor.hpp"

#include <cmath>
#include <map>

#include "elastoborn/error.hpp"

namespace elastoborn {

Background::Background(double lambda, double mu) : lambda0(lambda), mu0(mu) { validate(*this); }

double Background::cp() const { return std::sqrt(cp2()); }
double Background::cs() const { return std::sqrt(cs2()); }

void validate(const Background& bg) {
    if (!(bg.mu0 > 0.0)) throw Error("background: mu0 must be positive");
    if (!(3.0 * bg.lambda0 + 2.0 * bg.mu0 > 0.0)) throw Error("background: 3*lambda0 + 2*mu0 must be positive");
    if (std::abs(bg.cp() - bg.cs()) < 1e-9) throw Error("degenerate speeds");
}

int voigt(int i, int j) {
    if (i == j) return i;
    int s = i + j;  // 1+2 -> 3 (23), 0+2 -> 4 (13), 0+1 -> 5 (12)
    return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

std::pair<int, int> voigt_pair(int A) {
    static const std::pair<int, int> t[6] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    return t[A];
}

int voigt_slot(int A, int B) {
    if (A > B) std::swap(A, B);
    return A * 6 - A * (A - 1) / 2 + (B - A);
}

std::pair<int, int> slot_pair(int s) {
    for (int A = 0; A < 6; ++A)
        for (int B = A; B < 6; ++B)
            if (voigt_slot(A, B) == s) return {A, B};
    throw Error("bad Voigt slot");
}

int levi(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

TensorField::TensorField(const Grid& g) : grid_(g) {
    for (auto& c : c_) c = ScalarField(g, Support::compact);
}

TensorField& TensorField::operator+=(const TensorField& o) {
    for (int s = 0; s < kVoigtSlots; ++s) c_[s] += o.c_[s];
    return *this;
}

TensorField& TensorField::operator*=(double s) {
    for (auto& c : c_) c *= s;
    return *this;
}

bool TensorField::is_zero() const {
    for (const auto& c : c_)
        if (!c.is_zero()) return false;
    return true;
}

Perturbation operator+(const Perturbation& a, const Perturbation& b) {
    Perturbation r = a;
    r.C += b.C;
    r.rho += b.rho;
    if (a.iso && b.iso) r.iso = std::make_pair(a.iso->first + b.iso->first, a.iso->second + b.iso->second);
    else r.iso.reset();
    return r;
}

Perturbation operator*(double s, const Perturbation& a) {
    Perturbation r = a;
    r.C *= s;
    r.rho *= s;
    if (r.iso) {
        r.iso->first *= s;
        r.iso->second *= s;
    }
    return r;
}

TensorField make_isotropic(const ScalarField& lambda, const ScalarField& mu) {
    if (lambda.grid != mu.grid) throw Error("grid mismatch between lambda and mu");
    TensorField C(lambda.grid);
    for (int A = 0; A < 3; ++A) {
        C.voigt_component(A + 1, A + 1) = lambda + 2.0 * mu;
        for (int B = A + 1; B < 3; ++B) C.voigt_component(A + 1, B + 1) = lambda;
        C.voigt_component(A + 4, A + 4) = mu;
    }
    return C;
}

Perturbation make_isotropic(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho) {
    if (rho.grid != lambda.grid) throw Error("grid mismatch between rho and lambda");
    Perturbation P;
    P.C = make_isotropic(lambda, mu);
    P.rho = rho;
    P.iso = std::make_pair(lambda, mu);
    return P;
}

namespace {

// Accumulates coefficient * d^beta c_slot over all index tuples. free_index
// >= 0 fixes the first tensor index instead of contracting it.
ScalarField contract_impl(const TensorField& C, const std::array<Slot, 4>& slots, int free_index, Backend backend) {
    std::map<std::pair<int, MultiIndex>, double> terms;
    int idx[4];
    auto rec = [&](auto&& self, int pos, double coef, MultiIndex beta) -> void {
        if (pos == 4) {
            int s = voigt_slot(voigt(idx[0], idx[1]), voigt(idx[2], idx[3]));
            terms[{s, beta}] += coef;
            return;
        }
        if (pos == 0 && free_index >= 0) {
            idx[0] = free_index;
            self(self, 1, coef, beta);
            return;
        }
        const Slot& sl = slots[pos];
        if (sl.grad) {
            for (int i = 0; i < 3; ++i) {
                idx[pos] = i;
                MultiIndex b = beta;
                ++b[i];
                self(self, pos + 1, coef, b);
            }
        } else {
            idx[pos] = sl.axis.axis;
            self(self, pos + 1, coef * sl.axis.sign, beta);
        }
    };
    rec(rec, 0, 1.0, MultiIndex{0, 0, 0});
    Support sup = Support::compact;
    for (int s = 0; s < kVoigtSlots; ++s) sup = combine(sup, C.slot(s).support);
    ScalarField out(C.grid(), sup);
    for (const auto& [key, coef] : terms) {
        if (coef == 0.0) continue;
        const ScalarField& f = C.slot(key.first);
        if (f.is_zero()) continue;
        if (key.second == MultiIndex{0, 0, 0}) out.axpy(coef, f);
        else out.axpy(coef, diff(f, key.second, backend));
    }
    out.support = sup;
    return out;
}

}  // namespace

ScalarField contract(const TensorField& C, const std::array<Slot, 4>& slots, Backend backend) {
    if (slots[2].grad || slots[3].grad) throw Error("invalid slot spec: divergence allowed on the first two slots only");
    return contract_impl(C, slots, -1, backend);
}

VectorField contract_vec(const TensorField& C, const std::array<Slot, 3>& slots, Backend backend) {
    if (slots[1].grad || slots[2].grad) throw Error("invalid slot spec: divergence allowed on the second slot only");
    VectorField V;
    for (int p = 0; p < 3; ++p) V[p] = contract_impl(C, {Slot{}, slots[0], slots[1], slots[2]}, p, backend);
    return V;
}

VectorField curl(const VectorField& V, Backend backend) {
    VectorField out(V.grid(), V[0].support);
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        MultiIndex bj{0, 0, 0}, bk{0, 0, 0};
        bj[j] = 1;
        bk[k] = 1;
        out[i] = diff(V[k], bj, backend) - diff(V[j], bk, backend);
        out[i].support = combine(V[j].support, V[k].support);
    }
    return out;
}

VectorField cross(const VectorField& V, const Axis& theta) {
    VectorField out(V.grid(), V[0].support);
    const int q = theta.axis;
    for (int i = 0; i < 3; ++i)
        for (int p = 0; p < 3; ++p) {
            int e = levi(i, p, q);
            if (e) out[i].axpy(double(e * theta.sign), V[p]);
        }
    return out;
}

VectorField cross(const Axis& theta, const VectorField& V) { return -1.0 * cross(V, theta); }

VectorField along(const ScalarField& s, const Axis& a) {
    VectorField out(s.grid, s.support);
    out[a.axis] = double(a.sign) * s;
    return out;
}

bool is_permutation(const Permutation& p) {
    bool seen[3] = {false, false, false};
    for (int a : p) {
        if (a < 0 || a > 2 || seen[a]) return false;
        seen[a] = true;
    }
    return true;
}

Permutation compose(const Permutation& s, const Permutation& t) { return {s[t[0]], s[t[1]], s[t[2]]}; }

int sign(const Permutation& p) { return levi(p[0], p[1], p[2]); }

ScalarField permute_field(const ScalarField& f, const Permutation& p) {
    if (!is_permutation(p)) throw Error("not a permutation of {1,2,3}");
    const Grid& g = f.grid;
    ScalarField out(g, f.support);
    const int N = g.N;
    int y[3];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                y[p[0]] = i;
                y[p[1]] = j;
                y[p[2]] = k;
                out.v[g.index(y[0], y[1], y[2])] = f.v[g.index(i, j, k)];
            }
    return out;
}

VectorField permute_field(const VectorField& f, const Permutation& p) {
    VectorField out;
    for (int a = 0; a < 3; ++a) out[p[a]] = permute_field(f[a], p);
    return out;
}

std::array<int, kVoigtSlots> permute_slots(const Permutation& p) {
    std::array<int, kVoigtSlots> m{};
    for (int s = 0; s < kVoigtSlots; ++s) {
        auto [A, B] = slot_pair(s);
        auto [i, j] = voigt_pair(A);
        auto [k, l] = voigt_pair(B);
        m[s] = voigt_slot(voigt(p[i], p[j]), voigt(p[k], p[l]));
    }
    return m;
}

Perturbation permute_axes(const Perturbation& P, const Permutation& p) {
    Perturbation Q(P.grid());
    auto m = permute_slots(p);
    for (int s = 0; s < kVoigtSlots; ++s) Q.C.slot(m[s]) = permute_field(P.C.slot(s), p);
    Q.rho = permute_field(P.rho, p);
    if (P.iso) Q.iso = std::make_pair(permute_field(P.iso->first, p), permute_field(P.iso->second, p));
    return Q;
}

}  // namespace elastoborn
