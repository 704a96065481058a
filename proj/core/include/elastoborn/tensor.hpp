#pragma once

#include <array>
#include <optional>
#include <utility>

#include "elastoborn/calculus.hpp"
#include "elastoborn/field.hpp"

namespace elastoborn {

// Isotropic background with rho0 = 1.
struct Background {
    double lambda0 = 2.0;
    double mu0 = 1.0;

    Background() = default;
    Background(double lambda, double mu);

    double cp2() const { return lambda0 + 2.0 * mu0; }
    double cs2() const { return mu0; }
    double cp() const;
    double cs() const;
};

void validate(const Background& bg);

// Voigt index (0-based) of the symmetric pair (i, j): 11,22,33,23,13,12 -> 0..5.
int voigt(int i, int j);
// Index pair of a Voigt index.
std::pair<int, int> voigt_pair(int A);
// Storage slot 0..20 of the unordered Voigt pair {A, B}, row-major over A <= B.
int voigt_slot(int A, int B);
std::pair<int, int> slot_pair(int s);
constexpr int kVoigtSlots = 21;

// Alternating symbol, 0-based indices.
int levi(int i, int j, int k);

class TensorField {
public:
    TensorField() = default;
    explicit TensorField(const Grid& g);

    const Grid& grid() const { return grid_; }
    ScalarField& slot(int s) { return c_[s]; }
    const ScalarField& slot(int s) const { return c_[s]; }
    // 1-based Voigt pair, either order
    ScalarField& voigt_component(int A, int B) { return c_[voigt_slot(A - 1, B - 1)]; }
    const ScalarField& voigt_component(int A, int B) const { return c_[voigt_slot(A - 1, B - 1)]; }
    // 0-based full-index accessor
    const ScalarField& operator()(int i, int j, int k, int l) const {
        return c_[voigt_slot(voigt(i, j), voigt(k, l))];
    }
    ScalarField& operator()(int i, int j, int k, int l) { return c_[voigt_slot(voigt(i, j), voigt(k, l))]; }

    TensorField& operator+=(const TensorField& o);
    TensorField& operator*=(double s);
    bool is_zero() const;

private:
    Grid grid_;
    std::array<ScalarField, kVoigtSlots> c_;
};

struct Perturbation {
    TensorField C;
    ScalarField rho;
    std::optional<std::pair<ScalarField, ScalarField>> iso;  // (lambda, mu) when built isotropically

    Perturbation() = default;
    explicit Perturbation(const Grid& g) : C(g), rho(g) {}
    const Grid& grid() const { return rho.grid; }
};

Perturbation operator+(const Perturbation& a, const Perturbation& b);
Perturbation operator*(double s, const Perturbation& a);

TensorField make_isotropic(const ScalarField& lambda, const ScalarField& mu);
Perturbation make_isotropic(const ScalarField& lambda, const ScalarField& mu, const ScalarField& rho);

// A contraction slot: a signed axis vector or a divergence index (grad).
struct Slot {
    bool grad = false;
    Axis axis;
    static Slot vec(const Axis& a) { return {false, a}; }
    static Slot div() { return {true, Axis{}}; }
};

// sum c_ijkl * (slot factors); grad slots become derivatives and are only
// allowed in the first two positions.
ScalarField contract(const TensorField& C, const std::array<Slot, 4>& slots, Backend backend = Backend::spectral);
// V_p = sum c_pjkl * (slot factors for j, k, l); grad only on j.
VectorField contract_vec(const TensorField& C, const std::array<Slot, 3>& slots, Backend backend = Backend::spectral);

// (curl V)_i = e_ijk d_j V_k
VectorField curl(const VectorField& V, Backend backend = Backend::spectral);
// (V x theta)_i = e_ipq V_p theta_q
VectorField cross(const VectorField& V, const Axis& theta);
// theta x V
VectorField cross(const Axis& theta, const VectorField& V);
// s * e_axis as a field
VectorField along(const ScalarField& s, const Axis& a);

using Permutation = std::array<int, 3>;  // old axis a -> new axis p[a]
bool is_permutation(const Permutation& p);
Permutation compose(const Permutation& s, const Permutation& t);  // s after t
int sign(const Permutation& p);
// Node data relabelled so that the new field at y, y[p[a]] = x[a], is the old value at x.
ScalarField permute_field(const ScalarField& f, const Permutation& p);
VectorField permute_field(const VectorField& f, const Permutation& p);
// c'_{p(i)p(j)p(k)p(l)}(y) = c_ijkl(x), rho'(y) = rho(x)
Perturbation permute_axes(const Perturbation& P, const Permutation& p);
// Induced action on the 21 storage slots: slot s of P lands in slot result[s].
std::array<int, kVoigtSlots> permute_slots(const Permutation& p);

}  // namespace elastoborn
