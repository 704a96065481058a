#pragma once

#include <array>
#include <atomic>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "elastoborn/field.hpp"

namespace elastoborn {

using MultiIndex = std::array<int, 3>;

enum class Backend { spectral, fd };

// Treatment of the Nyquist plane in spectral derivatives. odd_zero drops it
// for odd orders only, which keeps even-order symbols invertible on the
// grid. band_limited drops it for every nonzero order.
enum class Nyquist { odd_zero, band_limited };

// Constant-coefficient operator sum c_beta d^beta, symbol sum c_beta (i xi)^beta.
class SymbolPolynomial {
public:
    using Term = std::pair<MultiIndex, double>;

    SymbolPolynomial() = default;
    explicit SymbolPolynomial(std::vector<Term> terms);
    SymbolPolynomial(const SymbolPolynomial& o) : terms_(o.terms_), elliptic_(o.elliptic_.load()) {}
    SymbolPolynomial& operator=(const SymbolPolynomial& o) {
        terms_ = o.terms_;
        elliptic_.store(o.elliptic_.load());
        return *this;
    }

    static SymbolPolynomial constant(double c);
    static SymbolPolynomial partial(const MultiIndex& beta, double c = 1.0);
    static SymbolPolynomial laplacian();
    static SymbolPolynomial bilaplacian();
    // theta . grad for a signed axis
    static SymbolPolynomial directional(const Axis& theta);

    const std::vector<Term>& terms() const { return terms_; }
    std::complex<double> operator()(const std::array<double, 3>& xi) const;
    // checked on first use and cached
    bool elliptic() const;
    int order() const;

    SymbolPolynomial operator+(const SymbolPolynomial& o) const;
    SymbolPolynomial operator-(const SymbolPolynomial& o) const;
    SymbolPolynomial operator*(const SymbolPolynomial& o) const;
    SymbolPolynomial operator*(double s) const;

    std::string to_string() const;

private:
    void normalize();
    std::vector<Term> terms_;
    mutable std::atomic<int> elliptic_{-1};
};

inline SymbolPolynomial operator*(double s, const SymbolPolynomial& p) { return p * s; }

// Checks |p| > 0 on a Fibonacci sphere at radii 0.5, 1, 2 (10^4+ points).
bool check_elliptic(const SymbolPolynomial& p);

ScalarField diff(const ScalarField& f, const MultiIndex& beta, Backend backend = Backend::spectral,
                 Nyquist nyq = Nyquist::odd_zero);
ScalarField laplacian(const ScalarField& f, Backend backend = Backend::spectral,
                      Nyquist nyq = Nyquist::odd_zero);
ScalarField apply_symbol(const ScalarField& f, const SymbolPolynomial& p,
                         Backend backend = Backend::spectral, Nyquist nyq = Nyquist::odd_zero);

// Central fd weights of 6th order (one-sided closures near faces) for the
// m-th derivative; exposed for tests.
std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m);

// How L_theta^{-1} is discretized.
//   upwind:  causal BDF6 march; ray_derivative with the same rule is its exact
//            left inverse, and the result is exactly zero upstream.
//   fourier: spectrally accurate line antiderivative, compact inputs only,
//            anchored to zero at the upstream face.
enum class RayRule { upwind, fourier };

ScalarField ray_antiderivative(const ScalarField& f, const Axis& theta, RayRule rule = RayRule::upwind);
// theta . grad discretized to match ray_antiderivative for the same rule.
ScalarField ray_derivative(const ScalarField& f, const Axis& theta, RayRule rule = RayRule::upwind);
// (L_theta^{-1})^2 in closed form for the fourier rule; repeated march for upwind.
ScalarField ray_antiderivative2(const ScalarField& f, const Axis& theta, RayRule rule = RayRule::upwind);

// f with d_a d_b f = g, integrating from the upstream faces along axes a, b (0-based).
ScalarField double_antiderivative(const ScalarField& g, std::array<int, 2> axes = {1, 2},
                                  RayRule rule = RayRule::upwind, std::vector<std::string>* warnings = nullptr);

// Line antiderivative of a field whose line integrals vanish; the constant is
// fixed so the mean over |x_axis| >= 1 is zero. Nyquist mode dropped.
ScalarField antiderivative_periodic(const ScalarField& f, int axis);

struct InvertOptions {
    double truncate_radius = 0.0;  // RHS truncation radius, <= 0 disables
    double taper_radius = 1.2;     // <= 1 disables the output taper
    double residual_tol = 1e-4;
    Nyquist nyquist = Nyquist::odd_zero;
};

// FFT division u^ = g^/p for k != 0, constant fixed by zero mean on the
// outer shell max|x_a| >= L - 4h.
ScalarField invert_symbol(const ScalarField& g, const SymbolPolynomial& p, const InvertOptions& opt = {});
double invert_residual(const ScalarField& u, const ScalarField& g, const SymbolPolynomial& p,
                       Nyquist nyq = Nyquist::odd_zero);

// Smooth taper: 1 inside r0, 0 outside r1.
double smooth_taper(double r, double r0, double r1);

enum class Region { omega, box };

struct NormKind {
    enum Type { L2, Hs } type = L2;
    double s = 0.0;
    static NormKind l2() { return {}; }
    static NormKind hs(double s) { return {Hs, s}; }
};

// Trapezoid weights h^3. Hs uses the multiplier (1+|k|^2)^(s/2) on the full
// periodic box and then restricts to the region.
double norm(const ScalarField& f, NormKind kind = {}, Region region = Region::omega);
double norm(const VectorField& f, NormKind kind = {}, Region region = Region::omega);
double inner(const ScalarField& a, const ScalarField& b, Region region = Region::omega);
// Relative L2 difference ||a-b|| / ||b|| on the region (absolute if ||b|| = 0).
double rel_error(const ScalarField& a, const ScalarField& b, Region region = Region::omega);
double rel_error(const VectorField& a, const VectorField& b, Region region = Region::omega);
double max_abs(const ScalarField& f);

}  // namespace elastoborn
