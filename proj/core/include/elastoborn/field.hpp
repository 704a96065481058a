#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace elastoborn {

// Uniform box [-L, L)^3 with N nodes per axis; x3 is the fastest index.
struct Grid {
    int N = 64;
    double L = 2.0;

    Grid() = default;
    Grid(int n, double half_width);

    double h() const { return 2.0 * L / N; }
    std::size_t size() const { return std::size_t(N) * N * N; }
    std::size_t index(int i1, int i2, int i3) const {
        return (std::size_t(i1) * N + i2) * N + i3;
    }
    double x(int i) const { return -L + h() * i; }
    // stride of axis a (0-based) in the linear index
    std::size_t stride(int a) const {
        return a == 0 ? std::size_t(N) * N : (a == 1 ? std::size_t(N) : 1);
    }

    bool operator==(const Grid& o) const { return N == o.N && L == o.L; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

void validate(const Grid& g);

enum class Support { compact, upstream, general };

std::string_view to_string(Support s);
Support support_from_string(std::string_view s);

// compact + compact stays compact; anything touching general is general.
Support combine(Support a, Support b);

struct ScalarField {
    Grid grid;
    std::vector<double> v;
    Support support = Support::compact;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, Support s = Support::compact)
        : grid(g), v(g.size(), 0.0), support(s) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    double& at(int i1, int i2, int i3) { return v[grid.index(i1, i2, i3)]; }
    double at(int i1, int i2, int i3) const { return v[grid.index(i1, i2, i3)]; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);
    // this += a * o
    ScalarField& axpy(double a, const ScalarField& o);
    bool is_zero() const;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

// Zero every node with |x| >= 1 and tag compact.
void clip_to_omega(ScalarField& f);
// Mask of nodes with |x| < radius.
std::vector<unsigned char> ball_mask(const Grid& g, double radius = 1.0);

struct VectorField {
    std::array<ScalarField, 3> c;

    VectorField() = default;
    explicit VectorField(const Grid& g, Support s = Support::compact) : c{ScalarField(g, s), ScalarField(g, s), ScalarField(g, s)} {}

    const Grid& grid() const { return c[0].grid; }
    ScalarField& operator[](int a) { return c[a]; }
    const ScalarField& operator[](int a) const { return c[a]; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double a);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

// Signed axis direction: sign * e_axis, axis in {0,1,2}.
struct Axis {
    int axis = 0;
    int sign = 1;

    std::array<double, 3> vec() const {
        std::array<double, 3> e{0.0, 0.0, 0.0};
        e[axis] = sign;
        return e;
    }
    bool operator==(const Axis& o) const { return axis == o.axis && sign == o.sign; }
};

// Parses "e1", "-e2", "+e3".
Axis parse_axis(std::string_view s);
std::string to_string(const Axis& a);

}  // namespace elastoborn
