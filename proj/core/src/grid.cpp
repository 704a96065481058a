#include <cmath>
#include <string>

#include "elastoborn/error.hpp"
#include "elastoborn/field.hpp"
#include "elastoborn/parallel.hpp"

namespace elastoborn {

Grid::Grid(int n, double half_width) : N(n), L(half_width) { validate(*this); }

void validate(const Grid& g) {
    if (g.N < 8 || g.N % 2 != 0)
        throw Error("grid: N must be an even integer >= 8 (got " + std::to_string(g.N) + ")");
    if (!(g.L >= 2.0) || !std::isfinite(g.L))
        throw Error("grid: half-width L must be >= 2 (got " + std::to_string(g.L) + ")");
}

std::string_view to_string(Support s) {
    switch (s) {
        case Support::compact: return "compact-in-omega";
        case Support::upstream: return "upstream-vanishing";
        default: return "general";
    }
}

Support support_from_string(std::string_view s) {
    if (s == "compact-in-omega" || s == "compact") return Support::compact;
    if (s == "upstream-vanishing" || s == "upstream") return Support::upstream;
    if (s == "general") return Support::general;
    throw Error("unknown support tag '" + std::string(s) + "'");
}

Support combine(Support a, Support b) {
    if (a == Support::general || b == Support::general) return Support::general;
    if (a == Support::upstream || b == Support::upstream) return Support::upstream;
    return Support::compact;
}

namespace {

void require_same(const Grid& a, const Grid& b) {
    if (a != b) throw Error("grid mismatch between fields");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same(grid, o.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    support = combine(support, o.support);
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same(grid, o.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    support = combine(support, o.support);
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& x : v) x *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& o) {
    require_same(grid, o.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * o.v[i];
    support = combine(support, o.support);
    return *this;
}

bool ScalarField::is_zero() const {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

std::vector<unsigned char> ball_mask(const Grid& g, double radius) {
    std::vector<unsigned char> m(g.size(), 0);
    double r2 = radius * radius;
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j)
            for (int k = 0; k < g.N; ++k) {
                double x = g.x(i), y = g.x(j), z = g.x(k);
                m[g.index(i, j, k)] = (x * x + y * y + z * z < r2) ? 1 : 0;
            }
    return m;
}

void clip_to_omega(ScalarField& f) {
    auto m = ball_mask(f.grid, 1.0);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (!m[i]) f.v[i] = 0.0;
    f.support = Support::compact;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int a = 0; a < 3; ++a) c[a] += o.c[a];
    return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
    for (int a = 0; a < 3; ++a) c[a] -= o.c[a];
    return *this;
}
VectorField& VectorField::operator*=(double s) {
    for (int a = 0; a < 3; ++a) c[a] *= s;
    return *this;
}
VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

Axis parse_axis(std::string_view s) {
    Axis a;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        a.sign = s[0] == '-' ? -1 : 1;
        s.remove_prefix(1);
    }
    if (s.size() != 2 || s[0] != 'e' || s[1] < '1' || s[1] > '3')
        throw Error("direction must be one of e1, e2, e3 with optional sign (got '" + std::string(s) + "')");
    a.axis = s[1] - '1';
    return a;
}

std::string to_string(const Axis& a) {
    return std::string(a.sign < 0 ? "-" : "") + "e" + char('1' + a.axis);
}

}  // namespace elastoborn
