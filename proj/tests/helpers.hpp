#pragma once

#include <cmath>
#include <random>

#include "elastoborn/bump.hpp"
#include "elastoborn/calculus.hpp"
#include "elastoborn/field.hpp"

namespace th {

using namespace elastoborn;

inline ScalarField bump(const Grid& g, std::array<double, 3> c = {0, 0, 0}, double r = 0.9, double a = 1.0) {
    return bump_field(g, BumpSpec{c, r, a});
}

inline double bump1(double t, double c, double r) {
    double s = (t - c) * (t - c) / (r * r);
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

template <class F>
ScalarField sample(const Grid& g, F&& f, Support s = Support::compact) {
    ScalarField out(g, s);
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j)
            for (int k = 0; k < g.N; ++k) out.at(i, j, k) = f(g.x(i), g.x(j), g.x(k));
    return out;
}

inline bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
    return a.grid == b.grid && a.v == b.v;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace th
