#include "elastoborn/bump.hpp"

#include <cmath>

#include "elastoborn/error.hpp"

namespace elastoborn {

void validate(const BumpSpec& b) {
    double c = std::sqrt(b.center[0] * b.center[0] + b.center[1] * b.center[1] + b.center[2] * b.center[2]);
    if (!(b.radius > 0.0) || !std::isfinite(b.amplitude))
        throw Error("bump: radius must be positive and amplitude finite");
    if (c + b.radius > 0.95 + 1e-12)
        throw Error("bump support violation: |center| + radius = " + std::to_string(c + b.radius) + " > 0.95");
}

double bump_value(const BumpSpec& b, const std::array<double, 3>& x) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) d2 += (x[a] - b.center[a]) * (x[a] - b.center[a]);
    double s = d2 / (b.radius * b.radius);
    if (s >= 1.0) return 0.0;
    return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
}

ScalarField bump_field(const Grid& g, const std::vector<BumpSpec>& bumps) {
    ScalarField f(g, Support::compact);
    for (const auto& b : bumps) validate(b);
    for (int i = 0; i < g.N; ++i)
        for (int j = 0; j < g.N; ++j)
            for (int k = 0; k < g.N; ++k) {
                double v = 0.0;
                for (const auto& b : bumps) v += bump_value(b, {g.x(i), g.x(j), g.x(k)});
                f.v[g.index(i, j, k)] = v;
            }
    return f;
}

std::vector<BumpSpec> random_bumps(std::mt19937_64& rng, const RandomBumpRanges& ranges) {
    auto uni = [&rng](double a, double b) { return a + (b - a) * (double(rng() >> 11) * 0x1.0p-53); };
    std::vector<BumpSpec> out;
    for (int n = 0; n < ranges.count; ++n) {
        BumpSpec b;
        b.radius = uni(ranges.r_min, ranges.r_max);
        double z = uni(-1.0, 1.0), phi = uni(0.0, 2.0 * M_PI), rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double len = uni(0.0, 0.95 - b.radius);
        b.center = {len * rho * std::cos(phi), len * rho * std::sin(phi), len * z};
        b.amplitude = uni(-1.0, 1.0);
        out.push_back(b);
    }
    return out;
}

}  // namespace elastoborn
