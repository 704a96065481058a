#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "elastoborn/field.hpp"

namespace elastoborn {

// a * exp(1 - 1/(1 - |x-c|^2/r^2)) inside the ball, 0 outside.
struct BumpSpec {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 0.5;
    double amplitude = 1.0;
};

// Throws unless |center| + radius <= 0.95 and radius > 0.
void validate(const BumpSpec& b);
double bump_value(const BumpSpec& b, const std::array<double, 3>& x);
// Sum of bumps sampled on the grid, tagged compact-in-omega.
ScalarField bump_field(const Grid& g, const std::vector<BumpSpec>& bumps);
inline ScalarField bump_field(const Grid& g, const BumpSpec& b) { return bump_field(g, std::vector<BumpSpec>{b}); }

// Random bumps: radius in [0.6, 0.9], center uniform in direction with
// |c| <= 0.95 - r, amplitude in [-1, 1]. Draws from std::mt19937_64.
struct RandomBumpRanges {
    double r_min = 0.6, r_max = 0.9;
    int count = 2;
};
std::vector<BumpSpec> random_bumps(std::mt19937_64& rng, const RandomBumpRanges& ranges = {});

}  // namespace elastoborn
