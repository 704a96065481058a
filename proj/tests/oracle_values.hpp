#pragma once

// Generated by tests/oracles/generate.py (scipy.integrate.quad).

#include <array>

namespace oracle {

inline constexpr std::array<int, 7> kPrimitive1D_N128_index{40, 50, 56, 64, 70, 80, 92};
inline constexpr std::array<double, 7> kPrimitive1D_N128_value{0.003316314077314247, 0.14263407556361615, 0.2996867124979218, 0.5431051450970444, 0.7278567887223256, 0.9866024674398967, 1.0862102901537356};
inline constexpr std::array<int, 7> kPrimitive1D_N256_index{80, 100, 112, 128, 140, 160, 184};
inline constexpr std::array<double, 7> kPrimitive1D_N256_value{0.003316314077314247, 0.14263407556361615, 0.2996867124979218, 0.5431051450970444, 0.7278567887223256, 0.9866024674398967, 1.0862102901537356};
inline constexpr std::array<double, 7> kPrimitive2_N128_value{8.018236336855753e-05, 0.017619611724005033, 0.05854486839264001, 0.16347931825910644, 0.2827613891091798, 0.5531852732056736, 0.9504340039198738};
inline constexpr std::array<int, 15> kLinePoints_N128{64, 64, 64, 80, 60, 70, 100, 64, 64, 70, 72, 58, 60, 64, 80};
inline constexpr std::array<double, 5> kLineIntegral_N128{0.5431051450970444, 0.8910204144464621, 1.0862102901940887, 0.5893686552550864, 0.18166042071984642};
inline constexpr std::array<double, 1> kBumpL2_r5{0.2979321052877847};
inline constexpr std::array<double, 1> kBumpL2_r9{0.7194921553113599};

}  // namespace oracle
