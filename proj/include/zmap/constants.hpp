#pragma once

#include <numbers>

namespace zmap {

/// CODATA 2018 values.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;     // J s
    static constexpr double hbar_ev = 6.582119569e-16;  // eV s
    static constexpr double h = 6.62607015e-34;         // J s
    static constexpr double mu_b = 9.2740100783e-24;    // J / T
};

static_assert(2.0 * std::numbers::pi * PhysicalConstants::hbar / PhysicalConstants::h - 1.0 < 1e-9 &&
              2.0 * std::numbers::pi * PhysicalConstants::hbar / PhysicalConstants::h - 1.0 > -1e-9);

} // namespace zmap
