#pragma once

// Slow reference computations used for cross-checking the production code.
// They share no code path with the functions they check.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtele/polarization.hpp"
#include "qtele/timetag.hpp"

namespace qtele::oracle {

using Matrix8 = Eigen::Matrix<Complex, 8, 8>;

// Builds the 8x8 state (WCS ⊗ idler ⊗ signal), applies the herald effect on
// the first two qubits, traces them out and normalizes.
struct TeleportOracleResult {
  Matrix2 rho;
  double herald_probability = 0.0;
};
TeleportOracleResult teleport(const Vector2& input, double werner_p, double zeta);

// For every tag in merged order, looks back over all unused earlier tags of
// the other channels within the window and takes the earliest in each.
// Quadratic in the number of tags; returns the flattened groups.
std::vector<TimeTag> coincidences(const std::vector<TimeTag>& merged, const CoincidenceWindow& window);

// Average fidelity over inputs H, D, R to their targets, from the 8x8 oracle.
double average_fidelity(double werner_p, double zeta);

}  // namespace qtele::oracle
