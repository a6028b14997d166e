#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qtele/polarization.hpp"
#include "qtele/rng.hpp"

namespace qtele {

// Threefold coincidences per analyzer projection, indexed by Basis.
struct BasisCounts {
  std::array<std::uint64_t, 6> c{};

  std::uint64_t& operator[](Basis b) { return c[static_cast<std::size_t>(b)]; }
  std::uint64_t operator[](Basis b) const { return c[static_cast<std::size_t>(b)]; }
  std::uint64_t total() const;
};

struct TomographyResult {
  BasisCounts counts;
  StokesVector stokes;              // raw linear inversion
  DensityMatrix rho;                // stokes_to_rho(stokes); may be non-positive
  bool physicality_flag = false;    // |S| > 1
  DensityMatrix nearest_physical;   // S rescaled to unit length when flagged, else rho
  double fidelity = 0.0;
  double fidelity_sigma = 0.0;
};

inline constexpr int kDefaultMonteCarloTrials = 10000;

// Analyzer waveplate settings (QWP, HWP) in degrees for each projection.
const std::array<std::pair<Basis, WaveplateSetting>, 6>& projection_schedule();
WaveplateSetting setting_for(Basis b);

// Expected output for each teleported input under the Psi- herald.
const std::vector<std::pair<Basis, Basis>>& target_map();
Basis teleport_target(Basis input);

// Throws UndefinedAxisError naming the axis whose pair sum is zero.
StokesVector stokes_from_counts(const BasisCounts& c);

// Linear inversion; fidelity fields left at zero.
TomographyResult reconstruct(const BasisCounts& c);

struct FidelityEstimate {
  double fidelity = 0.0;
  double sigma = 0.0;
  int degenerate_trials = 0;  // resamples skipped because an axis had no counts
};

// Point estimate from the observed counts; sigma is the standard deviation
// over `trials` Poisson resamples of all six counts.
FidelityEstimate fidelity_with_mc(const BasisCounts& c, const PolarizationState& target, int trials, Rng& rng);

struct StateEvaluation {
  Basis input;
  Basis target;
  TomographyResult result;
};

struct TeleportEvaluation {
  std::vector<StateEvaluation> states;
  double average_fidelity = 0.0;
  double average_sigma = 0.0;  // per-state sigmas combined as uncorrelated
  bool beats_classical_bound = false;
};

inline constexpr double kClassicalBound = 2.0 / 3.0;

// Per input state, the heralded counts for each analyzer setting. Every input
// needs all six settings; otherwise IncompleteRunError.
using RunCounts = std::map<Basis, std::map<Basis, std::uint64_t>>;

TeleportEvaluation evaluate_teleport_run(const RunCounts& run, int trials, Rng& rng);

// Born-rule counts (rounded) for a state, n_per_pair per basis pair.
BasisCounts born_counts(const DensityMatrix& rho, double n_per_pair);

}  // namespace qtele
