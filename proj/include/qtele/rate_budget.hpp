#pragma once

#include <array>
#include <optional>

#include "qtele/bsm.hpp"
#include "qtele/config.hpp"
#include "qtele/polarization.hpp"

namespace qtele {

// Which BSM configuration the link runs in.
struct LinkMode {
  bool hom = false;                 // HOM: both BSM ports pass H, analyzer open, WCS aligned to H
  PolarizationState input;          // WCS polarization (teleportation)
};

// PBS port polarization feeding BSM channel `ch` (1 or 2) in teleportation mode.
PolarizationState bsm_port(int ch);

// 2|<port|psi>|^2: WCS rate relative to the polarization-averaged configured rate.
double wcs_port_factor(int ch, const PolarizationState& psi);

// Photon rates (per second) feeding the coincidence-relevant cluster classes,
// before detector efficiency. Index 0/1 is BSM channel 1/2.
struct RateBudget {
  double transmission = 1.0;
  std::array<double, 3> efficiency{1.0, 1.0, 1.0};
  // Idlers at channel j whose partner signal enters the fiber.
  std::array<double, 2> paired_idler{};
  // WCS photons reaching channel k, polarization factor applied where relevant.
  std::array<double, 2> wcs_heralding{};   // as partner of a paired idler
  std::array<double, 2> wcs_uncorrelated{};
  std::array<double, 2> idler{};
  // Photons at the analyzer input, unpolarized.
  double uncorrelated_signal = 0.0;
  double background = 0.0;
  // Mean analyzer transmission assumed when the configured rates were measured.
  double analyzer_mean_pass = 0.5;
  bool open_analyzer = false;
};

RateBudget make_rate_budget(const LinkConfig& cfg, const LinkMode& mode);

// E[(2w - |d|)+] for the idler-signal jitter difference d: the effective
// length (ps) over which a third photon completes a triple with a true pair.
double pair_window_length_ps(const LinkConfig& cfg);

// Detected threefold rates by origin, summed over the two settings of a basis pair.
struct ThreefoldRates {
  double heralded = 0.0;     // paired idler + WCS
  double idler_pairs = 0.0;  // paired idler + another idler
  double uncorrelated = 0.0; // three independent photons (incl. background)
  double total() const { return heralded + idler_pairs + uncorrelated; }
};

// Analytic HOM rates at the configured operating point (both ports H, analyzer open).
HomRates hom_rates(const LinkConfig& cfg);

// Expected heralded state at the analyzer and expected average fidelity,
// assuming perfect polarization compensation and no sampling noise.
struct ExpectedTeleport {
  DensityMatrix rho;
  double fidelity = 0.0;
  double accidental_fraction = 0.0;
  ThreefoldRates rates_per_basis_pair;  // summed over a basis pair of settings
};

ExpectedTeleport expected_teleport(const LinkConfig& cfg, Basis input);
double expected_average_fidelity(const LinkConfig& cfg);

}  // namespace qtele
