#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtele/acquisition.hpp"
#include "qtele/config.hpp"
#include "qtele/tomography.hpp"

namespace qtele {

struct HomReport {
  std::vector<HomPoint> points;  // counts per delay
  double visibility = 0.0;
  double visibility_sigma = 0.0;
  double zeta = 0.0;
  double analytic_visibility = 0.0;   // expected at zero delay
  double max_visibility = 0.0;        // analytic, zeta = 1
};

struct StateReport {
  Basis input = Basis::H;
  Basis target = Basis::V;
  TomographyResult result;
  double expected_fidelity = 0.0;  // analytic, ideal compensation
};

struct RateDiagnostics {
  // Configured detected singles (the sampler draws only coincidence-relevant clusters).
  std::array<double, 3> singles{};
  double coincidence_ch13 = 0.0;
  double coincidence_ch23 = 0.0;
  double background_ch3 = 0.0;          // after the bandpass filter
  double threefold_rate = 0.0;          // measured, all inputs and settings
  double expected_true_threefold = 0.0; // analytic per setting, averaged over inputs
  double expected_accidental_threefold = 0.0;
  double transmission = 1.0;
  int compensations = 0;
  double worst_reference_fidelity = 1.0;
};

struct TeleportReport {
  std::string scenario;
  std::uint64_t seed = 0;
  double zeta = 0.0;
  double werner_p = 0.0;
  std::vector<StateReport> states;
  double average_fidelity = 0.0;
  double average_sigma = 0.0;
  double expected_average_fidelity = 0.0;
  bool beats_classical_bound = false;
  std::optional<HomReport> hom;
  RateDiagnostics rates;
  LinkConfig config;
  // Excluded from reproducibility comparisons.
  double wall_clock_s = 0.0;
  std::string started_at;
};

struct RunOptions {
  bool include_hom = true;
  // Writes one binary tag file per acquisition into this directory.
  std::optional<std::filesystem::path> tag_dump_dir;
};

// Full pipeline: drift timeline, per input and analyzer setting a sampled
// acquisition with threefold counting, then tomography with Monte Carlo errors.
TeleportReport run_scenario(const LinkConfig& cfg, const RunOptions& options = {});

// Sampled HOM scan over `delays_ps` (the configured grid when empty).
HomReport run_hom(const LinkConfig& cfg, const std::vector<double>& delays_ps = {});

// Stream identifiers so related runs share random numbers.
std::uint64_t teleport_stream_id(Basis input, Basis setting);
std::uint64_t hom_stream_id(std::size_t point);

}  // namespace qtele
