#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtele/fiber.hpp"
#include "qtele/polarization.hpp"
#include "qtele/sources.hpp"
#include "qtele/timetag.hpp"

namespace qtele {

// Detected WCS rates at the two BSM channels, averaged over input polarization.
struct WcsLinkConfig {
  double detected_rate_ch1 = 0.0;
  double detected_rate_ch2 = 0.0;

  WcsConfig channel(int ch, const PolarizationState& pol) const;
};

struct AcquisitionConfig {
  double seconds_per_setting = 60.0;
  std::vector<Basis> inputs = {Basis::H, Basis::D, Basis::R};
  int mc_trials = 10000;
  double drift_step_s = 1.0;   // resolution of the simulated drift path
  double guard_ps = -1.0;      // cluster generation margin; < 0 picks 6 sqrt2 sigma_jitter
};

struct CompensationConfig {
  bool enabled = true;             // false: only the initial compensation after switching
  double interval_s = 30.0;
  std::uint64_t reference_photons = 1000000;  // per reference state and query; 0 = noiseless
  double required_fidelity = 0.995;
  int max_iters = 200;
};

struct HomConfig {
  std::vector<double> delays_ps;
  double seconds_per_point = 60.0;
  double coherence_time_ps = 1000.0;
  // WCS rate during the HOM scan relative to the teleportation operating point.
  double wcs_rate_scale = 1.0;
};

// Acceptance bands checked by `run --check` / `hom --check`.
struct CheckBands {
  std::optional<std::array<double, 2>> average_fidelity;
  std::optional<std::array<double, 2>> visibility;
};

struct LinkConfig {
  std::string name;
  std::uint64_t seed = 0;
  WcsLinkConfig wcs;
  PairSourceConfig source;
  std::optional<double> zeta_override;  // replaces the brightness law when set
  FiberConfig fiber;
  CrosstalkConfig crosstalk;
  std::array<DetectorConfig, 3> detectors;
  std::int64_t window_ps = 64;
  AcquisitionConfig acquisition;
  CompensationConfig compensation;
  HomConfig hom;
  CheckBands check;

  double zeta() const { return zeta_override ? *zeta_override : effective_zeta(source); }
  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// Parses and validates a YAML scenario file; errors carry the field path and line.
LinkConfig load_config(const std::filesystem::path& path);
LinkConfig parse_config(const std::string& yaml_text);

// Normalized YAML rendering (all defaults filled).
std::string dump_config(const LinkConfig& cfg);

// Scales durations for quick runs.
LinkConfig fast_variant(const LinkConfig& cfg, double factor = 0.1);

}  // namespace qtele
