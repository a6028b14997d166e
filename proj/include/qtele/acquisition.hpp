#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qtele/config.hpp"
#include "qtele/rate_budget.hpp"
#include "qtele/timetag.hpp"

namespace qtele {

// Fiber rotation followed by the current compensation, sampled every step_s
// over the whole run. The fiber starts from a random static transformation
// that is compensated at t = 0 (calibrate on a short fiber, then switch).
struct DriftTimeline {
  double step_s = 1.0;
  std::vector<Matrix2> effective;   // correction * fiber, per step
  int compensations = 0;
  double worst_reference_fidelity = 1.0;

  const Matrix2& at(double t_s) const;
};

// Compensation runs at t = 0 and, when enabled, every compensation.interval_s.
DriftTimeline build_drift_timeline(const LinkConfig& cfg, double total_s);

struct AcquisitionSpec {
  LinkMode mode;
  std::optional<Basis> analyzer;  // nullopt: analyzer removed
  double start_s = 0.0;           // position on the drift timeline
  double duration_s = 1.0;
  double hom_delay_ps = 0.0;
  std::uint64_t stream = 0;       // names this acquisition's random substreams
};

struct AcquisitionResult {
  std::uint64_t threefold = 0;
  std::array<std::vector<TimeTag>, 3> tags;  // only filled when requested
  std::array<std::uint64_t, 4> clusters{};   // generated per class: heralded, idler pairs, uncorrelated, background
};

// Coincidence-relevant sampling: instead of full singles streams, only photon
// clusters that can complete a threefold coincidence are generated (a true
// pair with a third photon, or three independent photons), with generation
// margins wide enough that jitter cannot move a missed cluster into the
// window. The clusters then go through the channel, analyzer, detectors and
// the coincidence counter exactly as full streams would.
AcquisitionResult simulate_acquisition(const LinkConfig& cfg, const AcquisitionSpec& spec, const DriftTimeline& drift,
                                       bool keep_tags = false);

// Generation margin in ps added to the window on each side.
double cluster_guard_ps(const LinkConfig& cfg);

}  // namespace qtele
