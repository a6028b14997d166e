#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtele/polarization.hpp"
#include "qtele/rng.hpp"

namespace qtele {

using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

// Two-qubit operators are ordered (first ⊗ second) with |HH>,|HV>,|VH>,|VV>.
Matrix4 kron(const Matrix2& a, const Matrix2& b);
Vector4 kron(const Vector2& a, const Vector2& b);
Matrix2 partial_trace_first(const Matrix4& m);
Matrix2 partial_trace_second(const Matrix4& m);

const Vector4& phi_plus();
const Vector4& psi_minus();

// p |Phi+><Phi+| + (1 - p) I/4, ordered (idler ⊗ signal).
struct WernerState {
  double p = 1.0;

  Matrix4 density() const;
  double fidelity_to_phi_plus() const { return (3.0 * p + 1.0) / 4.0; }
};

// Inverse of F = (3p + 1)/4. Throws DomainError outside [0.25, 1].
WernerState werner_from_fidelity(double f);

// Signal-photon state after the idler was found in `idler_outcome`, and the
// probability of that idler outcome.
std::pair<DensityMatrix, double> signal_given_idler(const WernerState& pair, const PolarizationState& idler_outcome);

// Samples whether each photon of a pair passes its analyzer (projection onto
// the given axis), from the joint Born distribution of the Werner state.
std::pair<bool, bool> measure_pair(const WernerState& pair, const PolarizationState& idler_axis,
                                   const PolarizationState& signal_axis, Rng& rng);

// Homogeneous Poisson arrival times in [0, duration), integer picoseconds, sorted.
std::vector<std::int64_t> sample_poisson_times(double rate_hz, double duration_s, Rng& rng);

// P(>= 2 photons in one window) for a Poisson source.
double multi_photon_probability(double rate_hz, double window_ps);

struct WcsConfig {
  double detected_rate = 0.0;  // counts/s at the BSM detectors
  PolarizationState polarization;

  double mean_photon_per_window(double window_ps) const { return detected_rate * window_ps * 1e-12; }
  void validate() const;
};

struct WcsEmissions {
  std::vector<std::int64_t> times_ps;
  PolarizationState polarization;
};

WcsEmissions sample_wcs_emissions(const WcsConfig& cfg, double duration_s, Rng& rng);

struct PairSourceConfig {
  double pair_coincidence_rate = 0.0;  // idler(ch2) x signal coincidences, counts/s
  double pair_fidelity = 1.0;          // fidelity of the emitted pair to |Phi+>
  double idler_rate_ch1 = 0.0;         // counts/s
  double idler_rate_ch2 = 0.0;         // counts/s
  double signal_rate = 0.0;            // counts/s
  // Linear brightness-purity coupling: zeta = zeta_at_zero_brightness
  //   - brightness_visibility_slope * (idler_rate_ch1 + idler_rate_ch2).
  double zeta_at_zero_brightness = 1.0;
  double brightness_visibility_slope = 0.0;  // per (counts/s)

  double brightness() const { return idler_rate_ch1 + idler_rate_ch2; }
  // Idler(ch1) x signal coincidences; arm losses scale like the singles.
  double coincidence_rate_ch1() const;
  WernerState werner() const { return werner_from_fidelity(pair_fidelity); }
  // Throws ConfigError for negative rates, fidelity outside [0.25,1], or a
  // pair rate above either singles rate.
  void validate() const;
};

// Mode overlap of the idler with the WCS at this brightness, clamped to [0,1].
// Non-increasing in brightness for any non-negative slope.
double effective_zeta(const PairSourceConfig& cfg);

// Pairs are emitted at `pair_rate`; the idler reaches BSM channel 1 or 2 with
// the given probabilities (mutually exclusive) and the signal independently
// survives with `signal_prob`. All configured singles come from pairs.
struct PairProcess {
  double pair_rate = 0.0;
  double idler_prob_ch1 = 0.0;
  double idler_prob_ch2 = 0.0;
  double signal_prob = 0.0;
};

PairProcess pair_process(const PairSourceConfig& cfg);

struct PairEvent {
  std::int64_t t_ps = 0;
  std::uint8_t idler_channel = 0;  // 0: idler lost, else BSM channel 1 or 2
  bool signal = false;
};

struct PairEmissions {
  std::vector<PairEvent> events;  // time-sorted, only pairs with a surviving photon
  WernerState state;
};

PairEmissions sample_pair_emissions(const PairSourceConfig& cfg, double duration_s, Rng& rng);

}  // namespace qtele
