#pragma once

#include <cstdint>
#include <vector>

#include "qtele/polarization.hpp"
#include "qtele/rng.hpp"

namespace qtele {

struct FiberConfig {
  double length_km = 0.0;
  double atten_db_per_km = 0.0;
  double excess_loss_db = 0.0;  // connectors, mux/demux, patch panels
  double drift_rate = 0.0;      // rad / sqrt(s), per rotation axis

  double total_loss_db() const { return length_km * atten_db_per_km + excess_loss_db; }
  void validate() const;
};

struct CrosstalkConfig {
  double background_rate_ch3 = 0.0;       // counts/s reaching the signal detector, unfiltered
  double bandpass_suppression_db = 0.0;

  double effective_rate() const;
  void validate() const;
};

struct DriftState {
  Matrix2 unitary = Matrix2::Identity();
  double elapsed_s = 0.0;
};

// A photon on its way to the signal analyzer.
struct PolarizedPhoton {
  std::int64_t t_ps = 0;
  DensityMatrix polarization;
};

double transmission(const FiberConfig& cfg);

// Haar-random element of SU(2).
Matrix2 random_unitary(Rng& rng);

// Random-walk step: multiplies by exp(-i theta.sigma/2), theta_k ~ N(0, rate^2 dt).
DriftState evolve_drift(const DriftState& state, double drift_rate, double dt_s, Rng& rng);

// Independent loss with probability 1 - T; survivors rotated by `drift`.
std::vector<PolarizedPhoton> apply_channel(const std::vector<PolarizedPhoton>& events, const Matrix2& drift,
                                           double transmission, Rng& rng);

// Adds unpolarized Poisson background over [0, duration), keeping time order.
// Each background photon gets a uniformly random pure polarization.
std::vector<PolarizedPhoton> inject_background(const std::vector<PolarizedPhoton>& events,
                                               const CrosstalkConfig& cfg, double duration_s, Rng& rng);

// Reference-light access to a channel for the compensation loop: inject
// `reference` through the channel followed by `correction`, and report the
// fraction found in `reference` at the far end.
class PolarizationProbe {
 public:
  virtual ~PolarizationProbe() = default;
  virtual double pass_fraction(const PolarizationState& reference, const Matrix2& correction) = 0;
};

class NoiselessProbe : public PolarizationProbe {
 public:
  explicit NoiselessProbe(Matrix2 channel) : channel_(std::move(channel)) {}
  double pass_fraction(const PolarizationState& reference, const Matrix2& correction) override;

 private:
  Matrix2 channel_;
};

// Binomial shot noise from `shots` reference photons per query.
class ShotNoiseProbe : public PolarizationProbe {
 public:
  ShotNoiseProbe(Matrix2 channel, std::uint64_t shots, Rng& rng)
      : channel_(std::move(channel)), shots_(shots), rng_(rng) {}
  double pass_fraction(const PolarizationState& reference, const Matrix2& correction) override;

 private:
  Matrix2 channel_;
  std::uint64_t shots_;
  Rng& rng_;
};

struct CompensationOptions {
  int max_iters = 200;                  // coordinate-descent sweeps
  double required_fidelity = 0.995;     // per reference
  double initial_step_rad = 1.5707963267948966;
  double min_step_rad = 1e-7;
};

struct CompensationResult {
  Matrix2 correction = Matrix2::Identity();
  int iterations = 0;
  double worst_fidelity = 0.0;
};

// Derivative-free coordinate descent over three rotation angles, minimizing the
// summed reference infidelity. `references` must be non-orthogonal.
// Throws CompensationError (carrying the best infidelity) if either reference
// stays below options.required_fidelity.
CompensationResult compensate_polarization(PolarizationProbe& probe, const std::vector<PolarizationState>& references,
                                           const CompensationOptions& options = {},
                                           const Matrix2& start = Matrix2::Identity());

}  // namespace qtele
