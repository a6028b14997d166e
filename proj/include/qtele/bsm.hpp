#pragma once

#include <utility>
#include <vector>

#include "qtele/polarization.hpp"
#include "qtele/sources.hpp"

namespace qtele {

// Scalar mode overlap of the WCS photon and the idler at the beamsplitter.
struct OverlapModel {
  double zeta = 1.0;  // 1: indistinguishable, 0: fully distinguishable

  void validate() const;
};

// Two-photon effect on (WCS ⊗ idler) polarization space for the Psi- signature.
struct HeraldPovm {
  Matrix4 effect;
};

// zeta |Psi-><Psi-| + (1 - zeta)/2 (|HV><HV| + |VH><VH|).
HeraldPovm psi_minus_herald(const OverlapModel& overlap);

struct ConditionalState {
  DensityMatrix rho;
  double herald_probability = 0.0;
};

// Signal state after a Psi- herald between the WCS photon in `input` and the
// idler of `pair`. No corrective unitary is applied.
// Throws DegenerateHeraldError when the herald probability vanishes.
ConditionalState teleport_conditional_state(const PolarizationState& input, const WernerState& pair,
                                            const OverlapModel& overlap);

// Interference dip profile g(tau), g(0) = 1.
double hom_dip_profile(double delay_ps, double coherence_time_ps);

// Coincidence rates (counts/s) of the HOM configuration split by physical origin.
// Only `interfering` is reduced by the dip: rate(tau) = interfering * (1 - zeta g(tau)) + background.
struct HomRates {
  double interfering = 0.0;
  double background = 0.0;

  double max_visibility() const;
};

struct HomPoint {
  double delay_ps = 0.0;
  double rate = 0.0;    // counts/s (analytic) or counts (sampled)
  double sigma = 0.0;
};

struct HomCurve {
  std::vector<HomPoint> points;
  double visibility = 0.0;
  double visibility_sigma = 0.0;
};

// Analytic dip curve. The visibility compares the point closest to zero delay
// with the mean of the points beyond three coherence times.
HomCurve hom_scan(const HomRates& rates, const OverlapModel& overlap, const std::vector<double>& delays_ps,
                  double coherence_time_ps);

// Sampled dip curve: each point is Poisson-distributed counts over `seconds_per_point`.
HomCurve hom_scan(const HomRates& rates, const OverlapModel& overlap, const std::vector<double>& delays_ps,
                  double coherence_time_ps, double seconds_per_point, Rng& rng);

// zeta reproducing `v_target` on the analytic scan, by bisection.
// Throws CalibrationError if v_target exceeds the achievable maximum.
double visibility_to_zeta(double v_target, const HomRates& rates);

}  // namespace qtele
