#include "qtele/bsm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

struct WeightedVector {
  double weight;
  Vector4 v;
};

// The herald effect as a sum of rank-1 terms on (WCS ⊗ idler).
std::array<WeightedVector, 3> herald_terms(double zeta) {
  Vector4 hv = Vector4::Zero();
  hv(1) = 1.0;
  Vector4 vh = Vector4::Zero();
  vh(2) = 1.0;
  return {{{zeta, psi_minus()}, {0.5 * (1.0 - zeta), hv}, {0.5 * (1.0 - zeta), vh}}};
}

double far_mean(const HomCurve& c, double coherence_time_ps) {
  double sum = 0.0;
  int n = 0;
  for (const HomPoint& p : c.points) {
    if (std::abs(p.delay_ps) >= 3.0 * coherence_time_ps) {
      sum += p.rate;
      ++n;
    }
  }
  if (n == 0) throw UndefinedVisibilityError("HOM scan has no delay beyond three coherence times");
  return sum / n;
}

const HomPoint& dip_point(const HomCurve& c) {
  if (c.points.empty()) throw UndefinedVisibilityError("HOM scan has no points");
  return *std::min_element(c.points.begin(), c.points.end(), [](const HomPoint& a, const HomPoint& b) {
    return std::abs(a.delay_ps) < std::abs(b.delay_ps);
  });
}

}  // namespace

void OverlapModel::validate() const {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw DomainError("mode overlap zeta must lie in [0, 1]");
}

HeraldPovm psi_minus_herald(const OverlapModel& overlap) {
  overlap.validate();
  HeraldPovm out{Matrix4::Zero()};
  for (const auto& t : herald_terms(overlap.zeta)) out.effect += t.weight * t.v * t.v.adjoint();
  return out;
}

ConditionalState teleport_conditional_state(const PolarizationState& input, const WernerState& pair,
                                            const OverlapModel& overlap) {
  overlap.validate();
  const Vector2& psi = input.ket();
  const Vector4& phi = phi_plus();

  // Entangled part: contract each rank-1 herald term with |psi>_a |Phi+>_bc.
  Matrix2 entangled = Matrix2::Zero();
  for (const auto& t : herald_terms(overlap.zeta)) {
    Vector2 amp = Vector2::Zero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) amp(c) += std::conj(t.v(2 * a + b)) * psi(a) * phi(2 * b + c);
    entangled += t.weight * amp * amp.adjoint();
  }

  // White part: the idler is I/2 and uncorrelated with the signal.
  const Matrix4 effect = psi_minus_herald(overlap).effect;
  const Matrix4 joint = kron(Matrix2(psi * psi.adjoint()), Matrix2(0.5 * Matrix2::Identity()));
  const double white_prob = (effect * joint).trace().real();

  const Matrix2 unnorm = pair.p * entangled + (1.0 - pair.p) * white_prob * 0.5 * Matrix2::Identity();
  const double prob = unnorm.trace().real();
  if (!(prob > 1e-15)) throw DegenerateHeraldError("Psi- herald has zero probability for this input");
  Matrix2 rho = unnorm / prob;
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return {DensityMatrix(rho), prob};
}

double hom_dip_profile(double delay_ps, double coherence_time_ps) {
  if (coherence_time_ps <= 0.0) return delay_ps == 0.0 ? 1.0 : 0.0;
  const double x = delay_ps / coherence_time_ps;
  return std::exp(-x * x);
}

double HomRates::max_visibility() const {
  const double total = interfering + background;
  return total > 0.0 ? interfering / total : 0.0;
}

HomCurve hom_scan(const HomRates& rates, const OverlapModel& overlap, const std::vector<double>& delays_ps,
                  double coherence_time_ps) {
  overlap.validate();
  HomCurve c;
  for (double d : delays_ps) {
    const double r = rates.interfering * (1.0 - overlap.zeta * hom_dip_profile(d, coherence_time_ps)) + rates.background;
    c.points.push_back({d, r, 0.0});
  }
  const double far = far_mean(c, coherence_time_ps);
  c.visibility = far > 0.0 ? (far - dip_point(c).rate) / far : 0.0;
  return c;
}

HomCurve hom_scan(const HomRates& rates, const OverlapModel& overlap, const std::vector<double>& delays_ps,
                  double coherence_time_ps, double seconds_per_point, Rng& rng) {
  HomCurve c = hom_scan(rates, overlap, delays_ps, coherence_time_ps);
  double far_counts = 0.0;
  int far_n = 0;
  for (HomPoint& p : c.points) {
    p.rate = static_cast<double>(poisson(rng, p.rate * seconds_per_point));
    p.sigma = std::sqrt(p.rate);
    if (std::abs(p.delay_ps) >= 3.0 * coherence_time_ps) {
      far_counts += p.rate;
      ++far_n;
    }
  }
  const double far = far_counts / far_n;
  if (!(far > 0.0)) throw UndefinedVisibilityError("no coincidences away from the dip");
  const double dip = dip_point(c).rate;
  c.visibility = (far - dip) / far;
  // Poisson propagation: var(far mean) = far / n.
  c.visibility_sigma = std::sqrt(dip / (far * far) + dip * dip / (far * far * far * far) * (far / far_n));
  return c;
}

double visibility_to_zeta(double v_target, const HomRates& rates) {
  const double vmax = rates.max_visibility();
  if (!(v_target >= 0.0) || v_target > vmax + 1e-12)
    throw CalibrationError("visibility " + std::to_string(v_target) + " is not achievable (maximum " +
                               std::to_string(vmax) + ")",
                           vmax);
  const std::vector<double> delays = {0.0, 1e9};
  const auto vis = [&](double z) { return hom_scan(rates, OverlapModel{z}, delays, 1.0).visibility; };
  double lo = 0.0, hi = 1.0;
  if (vis(hi) <= v_target) return 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (vis(mid) < v_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qtele
