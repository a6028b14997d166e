#include "qtele/sources.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtele/errors.hpp"

namespace qtele {

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Vector4 kron(const Vector2& a, const Vector2& b) {
  Vector4 out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

Matrix2 partial_trace_first(const Matrix4& m) {
  Matrix2 out = Matrix2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) += m(2 * a + i, 2 * a + j);
  return out;
}

Matrix2 partial_trace_second(const Matrix4& m) {
  Matrix2 out = Matrix2::Zero();
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) += m(2 * i + b, 2 * j + b);
  return out;
}

const Vector4& phi_plus() {
  static const Vector4 v = (Vector4() << 1.0, 0.0, 0.0, 1.0).finished() / std::sqrt(2.0);
  return v;
}

const Vector4& psi_minus() {
  static const Vector4 v = (Vector4() << 0.0, 1.0, -1.0, 0.0).finished() / std::sqrt(2.0);
  return v;
}

Matrix4 WernerState::density() const {
  return p * phi_plus() * phi_plus().adjoint() + (1.0 - p) * Matrix4::Identity() / 4.0;
}

WernerState werner_from_fidelity(double f) {
  if (!(f >= 0.25 && f <= 1.0))
    throw DomainError("pair fidelity " + std::to_string(f) + " is not representable as a Werner state (needs [0.25, 1])");
  return WernerState{(4.0 * f - 1.0) / 3.0};
}

std::pair<DensityMatrix, double> signal_given_idler(const WernerState& pair, const PolarizationState& idler_outcome) {
  const Matrix4 proj = kron(idler_outcome.projector().matrix(), Matrix2::Identity());
  const Matrix2 unnorm = partial_trace_first(proj * pair.density());
  const double prob = unnorm.trace().real();
  if (prob <= 0.0) throw DegenerateHeraldError("idler outcome has zero probability");
  return {DensityMatrix(Matrix2(unnorm / prob)), prob};
}

std::pair<bool, bool> measure_pair(const WernerState& pair, const PolarizationState& idler_axis,
                                   const PolarizationState& signal_axis, Rng& rng) {
  const Matrix4 rho = pair.density();
  const std::array<PolarizationState, 2> idler = {idler_axis, idler_axis.orthogonal()};
  const std::array<PolarizationState, 2> signal = {signal_axis, signal_axis.orthogonal()};
  double u = uniform01(rng);
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 2; ++s) {
      const Vector4 k = kron(idler[i].ket(), signal[s].ket());
      const double prob = (k.adjoint() * rho * k)(0, 0).real();
      if (u < prob || (i == 1 && s == 1)) return {i == 0, s == 0};
      u -= prob;
    }
  }
  return {false, false};
}

std::vector<std::int64_t> sample_poisson_times(double rate_hz, double duration_s, Rng& rng) {
  std::vector<std::int64_t> out;
  if (rate_hz <= 0.0 || duration_s <= 0.0) return out;
  const double end_ps = duration_s * 1e12;
  out.reserve(static_cast<std::size_t>(rate_hz * duration_s * 1.01 + 16));
  std::exponential_distribution<double> gap(rate_hz * 1e-12);
  double t = gap(rng);
  while (t < end_ps) {
    out.push_back(static_cast<std::int64_t>(t));
    t += gap(rng);
  }
  return out;
}

double multi_photon_probability(double rate_hz, double window_ps) {
  const double mu = rate_hz * window_ps * 1e-12;
  // 1 - e^{-mu}(1 + mu), written to stay accurate for tiny mu.
  return -std::expm1(-mu) - mu * std::exp(-mu);
}

void WcsConfig::validate() const {
  if (!(detected_rate >= 0.0)) throw ConfigError("wcs.detected_rate", "must be non-negative");
}

WcsEmissions sample_wcs_emissions(const WcsConfig& cfg, double duration_s, Rng& rng) {
  if (!(duration_s > 0.0)) throw DomainError("duration must be positive");
  return {sample_poisson_times(cfg.detected_rate, duration_s, rng), cfg.polarization};
}

double PairSourceConfig::coincidence_rate_ch1() const {
  return idler_rate_ch2 > 0.0 ? pair_coincidence_rate * idler_rate_ch1 / idler_rate_ch2 : 0.0;
}

void PairSourceConfig::validate() const {
  const auto non_negative = [](double v, const char* field) {
    if (!(v >= 0.0)) throw ConfigError(field, "must be non-negative");
  };
  non_negative(pair_coincidence_rate, "source.pair_coincidence_rate");
  non_negative(idler_rate_ch1, "source.idler_rate_ch1");
  non_negative(idler_rate_ch2, "source.idler_rate_ch2");
  non_negative(signal_rate, "source.signal_rate");
  non_negative(brightness_visibility_slope, "source.brightness_visibility_slope");
  if (!(pair_fidelity >= 0.25 && pair_fidelity <= 1.0))
    throw ConfigError("source.pair_fidelity", "must lie in [0.25, 1]");
  if (!(zeta_at_zero_brightness >= 0.0 && zeta_at_zero_brightness <= 1.0))
    throw ConfigError("source.zeta_at_zero_brightness", "must lie in [0, 1]");
  if (pair_coincidence_rate > idler_rate_ch2)
    throw ConfigError("source.pair_coincidence_rate", "exceeds the idler singles rate on channel 2");
  if (pair_coincidence_rate > signal_rate)
    throw ConfigError("source.pair_coincidence_rate", "exceeds the signal singles rate");
  if (pair_coincidence_rate > 0.0 &&
      pair_coincidence_rate * (idler_rate_ch1 + idler_rate_ch2) > idler_rate_ch2 * signal_rate)
    throw ConfigError("source.pair_coincidence_rate", "too high for the configured singles (heralding above unity)");
}

double effective_zeta(const PairSourceConfig& cfg) {
  return std::clamp(cfg.zeta_at_zero_brightness - cfg.brightness_visibility_slope * cfg.brightness(), 0.0, 1.0);
}

PairProcess pair_process(const PairSourceConfig& cfg) {
  cfg.validate();
  PairProcess p;
  if (cfg.pair_coincidence_rate <= 0.0) return p;
  // Every single comes from a pair: P a_j = I_j, P b = S, P a_2 b = C_23.
  p.pair_rate = cfg.idler_rate_ch2 * cfg.signal_rate / cfg.pair_coincidence_rate;
  p.idler_prob_ch1 = cfg.idler_rate_ch1 / p.pair_rate;
  p.idler_prob_ch2 = cfg.idler_rate_ch2 / p.pair_rate;
  p.signal_prob = cfg.signal_rate / p.pair_rate;
  return p;
}

PairEmissions sample_pair_emissions(const PairSourceConfig& cfg, double duration_s, Rng& rng) {
  if (!(duration_s > 0.0)) throw DomainError("duration must be positive");
  PairEmissions out{{}, cfg.werner()};
  const PairProcess proc = pair_process(cfg);
  if (proc.pair_rate <= 0.0) return out;

  // Thinned marked Poisson process: only pairs with at least one surviving photon.
  const double a1 = proc.idler_prob_ch1, a2 = proc.idler_prob_ch2, b = proc.signal_prob;
  const std::array<double, 5> mark_rate = {
      proc.pair_rate * a1 * (1.0 - b),          // idler ch1 only
      proc.pair_rate * a2 * (1.0 - b),          // idler ch2 only
      proc.pair_rate * (1.0 - a1 - a2) * b,     // signal only
      proc.pair_rate * a1 * b,                  // idler ch1 + signal
      proc.pair_rate * a2 * b,                  // idler ch2 + signal
  };
  double total = 0.0;
  for (double r : mark_rate) total += r;
  const std::vector<std::int64_t> times = sample_poisson_times(total, duration_s, rng);
  std::discrete_distribution<int> mark(mark_rate.begin(), mark_rate.end());
  out.events.reserve(times.size());
  for (std::int64_t t : times) {
    switch (mark(rng)) {
      case 0: out.events.push_back({t, 1, false}); break;
      case 1: out.events.push_back({t, 2, false}); break;
      case 2: out.events.push_back({t, 0, true}); break;
      case 3: out.events.push_back({t, 1, true}); break;
      default: out.events.push_back({t, 2, true}); break;
    }
  }
  return out;
}

}  // namespace qtele
