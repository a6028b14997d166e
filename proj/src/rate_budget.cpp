#include "qtele/rate_budget.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtele/errors.hpp"
#include "qtele/tomography.hpp"

namespace qtele {

namespace {

double pair_length_for(const LinkConfig& cfg, int j) {
  const double w = static_cast<double>(cfg.window_ps);
  const double s1 = cfg.detectors[static_cast<std::size_t>(j)].jitter_sigma_ps;
  const double s3 = cfg.detectors[2].jitter_sigma_ps;
  const double sigma = std::sqrt(s1 * s1 + s3 * s3);
  if (sigma == 0.0) return 2.0 * w;
  const double inside = std::erf(w / (sigma * std::numbers::sqrt2));
  const double abs_mean_inside = 2.0 * sigma / std::sqrt(2.0 * std::numbers::pi) * (1.0 - std::exp(-w * w / (2.0 * sigma * sigma)));
  return 2.0 * w * inside - abs_mean_inside;
}

struct ClassWeights {
  double heralded[2][2] = {{0, 0}, {0, 0}};  // [j][k], j != k
  double idler_pairs[2][2] = {{0, 0}, {0, 0}};
  double uncorrelated = 0.0;
};

// Detected threefold rates per unit analyzer pass probability.
ClassWeights class_weights(const LinkConfig& cfg, const RateBudget& b) {
  ClassWeights cw;
  const double w = static_cast<double>(cfg.window_ps) * 1e-12;
  const double sig = b.transmission * b.efficiency[2];
  for (int j = 0; j < 2; ++j) {
    const int k = 1 - j;
    const double len = pair_length_for(cfg, j) * 1e-12;
    const double base = b.paired_idler[j] * b.efficiency[j] * sig * b.efficiency[k] * len;
    cw.heralded[j][k] = base * b.wcs_heralding[k];
    cw.idler_pairs[j][k] = base * b.idler[k];
  }
  const double r1 = (b.wcs_uncorrelated[0] + b.idler[0]) * b.efficiency[0];
  const double r2 = (b.wcs_uncorrelated[1] + b.idler[1]) * b.efficiency[1];
  const double r3 = (b.uncorrelated_signal + b.background) * b.efficiency[2];
  cw.uncorrelated = r1 * r2 * r3 * 3.0 * w * w;
  return cw;
}

}  // namespace

PolarizationState bsm_port(int ch) { return ch == 1 ? PolarizationState::V() : PolarizationState::H(); }

double wcs_port_factor(int ch, const PolarizationState& psi) { return 2.0 * project(psi, bsm_port(ch)); }

RateBudget make_rate_budget(const LinkConfig& cfg, const LinkMode& mode) {
  RateBudget b;
  b.transmission = transmission(cfg.fiber);
  for (std::size_t i = 0; i < 3; ++i) b.efficiency[i] = cfg.detectors[i].efficiency;
  b.open_analyzer = mode.hom;
  const double a = b.analyzer_mean_pass;
  const double sig = b.transmission * b.efficiency[2] * a;
  const std::array<double, 2> coinc = {cfg.source.coincidence_rate_ch1(), cfg.source.pair_coincidence_rate};
  const std::array<double, 2> idler = {cfg.source.idler_rate_ch1, cfg.source.idler_rate_ch2};
  const std::array<double, 2> wcs = {cfg.wcs.detected_rate_ch1, cfg.wcs.detected_rate_ch2};
  for (int j = 0; j < 2; ++j) {
    b.paired_idler[j] = coinc[j] / (b.efficiency[j] * sig);
    b.idler[j] = idler[j] / b.efficiency[j];
    const double w_em = wcs[j] / b.efficiency[j];
    if (mode.hom) {
      // Aligned WCS through an H port: twice the polarization-averaged rate.
      b.wcs_heralding[j] = 2.0 * cfg.hom.wcs_rate_scale * w_em;
      b.wcs_uncorrelated[j] = b.wcs_heralding[j];
    } else {
      b.wcs_heralding[j] = w_em;
      b.wcs_uncorrelated[j] = w_em * wcs_port_factor(j + 1, mode.input);
    }
  }
  const double unpaired = std::max(0.0, cfg.source.signal_rate - coinc[0] - coinc[1]);
  b.uncorrelated_signal = unpaired / (b.efficiency[2] * a);
  b.background = cfg.crosstalk.effective_rate() / (b.efficiency[2] * a);
  return b;
}

double pair_window_length_ps(const LinkConfig& cfg) {
  return 0.5 * (pair_length_for(cfg, 0) + pair_length_for(cfg, 1));
}

HomRates hom_rates(const LinkConfig& cfg) {
  const RateBudget b = make_rate_budget(cfg, LinkMode{true, PolarizationState::H()});
  const ClassWeights cw = class_weights(cfg, b);
  HomRates r;
  r.interfering = cw.heralded[0][1] + cw.heralded[1][0];
  r.background = cw.idler_pairs[0][1] + cw.idler_pairs[1][0] + cw.uncorrelated;
  return r;
}

ExpectedTeleport expected_teleport(const LinkConfig& cfg, Basis input) {
  const PolarizationState psi = PolarizationState::named(input);
  const RateBudget b = make_rate_budget(cfg, LinkMode{false, psi});
  const ClassWeights cw = class_weights(cfg, b);
  const WernerState pair = cfg.source.werner();
  const ConditionalState herald = teleport_conditional_state(psi, pair, OverlapModel{cfg.zeta()});
  const double herald_scale = 4.0 * herald.herald_probability;

  ExpectedTeleport e;
  // Over a basis pair every state passes with total probability one.
  e.rates_per_basis_pair.heralded = herald_scale * (cw.heralded[0][1] + cw.heralded[1][0]);
  Matrix2 m = e.rates_per_basis_pair.heralded * herald.rho.matrix();
  for (int j = 0; j < 2; ++j) {
    const double r = cw.idler_pairs[j][1 - j];
    e.rates_per_basis_pair.idler_pairs += r;
    m += r * signal_given_idler(pair, bsm_port(j + 1)).first.matrix();
  }
  e.rates_per_basis_pair.uncorrelated = cw.uncorrelated;
  m += cw.uncorrelated * DensityMatrix::maximally_mixed().matrix();
  const double total = e.rates_per_basis_pair.total();
  if (!(total > 0.0)) throw DomainError("no threefold coincidences expected for this configuration");
  e.rho = DensityMatrix(Matrix2(m / total));
  e.fidelity = fidelity(e.rho, PolarizationState::named(teleport_target(input)));
  e.accidental_fraction = 1.0 - e.rates_per_basis_pair.heralded / total;
  return e;
}

double expected_average_fidelity(const LinkConfig& cfg) {
  double sum = 0.0;
  for (Basis in : cfg.acquisition.inputs) sum += expected_teleport(cfg, in).fidelity;
  return sum / static_cast<double>(cfg.acquisition.inputs.size());
}

}  // namespace qtele
