#include "qtele/acquisition.hpp"

#include <algorithm>
#include <cmath>

#include "qtele/errors.hpp"
#include "qtele/tomography.hpp"

namespace qtele {

namespace {

enum StreamId : std::uint64_t {
  kStreamDrift = 1,
  kStreamProbe = 2,
  kClassHeralded = 11,
  kClassIdlerPairs = 12,
  kClassUncorrelated = 13,
  kClassBackground = 14,
  kStreamFinishCh1 = 21,
};

struct ClassPhotons {
  std::array<std::vector<std::int64_t>, 2> bsm;  // arrival times at channels 1 and 2
  std::vector<std::int64_t> ch3;                 // photons that passed the analyzer
};

PolarizationState random_pure(Rng& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double theta = std::acos(z);
  return {Complex(std::cos(theta / 2.0)), std::polar(std::sin(theta / 2.0), phi)};
}

// Analyzer transmission for one photon.
double analyzer_pass(const std::optional<PolarizationState>& axis, const DensityMatrix& rho) {
  return axis ? project(rho, *axis) : 1.0;
}

// True pairs (paired idler at j, signal into the fiber) with a third photon at k.
void sample_pair_clusters(const AcquisitionSpec& spec, const DriftTimeline& drift,
                          const std::optional<PolarizationState>& axis, double length_ps,
                          const std::array<double, 2>& rate, const std::array<DensityMatrix, 2>& signal_state,
                          double interference_keep, double transmission, ClassPhotons& out, std::uint64_t& clusters,
                          Rng& rng) {
  std::uniform_real_distribution<double> offset(-length_ps, length_ps);
  for (int j = 0; j < 2; ++j) {
    const int k = 1 - j;
    const std::vector<std::int64_t> times = sample_poisson_times(rate[j], spec.duration_s, rng);
    clusters += times.size();
    std::vector<PolarizedPhoton> signals;
    signals.reserve(times.size());
    for (std::int64_t t : times) {
      const std::int64_t third = t + static_cast<std::int64_t>(std::llround(offset(rng)));
      if (interference_keep < 1.0 && uniform01(rng) >= interference_keep) continue;
      out.bsm[j].push_back(t);
      out.bsm[k].push_back(std::max<std::int64_t>(third, 0));
      signals.push_back({t, signal_state[j]});
    }
    // Channel: loss and the drift unitary of the photon's time slice.
    std::size_t i = 0;
    while (i < signals.size()) {
      const double t_s = spec.start_s + static_cast<double>(signals[i].t_ps) * 1e-12;
      const std::size_t step = static_cast<std::size_t>(t_s / drift.step_s);
      std::size_t e = i;
      while (e < signals.size() &&
             static_cast<std::size_t>((spec.start_s + static_cast<double>(signals[e].t_ps) * 1e-12) / drift.step_s) == step)
        ++e;
      const std::vector<PolarizedPhoton> chunk(signals.begin() + static_cast<std::ptrdiff_t>(i),
                                               signals.begin() + static_cast<std::ptrdiff_t>(e));
      for (const PolarizedPhoton& p : apply_channel(chunk, drift.at(t_s), transmission, rng)) {
        if (uniform01(rng) < analyzer_pass(axis, p.polarization)) out.ch3.push_back(p.t_ps);
      }
      i = e;
    }
  }
}

// Three independent photons whose span can reach the window.
void sample_independent_clusters(const AcquisitionSpec& spec, const std::optional<PolarizationState>& axis,
                                 double length_ps, double r1, double r2, double r3, bool random_polarization,
                                 ClassPhotons& out, std::uint64_t& clusters, Rng& rng) {
  const double rate = r1 * r2 * r3 * 3.0 * length_ps * length_ps * 1e-24;
  const std::vector<std::int64_t> times = sample_poisson_times(rate, spec.duration_s, rng);
  clusters += times.size();
  std::uniform_real_distribution<double> offset(-length_ps, length_ps);
  for (std::int64_t t : times) {
    double d2, d3;
    do {
      d2 = offset(rng);
      d3 = offset(rng);
    } while (std::max({0.0, d2, d3}) - std::min({0.0, d2, d3}) > length_ps);
    out.bsm[0].push_back(t);
    out.bsm[1].push_back(std::max<std::int64_t>(t + static_cast<std::int64_t>(std::llround(d2)), 0));
    const double pass = random_polarization ? analyzer_pass(axis, DensityMatrix::pure(random_pure(rng)))
                                            : (axis ? 0.5 : 1.0);
    if (uniform01(rng) < pass) out.ch3.push_back(std::max<std::int64_t>(t + static_cast<std::int64_t>(std::llround(d3)), 0));
  }
}

// Detection of one class on all three channels (efficiency and jitter only).
std::array<std::vector<TimeTag>, 3> detect_class(const LinkConfig& cfg, ClassPhotons& p, double duration_s, Rng& rng) {
  std::array<std::vector<TimeTag>, 3> tags;
  std::array<std::vector<std::int64_t>*, 3> src = {&p.bsm[0], &p.bsm[1], &p.ch3};
  for (std::size_t c = 0; c < 3; ++c) {
    std::sort(src[c]->begin(), src[c]->end());
    DetectorConfig d = cfg.detectors[c];
    d.dark_rate = 0.0;
    d.dead_time_ps = 0.0;
    tags[c] = detect(*src[c], d, static_cast<std::uint8_t>(c + 1), duration_s, rng);
  }
  return tags;
}

}  // namespace

const Matrix2& DriftTimeline::at(double t_s) const {
  if (effective.empty()) throw DomainError("drift timeline is empty");
  const double idx = std::floor(t_s / step_s);
  const std::size_t i = idx <= 0.0 ? 0 : std::min(static_cast<std::size_t>(idx), effective.size() - 1);
  return effective[i];
}

DriftTimeline build_drift_timeline(const LinkConfig& cfg, double total_s) {
  DriftTimeline tl;
  tl.step_s = cfg.acquisition.drift_step_s;
  Rng drift_rng = make_stream(cfg.seed, {kStreamDrift});
  Rng probe_rng = make_stream(cfg.seed, {kStreamProbe});
  DriftState fiber{random_unitary(drift_rng), 0.0};

  CompensationOptions opts;
  opts.max_iters = cfg.compensation.max_iters;
  opts.required_fidelity = cfg.compensation.required_fidelity;
  const std::vector<PolarizationState> refs = {PolarizationState::H(), PolarizationState::D()};
  const auto compensate = [&](const Matrix2& channel, const Matrix2& start) {
    CompensationResult r;
    if (cfg.compensation.reference_photons == 0) {
      NoiselessProbe probe(channel);
      r = compensate_polarization(probe, refs, opts, start);
    } else {
      ShotNoiseProbe probe(channel, cfg.compensation.reference_photons, probe_rng);
      r = compensate_polarization(probe, refs, opts, start);
    }
    ++tl.compensations;
    tl.worst_reference_fidelity = std::min(tl.worst_reference_fidelity, r.worst_fidelity);
    return r.correction;
  };

  Matrix2 correction = compensate(fiber.unitary, Matrix2::Identity());
  double next_comp = cfg.compensation.interval_s;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(total_s / tl.step_s)) + 1;
  tl.effective.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * tl.step_s;
    if (cfg.compensation.enabled && t >= next_comp) {
      correction = compensate(fiber.unitary, correction);
      next_comp += cfg.compensation.interval_s;
    }
    tl.effective.push_back(correction * fiber.unitary);
    fiber = evolve_drift(fiber, cfg.fiber.drift_rate, tl.step_s, drift_rng);
  }
  return tl;
}

double cluster_guard_ps(const LinkConfig& cfg) {
  if (cfg.acquisition.guard_ps >= 0.0) return cfg.acquisition.guard_ps;
  double sigma = 0.0;
  for (const DetectorConfig& d : cfg.detectors) sigma = std::max(sigma, d.jitter_sigma_ps);
  return 6.0 * std::sqrt(2.0) * sigma + 1.0;
}

AcquisitionResult simulate_acquisition(const LinkConfig& cfg, const AcquisitionSpec& spec, const DriftTimeline& drift,
                                       bool keep_tags) {
  if (!(spec.duration_s > 0.0)) throw DomainError("acquisition duration must be positive");
  const RateBudget b = make_rate_budget(cfg, spec.mode);
  const double length = static_cast<double>(cfg.window_ps) + cluster_guard_ps(cfg);
  const std::optional<PolarizationState> axis =
      spec.analyzer ? std::optional<PolarizationState>(analyzer_state(setting_for(*spec.analyzer))) : std::nullopt;
  const WernerState pair = cfg.source.werner();
  const double zeta = cfg.zeta();

  AcquisitionResult res;
  std::array<std::vector<TimeTag>, 3> merged;
  const auto absorb = [&](std::array<std::vector<TimeTag>, 3>&& t) {
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<TimeTag> m;
      m.reserve(merged[c].size() + t[c].size());
      std::merge(merged[c].begin(), merged[c].end(), t[c].begin(), t[c].end(), std::back_inserter(m), tag_before);
      merged[c].swap(m);
    }
  };

  // Heralded: paired idler + WCS photon.
  {
    Rng rng = make_stream(cfg.seed, {spec.stream, kClassHeralded});
    std::array<double, 2> rate{};
    std::array<DensityMatrix, 2> state;
    double keep = 1.0;
    if (spec.mode.hom) {
      keep = 1.0 - zeta * hom_dip_profile(spec.hom_delay_ps, cfg.hom.coherence_time_ps);
    } else {
      const ConditionalState h = teleport_conditional_state(spec.mode.input, pair, OverlapModel{zeta});
      state = {h.rho, h.rho};
      for (double& r : rate) r = 4.0 * h.herald_probability;
    }
    for (int j = 0; j < 2; ++j) {
      const double scale = spec.mode.hom ? 1.0 : rate[j];
      rate[j] = scale * b.paired_idler[j] * b.wcs_heralding[1 - j] * 2.0 * length * 1e-12;
    }
    ClassPhotons p;
    sample_pair_clusters(spec, drift, axis, length, rate, state, keep, b.transmission, p, res.clusters[0], rng);
    absorb(detect_class(cfg, p, spec.duration_s, rng));
  }
  // Paired idler + an idler from another pair.
  {
    Rng rng = make_stream(cfg.seed, {spec.stream, kClassIdlerPairs});
    std::array<double, 2> rate{};
    std::array<DensityMatrix, 2> state;
    for (int j = 0; j < 2; ++j) {
      rate[j] = b.paired_idler[j] * b.idler[1 - j] * 2.0 * length * 1e-12;
      state[j] = signal_given_idler(pair, bsm_port(j + 1)).first;
    }
    ClassPhotons p;
    sample_pair_clusters(spec, drift, axis, length, rate, state, 1.0, b.transmission, p, res.clusters[1], rng);
    absorb(detect_class(cfg, p, spec.duration_s, rng));
  }
  const double r1 = b.wcs_uncorrelated[0] + b.idler[0];
  const double r2 = b.wcs_uncorrelated[1] + b.idler[1];
  // Three independent photons: unpaired signal light, then crosstalk background.
  {
    Rng rng = make_stream(cfg.seed, {spec.stream, kClassUncorrelated});
    ClassPhotons p;
    sample_independent_clusters(spec, axis, length, r1, r2, b.uncorrelated_signal, false, p, res.clusters[2], rng);
    absorb(detect_class(cfg, p, spec.duration_s, rng));
  }
  if (b.background > 0.0) {
    Rng rng = make_stream(cfg.seed, {spec.stream, kClassBackground});
    ClassPhotons p;
    sample_independent_clusters(spec, axis, length, r1, r2, b.background, true, p, res.clusters[3], rng);
    absorb(detect_class(cfg, p, spec.duration_s, rng));
  }

  // Dark counts and dead time act on the merged per-channel streams.
  std::array<std::vector<TimeTag>, 3> final_tags;
  for (std::size_t c = 0; c < 3; ++c) {
    Rng rng = make_stream(cfg.seed, {spec.stream, kStreamFinishCh1 + c});
    std::vector<std::int64_t> t;
    t.reserve(merged[c].size());
    for (const TimeTag& x : merged[c]) t.push_back(x.t_ps);
    DetectorConfig d = cfg.detectors[c];
    d.efficiency = 1.0;
    d.jitter_sigma_ps = 0.0;
    final_tags[c] = detect(t, d, static_cast<std::uint8_t>(c + 1), spec.duration_s, rng);
  }
  res.threefold = threefold_herald_counts(final_tags[0], final_tags[1], final_tags[2], cfg.window_ps).size();
  if (keep_tags) res.tags = std::move(final_tags);
  return res;
}

}  // namespace qtele
