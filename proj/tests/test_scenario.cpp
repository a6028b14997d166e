#include <gtest/gtest.h>

#include <cmath>

#include "qtele/acquisition.hpp"
#include "qtele/bsm.hpp"
#include "qtele/config.hpp"
#include "qtele/errors.hpp"
#include "qtele/rate_budget.hpp"
#include "qtele/report.hpp"
#include "qtele/scenario.hpp"

using namespace qtele;

namespace {

LinkConfig local() { return load_config(QTELE_SCENARIO_DIR "/local.yaml"); }

// Lower singles and a wide window, so full singles streams stay small while
// the threefold rate is high.
LinkConfig reduced_rate() {
  LinkConfig c = local();
  c.wcs = {5.0e5, 5.0e5};
  c.source.pair_coincidence_rate = 1.0e4;
  c.source.idler_rate_ch1 = 1.0e5;
  c.source.idler_rate_ch2 = 1.0e5;
  c.source.signal_rate = 5.0e4;
  c.window_ps = 5000;
  for (DetectorConfig& d : c.detectors) d.dead_time_ps = 0.0;
  c.validate();
  return c;
}

// Brute force: every photon on every channel, herald state decided by the
// actual WCS neighbours, then detectors and the coincidence counter.
std::uint64_t full_stream_threefold(const LinkConfig& cfg, Basis input, std::optional<Basis> analyzer, double duration,
                                    const Matrix2& channel, Rng& rng) {
  const PolarizationState psi = PolarizationState::named(input);
  const RateBudget b = make_rate_budget(cfg, LinkMode{false, psi});
  const double reach = static_cast<double>(cfg.window_ps) + cluster_guard_ps(cfg);
  const std::optional<PolarizationState> axis =
      analyzer ? std::optional<PolarizationState>(analyzer_state(setting_for(*analyzer))) : std::nullopt;
  const WernerState pair = cfg.source.werner();
  const ConditionalState herald = teleport_conditional_state(psi, pair, OverlapModel{cfg.zeta()});

  std::array<std::vector<std::int64_t>, 3> photons;
  std::array<std::vector<std::int64_t>, 2> wcs;
  for (int k = 0; k < 2; ++k) {
    wcs[k] = sample_poisson_times(b.wcs_uncorrelated[k], duration, rng);
    photons[k] = wcs[k];
    const auto lone = sample_poisson_times(b.idler[k] - b.paired_idler[k], duration, rng);
    photons[k].insert(photons[k].end(), lone.begin(), lone.end());
  }
  std::vector<PolarizedPhoton> signals;
  for (int j = 0; j < 2; ++j) {
    const auto& other = wcs[1 - j];
    const DensityMatrix unheralded = signal_given_idler(pair, bsm_port(j + 1)).first;
    for (std::int64_t t : sample_poisson_times(b.paired_idler[j], duration, rng)) {
      photons[j].push_back(t);
      const auto it = std::lower_bound(other.begin(), other.end(), t - static_cast<std::int64_t>(reach));
      const bool heralded = it != other.end() && *it <= t + static_cast<std::int64_t>(reach);
      signals.push_back({t, heralded ? herald.rho : unheralded});
    }
  }
  for (const PolarizedPhoton& p : apply_channel(signals, channel, b.transmission, rng))
    if (!axis || uniform01(rng) < project(p.polarization, *axis)) photons[2].push_back(p.t_ps);
  for (double rate : {b.uncorrelated_signal, b.background})
    for (std::int64_t t : sample_poisson_times(rate, duration, rng))
      if (!axis || uniform01(rng) < 0.5) photons[2].push_back(t);

  std::array<std::vector<TimeTag>, 3> tags;
  for (std::size_t c = 0; c < 3; ++c) {
    std::sort(photons[c].begin(), photons[c].end());
    tags[c] = detect(photons[c], cfg.detectors[c], static_cast<std::uint8_t>(c + 1), duration, rng);
  }
  return threefold_herald_counts(tags[0], tags[1], tags[2], cfg.window_ps).size();
}

}  // namespace

TEST(Scenario, ReproducibleForFixedSeed) {
  const LinkConfig cfg = fast_variant(local());
  const std::string a = report_to_json(run_scenario(cfg), false).dump();
  const std::string b = report_to_json(run_scenario(cfg), false).dump();
  EXPECT_EQ(a, b);
  LinkConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(report_to_json(run_scenario(other), false).dump(), a);
}

TEST(Scenario, MetadataHoldsTheWallClock) {
  const TeleportReport r = run_scenario(fast_variant(local()), RunOptions{false, std::nullopt});
  const auto with = report_to_json(r, true);
  const auto without = report_to_json(r, false);
  EXPECT_TRUE(with.contains("metadata"));
  EXPECT_FALSE(without.contains("metadata"));
}

TEST(Scenario, SparseSamplingMatchesFullStreams) {
  const LinkConfig cfg = reduced_rate();
  ASSERT_NEAR(4.0 * teleport_conditional_state(PolarizationState::D(), cfg.source.werner(), OverlapModel{cfg.zeta()})
                        .herald_probability,
              1.0, 1e-12);
  const double duration = 20.0;
  const DriftTimeline drift = build_drift_timeline(cfg, duration);
  double sparse = 0.0, full = 0.0;
  int k = 0;
  for (std::optional<Basis> analyzer : {std::optional<Basis>{}, std::optional<Basis>{Basis::A}, std::optional<Basis>{Basis::D}}) {
    double s = 0.0, f = 0.0;
    for (std::uint64_t rep = 0; rep < 2; ++rep, ++k) {
      AcquisitionSpec spec{LinkMode{false, PolarizationState::D()}, analyzer, 0.0, duration, 0.0, 500 + rep};
      s += static_cast<double>(simulate_acquisition(cfg, spec, drift).threefold);
      Rng rng = make_stream(77, {static_cast<std::uint64_t>(k)});
      f += static_cast<double>(full_stream_threefold(cfg, Basis::D, analyzer, duration, drift.at(0.0), rng));
    }
    EXPECT_LT(std::abs(s - f), 4.0 * std::sqrt(s + f)) << (analyzer ? basis_name(*analyzer) : "open") << ": " << s
                                                       << " vs " << f;
    sparse += s;
    full += f;
  }
  ASSERT_GT(full, 2000.0);
  EXPECT_NEAR(sparse / full, 1.0, 0.05);
}

TEST(Scenario, SampledFidelityTracksAnalyticExpectation) {
  const LinkConfig cfg = local();
  const TeleportReport r = run_scenario(cfg, RunOptions{false, std::nullopt});
  EXPECT_NEAR(r.expected_average_fidelity, expected_average_fidelity(cfg), 1e-12);
  EXPECT_LT(std::abs(r.average_fidelity - r.expected_average_fidelity), 3.0 * r.average_sigma);
  EXPECT_EQ(r.states.size(), 3u);
}

TEST(Scenario, IndistinguishabilityZeroFlattensTheDip) {
  LinkConfig cfg = local();
  cfg.zeta_override = 0.0;
  const HomReport h = run_hom(cfg);
  EXPECT_EQ(h.analytic_visibility, 0.0);
  EXPECT_LT(std::abs(h.visibility), 4.0 * h.visibility_sigma);
}

TEST(Scenario, HomScanWithinBand) {
  const LinkConfig cfg = local();
  const HomReport h = run_hom(cfg);
  EXPECT_NEAR(h.analytic_visibility, 0.728, 0.005);
  EXPECT_LT(std::abs(h.visibility - h.analytic_visibility), 4.0 * h.visibility_sigma);
  EXPECT_LE(h.analytic_visibility, h.max_visibility);
}

TEST(Export, FigureDataNeedsReports) {
  EXPECT_THROW(export_figure_data({}), DomainError);
  const std::string csv = export_figure_data({summarize(run_scenario(fast_variant(local()), RunOptions{false, std::nullopt}))});
  // Header plus V, A, R and the average.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(csv.find("local"), std::string::npos);
  EXPECT_NE(csv.find("0.6666"), std::string::npos);
}

TEST(Export, SummaryRoundTripsThroughJson) {
  const TeleportReport r = run_scenario(fast_variant(local()), RunOptions{false, std::nullopt});
  const ReportSummary a = summarize(r);
  const ReportSummary b = summary_from_json(report_to_json(r));
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_DOUBLE_EQ(a.average_fidelity, b.average_fidelity);
  EXPECT_EQ(a.by_target, b.by_target);
}
