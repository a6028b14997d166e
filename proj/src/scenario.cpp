#include "qtele/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "qtele/errors.hpp"
#include "qtele/tagfile.hpp"

namespace qtele {

namespace {

constexpr std::uint64_t kStreamMonteCarlo = 3;

std::vector<double> default_delays(double tau) {
  std::vector<double> d;
  for (double x : {-5.0, -4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) d.push_back(x * tau);
  return d;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

std::uint64_t teleport_stream_id(Basis input, Basis setting) {
  return 1000 + 10 * static_cast<std::uint64_t>(input) + static_cast<std::uint64_t>(setting);
}

std::uint64_t hom_stream_id(std::size_t point) { return 100000 + point; }

HomReport run_hom(const LinkConfig& cfg, const std::vector<double>& delays_ps) {
  cfg.validate();
  std::vector<double> delays = delays_ps;
  if (delays.empty()) delays = cfg.hom.delays_ps;
  if (delays.empty()) delays = default_delays(cfg.hom.coherence_time_ps);

  HomReport rep;
  rep.zeta = cfg.zeta();
  const HomRates rates = hom_rates(cfg);
  rep.max_visibility = rates.max_visibility();
  rep.analytic_visibility = hom_scan(rates, OverlapModel{rep.zeta}, {0.0, 1e12}, cfg.hom.coherence_time_ps).visibility;

  DriftTimeline still;  // the analyzer is removed, so polarization drift is irrelevant
  still.effective.push_back(Matrix2::Identity());
  const double tau = cfg.hom.coherence_time_ps;
  double far_sum = 0.0;
  int far_n = 0;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    AcquisitionSpec spec;
    spec.mode = LinkMode{true, PolarizationState::H()};
    spec.duration_s = cfg.hom.seconds_per_point;
    spec.hom_delay_ps = delays[i];
    spec.stream = hom_stream_id(i);
    const double counts = static_cast<double>(simulate_acquisition(cfg, spec, still).threefold);
    rep.points.push_back({delays[i], counts, std::sqrt(counts)});
    if (std::abs(delays[i]) >= 3.0 * tau) {
      far_sum += counts;
      ++far_n;
    }
  }
  if (far_n == 0) throw UndefinedVisibilityError("HOM scan has no delay beyond three coherence times");
  const HomPoint& dip = *std::min_element(rep.points.begin(), rep.points.end(), [](const HomPoint& a, const HomPoint& b) {
    return std::abs(a.delay_ps) < std::abs(b.delay_ps);
  });
  const double far = far_sum / far_n;
  if (!(far > 0.0)) throw UndefinedVisibilityError("no coincidences away from the dip");
  rep.visibility = estimate_visibility(dip.rate, far).value;
  // Poisson errors of the dip point and of the mean over far points.
  rep.visibility_sigma = std::sqrt(dip.rate / (far * far) + dip.rate * dip.rate * (far / far_n) / std::pow(far, 4));
  return rep;
}

TeleportReport run_scenario(const LinkConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  TeleportReport rep;
  rep.scenario = cfg.name;
  rep.seed = cfg.seed;
  rep.config = cfg;
  rep.started_at = utc_now();
  rep.zeta = cfg.zeta();
  rep.werner_p = cfg.source.werner().p;

  const auto& schedule = projection_schedule();
  const double per = cfg.acquisition.seconds_per_setting;
  const double total_s = per * static_cast<double>(cfg.acquisition.inputs.size() * schedule.size());
  const DriftTimeline drift = build_drift_timeline(cfg, total_s);
  rep.rates.compensations = drift.compensations;
  rep.rates.worst_reference_fidelity = drift.worst_reference_fidelity;

  if (options.tag_dump_dir) std::filesystem::create_directories(*options.tag_dump_dir);

  RunCounts counts;
  std::uint64_t all_threefold = 0;
  std::size_t slot = 0;
  for (Basis input : cfg.acquisition.inputs) {
    for (const auto& [setting, plates] : schedule) {
      AcquisitionSpec spec;
      spec.mode = LinkMode{false, PolarizationState::named(input)};
      spec.analyzer = setting;
      spec.start_s = per * static_cast<double>(slot++);
      spec.duration_s = per;
      spec.stream = teleport_stream_id(input, setting);
      AcquisitionResult r = simulate_acquisition(cfg, spec, drift, options.tag_dump_dir.has_value());
      counts[input][setting] = r.threefold;
      all_threefold += r.threefold;
      if (options.tag_dump_dir) {
        TagFile f;
        f.header.channel_names = {{1, "bsm1"}, {2, "bsm2"}, {3, "signal"}};
        std::ostringstream meta;
        meta << "{\"scenario\":\"" << cfg.name << "\",\"seed\":" << cfg.seed << ",\"input\":\"" << basis_name(input)
             << "\",\"setting\":\"" << basis_name(setting) << "\",\"qwp_deg\":" << plates.qwp_deg
             << ",\"hwp_deg\":" << plates.hwp_deg << ",\"duration_s\":" << per << "}";
        f.header.metadata = meta.str();
        f.tags = merge_streams({r.tags[0], r.tags[1], r.tags[2]});
        write_tag_file(*options.tag_dump_dir /
                           (std::string(basis_name(input)) + "_" + std::string(basis_name(setting)) + ".qtt"),
                       f);
      }
    }
  }

  Rng mc = make_stream(cfg.seed, {kStreamMonteCarlo});
  const TeleportEvaluation ev = evaluate_teleport_run(counts, cfg.acquisition.mc_trials, mc);
  for (const StateEvaluation& s : ev.states) {
    StateReport sr{s.input, s.target, s.result, expected_teleport(cfg, s.input).fidelity};
    rep.states.push_back(sr);
  }
  rep.average_fidelity = ev.average_fidelity;
  rep.average_sigma = ev.average_sigma;
  rep.beats_classical_bound = ev.beats_classical_bound;
  rep.expected_average_fidelity = expected_average_fidelity(cfg);

  RateDiagnostics& d = rep.rates;
  d.singles = {cfg.source.idler_rate_ch1 + cfg.wcs.detected_rate_ch1,
               cfg.source.idler_rate_ch2 + cfg.wcs.detected_rate_ch2,
               cfg.source.signal_rate + cfg.crosstalk.effective_rate()};
  d.coincidence_ch13 = cfg.source.coincidence_rate_ch1();
  d.coincidence_ch23 = cfg.source.pair_coincidence_rate;
  d.background_ch3 = cfg.crosstalk.effective_rate();
  d.threefold_rate = static_cast<double>(all_threefold) / total_s;
  d.transmission = transmission(cfg.fiber);
  for (Basis input : cfg.acquisition.inputs) {
    const ThreefoldRates t = expected_teleport(cfg, input).rates_per_basis_pair;
    d.expected_true_threefold += 0.5 * t.heralded;
    d.expected_accidental_threefold += 0.5 * (t.idler_pairs + t.uncorrelated);
  }
  d.expected_true_threefold /= static_cast<double>(cfg.acquisition.inputs.size());
  d.expected_accidental_threefold /= static_cast<double>(cfg.acquisition.inputs.size());

  if (options.include_hom) rep.hom = run_hom(cfg);
  rep.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rep;
}

}  // namespace qtele
