// qtele: command-line front end for the teleportation link simulator.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtele/config.hpp"
#include "qtele/errors.hpp"
#include "qtele/oracles.hpp"
#include "qtele/rate_budget.hpp"
#include "qtele/report.hpp"
#include "qtele/scenario.hpp"
#include "qtele/tagfile.hpp"
#include "qtele/tomography.hpp"

namespace fs = std::filesystem;
using namespace qtele;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheck = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool fast = false;
  std::string out_dir = "runs";
};

LinkConfig load(const CommonOptions& o) {
  LinkConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.fast) cfg = fast_variant(cfg);
  return cfg;
}

std::string stamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

fs::path make_run_dir(const CommonOptions& o, const LinkConfig& cfg, const std::string& kind) {
  fs::path dir = fs::path(o.out_dir) / (cfg.name + "_" + kind + "_seed" + std::to_string(cfg.seed) + "_" + stamp());
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

bool in_band(double v, const std::array<double, 2>& b) { return v >= b[0] && v <= b[1]; }

int check_band(const char* what, double v, const std::optional<std::array<double, 2>>& band) {
  if (!band) {
    std::cerr << "--check: no " << what << " band configured\n";
    return kExitCheck;
  }
  const bool ok = in_band(v, *band);
  std::cout << "check " << what << ' ' << std::fixed << std::setprecision(4) << v << " in [" << (*band)[0] << ", "
            << (*band)[1] << "]: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : kExitCheck;
}

int cmd_run(const CommonOptions& o, bool tag_dump, bool check, bool no_hom) {
  const LinkConfig cfg = load(o);
  const fs::path dir = make_run_dir(o, cfg, "run");
  RunOptions ro;
  ro.include_hom = !no_hom;
  if (tag_dump) ro.tag_dump_dir = dir / "tags";
  const TeleportReport rep = run_scenario(cfg, ro);
  write_text(dir / "report.json", report_to_json(rep).dump(2) + "\n");
  write_text(dir / "fidelities.csv", export_figure_data({summarize(rep)}));
  if (rep.hom) write_text(dir / "hom.csv", export_hom_curve(*rep.hom));

  std::cout << std::fixed << std::setprecision(4);
  std::cout << cfg.name << " seed " << cfg.seed << "  zeta " << rep.zeta << "  p " << rep.werner_p << '\n';
  for (const StateReport& s : rep.states)
    std::cout << "  " << basis_name(s.input) << " -> " << basis_name(s.target) << "  F = " << s.result.fidelity
              << " +- " << s.result.fidelity_sigma << "  (expected " << s.expected_fidelity << ")\n";
  std::cout << "  average F = " << rep.average_fidelity << " +- " << rep.average_sigma << "  (expected "
            << rep.expected_average_fidelity << ", classical 0.6667)\n";
  if (rep.hom)
    std::cout << "  HOM V = " << rep.hom->visibility << " +- " << rep.hom->visibility_sigma << "  (expected "
              << rep.hom->analytic_visibility << ")\n";
  std::cout << "  report: " << (dir / "report.json").string() << '\n';

  int rc = 0;
  if (check) {
    rc = std::max(rc, check_band("average_fidelity", rep.average_fidelity, cfg.check.average_fidelity));
    if (rep.hom && cfg.check.visibility) rc = std::max(rc, check_band("visibility", rep.hom->visibility, cfg.check.visibility));
  }
  return rc;
}

int cmd_hom(const CommonOptions& o, bool check) {
  const LinkConfig cfg = load(o);
  const fs::path dir = make_run_dir(o, cfg, "hom");
  const HomReport h = run_hom(cfg);
  nlohmann::json j = hom_to_json(h);
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  write_text(dir / "hom.json", j.dump(2) + "\n");
  write_text(dir / "hom.csv", export_hom_curve(h));
  std::cout << std::fixed << std::setprecision(4) << cfg.name << " seed " << cfg.seed << "  HOM V = " << h.visibility
            << " +- " << h.visibility_sigma << "  (expected " << h.analytic_visibility << ", max " << h.max_visibility
            << ")\n  curve: " << (dir / "hom.csv").string() << '\n';
  return check ? check_band("visibility", h.visibility, cfg.check.visibility) : 0;
}

int cmd_export(const std::vector<std::string>& reports, const std::string& out) {
  std::vector<ReportSummary> s;
  for (const auto& r : reports) s.push_back(load_report_summary(r));
  const std::string csv = export_figure_data(s);
  if (out.empty())
    std::cout << csv;
  else
    write_text(out, csv);
  return 0;
}

int cmd_validate(const std::string& path) {
  const LinkConfig cfg = load_config(path);
  std::cout << dump_config(cfg);
  return 0;
}

int cmd_predict(const CommonOptions& o) {
  const LinkConfig cfg = load(o);
  const HomRates hr = hom_rates(cfg);
  const double zeta = cfg.zeta();
  std::cout << std::fixed << std::setprecision(4);
  std::cout << cfg.name << "  zeta " << zeta << "  transmission " << std::setprecision(6) << transmission(cfg.fiber)
            << std::setprecision(4) << '\n';
  std::cout << "  HOM V = " << hom_scan(hr, OverlapModel{zeta}, {0.0, 1e12}, cfg.hom.coherence_time_ps).visibility
            << "  (max " << hr.max_visibility() << ")\n";
  for (Basis in : cfg.acquisition.inputs) {
    const ExpectedTeleport e = expected_teleport(cfg, in);
    std::cout << "  " << basis_name(in) << "  F = " << e.fidelity << "  accidental fraction " << e.accidental_fraction
              << "  threefold/s per setting pair " << std::setprecision(3) << e.rates_per_basis_pair.total()
              << std::setprecision(4) << '\n';
  }
  std::cout << "  average F = " << expected_average_fidelity(cfg) << '\n';
  return 0;
}

std::vector<TimeTag> read_tags_any(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error("cannot open " + path);
  char first[6] = {};
  probe.read(first, 6);
  if (std::string(first, 6) == "QTTAGS") return read_tag_file(fs::path(path)).tags;
  std::ifstream text(path);
  return read_tag_text(text);
}

int cmd_oracle_teleport(const std::string& input, double p, double zeta) {
  const PolarizationState in = PolarizationState::named(basis_from_name(input));
  const auto r = oracle::teleport(in.ket(), p, zeta);
  const Basis target = teleport_target(basis_from_name(input));
  const Vector2 t = PolarizationState::named(target).ket();
  std::cout << std::setprecision(12) << "herald probability " << r.herald_probability << "\nrho =\n"
            << r.rho << "\nF(" << basis_name(target) << ") = " << (t.adjoint() * r.rho * t)(0, 0).real() << '\n';
  return 0;
}

int cmd_oracle_coincidence(const std::string& path, std::int64_t width, const std::vector<int>& channels) {
  std::vector<TimeTag> tags = read_tags_any(path);
  std::stable_sort(tags.begin(), tags.end(), tag_before);
  CoincidenceWindow w;
  w.width_ps = width;
  for (int c : channels) w.channels.push_back(static_cast<std::uint8_t>(c));
  w.validate();
  const auto groups = oracle::coincidences(tags, w);
  std::cout << "groups " << groups.size() / w.channels.size() << '\n';
  for (std::size_t i = 0; i < groups.size(); i += w.channels.size()) {
    for (std::size_t k = 0; k < w.channels.size(); ++k)
      std::cout << (k ? " " : "") << static_cast<int>(groups[i + k].channel) << ':' << groups[i + k].t_ps;
    std::cout << '\n';
  }
  return 0;
}

int cmd_oracle_bound() {
  std::cout << std::setprecision(12) << "zeta=0 p=1  average F = " << oracle::average_fidelity(1.0, 0.0)
            << "\nzeta=1 p=1  average F = " << oracle::average_fidelity(1.0, 1.0) << "\nclassical bound 2/3 = "
            << 2.0 / 3.0 << '\n';
  return 0;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("config", o.config, "scenario YAML file")->required();
  sub->add_option("--seed", o.seed, "override the configured seed");
  sub->add_flag("--fast", o.fast, "scale acquisition times by 0.1 and widen check bands");
  sub->add_option("--out-dir", o.out_dir, "parent directory for run directories")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-qubit teleportation link simulator"};
  app.require_subcommand(1);

  CommonOptions run_o, hom_o, pred_o;
  bool tag_dump = false, run_check = false, no_hom = false, hom_check = false;
  auto* run = app.add_subcommand("run", "simulate a scenario and reconstruct the teleported states");
  add_common(run, run_o);
  run->add_flag("--tag-dump", tag_dump, "write binary tag files for every acquisition");
  run->add_flag("--check", run_check, "exit 3 when results fall outside the configured bands");
  run->add_flag("--no-hom", no_hom, "skip the HOM scan");

  auto* hom = app.add_subcommand("hom", "simulate the HOM dip scan");
  add_common(hom, hom_o);
  hom->add_flag("--check", hom_check, "exit 3 when the visibility falls outside the configured band");

  std::vector<std::string> reports;
  std::string export_out;
  auto* exp = app.add_subcommand("export", "fidelity bar-plot table from saved reports");
  exp->add_option("reports", reports, "report.json files")->required();
  exp->add_option("-o,--output", export_out, "CSV output (stdout when omitted)");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "check a scenario file and print it with defaults filled");
  val->add_option("config", validate_path)->required();

  auto* pred = app.add_subcommand("predict", "analytic fidelity and visibility for a scenario");
  add_common(pred, pred_o);

  auto* orc = app.add_subcommand("oracle", "brute-force reference computations");
  orc->require_subcommand(1);
  std::string o_input = "H";
  double o_p = 1.0, o_zeta = 1.0;
  auto* o_tel = orc->add_subcommand("teleport", "8x8 density-matrix teleportation");
  o_tel->add_option("--input", o_input, "H, V, D, A, R or L")->capture_default_str();
  o_tel->add_option("--p", o_p, "Werner parameter")->capture_default_str();
  o_tel->add_option("--zeta", o_zeta, "mode overlap")->capture_default_str();
  std::string o_tags;
  std::int64_t o_width = 64;
  std::vector<int> o_channels = {1, 2, 3};
  auto* o_coinc = orc->add_subcommand("coincidence", "quadratic look-back coincidence search over a tag file");
  o_coinc->add_option("tags", o_tags, "binary tag file or channel,t_ps text")->required();
  o_coinc->add_option("--window", o_width, "window width in ps")->capture_default_str();
  o_coinc->add_option("--channels", o_channels, "channels forming a group")->capture_default_str();
  auto* o_bound = orc->add_subcommand("classical-bound", "average fidelity at zeta 0 and 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  return guarded([&]() -> int {
    if (*run) return cmd_run(run_o, tag_dump, run_check, no_hom);
    if (*hom) return cmd_hom(hom_o, hom_check);
    if (*exp) return cmd_export(reports, export_out);
    if (*val) return cmd_validate(validate_path);
    if (*pred) return cmd_predict(pred_o);
    if (*o_tel) return cmd_oracle_teleport(o_input, o_p, o_zeta);
    if (*o_coinc) return cmd_oracle_coincidence(o_tags, o_width, o_channels);
    if (*o_bound) return cmd_oracle_bound();
    return kExitRuntime;
  });
}
