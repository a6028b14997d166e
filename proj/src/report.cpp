#include "qtele/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "qtele/errors.hpp"

namespace qtele {

using nlohmann::json;

namespace {

json counts_json(const BasisCounts& c) {
  json j = json::object();
  for (Basis b : kAllBases) j[std::string(basis_name(b))] = c[b];
  return j;
}

json rho_json(const DensityMatrix& rho) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) {
    json row = json::array();
    for (int c = 0; c < 2; ++c) row.push_back({rho(r, c).real(), rho(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

json hom_to_json(const HomReport& h) {
  json pts = json::array();
  for (const HomPoint& p : h.points) pts.push_back({{"delay_ps", p.delay_ps}, {"counts", p.rate}, {"sigma", p.sigma}});
  return {{"visibility", h.visibility},
          {"visibility_sigma", h.visibility_sigma},
          {"zeta", h.zeta},
          {"analytic_visibility", h.analytic_visibility},
          {"max_visibility", h.max_visibility},
          {"points", pts}};
}

json report_to_json(const TeleportReport& r, bool include_metadata) {
  json states = json::array();
  for (const StateReport& s : r.states) {
    const TomographyResult& t = s.result;
    states.push_back({{"input", std::string(basis_name(s.input))},
                      {"target", std::string(basis_name(s.target))},
                      {"counts", counts_json(t.counts)},
                      {"stokes", {t.stokes.x, t.stokes.y, t.stokes.z}},
                      {"rho", rho_json(t.rho)},
                      {"physicality_flag", t.physicality_flag},
                      {"nearest_physical_rho", rho_json(t.nearest_physical)},
                      {"fidelity", t.fidelity},
                      {"fidelity_sigma", t.fidelity_sigma},
                      {"expected_fidelity", s.expected_fidelity}});
  }
  const RateDiagnostics& d = r.rates;
  json j = {
      {"schema_version", kReportSchemaVersion},
      {"scenario", r.scenario},
      {"seed", r.seed},
      {"model", {{"zeta", r.zeta}, {"werner_p", r.werner_p}}},
      {"states", states},
      {"average_fidelity", r.average_fidelity},
      {"average_sigma", r.average_sigma},
      {"average_sigma_method", "per-state Monte Carlo sigmas combined as uncorrelated"},
      {"expected_average_fidelity", r.expected_average_fidelity},
      {"classical_bound", kClassicalBound},
      {"beats_classical_bound", r.beats_classical_bound},
      {"rates",
       {{"singles_cps", d.singles},
        {"coincidence_ch13_cps", d.coincidence_ch13},
        {"coincidence_ch23_cps", d.coincidence_ch23},
        {"background_ch3_cps", d.background_ch3},
        {"threefold_cps", d.threefold_rate},
        {"expected_true_threefold_cps", d.expected_true_threefold},
        {"expected_accidental_threefold_cps", d.expected_accidental_threefold},
        {"transmission", d.transmission},
        {"compensations", d.compensations},
        {"worst_reference_fidelity", d.worst_reference_fidelity}}},
      {"hom", r.hom ? hom_to_json(*r.hom) : json(nullptr)},
      {"config", dump_config(r.config)},
  };
  if (include_metadata) j["metadata"] = {{"wall_clock_s", r.wall_clock_s}, {"started_at", r.started_at}};
  return j;
}

ReportSummary summarize(const TeleportReport& r) {
  ReportSummary s;
  s.scenario = r.scenario;
  for (const StateReport& st : r.states) s.by_target[st.target] = {st.result.fidelity, st.result.fidelity_sigma};
  s.average_fidelity = r.average_fidelity;
  s.average_sigma = r.average_sigma;
  return s;
}

ReportSummary summary_from_json(const json& j) {
  try {
    ReportSummary s;
    s.scenario = j.at("scenario").get<std::string>();
    for (const json& st : j.at("states"))
      s.by_target[basis_from_name(st.at("target").get<std::string>())] = {st.at("fidelity").get<double>(),
                                                                          st.at("fidelity_sigma").get<double>()};
    s.average_fidelity = j.at("average_fidelity").get<double>();
    s.average_sigma = j.at("average_sigma").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

ReportSummary load_report_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read report " + path.string());
  try {
    return summary_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("report " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::string export_figure_data(const std::vector<ReportSummary>& reports) {
  if (reports.empty()) throw DomainError("no reports to export");
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed;
  os << "state";
  for (const ReportSummary& r : reports) os << ",F_" << r.scenario << ",sigma_" << r.scenario;
  os << ",classical_bound\n";
  for (Basis target : {Basis::V, Basis::A, Basis::R}) {
    os << basis_name(target);
    for (const ReportSummary& r : reports) {
      const auto it = r.by_target.find(target);
      if (it == r.by_target.end())
        os << ",,";
      else
        os << ',' << it->second.first << ',' << it->second.second;
    }
    os << ',' << kClassicalBound << '\n';
  }
  os << "average";
  for (const ReportSummary& r : reports) os << ',' << r.average_fidelity << ',' << r.average_sigma;
  os << ',' << kClassicalBound << '\n';
  return os.str();
}

std::string export_hom_curve(const HomReport& h) {
  std::ostringstream os;
  os << "delay_ps,counts,sigma\n";
  for (const HomPoint& p : h.points) os << p.delay_ps << ',' << p.rate << ',' << p.sigma << '\n';
  return os.str();
}

}  // namespace qtele
