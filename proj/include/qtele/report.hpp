#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtele/scenario.hpp"

namespace qtele {

inline constexpr int kReportSchemaVersion = 1;

// Wall-clock fields live under "metadata"; everything else is a pure function
// of (config, seed).
nlohmann::json report_to_json(const TeleportReport& r, bool include_metadata = true);
nlohmann::json hom_to_json(const HomReport& h);

// Fidelity-figure view of a persisted report.
struct ReportSummary {
  std::string scenario;
  std::map<Basis, std::pair<double, double>> by_target;  // received state -> (F, sigma)
  double average_fidelity = 0.0;
  double average_sigma = 0.0;
};

ReportSummary summarize(const TeleportReport& r);
ReportSummary summary_from_json(const nlohmann::json& j);
ReportSummary load_report_summary(const std::filesystem::path& path);

// Rows V, A, R, average; one (F, sigma) column pair per report plus the 2/3
// bound. Throws DomainError for an empty list.
std::string export_figure_data(const std::vector<ReportSummary>& reports);

// HOM dip curve as CSV (delay_ps, counts, sigma).
std::string export_hom_curve(const HomReport& h);

}  // namespace qtele
