#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "htq/kv.hpp"

namespace htq {

constexpr const char* kReportSchema = "htq-report/1";

// One row of the verdict table. Tail rows carry probe_p and x; other checks
// leave them NaN, put the statistic in `empirical`, the reference value in
// `asymptote` and the acceptance band in [ci_low, ci_high].
struct Verdict {
  std::string experiment;
  std::string model;
  double probe_p = std::numeric_limits<double>::quiet_NaN();
  double x = std::numeric_limits<double>::quiet_NaN();
  double empirical = 0.0;
  double asymptote = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool pass = false;
};

struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 0;
  KvDoc params;
  std::string output;  // file stem; empty = no files

  static ExperimentConfig from_kv(const KvDoc& doc);
  void validate() const;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  KvDoc config;
  std::vector<Verdict> verdicts;
  nlohmann::json details = nlohmann::json::object();

  bool pass() const;
};

const std::vector<std::string>& experiment_ids();
KvDoc default_config(const std::string& id);
std::string criterion_summary(const std::string& id);

Report run_experiment(const ExperimentConfig& cfg);

void write_verdicts_csv(const std::vector<Verdict>& rows, std::ostream& out);
std::vector<Verdict> read_verdicts_csv(std::istream& in);
nlohmann::json report_json(const Report& r);
// writes <stem>.csv and <stem>.json
void write_report_files(const Report& r, const std::string& stem);
// markdown table plus gnuplot-ready columns
std::string render_summary(const std::vector<Verdict>& rows);

}  // namespace htq
