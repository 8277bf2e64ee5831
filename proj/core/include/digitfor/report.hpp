#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "digitfor/anomaly.hpp"
#include "digitfor/benford.hpp"
#include "digitfor/scatter_sim.hpp"
#include "digitfor/vote_table.hpp"

namespace digitfor {

struct ReportConfig {
  std::uint64_t seed = 20090612;
  std::int64_t realizations = 1000000;
  std::vector<double> sigmas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 1.5};
  int workers = 0;
  std::string sim_label = "K";
  std::string target_label = "A";
  int marker_digit = 7;
  double counterfactual_target = 0.50;
  std::int64_t parity_trials = 1000000;
  double bin_width_dex = 0.1;
  int combination_C = 3;
};

struct ReportDocument {
  std::string json_text;
  std::string markdown_text;
  std::vector<std::pair<std::string, std::string>> csv_tables;  // name, body
};

struct LogHistogram {
  double bin_width = 0.1;
  double origin = 0.0;  // left edge of bin 0
  std::vector<std::int64_t> counts;

  double edge(std::size_t i) const {
    return origin + bin_width * static_cast<double>(i);
  }
};

LogHistogram log_histogram(const std::vector<std::int64_t>& values,
                           double bin_width);

// Bins the fractional parts of log10(values) on [0,1).
LogHistogram folded_histogram(const std::vector<std::int64_t>& values,
                              double bin_width);

// Positions in fold space where first_digit(alpha * v) == digit starts and
// ends: {log10(digit) - log10(alpha), log10(digit + 1) - log10(alpha)} mod 1.
std::pair<double, double> decade_marker(int digit, double alpha);

std::string benford_table_csv(const VoteTable& table, const std::string& label,
                              DigitPosition position, double alpha);

std::string scatterplot_csv(const VoteTable& table, const std::string& label,
                            const std::string& marker_label, int marker_digit);

std::string sha256_hex(const std::string& bytes);
std::string dataset_hash(const VoteTable& table);
std::string config_hash(const ReportConfig& config);

ReportDocument full_report(const VoteTable& table, const ReportConfig& config);

}  // namespace digitfor
