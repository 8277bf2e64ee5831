#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "digitfor/stat_tests.hpp"
#include "digitfor/vote_table.hpp"

namespace digitfor {

struct BigCityRow {
  std::string name;
  std::int64_t total = 0;
  std::int64_t marker_count = 0;
  double target_proportion = 0.0;
  bool marked = false;
};

struct BigCitySplit {
  std::vector<BigCityRow> top_areas;  // ascending by total
  std::vector<BigCityRow> marked;
  std::vector<BigCityRow> other;
  std::optional<TestResult> ks;  // absent when either group is empty
  std::vector<int> marked_second_digits;
  bool marked_second_digits_identical = false;
  double identical_second_digit_p = 0.0;
};

struct SeventiesParity {
  std::array<std::int64_t, 10> frequencies{};  // values 70..79
  std::int64_t total = 0;
  std::int64_t odd_count = 0;
  std::vector<std::int64_t> even_values;  // observed even values, with repeats
  bool each_even_exactly_once = false;
  double parity_p = 0.0;
};

struct AblationRow {
  std::string label;
  CorrelationResult full;
  CorrelationResult ablated;
};

struct CounterfactualReport {
  double target_proportion = 0.0;
  std::vector<std::string> affected_areas;
  std::vector<std::int64_t> delta_per_candidate;  // parallel to labels
  std::int64_t gap_change_A_minus_M = 0;  // positive when the gap narrows
};

struct CombinedProbability {
  std::vector<std::pair<std::string, double>> components;
  int correction_C = 1;
  double p_all = 1.0;
};

BigCitySplit big_city_split(const VoteTable& table, std::int64_t n = 6,
                            const std::string& marker_label = "K",
                            int marker_digit = 7,
                            const std::string& target_label = "A");

SeventiesParity seventies_parity(const VoteTable& table,
                                 const std::string& label = "K",
                                 std::int64_t oracle_trials = 1000000,
                                 std::uint64_t oracle_seed = 0);

std::vector<AblationRow> spearman_ablation(const VoteTable& table,
                                           const std::string& marker_label = "K",
                                           int marker_digit = 7);

CounterfactualReport counterfactual_shift(const VoteTable& table,
                                          const std::vector<std::string>& area_names,
                                          const std::string& reduce_label = "A",
                                          double target_proportion = 0.50);

CombinedProbability combined_probability(
    const std::vector<std::pair<std::string, double>>& components, int C = 3);

}  // namespace digitfor
