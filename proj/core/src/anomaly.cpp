#include "digitfor/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "digitfor/benford.hpp"
#include "digitfor/scatter_sim.hpp"

namespace digitfor {

BigCitySplit big_city_split(const VoteTable& table, std::int64_t n,
                            const std::string& marker_label, int marker_digit,
                            const std::string& target_label) {
  if (static_cast<std::int64_t>(table.areas.size()) < n)
    throw std::invalid_argument("big_city_split: fewer areas than n");
  int mi = table.label_index(marker_label);
  int ti = table.label_index(target_label);

  VoteTable top = select_areas(table, marker_label, AreaPredicate::top_n_by_total(n));
  BigCitySplit split;
  for (const VoteArea& a : top.areas) {
    BigCityRow row;
    row.name = a.name;
    row.total = a.total;
    row.marker_count = a.counts[mi];
    row.target_proportion =
        static_cast<double>(a.counts[ti]) / static_cast<double>(a.total);
    row.marked = row.marker_count >= 1 &&
                 first_digit(static_cast<std::uint64_t>(row.marker_count)) ==
                     marker_digit;
    split.top_areas.push_back(row);
  }
  std::stable_sort(split.top_areas.begin(), split.top_areas.end(),
                   [](const BigCityRow& a, const BigCityRow& b) {
                     return a.total < b.total;
                   });

  std::vector<double> marked_props, other_props;
  for (const BigCityRow& row : split.top_areas) {
    if (row.marked) {
      split.marked.push_back(row);
      marked_props.push_back(row.target_proportion);
    } else {
      split.other.push_back(row);
      other_props.push_back(row.target_proportion);
    }
  }
  if (!marked_props.empty() && !other_props.empty())
    split.ks = ks_two_sample_exact(marked_props, other_props);

  for (const BigCityRow& row : split.marked)
    if (row.marker_count >= 10)
      split.marked_second_digits.push_back(
          second_digit(static_cast<std::uint64_t>(row.marker_count)));
  split.marked_second_digits_identical =
      split.marked.size() >= 2 &&
      split.marked_second_digits.size() == split.marked.size() &&
      std::all_of(split.marked_second_digits.begin(),
                  split.marked_second_digits.end(), [&split](int d) {
                    return d == split.marked_second_digits.front();
                  });
  if (split.marked.size() >= 2)
    split.identical_second_digit_p =
        identical_second_digit_prob(static_cast<int>(split.marked.size()));
  return split;
}

SeventiesParity seventies_parity(const VoteTable& table, const std::string& label,
                                 std::int64_t oracle_trials,
                                 std::uint64_t oracle_seed) {
  int idx = table.label_index(label);
  SeventiesParity r;
  for (const VoteArea& a : table.areas) {
    std::int64_t c = a.counts[idx];
    if (c < 70 || c >= 80) continue;
    ++r.frequencies[static_cast<std::size_t>(c - 70)];
    ++r.total;
    if (c % 2 != 0)
      ++r.odd_count;
    else
      r.even_values.push_back(c);
  }
  std::sort(r.even_values.begin(), r.even_values.end());
  r.each_even_exactly_once =
      r.even_values == std::vector<std::int64_t>{70, 72, 74, 76, 78};
  r.parity_p = parity_oracle_7a(oracle_trials, oracle_seed);
  return r;
}

std::vector<AblationRow> spearman_ablation(const VoteTable& table,
                                           const std::string& marker_label,
                                           int marker_digit) {
  int mi = table.label_index(marker_label);
  std::vector<bool> drop(table.areas.size(), false);
  for (std::size_t j = 0; j < table.areas.size(); ++j) {
    std::int64_t c = table.areas[j].counts[mi];
    drop[j] = c >= 1 &&
              first_digit(static_cast<std::uint64_t>(c)) == marker_digit;
  }

  std::vector<AblationRow> rows;
  for (const std::string& label : table.candidate_labels) {
    int li = table.label_index(label);
    std::vector<double> x_full, y_full, x_abl, y_abl;
    for (std::size_t j = 0; j < table.areas.size(); ++j) {
      const VoteArea& a = table.areas[j];
      double x = static_cast<double>(a.total);
      double y = static_cast<double>(a.counts[li]) / static_cast<double>(a.total);
      x_full.push_back(x);
      y_full.push_back(y);
      if (!drop[j]) {
        x_abl.push_back(x);
        y_abl.push_back(y);
      }
    }
    AblationRow row;
    row.label = label;
    row.full = spearman_rho(x_full, y_full);
    row.ablated = spearman_rho(x_abl, y_abl);
    rows.push_back(row);
  }
  return rows;
}

CounterfactualReport counterfactual_shift(const VoteTable& table,
                                          const std::vector<std::string>& area_names,
                                          const std::string& reduce_label,
                                          double target_proportion) {
  int ri = table.label_index(reduce_label);
  const std::size_t L = table.candidate_labels.size();

  // Receiving labels get weights proportional to their national shares.
  std::vector<double> weights(L, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    if (static_cast<int>(i) == ri) continue;
    weights[i] = static_cast<double>(national_sum(table, table.candidate_labels[i]));
    wsum += weights[i];
  }
  if (wsum <= 0.0)
    throw std::domain_error("counterfactual_shift: no votes to redistribute to");
  for (double& w : weights) w /= wsum;

  CounterfactualReport report;
  report.target_proportion = target_proportion;
  report.delta_per_candidate.assign(L, 0);

  for (const std::string& name : area_names) {
    auto it = std::find_if(table.areas.begin(), table.areas.end(),
                           [&name](const VoteArea& a) { return a.name == name; });
    if (it == table.areas.end())
      throw std::invalid_argument("counterfactual_shift: area not found: " + name);
    const VoteArea& a = *it;
    std::int64_t target =
        std::llround(target_proportion * static_cast<double>(a.total));
    std::int64_t removed = a.counts[ri] - target;
    if (removed < 0)
      throw std::invalid_argument(
          "counterfactual_shift: target above current proportion in " + name);
    report.affected_areas.push_back(name);
    report.delta_per_candidate[ri] -= removed;

    // Largest-remainder split of the removed votes across the other labels.
    std::vector<std::int64_t> share(L, 0);
    std::vector<std::pair<double, std::size_t>> rem;
    std::int64_t given = 0;
    for (std::size_t i = 0; i < L; ++i) {
      if (static_cast<int>(i) == ri) continue;
      double raw = weights[i] * static_cast<double>(removed);
      share[i] = static_cast<std::int64_t>(std::floor(raw));
      given += share[i];
      rem.push_back({raw - std::floor(raw), i});
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::int64_t leftover = removed - given; leftover > 0; --leftover)
      ++share[rem[static_cast<std::size_t>(removed - given - leftover)].second];
    for (std::size_t i = 0; i < L; ++i) report.delta_per_candidate[i] += share[i];
  }

  std::int64_t delta_a = 0, delta_m = 0;
  if (std::find(table.candidate_labels.begin(), table.candidate_labels.end(),
                "A") != table.candidate_labels.end())
    delta_a = report.delta_per_candidate[table.label_index("A")];
  if (std::find(table.candidate_labels.begin(), table.candidate_labels.end(),
                "M") != table.candidate_labels.end())
    delta_m = report.delta_per_candidate[table.label_index("M")];
  report.gap_change_A_minus_M = delta_m - delta_a;
  return report;
}

CombinedProbability combined_probability(
    const std::vector<std::pair<std::string, double>>& components, int C) {
  if (C < 1) throw std::invalid_argument("combined_probability: C must be >= 1");
  CombinedProbability r;
  r.components = components;
  r.correction_C = C;
  double p = static_cast<double>(C);
  for (const auto& [name, pi] : components) {
    if (!(pi > 0.0 && pi <= 1.0))
      throw std::domain_error("combined_probability: p out of (0,1]: " + name);
    p *= pi;
  }
  r.p_all = std::min(1.0, p);
  return r;
}

}  // namespace digitfor
