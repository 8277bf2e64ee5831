#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "digitfor/rng.hpp"
#include "digitfor/stat_tests.hpp"
#include "digitfor/vote_table.hpp"

namespace digitfor {

// Hit when the realization's count of first digit `digit` is >= threshold.
struct DigitCondition {
  int digit = 7;
  std::int64_t threshold = 1;
};

struct SimulationConfig {
  std::vector<std::int64_t> totals;
  double mean_fraction = 0.0;
  std::vector<double> sigmas;
  std::int64_t realizations = 1000000;
  std::uint64_t seed = 0;
  std::vector<DigitCondition> conditions;
};

struct ConditionTally {
  std::int64_t hits = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  WilsonInterval wilson_95;
};

struct SigmaResult {
  double sigma = 0.0;
  std::vector<ConditionTally> per_condition;  // parallel to config.conditions
  ConditionTally joint;                       // all conditions in one realization
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::vector<SigmaResult> per_sigma;
};

// One draw of per-area counts: lognormal scatter of width sigma dex around
// mean_fraction * v_j (a point mass when sigma is 0), then Gaussian-
// approximated Poisson noise clamped at zero. poisson_noise=false is a test
// hook that skips the noise stage.
std::vector<double> simulate_realization(const std::vector<std::int64_t>& totals,
                                         double mean_fraction, double sigma,
                                         Rng& rng, bool poisson_noise = true);

// workers <= 0 uses the hardware thread count. Results are identical for any
// worker count; realizations below 1 vote carry no first digit and are
// dropped from the per-realization histogram.
SimulationResult run_simulation(const SimulationConfig& config, int workers = 0);

// Chance that 20 log-uniform draws on [70,80) contain each of
// {70,72,74,76,78} exactly once.
double parity_oracle_7a(std::int64_t trials, std::uint64_t seed);

// Width of log10(v_label/v) over areas with v > min_total and v_label >= 1.
double scatter_estimate(const VoteTable& table, const std::string& label,
                        std::int64_t min_total);

SimulationConfig parse_sim_config(std::istream& in);
void write_sim_config(std::ostream& out, const SimulationConfig& config);

std::string sim_result_csv(const SimulationConfig& config,
                           const SimulationResult& result);
std::string sim_result_json(const SimulationConfig& config,
                            const SimulationResult& result);

}  // namespace digitfor
