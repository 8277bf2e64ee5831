#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "digitfor/benford.hpp"

namespace digitfor {

enum class Sidedness { one, two };
enum class CorrectionMethod { multiply, sidak };

struct Correction {
  CorrectionMethod method;
  int m = 1;
  double corrected_p = 1.0;
};

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::one;
  std::int64_t n = 0;
  std::optional<Correction> correction;
};

struct SkewnessResult {
  double gamma1 = 0.0;
  double se = 0.0;          // sqrt(6/n)
  double normalized = 0.0;  // gamma1 / se
  std::int64_t n = 0;
};

struct CorrelationResult {
  double rho = 0.0;
  double se = 0.0;          // sqrt(1/(n-1))
  double normalized = 0.0;  // rho / se
  std::int64_t n = 0;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// P(X > k) for X ~ Poisson(lambda), summed until terms stop mattering.
// The strictly-greater convention is deliberate: poisson_tail(41, 22.0)
// gives 9.6e-5, the inclusive tail would give 1.9e-4.
double poisson_tail(std::int64_t k, double lambda);

// P(X <= k), same summation scheme.
double poisson_cdf(std::int64_t k, double lambda);

// Upper tail of the chi-square distribution (regularized incomplete gamma).
double chi_square_tail(double statistic, int dof);

TestResult chi_square_gof(const DigitHistogram& observed, const BenfordModel& model);

// Exact permutation p-value for the two-sample KS statistic.
// Requires a.size() + b.size() <= 20. Ties contribute the smaller D.
TestResult ks_two_sample_exact(const std::vector<double>& a,
                               const std::vector<double>& b);

// Average ranks (1-based); tied values share the mean of their rank block.
std::vector<double> average_ranks(const std::vector<double>& x);

CorrelationResult spearman_rho(const std::vector<double>& x,
                               const std::vector<double>& y);

// Skewness g1 = m3 / m2^(3/2) of log10(values), uncorrected moments.
SkewnessResult log_skewness(const std::vector<double>& values);

// Population width sigma of log10(values), in dex.
double log_width(const std::vector<double>& values);

double multi_test_correction(double p, int m, CorrectionMethod method);

// Applies a correction to r.p_value and records it on the result.
TestResult with_correction(TestResult r, int m, CorrectionMethod method);

// Probability that k independent draws from pmf land on the same cell.
double identical_digit_prob(const std::vector<double>& pmf, int k);

// Same with the second-digit law as the pmf.
double identical_second_digit_prob(int k);

// One-sided p doubled and capped at 1.
double two_sided_p(double p);

// 95% by default (z = Phi^-1(0.975)).
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials,
                               double z = 1.959963984540054);

}  // namespace digitfor
