#pragma once

#include <cstdint>
#include <vector>

namespace digitfor {

// Leading decimal digit of a positive integer, by repeated division.
int first_digit(std::uint64_t n);

// Second-most-significant decimal digit; requires n >= 10.
int second_digit(std::uint64_t n);

// Leading digit of a positive real, by scaling into [1,10).
int first_digit_real(double x);

// Fractional part of log10(v); decade-invariant position in [0,1).
double fold_log(double v);

enum class DigitPosition { first, second };
enum class ModelKind { analytic, empirical };

struct BenfordModel {
  DigitPosition position = DigitPosition::first;
  ModelKind kind = ModelKind::analytic;
  // Indexed by digit-1 for first position (size 9), by digit for second (size 10).
  std::vector<double> pmf;
  std::size_t source_n = 0;
  double alpha = 0.0;

  double at_digit(int digit) const;
  int lowest_digit() const { return position == DigitPosition::first ? 1 : 0; }
};

// pmf(i) = log10(1 + 1/i), i = 1..9.
BenfordModel standard_first_digit_model();

// pmf(i) = sum_{j=1..9} log10(1 + 1/(10j+i)), i = 0..9.
BenfordModel second_digit_model();

// First-digit pmf of { alpha * v_j } over the given totals.
BenfordModel empirical_first_digit_model(const std::vector<std::int64_t>& totals,
                                         double alpha);

struct DigitHistogram {
  DigitPosition position = DigitPosition::first;
  std::vector<std::int64_t> counts;  // same indexing as BenfordModel::pmf
  std::int64_t n = 0;

  std::int64_t at_digit(int digit) const;
};

DigitHistogram digit_histogram(const std::vector<std::int64_t>& sample,
                               DigitPosition position);

struct ExpectedCount {
  double expected = 0.0;
  double sd = 0.0;  // binomial: sqrt(n p (1-p))
};

std::vector<ExpectedCount> expected_counts(const BenfordModel& model,
                                           std::int64_t n);

}  // namespace digitfor
