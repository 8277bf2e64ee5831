#include "digitfor/benford.hpp"

#include <cmath>
#include <stdexcept>

namespace digitfor {

int first_digit(std::uint64_t n) {
  if (n == 0) throw std::domain_error("first_digit: n must be >= 1");
  while (n >= 10) n /= 10;
  return static_cast<int>(n);
}

int second_digit(std::uint64_t n) {
  if (n < 10) throw std::domain_error("second_digit: n must be >= 10");
  while (n >= 100) n /= 10;
  return static_cast<int>(n % 10);
}

int first_digit_real(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("first_digit_real: x must be positive and finite");
  while (x < 1.0) x *= 10.0;
  while (x >= 10.0) x /= 10.0;
  return static_cast<int>(x);
}

double fold_log(double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::domain_error("fold_log: v must be positive and finite");
  double l = std::log10(v);
  double f = l - std::floor(l);
  if (f >= 1.0) f = 0.0;  // guards rounding at exact powers of ten
  return f;
}

double BenfordModel::at_digit(int digit) const {
  int idx = digit - lowest_digit();
  if (idx < 0 || idx >= static_cast<int>(pmf.size()))
    throw std::out_of_range("BenfordModel::at_digit: digit out of range");
  return pmf[static_cast<std::size_t>(idx)];
}

std::int64_t DigitHistogram::at_digit(int digit) const {
  int lo = position == DigitPosition::first ? 1 : 0;
  int idx = digit - lo;
  if (idx < 0 || idx >= static_cast<int>(counts.size()))
    throw std::out_of_range("DigitHistogram::at_digit: digit out of range");
  return counts[static_cast<std::size_t>(idx)];
}

BenfordModel standard_first_digit_model() {
  BenfordModel m;
  m.position = DigitPosition::first;
  m.kind = ModelKind::analytic;
  m.pmf.resize(9);
  for (int i = 1; i <= 9; ++i)
    m.pmf[i - 1] = std::log10(1.0 + 1.0 / i);
  return m;
}

BenfordModel second_digit_model() {
  BenfordModel m;
  m.position = DigitPosition::second;
  m.kind = ModelKind::analytic;
  m.pmf.resize(10);
  for (int i = 0; i <= 9; ++i) {
    double s = 0.0;
    for (int j = 1; j <= 9; ++j)
      s += std::log10(1.0 + 1.0 / (10.0 * j + i));
    m.pmf[i] = s;
  }
  return m;
}

BenfordModel empirical_first_digit_model(const std::vector<std::int64_t>& totals,
                                         double alpha) {
  if (totals.empty())
    throw std::invalid_argument("empirical_first_digit_model: empty totals");
  if (!(alpha > 0.0))
    throw std::invalid_argument("empirical_first_digit_model: alpha must be > 0");
  BenfordModel m;
  m.position = DigitPosition::first;
  m.kind = ModelKind::empirical;
  m.pmf.assign(9, 0.0);
  for (std::int64_t v : totals) {
    if (v < 1)
      throw std::invalid_argument("empirical_first_digit_model: totals must be >= 1");
    int d = first_digit_real(alpha * static_cast<double>(v));
    m.pmf[d - 1] += 1.0;
  }
  for (double& p : m.pmf) p /= static_cast<double>(totals.size());
  m.source_n = totals.size();
  m.alpha = alpha;
  return m;
}

DigitHistogram digit_histogram(const std::vector<std::int64_t>& sample,
                               DigitPosition position) {
  DigitHistogram h;
  h.position = position;
  h.counts.assign(position == DigitPosition::first ? 9 : 10, 0);
  for (std::int64_t v : sample) {
    if (position == DigitPosition::first) {
      if (v < 1) throw std::domain_error("digit_histogram: first digit needs v >= 1");
      ++h.counts[first_digit(static_cast<std::uint64_t>(v)) - 1];
    } else {
      if (v < 10) throw std::domain_error("digit_histogram: second digit needs v >= 10");
      ++h.counts[second_digit(static_cast<std::uint64_t>(v))];
    }
  }
  h.n = static_cast<std::int64_t>(sample.size());
  return h;
}

std::vector<ExpectedCount> expected_counts(const BenfordModel& model,
                                           std::int64_t n) {
  std::vector<ExpectedCount> out(model.pmf.size());
  for (std::size_t i = 0; i < model.pmf.size(); ++i) {
    double p = model.pmf[i];
    out[i].expected = static_cast<double>(n) * p;
    out[i].sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  }
  return out;
}

}  // namespace digitfor
