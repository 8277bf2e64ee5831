#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "digitfor/rng.hpp"
#include "digitfor/stat_tests.hpp"
#include "doctest.h"

using namespace digitfor;

namespace {

// Straight non-log recursive summation, the cross-check the tail must match.
double poisson_cdf_recursive(std::int64_t k, double lambda) {
  double term = std::exp(-lambda);
  double sum = term;
  for (std::int64_t i = 1; i <= k; ++i) {
    term *= lambda / static_cast<double>(i);
    sum += term;
  }
  return sum;
}

// Exact upper chi-square tail for even dof: Q(m, y) with y = x/2.
double chi2_tail_even_dof(double x, int dof) {
  int m = dof / 2;
  double y = 0.5 * x;
  double term = 1.0, sum = 1.0;
  for (int i = 1; i < m; ++i) {
    term *= y / i;
    sum += term;
  }
  return std::exp(-y) * sum;
}

double brute_force_ks_p(const std::vector<double>& a, const std::vector<double>& b,
                        double* d_out) {
  int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
  std::vector<std::pair<double, int>> pool;
  for (double v : a) pool.push_back({v, 0});
  for (double v : b) pool.push_back({v, 1});
  std::sort(pool.begin(), pool.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  auto d_num_for = [&](const std::vector<int>& labels) {
    std::int64_t ca = 0, cb = 0, best = 0;
    std::size_t i = 0;
    while (i < pool.size()) {
      std::size_t j = i;
      while (j + 1 < pool.size() && pool[j + 1].first == pool[i].first) ++j;
      for (std::size_t k = i; k <= j; ++k)
        (labels[k] == 0 ? ca : cb) += 1;
      std::int64_t diff = ca * m - cb * n;
      if (diff < 0) diff = -diff;
      best = std::max(best, diff);
      i = j + 1;
    }
    return best;
  };

  std::vector<int> obs_labels;
  {
    std::vector<std::pair<double, int>> tagged;
    for (double v : a) tagged.push_back({v, 0});
    for (double v : b) tagged.push_back({v, 1});
    std::sort(tagged.begin(), tagged.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& t : tagged) obs_labels.push_back(t.second);
  }
  std::int64_t d_obs = d_num_for(obs_labels);
  *d_out = static_cast<double>(d_obs) / (static_cast<double>(n) * m);

  std::vector<int> mask(pool.size(), 1);
  std::fill(mask.begin(), mask.begin() + n, 0);
  std::sort(mask.begin(), mask.end());
  std::int64_t total = 0, extreme = 0;

  std::vector<int> labels(pool.size());
  std::vector<int> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> comb(static_cast<std::size_t>(n));
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    std::fill(labels.begin(), labels.end(), 1);
    for (int c : comb) labels[static_cast<std::size_t>(c)] = 0;
    ++total;
    if (d_num_for(labels) >= d_obs) ++extreme;
    int pos = n - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] ==
                           static_cast<int>(pool.size()) - n + pos)
      --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < n; ++q)
      comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("poisson tail matches the paper's three anchors") {
  CHECK(poisson_tail(41, 22.0) ==
        doctest::Approx(9.579592408168376e-05).epsilon(1e-10));
  CHECK(std::fabs(poisson_tail(41, 22.0) / 9.6e-5 - 1.0) < 0.02);
  double p = poisson_tail(41, 21.2);
  CHECK(p > 3.5e-5);
  CHECK(p < 4.8e-5);
  for (double lam : {0.5, 1.0, 5.0, 22.0})
    CHECK(poisson_tail(0, lam) ==
          doctest::Approx(1.0 - std::exp(-lam)).epsilon(1e-12));
}

TEST_CASE("poisson tail and cdf are complementary") {
  for (double lam : {0.5, 3.0, 21.2, 22.0, 50.0}) {
    for (std::int64_t k : {0, 1, 2, 5, 10, 20, 41, 70, 100}) {
      double cdf = poisson_cdf(k, lam);
      CHECK(std::fabs(poisson_tail(k, lam) + cdf - 1.0) < 1e-10);
      CHECK(cdf == doctest::Approx(poisson_cdf_recursive(k, lam)).epsilon(1e-12));
    }
  }
}

TEST_CASE("chi-square tail against the even-dof closed form") {
  for (double x : {0.5, 2.0, 8.0, 15.507, 56.6, 80.0}) {
    CHECK(chi_square_tail(x, 8) ==
          doctest::Approx(chi2_tail_even_dof(x, 8)).epsilon(1e-10));
    CHECK(chi_square_tail(x, 2) ==
          doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-10));
    CHECK(chi_square_tail(x, 4) ==
          doctest::Approx(chi2_tail_even_dof(x, 4)).epsilon(1e-10));
  }
  CHECK(chi_square_tail(56.6, 8) ==
        doctest::Approx(2.1550987861438986e-09).epsilon(1e-9));
  CHECK(chi_square_tail(0.0, 8) == 1.0);
}

TEST_CASE("chi-square gof edge behavior") {
  BenfordModel m;
  m.position = DigitPosition::first;
  m.kind = ModelKind::empirical;
  m.pmf = {0.5, 0.25, 0.25, 0, 0, 0, 0, 0, 0};
  DigitHistogram h;
  h.position = DigitPosition::first;
  h.counts = {2, 1, 1, 0, 0, 0, 0, 0, 0};
  h.n = 4;
  TestResult r = chi_square_gof(h, m);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);

  h.counts = {1, 1, 1, 1, 0, 0, 0, 0, 0};
  r = chi_square_gof(h, m);
  CHECK(std::isinf(r.statistic));
  CHECK(r.p_value == 0.0);
}

TEST_CASE("exact KS headline and trivial cases") {
  TestResult r = ks_two_sample_exact({0.600, 0.609, 0.669},
                                     {0.497, 0.537, 0.433});
  CHECK(r.statistic == doctest::Approx(1.0));
  CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-12));

  TestResult same = ks_two_sample_exact({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(same.p_value == doctest::Approx(1.0).epsilon(1e-12));

  TestResult sep = ks_two_sample_exact({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  CHECK(sep.p_value == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS(ks_two_sample_exact(std::vector<double>(11, 1.0),
                                   std::vector<double>(10, 2.0)));
}

TEST_CASE("exact KS equals brute-force enumeration for sizes up to 5") {
  Rng rng(424242);
  for (int na = 1; na <= 5; ++na) {
    for (int nb = 1; nb <= 5; ++nb) {
      for (int rep = 0; rep < 6; ++rep) {
        std::vector<double> a, b;
        for (int i = 0; i < na; ++i)
          a.push_back(static_cast<double>(1 + rng.next() % 8));
        for (int i = 0; i < nb; ++i)
          b.push_back(static_cast<double>(1 + rng.next() % 8));
        double d_expected = 0.0;
        double p_expected = brute_force_ks_p(a, b, &d_expected);
        TestResult r = ks_two_sample_exact(a, b);
        CHECK(r.statistic == doctest::Approx(d_expected).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(p_expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("spearman basics, ties, and monotone invariance") {
  CorrelationResult lin =
      spearman_rho({1, 2, 3, 4, 5}, {3, 5, 7, 9, 11});
  CHECK(lin.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lin.se == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lin.normalized == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<double> rx = average_ranks({1.0, 2.0, 2.0, 3.0});
  CHECK(rx[0] == 1.0);
  CHECK(rx[1] == 2.5);
  CHECK(rx[2] == 2.5);
  CHECK(rx[3] == 4.0);

  Rng rng(5);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(rng.uniform01() * 4.0 - 2.0);
    y.push_back(rng.uniform01() * 4.0 - 2.0);
  }
  CorrelationResult base = spearman_rho(x, y);
  std::vector<double> xe(x), yc(y);
  for (double& v : xe) v = std::exp(v);
  for (double& v : yc) v = v * v * v;
  CorrelationResult tr = spearman_rho(xe, yc);
  CHECK(tr.rho == doctest::Approx(base.rho).epsilon(1e-12));
  CHECK(std::fabs(base.normalized * base.se - base.rho) < 1e-12);

  CHECK_THROWS(spearman_rho({1, 1, 1}, {1, 2, 3}));
}

TEST_CASE("log skewness symmetry, scale invariance, stderr") {
  SkewnessResult sym = log_skewness({100.0, 10000.0, 1000.0,
                                     100.0, 10000.0, 1000.0});
  CHECK(sym.gamma1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sym.se == doctest::Approx(std::sqrt(1.0)).epsilon(1e-12));

  Rng rng(8);
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(std::exp(3.0 * rng.normal()));
  SkewnessResult s1 = log_skewness(v);
  std::vector<double> v2(v);
  for (double& x : v2) x *= 7.3;
  SkewnessResult s2 = log_skewness(v2);
  CHECK(s1.gamma1 == doctest::Approx(s2.gamma1).epsilon(1e-9));
  CHECK(s1.se == doctest::Approx(std::sqrt(6.0 / 100.0)).epsilon(1e-12));
  CHECK(std::fabs(s1.normalized * s1.se - s1.gamma1) < 1e-12);

  CHECK_THROWS(log_skewness({1.0, -2.0, 3.0}));
  CHECK_THROWS(log_skewness({5.0, 5.0, 5.0}));
}

TEST_CASE("log width") {
  CHECK(log_width({100.0, 100.0, 100.0, 100.0}) == doctest::Approx(0.0));
  CHECK(log_width({10.0, 1000.0}) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> v = {10.0, 1000.0};
  for (double& x : v) x *= 42.0;
  CHECK(log_width(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multiple-test corrections") {
  CHECK(multi_test_correction(2.1e-5, 36, CorrectionMethod::multiply) ==
        doctest::Approx(7.56e-4).epsilon(1e-12));
  CHECK(multi_test_correction(1.9e-4, 36, CorrectionMethod::multiply) <= 0.0069);
  CHECK(multi_test_correction(0.5, 36, CorrectionMethod::multiply) == 1.0);
  for (double p : {0.0, 1e-6, 0.01, 0.3, 0.9, 1.0}) {
    for (int m : {1, 2, 10, 36}) {
      double mult = multi_test_correction(p, m, CorrectionMethod::multiply);
      double sid = multi_test_correction(p, m, CorrectionMethod::sidak);
      CHECK(sid <= mult + 1e-15);
      CHECK(sid >= p - 1e-15);
      if (m == 1) {
        CHECK(mult == doctest::Approx(p));
        CHECK(sid == doctest::Approx(p).epsilon(1e-9));
      }
    }
  }
  TestResult r;
  r.p_value = 2.1e-5;
  TestResult rc = with_correction(r, 36, CorrectionMethod::multiply);
  REQUIRE(rc.correction.has_value());
  CHECK(rc.correction->corrected_p == doctest::Approx(7.56e-4).epsilon(1e-12));
  CHECK(rc.correction->corrected_p >= rc.p_value);
}

TEST_CASE("identical digit probabilities") {
  CHECK(identical_second_digit_prob(3) ==
        doctest::Approx(0.010365886839783832).epsilon(1e-12));
  CHECK(std::fabs(identical_second_digit_prob(3) - 0.01037) < 2e-5);
  CHECK(identical_second_digit_prob(3) > 0.01);
  std::vector<double> uniform(10, 0.1);
  CHECK(identical_digit_prob(uniform, 3) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(identical_digit_prob(uniform, 2) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("two-sided conversion and wilson intervals") {
  CHECK(two_sided_p(9.6e-5) == doctest::Approx(1.92e-4).epsilon(1e-12));
  CHECK(two_sided_p(0.7) == 1.0);

  WilsonInterval w = wilson_interval(5, 10);
  CHECK(w.lo == doctest::Approx(0.236593090512564).epsilon(1e-9));
  CHECK(w.hi == doctest::Approx(0.7634069094874361).epsilon(1e-9));
  WilsonInterval w2 = wilson_interval(21, 1000000);
  CHECK(w2.lo == doctest::Approx(1.373600775403483e-05).epsilon(1e-6));
  CHECK(w2.hi == doctest::Approx(3.210527496925943e-05).epsilon(1e-6));
  WilsonInterval w0 = wilson_interval(0, 100);
  CHECK(w0.lo == 0.0);
  CHECK(w0.hi > 0.0);
  WilsonInterval wn = wilson_interval(100, 100);
  CHECK(wn.hi == 1.0);
}
