#include "digitfor/scatter_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace digitfor {

namespace {

constexpr double kLn10 = 2.302585092994046;

void check_config(const SimulationConfig& c) {
  if (c.totals.empty()) throw std::invalid_argument("simulation: no totals");
  for (std::int64_t v : c.totals)
    if (v < 1) throw std::invalid_argument("simulation: totals must be >= 1");
  if (!(c.mean_fraction > 0.0 && c.mean_fraction < 1.0))
    throw std::invalid_argument("simulation: mean_fraction must be in (0,1)");
  if (c.realizations < 1) throw std::invalid_argument("simulation: realizations < 1");
  for (double s : c.sigmas)
    if (!(s >= 0.0)) throw std::invalid_argument("simulation: negative sigma");
  for (const DigitCondition& d : c.conditions)
    if (d.digit < 1 || d.digit > 9)
      throw std::invalid_argument("simulation: condition digit out of range");
}

int digit_of(double w) {
  while (w >= 10.0) w *= 0.1;
  return static_cast<int>(w);
}

void finish_tally(ConditionTally& t, std::int64_t trials) {
  t.trials = trials;
  t.p_hat = static_cast<double>(t.hits) / static_cast<double>(trials);
  t.wilson_95 = wilson_interval(t.hits, trials);
}

}  // namespace

std::vector<double> simulate_realization(const std::vector<std::int64_t>& totals,
                                         double mean_fraction, double sigma,
                                         Rng& rng, bool poisson_noise) {
  std::vector<double> w(totals.size());
  for (std::size_t j = 0; j < totals.size(); ++j) {
    double base = mean_fraction * static_cast<double>(totals[j]);
    double wj = sigma > 0.0
                    ? std::exp((std::log10(base) + sigma * rng.normal()) * kLn10)
                    : base;
    if (poisson_noise) {
      wj += std::sqrt(wj) * rng.normal();
      if (wj < 0.0) wj = 0.0;
    }
    w[j] = wj;
  }
  return w;
}

SimulationResult run_simulation(const SimulationConfig& config, int workers) {
  check_config(config);
  const std::size_t n_areas = config.totals.size();
  const std::int64_t R = config.realizations;
  const std::size_t C = config.conditions.size();

  std::vector<double> lbase(n_areas), base(n_areas);
  for (std::size_t j = 0; j < n_areas; ++j) {
    base[j] = config.mean_fraction * static_cast<double>(config.totals[j]);
    lbase[j] = std::log10(base[j]);
  }

  int nw = workers > 0 ? workers
                       : static_cast<int>(std::thread::hardware_concurrency());
  if (nw < 1) nw = 1;
  if (static_cast<std::int64_t>(nw) > R) nw = static_cast<int>(R);

  SimulationResult result;
  result.seed = config.seed;
  result.per_sigma.resize(config.sigmas.size());

  for (std::size_t si = 0; si < config.sigmas.size(); ++si) {
    const double sigma = config.sigmas[si];
    std::vector<std::vector<std::int64_t>> hits(nw, std::vector<std::int64_t>(C, 0));
    std::vector<std::int64_t> joint_hits(nw, 0);

    auto worker = [&, si, sigma](int w_idx) {
      std::int64_t lo = R * w_idx / nw;
      std::int64_t hi = R * (w_idx + 1) / nw;
      std::vector<std::int64_t>& my_hits = hits[w_idx];
      std::int64_t& my_joint = joint_hits[w_idx];
      int counts[9];
      for (std::int64_t r = lo; r < hi; ++r) {
        Rng rng(substream_seed(config.seed, si, static_cast<std::uint64_t>(r)));
        std::fill(counts, counts + 9, 0);
        for (std::size_t j = 0; j < n_areas; ++j) {
          double wj = sigma > 0.0
                          ? std::exp((lbase[j] + sigma * rng.normal()) * kLn10)
                          : base[j];
          wj += std::sqrt(wj) * rng.normal();
          if (wj >= 1.0) ++counts[digit_of(wj)- 1];
        }
        bool all = true;
        for (std::size_t c = 0; c < C; ++c) {
          bool hit = counts[config.conditions[c].digit - 1] >=
                     config.conditions[c].threshold;
          if (hit) ++my_hits[c];
          all = all && hit;
        }
        if (all) ++my_joint;
      }
    };

    if (nw == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(nw);
      for (int w_idx = 0; w_idx < nw; ++w_idx) pool.emplace_back(worker, w_idx);
      for (std::thread& t : pool) t.join();
    }

    SigmaResult& sr = result.per_sigma[si];
    sr.sigma = sigma;
    sr.per_condition.resize(C);
    for (std::size_t c = 0; c < C; ++c) {
      for (int w_idx = 0; w_idx < nw; ++w_idx)
        sr.per_condition[c].hits += hits[w_idx][c];
      finish_tally(sr.per_condition[c], R);
    }
    for (int w_idx = 0; w_idx < nw; ++w_idx) sr.joint.hits += joint_hits[w_idx];
    finish_tally(sr.joint, R);
  }
  return result;
}

double parity_oracle_7a(std::int64_t trials, std::uint64_t seed) {
  if (trials < 10000) throw std::invalid_argument("parity_oracle_7a: trials < 1e4");
  const double base = std::log10(70.0);
  const double step = std::log10(80.0 / 70.0);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(substream_seed(seed, 0x7a, static_cast<std::uint64_t>(t)));
    int cnt[10] = {0};
    for (int i = 0; i < 20; ++i) {
      double lx = base + rng.uniform01() * step;
      int v = static_cast<int>(std::exp(lx * kLn10));
      v = std::clamp(v, 70, 79);
      ++cnt[v - 70];
    }
    if (cnt[0] == 1 && cnt[2] == 1 && cnt[4] == 1 && cnt[6] == 1 && cnt[8] == 1)
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double scatter_estimate(const VoteTable& table, const std::string& label,
                        std::int64_t min_total) {
  int idx = table.label_index(label);
  std::vector<double> lr;
  for (const VoteArea& a : table.areas) {
    if (a.total <= min_total || a.counts[idx] < 1) continue;
    lr.push_back(std::log10(static_cast<double>(a.counts[idx]) /
                            static_cast<double>(a.total)));
  }
  if (lr.size() < 3)
    throw std::domain_error("scatter_estimate: fewer than 3 qualifying areas");
  double mean = 0.0;
  for (double x : lr) mean += x;
  mean /= static_cast<double>(lr.size());
  double m2 = 0.0;
  for (double x : lr) m2 += (x - mean) * (x - mean);
  return std::sqrt(m2 / static_cast<double>(lr.size()));
}

SimulationConfig parse_sim_config(std::istream& in) {
  SimulationConfig c;
  c.realizations = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    std::string eq;
    if (!(ss >> eq) || eq != "=")
      throw ParseError("expected 'key = value'", lineno);
    if (key == "seed") {
      ss >> c.seed;
    } else if (key == "realizations") {
      ss >> c.realizations;
    } else if (key == "mean_fraction") {
      ss >> c.mean_fraction;
    } else if (key == "sigmas") {
      double s;
      while (ss >> s) c.sigmas.push_back(s);
    } else if (key == "condition") {
      DigitCondition d;
      if (!(ss >> d.digit >> d.threshold))
        throw ParseError("condition needs digit and threshold", lineno);
      c.conditions.push_back(d);
    } else if (key == "totals") {
      std::int64_t v;
      while (ss >> v) c.totals.push_back(v);
    } else {
      throw ParseError("unknown config key '" + key + "'", lineno);
    }
    if (ss.fail() && !ss.eof())
      throw ParseError("bad value for config key '" + key + "'", lineno);
  }
  return c;
}

void write_sim_config(std::ostream& out, const SimulationConfig& c) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "seed = " << c.seed << '\n';
  ss << "realizations = " << c.realizations << '\n';
  ss << "mean_fraction = " << c.mean_fraction << '\n';
  ss << "sigmas =";
  for (double s : c.sigmas) ss << ' ' << s;
  ss << '\n';
  for (const DigitCondition& d : c.conditions)
    ss << "condition = " << d.digit << ' ' << d.threshold << '\n';
  ss << "totals =";
  for (std::int64_t v : c.totals) ss << ' ' << v;
  ss << '\n';
  out << ss.str();
}

namespace {

void append_tally_fields(std::ostringstream& ss, const ConditionTally& t) {
  ss << t.hits << ',' << t.trials << ',' << t.p_hat << ',' << t.wilson_95.lo
     << ',' << t.wilson_95.hi;
}

}  // namespace

std::string sim_result_csv(const SimulationConfig& config,
                           const SimulationResult& result) {
  std::ostringstream ss;
  ss.precision(6);
  ss << "sigma,condition,digit,threshold,hits,trials,p_hat,wilson_lo,wilson_hi\n";
  for (const SigmaResult& sr : result.per_sigma) {
    for (std::size_t c = 0; c < sr.per_condition.size(); ++c) {
      ss << sr.sigma << ",digit_" << config.conditions[c].digit << ','
         << config.conditions[c].digit << ',' << config.conditions[c].threshold
         << ',';
      append_tally_fields(ss, sr.per_condition[c]);
      ss << '\n';
    }
    ss << sr.sigma << ",joint,,,";
    append_tally_fields(ss, sr.joint);
    ss << '\n';
  }
  return ss.str();
}

std::string sim_result_json(const SimulationConfig& config,
                            const SimulationResult& result) {
  nlohmann::json j;
  j["seed"] = result.seed;
  j["realizations"] = config.realizations;
  j["mean_fraction"] = config.mean_fraction;
  j["sigmas"] = nlohmann::json::array();
  for (const SigmaResult& sr : result.per_sigma) {
    nlohmann::json js;
    js["sigma"] = sr.sigma;
    js["conditions"] = nlohmann::json::array();
    for (std::size_t c = 0; c < sr.per_condition.size(); ++c) {
      const ConditionTally& t = sr.per_condition[c];
      js["conditions"].push_back({{"digit", config.conditions[c].digit},
                                  {"threshold", config.conditions[c].threshold},
                                  {"hits", t.hits},
                                  {"trials", t.trials},
                                  {"p_hat", t.p_hat},
                                  {"wilson_lo", t.wilson_95.lo},
                                  {"wilson_hi", t.wilson_95.hi}});
    }
    js["joint"] = {{"hits", sr.joint.hits},
                   {"trials", sr.joint.trials},
                   {"p_hat", sr.joint.p_hat},
                   {"wilson_lo", sr.joint.wilson_95.lo},
                   {"wilson_hi", sr.joint.wilson_95.hi}};
    j["sigmas"].push_back(js);
  }
  return j.dump(2);
}

}  // namespace digitfor
