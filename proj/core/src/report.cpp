#include "digitfor/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "json.hpp"

namespace digitfor {

namespace {

using nlohmann::json;

struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::uint64_t total = 0;
  unsigned char buf[64];
  std::size_t fill = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void block(const unsigned char* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = hh + s1 + ch + K[i] + w[i];
      std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t mj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = s0 + mj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    total += n;
    while (n > 0) {
      std::size_t take = std::min(n, std::size_t{64} - fill);
      std::memcpy(buf + fill, p, take);
      fill += take;
      p += take;
      n -= take;
      if (fill == 64) {
        block(buf);
        fill = 0;
      }
    }
  }

  std::string hex() {
    std::uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(len, 8);
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
  }
};

double round6(double x) {
  if (!std::isfinite(x)) return x;
  char tmp[64];
  std::snprintf(tmp, sizeof tmp, "%.6g", x);
  return std::strtod(tmp, nullptr);
}

std::string fmt6(double x) {
  char tmp[64];
  std::snprintf(tmp, sizeof tmp, "%.6g", x);
  return tmp;
}

std::string fmt_p(double p) {
  char tmp[64];
  std::snprintf(tmp, sizeof tmp, "%.5e", p);
  return tmp;
}

std::vector<double> positive_counts(const VoteTable& table, const std::string& label) {
  int idx = table.label_index(label);
  std::vector<double> out;
  for (const VoteArea& a : table.areas)
    if (a.counts[idx] >= 1) out.push_back(static_cast<double>(a.counts[idx]));
  return out;
}

std::vector<double> positive_proportions(const VoteTable& table,
                                         const std::string& label) {
  int idx = table.label_index(label);
  std::vector<double> out;
  for (const VoteArea& a : table.areas)
    if (a.counts[idx] >= 1 && a.total > 0)
      out.push_back(static_cast<double>(a.counts[idx]) /
                    static_cast<double>(a.total));
  return out;
}

json tally_json(const ConditionTally& t) {
  return {{"hits", t.hits},
          {"trials", t.trials},
          {"p_hat", round6(t.p_hat)},
          {"wilson_lo", round6(t.wilson_95.lo)},
          {"wilson_hi", round6(t.wilson_95.hi)}};
}

json histogram_json(const LogHistogram& h) {
  json bins = json::array();
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    bins.push_back({{"lo", round6(h.edge(i))},
                    {"hi", round6(h.edge(i + 1))},
                    {"count", h.counts[i]}});
  return {{"bin_width", h.bin_width}, {"origin", round6(h.origin)}, {"bins", bins}};
}

std::string histogram_csv(const LogHistogram& h) {
  std::ostringstream ss;
  ss << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    ss << fmt6(h.edge(i)) << ',' << fmt6(h.edge(i + 1)) << ',' << h.counts[i]
       << '\n';
  return ss.str();
}

}  // namespace

LogHistogram log_histogram(const std::vector<std::int64_t>& values,
                           double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("log_histogram: bad bin width");
  std::vector<double> lv;
  for (std::int64_t v : values)
    if (v >= 1) lv.push_back(std::log10(static_cast<double>(v)));
  LogHistogram h;
  h.bin_width = bin_width;
  if (lv.empty()) return h;
  double lo = *std::min_element(lv.begin(), lv.end());
  double hi = *std::max_element(lv.begin(), lv.end());
  h.origin = std::floor(lo / bin_width) * bin_width;
  std::size_t nbins =
      static_cast<std::size_t>(std::floor((hi - h.origin) / bin_width)) + 1;
  h.counts.assign(nbins, 0);
  for (double x : lv) {
    auto b = static_cast<std::size_t>(std::floor((x - h.origin) / bin_width));
    if (b >= nbins) b = nbins - 1;
    ++h.counts[b];
  }
  return h;
}

LogHistogram folded_histogram(const std::vector<std::int64_t>& values,
                              double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("folded_histogram: bad bin width");
  LogHistogram h;
  h.bin_width = bin_width;
  h.origin = 0.0;
  auto nbins = static_cast<std::size_t>(std::ceil(1.0 / bin_width));
  h.counts.assign(nbins, 0);
  for (std::int64_t v : values) {
    if (v < 1) continue;
    double f = fold_log(static_cast<double>(v));
    auto b = static_cast<std::size_t>(f / bin_width);
    if (b >= nbins) b = nbins - 1;
    ++h.counts[b];
  }
  return h;
}

std::pair<double, double> decade_marker(int digit, double alpha) {
  if (digit < 1 || digit > 9) throw std::invalid_argument("decade_marker: digit");
  if (!(alpha > 0.0)) throw std::invalid_argument("decade_marker: alpha");
  auto wrap = [](double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
  };
  double la = std::log10(alpha);
  return {wrap(std::log10(static_cast<double>(digit)) - la),
          wrap(std::log10(static_cast<double>(digit) + 1.0) - la)};
}

std::string benford_table_csv(const VoteTable& table, const std::string& label,
                              DigitPosition position, double alpha) {
  int idx = table.label_index(label);
  std::vector<std::int64_t> sample;
  std::int64_t floor_value = position == DigitPosition::first ? 1 : 10;
  for (const VoteArea& a : table.areas)
    if (a.counts[idx] >= floor_value) sample.push_back(a.counts[idx]);

  std::ostringstream ss;
  ss << "digit,observed,expected_standard,stderr_standard,expected_empirical,"
        "stderr_empirical\n";
  if (sample.empty()) return ss.str();

  DigitHistogram obs = digit_histogram(sample, position);
  BenfordModel std_model = position == DigitPosition::first
                               ? standard_first_digit_model()
                               : second_digit_model();
  std::vector<ExpectedCount> exp_std = expected_counts(std_model, obs.n);
  std::vector<ExpectedCount> exp_emp;
  if (position == DigitPosition::first) {
    BenfordModel emp = empirical_first_digit_model(table.totals(), alpha);
    exp_emp = expected_counts(emp, obs.n);
  }
  int lo = position == DigitPosition::first ? 1 : 0;
  for (std::size_t i = 0; i < obs.counts.size(); ++i) {
    ss << (lo + static_cast<int>(i)) << ',' << obs.counts[i] << ','
       << fmt6(exp_std[i].expected) << ',' << fmt6(exp_std[i].sd) << ',';
    if (!exp_emp.empty())
      ss << fmt6(exp_emp[i].expected) << ',' << fmt6(exp_emp[i].sd);
    else
      ss << ',';
    ss << '\n';
  }
  return ss.str();
}

std::string scatterplot_csv(const VoteTable& table, const std::string& label,
                            const std::string& marker_label, int marker_digit) {
  int li = table.label_index(label);
  int mi = table.label_index(marker_label);
  std::ostringstream ss;
  ss << "name,total,count,proportion,marker_digit_match\n";
  for (const VoteArea& a : table.areas) {
    bool flagged = a.counts[mi] >= 1 &&
                   first_digit(static_cast<std::uint64_t>(a.counts[mi])) ==
                       marker_digit;
    double prop = a.total > 0 ? static_cast<double>(a.counts[li]) /
                                    static_cast<double>(a.total)
                              : 0.0;
    ss << a.name << ',' << a.total << ',' << a.counts[li] << ',' << fmt6(prop)
       << ',' << (flagged ? 1 : 0) << '\n';
  }
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  Sha256 s;
  s.update(bytes.data(), bytes.size());
  return s.hex();
}

std::string dataset_hash(const VoteTable& table) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < table.candidate_labels.size(); ++i)
    ss << (i ? " " : "") << table.candidate_labels[i];
  ss << '\n';
  write_totals(ss, table);
  ss << "--\n";
  write_cands(ss, table);
  return sha256_hex(ss.str());
}

std::string config_hash(const ReportConfig& c) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "seed " << c.seed << "\nrealizations " << c.realizations << "\nsigmas";
  for (double s : c.sigmas) ss << ' ' << s;
  ss << "\nsim_label " << c.sim_label << "\ntarget_label " << c.target_label
     << "\nmarker_digit " << c.marker_digit << "\ncounterfactual_target "
     << c.counterfactual_target << "\nparity_trials " << c.parity_trials
     << "\nbin_width_dex " << c.bin_width_dex << "\ncombination_C "
     << c.combination_C << '\n';
  return sha256_hex(ss.str());
}

ReportDocument full_report(const VoteTable& table, const ReportConfig& cfg) {
  json root;
  json skipped = json::object();
  ReportDocument doc;

  root["dataset_sha256"] = dataset_hash(table);
  root["config_hash"] = config_hash(cfg);
  root["seed"] = cfg.seed;
  root["realizations"] = cfg.realizations;
  root["labels"] = table.candidate_labels;

  ValidationReport vr = validate(table);
  json mismatches = json::array();
  for (const MismatchEntry& m : vr.mismatched_areas)
    mismatches.push_back({{"name", m.name},
                          {"total", m.total},
                          {"candidate_sum", m.candidate_sum}});
  root["validation"] = {{"n_areas", vr.n_areas},
                        {"mismatched_areas", mismatches},
                        {"zero_count_cells", vr.zero_count_cells.size()}};

  json sums = json::object(), gfrac = json::object(), mfrac = json::object();
  for (const std::string& l : table.candidate_labels) {
    sums[l] = national_sum(table, l);
    gfrac[l] = round6(global_fraction(table, l));
    mfrac[l] = round6(mean_fraction(table, l));
  }
  root["national_sums"] = sums;
  root["total_votes"] = total_votes(table);
  root["global_fractions"] = gfrac;
  root["mean_fractions"] = mfrac;

  // Log and folded histograms of the totals, with fold markers for the
  // simulated candidate.
  std::vector<std::int64_t> totals = table.totals();
  LogHistogram tot_hist = log_histogram(totals, cfg.bin_width_dex);
  LogHistogram fold_hist = folded_histogram(totals, cfg.bin_width_dex);
  root["totals_log_histogram"] = histogram_json(tot_hist);
  root["totals_folded_histogram"] = histogram_json(fold_hist);
  doc.csv_tables.push_back({"totals_hist", histogram_csv(tot_hist)});
  doc.csv_tables.push_back({"totals_folded_hist", histogram_csv(fold_hist)});

  double alpha_sim = mean_fraction(table, cfg.sim_label);
  {
    json markers = json::object();
    std::ostringstream mcsv;
    mcsv << "digit,fold_lo,fold_hi\n";
    for (int d = 1; d <= 9; ++d) {
      auto [lo, hi] = decade_marker(d, alpha_sim);
      markers[std::to_string(d)] = {round6(lo), round6(hi)};
      mcsv << d << ',' << fmt6(lo) << ',' << fmt6(hi) << '\n';
    }
    root["decade_markers"] = {{"alpha", round6(alpha_sim)},
                              {"label", cfg.sim_label},
                              {"positions", markers}};
    doc.csv_tables.push_back({"decade_markers", mcsv.str()});
  }

  // Per-candidate first-digit tables, digit tests, and log histograms.
  json digits = json::object();
  json chi = json::object();
  json cand_hists = json::object();
  for (const std::string& l : table.candidate_labels) {
    std::vector<std::int64_t> counts = table.counts_for(l);
    std::vector<std::int64_t> pos;
    for (std::int64_t c : counts)
      if (c >= 1) pos.push_back(c);
    doc.csv_tables.push_back(
        {"benford_" + l,
         benford_table_csv(table, l, DigitPosition::first, mean_fraction(table, l))});
    if (pos.empty()) {
      skipped["digits_" + l] = "no nonzero counts";
      continue;
    }
    DigitHistogram h = digit_histogram(pos, DigitPosition::first);
    digits[l] = h.counts;
    try {
      BenfordModel emp = empirical_first_digit_model(totals, mean_fraction(table, l));
      TestResult r_emp = chi_square_gof(h, emp);
      TestResult r_std = chi_square_gof(h, standard_first_digit_model());
      chi[l] = {{"empirical",
                 {{"statistic", round6(r_emp.statistic)},
                  {"dof", 8},
                  {"p", round6(r_emp.p_value)}}},
                {"standard",
                 {{"statistic", round6(r_std.statistic)},
                  {"dof", 8},
                  {"p", round6(r_std.p_value)}}}};
    } catch (const std::exception& e) {
      skipped["chi_square_" + l] = e.what();
    }
    LogHistogram lh = log_histogram(pos, cfg.bin_width_dex);
    cand_hists[l] = histogram_json(lh);
    doc.csv_tables.push_back({"log_hist_" + l, histogram_csv(lh)});
  }
  root["first_digit_counts"] = digits;
  root["chi_square"] = chi;
  root["candidate_log_histograms"] = cand_hists;

  // Digit-seven Poisson tail for the simulated candidate.
  std::int64_t n7 = 0, n1 = 0, n_valid = 0;
  {
    int idx = table.label_index(cfg.sim_label);
    for (const VoteArea& a : table.areas) {
      if (a.counts[idx] < 1) continue;
      ++n_valid;
      int d = first_digit(static_cast<std::uint64_t>(a.counts[idx]));
      if (d == cfg.marker_digit) ++n7;
      if (d == 1) ++n1;
    }
  }
  try {
    BenfordModel std_model = standard_first_digit_model();
    BenfordModel emp_model = empirical_first_digit_model(totals, alpha_sim);
    double lam_std = static_cast<double>(n_valid) * std_model.at_digit(cfg.marker_digit);
    double lam_emp = static_cast<double>(n_valid) * emp_model.at_digit(cfg.marker_digit);
    double p_std = poisson_tail(n7, lam_std);
    double p_emp = poisson_tail(n7, lam_emp);
    root["poisson_digit_test"] = {
        {"digit", cfg.marker_digit},
        {"observed", n7},
        {"expected_standard", round6(lam_std)},
        {"expected_empirical", round6(lam_emp)},
        {"p_standard_one_sided", round6(p_std)},
        {"p_empirical_one_sided", round6(p_emp)},
        {"p_standard_two_sided", round6(two_sided_p(p_std))},
        {"p_empirical_two_sided", round6(two_sided_p(p_emp))},
        {"p_empirical_corrected_36", round6(multi_test_correction(
                                         p_emp, 36, CorrectionMethod::multiply))}};
  } catch (const std::exception& e) {
    skipped["poisson_digit_test"] = e.what();
  }

  // Width, skewness, and Spearman table.
  {
    json t1 = json::object();
    std::ostringstream csv;
    csv << "label,width_log10,skew_log10,skew_log10_se,skew_prop,skew_prop_se,"
           "spearman_full_rho,spearman_full_norm,spearman_ablated_rho,"
           "spearman_ablated_norm\n";
    std::vector<AblationRow> ab;
    bool have_ab = true;
    try {
      ab = spearman_ablation(table, cfg.sim_label, cfg.marker_digit);
    } catch (const std::exception& e) {
      have_ab = false;
      skipped["spearman_ablation"] = e.what();
    }
    for (std::size_t i = 0; i < table.candidate_labels.size(); ++i) {
      const std::string& l = table.candidate_labels[i];
      json row;
      csv << l << ',';
      try {
        std::vector<double> pc = positive_counts(table, l);
        std::vector<double> pp = positive_proportions(table, l);
        double width = log_width(pc);
        SkewnessResult sl = log_skewness(pc);
        SkewnessResult sp = log_skewness(pp);
        row["width_log10"] = round6(width);
        row["skew_log10"] = {{"gamma1", round6(sl.gamma1)},
                             {"se", round6(sl.se)},
                             {"normalized", round6(sl.normalized)}};
        row["skew_prop"] = {{"gamma1", round6(sp.gamma1)},
                            {"se", round6(sp.se)},
                            {"normalized", round6(sp.normalized)}};
        csv << fmt6(width) << ',' << fmt6(sl.gamma1) << ',' << fmt6(sl.se) << ','
            << fmt6(sp.gamma1) << ',' << fmt6(sp.se) << ',';
      } catch (const std::exception& e) {
        skipped["table1_" + l] = e.what();
        csv << ",,,,,";
      }
      if (have_ab) {
        row["spearman_full"] = {{"rho", round6(ab[i].full.rho)},
                                {"normalized", round6(ab[i].full.normalized)},
                                {"n", ab[i].full.n}};
        row["spearman_ablated"] = {{"rho", round6(ab[i].ablated.rho)},
                                   {"normalized", round6(ab[i].ablated.normalized)},
                                   {"n", ab[i].ablated.n}};
        csv << fmt6(ab[i].full.rho) << ',' << fmt6(ab[i].full.normalized) << ','
            << fmt6(ab[i].ablated.rho) << ',' << fmt6(ab[i].ablated.normalized);
      } else {
        csv << ",,,";
      }
      csv << '\n';
      t1[l] = row;
    }
    root["table1"] = t1;
    doc.csv_tables.push_back({"table1", csv.str()});
  }

  // Scatter staircase for the simulated candidate.
  {
    json sc = json::object();
    for (std::int64_t cut : {std::int64_t{0}, std::int64_t{100000},
                             std::int64_t{300000}, std::int64_t{1000000}}) {
      try {
        sc[std::to_string(cut)] = round6(scatter_estimate(table, cfg.sim_label, cut));
      } catch (const std::exception& e) {
        skipped["scatter_above_" + std::to_string(cut)] = e.what();
      }
    }
    root["scatter_estimates"] = sc;
  }

  doc.csv_tables.push_back(
      {"scatter_" + cfg.target_label,
       scatterplot_csv(table, cfg.target_label, cfg.sim_label, cfg.marker_digit)});

  // Null-model simulation.
  SimulationResult sim;
  bool have_sim = false;
  SimulationConfig sim_cfg;
  try {
    sim_cfg.totals = totals;
    sim_cfg.mean_fraction = alpha_sim;
    sim_cfg.sigmas = cfg.sigmas;
    sim_cfg.realizations = cfg.realizations;
    sim_cfg.seed = cfg.seed;
    sim_cfg.conditions = {{cfg.marker_digit, n7}, {1, n1}};
    sim = run_simulation(sim_cfg, cfg.workers);
    have_sim = true;
    root["table2"] = json::parse(sim_result_json(sim_cfg, sim));
    doc.csv_tables.push_back({"table2", sim_result_csv(sim_cfg, sim)});
  } catch (const std::exception& e) {
    skipped["table2"] = e.what();
  }

  // Big-city split and second-digit coincidence.
  BigCitySplit split;
  bool have_split = false;
  try {
    split = big_city_split(table, 6, cfg.sim_label, cfg.marker_digit,
                           cfg.target_label);
    have_split = true;
    json rows = json::array();
    std::ostringstream csv;
    csv << "name,total,marker_count,target_proportion,marked\n";
    for (const BigCityRow& r : split.top_areas) {
      rows.push_back({{"name", r.name},
                      {"total", r.total},
                      {"marker_count", r.marker_count},
                      {"target_proportion", round6(r.target_proportion)},
                      {"marked", r.marked}});
      csv << r.name << ',' << r.total << ',' << r.marker_count << ','
          << fmt6(r.target_proportion) << ',' << (r.marked ? 1 : 0) << '\n';
    }
    json j3 = {{"rows", rows},
               {"marked_second_digits", split.marked_second_digits},
               {"marked_second_digits_identical",
                split.marked_second_digits_identical},
               {"identical_second_digit_p", round6(split.identical_second_digit_p)}};
    if (split.ks)
      j3["ks"] = {{"D", round6(split.ks->statistic)},
                  {"p", round6(split.ks->p_value)}};
    else
      skipped["big_city_ks"] = "a partition side is empty";
    root["table3"] = j3;
    doc.csv_tables.push_back({"table3", csv.str()});
  } catch (const std::exception& e) {
    skipped["table3"] = e.what();
  }

  // Seventies parity.
  SeventiesParity sev;
  bool have_sev = false;
  try {
    sev = seventies_parity(table, cfg.sim_label, cfg.parity_trials, cfg.seed);
    have_sev = true;
    std::ostringstream csv;
    csv << "value,frequency\n";
    json freqs = json::array();
    for (int i = 0; i < 10; ++i) {
      freqs.push_back(sev.frequencies[static_cast<std::size_t>(i)]);
      csv << (70 + i) << ',' << sev.frequencies[static_cast<std::size_t>(i)] << '\n';
    }
    root["table4"] = {{"frequencies", freqs},
                      {"total", sev.total},
                      {"odd_count", sev.odd_count},
                      {"each_even_exactly_once", sev.each_even_exactly_once},
                      {"parity_p", round6(sev.parity_p)}};
    doc.csv_tables.push_back({"table4", csv.str()});
  } catch (const std::exception& e) {
    skipped["table4"] = e.what();
  }

  // Counterfactual on the marked big cities.
  try {
    if (!have_split || split.marked.empty())
      throw std::domain_error("no marked big-city areas");
    std::vector<std::string> names;
    for (const BigCityRow& r : split.marked) names.push_back(r.name);
    CounterfactualReport cf = counterfactual_shift(
        table, names, cfg.target_label, cfg.counterfactual_target);
    json deltas = json::object();
    for (std::size_t i = 0; i < table.candidate_labels.size(); ++i)
      deltas[table.candidate_labels[i]] = cf.delta_per_candidate[i];
    root["counterfactual"] = {{"target_proportion", cf.target_proportion},
                              {"affected_areas", cf.affected_areas},
                              {"delta_per_candidate", deltas},
                              {"gap_change_A_minus_M", cf.gap_change_A_minus_M}};
  } catch (const std::exception& e) {
    skipped["counterfactual"] = e.what();
  }

  // Combined post-hoc probability.
  try {
    std::vector<std::pair<std::string, double>> comps;
    if (have_sim) {
      std::size_t si = 0;
      double best = 1e9;
      for (std::size_t i = 0; i < sim.per_sigma.size(); ++i) {
        double d = std::fabs(sim.per_sigma[i].sigma - 0.4);
        if (d < best) {
          best = d;
          si = i;
        }
      }
      double p7 = sim.per_sigma[si].per_condition[0].p_hat;
      comps.push_back({"digit7_corrected_36",
                       multi_test_correction(p7, 36, CorrectionMethod::multiply)});
    }
    if (have_split && split.ks) comps.push_back({"big_city_ks", split.ks->p_value});
    if (have_split && split.marked.size() >= 2)
      comps.push_back({"identical_second_digit", split.identical_second_digit_p});
    if (have_sev) comps.push_back({"seventies_parity", sev.parity_p});
    CombinedProbability comb = combined_probability(comps, cfg.combination_C);
    json jc = json::array();
    for (const auto& [name, p] : comps) jc.push_back({{"name", name}, {"p", round6(p)}});
    root["combined_probability"] = {{"components", jc},
                                    {"correction_C", comb.correction_C},
                                    {"p_all", round6(comb.p_all)}};
  } catch (const std::exception& e) {
    skipped["combined_probability"] = e.what();
  }

  root["skipped"] = skipped;
  doc.json_text = root.dump(2) + "\n";

  // Markdown companion.
  {
    std::ostringstream md;
    md << "# Digit forensics report\n\n";
    md << "dataset sha256: `" << root["dataset_sha256"].get<std::string>()
       << "`\nconfig hash: `" << root["config_hash"].get<std::string>()
       << "`\nseed: " << cfg.seed << "\n\n";
    md << "## National sums\n\n| candidate | votes |\n|---|---|\n";
    for (const std::string& l : table.candidate_labels)
      md << "| " << l << " | " << national_sum(table, l) << " |\n";
    md << "| total (with invalid) | " << total_votes(table) << " |\n\n";
    if (root.contains("poisson_digit_test")) {
      const json& pt = root["poisson_digit_test"];
      md << "## Digit " << cfg.marker_digit << " of " << cfg.sim_label << "\n\n"
         << "observed " << pt["observed"] << ", expected "
         << pt["expected_standard"] << " (standard) / " << pt["expected_empirical"]
         << " (empirical); one-sided p "
         << fmt_p(pt["p_standard_one_sided"].get<double>()) << " / "
         << fmt_p(pt["p_empirical_one_sided"].get<double>()) << "\n\n";
    }
    if (root.contains("chi_square") &&
        root["chi_square"].contains(cfg.sim_label)) {
      const json& c = root["chi_square"][cfg.sim_label]["empirical"];
      md << "chi-square vs empirical model: " << fmt6(c["statistic"].get<double>())
         << " (dof " << c["dof"] << "), p " << fmt_p(c["p"].get<double>())
         << "\n\n";
    }
    if (root.contains("table1")) {
      md << "## Widths, skewness, rank correlations\n\n"
         << "| candidate | width | skew(log v) | skew(log v/tot) | norm rho "
            "(all) | norm rho (ablated) |\n|---|---|---|---|---|---|\n";
      for (const std::string& l : table.candidate_labels) {
        const json& row = root["table1"][l];
        md << "| " << l << " | ";
        if (row.contains("width_log10"))
          md << fmt6(row["width_log10"].get<double>());
        md << " | ";
        if (row.contains("skew_log10"))
          md << fmt6(row["skew_log10"]["gamma1"].get<double>());
        md << " | ";
        if (row.contains("skew_prop"))
          md << fmt6(row["skew_prop"]["gamma1"].get<double>());
        md << " | ";
        if (row.contains("spearman_full"))
          md << fmt6(row["spearman_full"]["normalized"].get<double>());
        md << " | ";
        if (row.contains("spearman_ablated"))
          md << fmt6(row["spearman_ablated"]["normalized"].get<double>());
        md << " |\n";
      }
      md << '\n';
    }
    if (have_sim) {
      md << "## Null simulation (" << cfg.realizations << " realizations)\n\n"
         << "| sigma |";
      for (const DigitCondition& d : sim_cfg.conditions)
        md << " digit " << d.digit << " >= " << d.threshold << " |";
      md << " joint |\n|---|";
      for (std::size_t i = 0; i <= sim_cfg.conditions.size(); ++i) md << "---|";
      md << '\n';
      for (const SigmaResult& sr : sim.per_sigma) {
        md << "| " << fmt6(sr.sigma) << " |";
        for (const ConditionTally& t : sr.per_condition)
          md << ' ' << fmt_p(t.p_hat) << " |";
        md << ' ' << fmt_p(sr.joint.p_hat) << " |\n";
      }
      md << '\n';
    }
    if (have_split) {
      md << "## Six largest areas\n\n| name | total | " << cfg.sim_label
         << " | " << cfg.target_label << "/total | digit-" << cfg.marker_digit
         << " |\n|---|---|---|---|---|\n";
      for (const BigCityRow& r : split.top_areas)
        md << "| " << r.name << " | " << r.total << " | " << r.marker_count
           << " | " << fmt6(r.target_proportion) << " | "
           << (r.marked ? "yes" : "no") << " |\n";
      if (split.ks)
        md << "\nKS on the proportions: D = " << fmt6(split.ks->statistic)
           << ", p = " << fmt6(split.ks->p_value) << "\n";
      md << '\n';
    }
    if (have_sev) {
      md << "## Votes in [70,80)\n\n| value | n |\n|---|---|\n";
      for (int i = 0; i < 10; ++i)
        md << "| " << (70 + i) << " | "
           << sev.frequencies[static_cast<std::size_t>(i)] << " |\n";
      md << "\neach even exactly once: "
         << (sev.each_even_exactly_once ? "yes" : "no")
         << "; parity p = " << fmt_p(sev.parity_p) << "\n\n";
    }
    if (root.contains("counterfactual")) {
      const json& cf = root["counterfactual"];
      md << "## Counterfactual at proportion "
         << fmt6(cf["target_proportion"].get<double>()) << "\n\n";
      md << "delta " << cfg.target_label << ": "
         << cf["delta_per_candidate"][cfg.target_label].get<std::int64_t>()
         << "; gap change: " << cf["gap_change_A_minus_M"].get<std::int64_t>()
         << "\n\n";
    }
    if (root.contains("combined_probability")) {
      const json& cb = root["combined_probability"];
      md << "## Combined probability\n\np_all = "
         << fmt_p(cb["p_all"].get<double>()) << " (C = " << cb["correction_C"]
         << ")\n";
    }
    doc.markdown_text = md.str();
  }

  return doc;
}

}  // namespace digitfor
