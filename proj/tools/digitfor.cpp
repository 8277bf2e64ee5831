#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "digitfor/anomaly.hpp"
#include "digitfor/benford.hpp"
#include "digitfor/report.hpp"
#include "digitfor/scatter_sim.hpp"
#include "digitfor/stat_tests.hpp"
#include "digitfor/vote_table.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

digitfor::VoteTable load_table(const std::string& totals_path,
                               const std::string& cands_path,
                               const std::string& labels_csv) {
  std::ifstream tf(totals_path);
  if (!tf) throw DataError("cannot open totals file: " + totals_path);
  std::ifstream cf(cands_path);
  if (!cf) throw DataError("cannot open candidates file: " + cands_path);
  return digitfor::parse_vote_table(tf, cf, split_labels(labels_csv));
}

int env_workers() {
  const char* v = std::getenv("DIGIT_FORENSICS_THREADS");
  if (!v) return 0;
  int n = std::atoi(v);
  return n > 0 ? n : 1;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digit-distribution forensics for per-area vote tables"};
  app.require_subcommand(1);

  std::string totals_path, cands_path;
  std::string labels_csv = "A,R,K,M";
  app.add_option("--totals", totals_path, "per-area totals file")->required();
  app.add_option("--cands", cands_path, "per-area candidate counts file")->required();
  app.add_option("--labels", labels_csv, "candidate labels, comma separated");

  CLI::App* c_validate =
      app.add_subcommand("validate", "parse the table and print national sums");

  CLI::App* c_benford =
      app.add_subcommand("benford", "first or second digit histogram with models");
  std::string b_label = "K", b_position = "first";
  c_benford->add_option("--label", b_label, "candidate label");
  c_benford->add_option("--position", b_position, "first or second")
      ->check(CLI::IsMember({"first", "second"}));

  CLI::App* c_hist = app.add_subcommand("hist", "log10 or folded histogram data");
  std::string h_what = "totals";
  double h_width = 0.1;
  int h_marker = 0;
  c_hist->add_option("--what", h_what, "totals, folded, or a candidate label");
  c_hist->add_option("--bin-width", h_width, "bin width in dex");
  c_hist->add_option("--marker-digit", h_marker,
                     "emit fold markers for this digit (folded mode)");

  CLI::App* c_scatter =
      app.add_subcommand("scatterplot", "per-area proportion vs total data");
  std::string s_label = "A", s_marker_label = "K";
  int s_marker_digit = 7;
  c_scatter->add_option("--label", s_label, "candidate for the y axis");
  c_scatter->add_option("--marker-label", s_marker_label, "flagging candidate");
  c_scatter->add_option("--marker-digit", s_marker_digit, "flagging first digit");

  CLI::App* c_report = app.add_subcommand("report", "full analysis report");
  digitfor::ReportConfig rc;
  std::string out_dir = "report_out";
  std::string sigmas_csv, formats_csv = "json,csv,md";
  c_report->add_option("--seed", rc.seed, "simulation seed");
  c_report->add_option("--realizations", rc.realizations, "simulation realizations")
      ->check(CLI::PositiveNumber);
  c_report->add_option("--sigmas", sigmas_csv, "comma-separated sigma list, dex");
  c_report->add_option("--out", out_dir, "output directory");
  c_report->add_option("--format", formats_csv, "subset of json,csv,md");
  c_report->add_option("--sim-label", rc.sim_label, "simulated candidate");
  c_report->add_option("--target-label", rc.target_label,
                       "big-city and counterfactual candidate");
  c_report->add_option("--counterfactual-target", rc.counterfactual_target,
                       "assumed true proportion");
  c_report->add_option("--parity-trials", rc.parity_trials, "parity oracle trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    digitfor::VoteTable table = load_table(totals_path, cands_path, labels_csv);

    if (c_validate->parsed()) {
      digitfor::ValidationReport vr = digitfor::validate(table);
      std::cout << "areas: " << vr.n_areas << "\n";
      for (const std::string& l : table.candidate_labels)
        std::cout << "sum " << l << ": " << digitfor::national_sum(table, l)
                  << "\n";
      std::cout << "total votes: " << digitfor::total_votes(table) << "\n";
      std::cout << "mismatched areas: " << vr.mismatched_areas.size() << "\n";
      for (const digitfor::MismatchEntry& m : vr.mismatched_areas)
        std::cout << "  " << m.name << " total " << m.total << " candidate sum "
                  << m.candidate_sum << "\n";
      std::cout << "zero count cells: " << vr.zero_count_cells.size() << "\n";
      return kExitOk;
    }

    if (c_benford->parsed()) {
      digitfor::DigitPosition pos = b_position == "first"
                                        ? digitfor::DigitPosition::first
                                        : digitfor::DigitPosition::second;
      double alpha = digitfor::mean_fraction(table, b_label);
      std::cout << digitfor::benford_table_csv(table, b_label, pos, alpha);
      return kExitOk;
    }

    if (c_hist->parsed()) {
      if (h_what == "folded") {
        digitfor::LogHistogram h =
            digitfor::folded_histogram(table.totals(), h_width);
        std::cout << "bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i)
          std::cout << h.edge(i) << ',' << h.edge(i + 1) << ',' << h.counts[i]
                    << "\n";
        if (h_marker >= 1 && h_marker <= 9) {
          auto [lo, hi] = digitfor::decade_marker(
              h_marker, digitfor::mean_fraction(table, "K"));
          std::cout << "# marker digit " << h_marker << ": " << lo << ' ' << hi
                    << "\n";
        }
      } else {
        std::vector<std::int64_t> values =
            h_what == "totals" ? table.totals() : table.counts_for(h_what);
        digitfor::LogHistogram h = digitfor::log_histogram(values, h_width);
        std::cout << "bin_lo,bin_hi,count\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i)
          std::cout << h.edge(i) << ',' << h.edge(i + 1) << ',' << h.counts[i]
                    << "\n";
      }
      return kExitOk;
    }

    if (c_scatter->parsed()) {
      std::cout << digitfor::scatterplot_csv(table, s_label, s_marker_label,
                                             s_marker_digit);
      return kExitOk;
    }

    if (c_report->parsed()) {
      if (!sigmas_csv.empty()) rc.sigmas = split_doubles(sigmas_csv);
      rc.workers = env_workers();
      digitfor::ReportDocument doc = digitfor::full_report(table, rc);
      std::filesystem::path out(out_dir);
      std::filesystem::create_directories(out / "tables");
      bool want_json = formats_csv.find("json") != std::string::npos;
      bool want_csv = formats_csv.find("csv") != std::string::npos;
      bool want_md = formats_csv.find("md") != std::string::npos;
      if (want_json) write_file(out / "report.json", doc.json_text);
      if (want_md) write_file(out / "report.md", doc.markdown_text);
      if (want_csv)
        for (const auto& [name, body] : doc.csv_tables)
          write_file(out / "tables" / (name + ".csv"), body);
      std::cout << "report written to " << out.string() << "\n";
      return kExitOk;
    }

    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const digitfor::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
