#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace digitfor {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct VoteArea {
  std::string name;
  std::int64_t total = 0;
  std::vector<std::int64_t> counts;  // parallel to VoteTable::candidate_labels
};

struct VoteTable {
  std::vector<std::string> candidate_labels;
  std::vector<VoteArea> areas;

  int label_index(const std::string& label) const;
  std::vector<std::int64_t> totals() const;
  std::vector<std::int64_t> counts_for(const std::string& label) const;
};

struct MismatchEntry {
  std::string name;
  std::int64_t total = 0;
  std::int64_t candidate_sum = 0;
};

struct ZeroCell {
  std::string name;
  std::string label;
};

struct ValidationReport {
  std::int64_t n_areas = 0;
  std::vector<MismatchEntry> mismatched_areas;
  std::vector<ZeroCell> zero_count_cells;
};

struct AreaPredicate {
  enum class Kind { first_digit_equals, count_in_range, top_n_by_total };
  Kind kind = Kind::first_digit_equals;
  int digit = 0;
  std::int64_t lo = 0, hi = 0;  // [lo, hi)
  std::int64_t n = 0;

  static AreaPredicate first_digit_equals(int d);
  static AreaPredicate count_in_range(std::int64_t lo, std::int64_t hi);
  static AreaPredicate top_n_by_total(std::int64_t n);
};

// totals: one area per line, "<name tokens...> <integer>" or a bare integer;
// cands: one area per line, one integer per label in label order.
// Blank lines and lines starting with '#' are skipped in both.
VoteTable parse_vote_table(std::istream& totals_source,
                           std::istream& candidates_source,
                           const std::vector<std::string>& labels);

ValidationReport validate(const VoteTable& table);

void write_totals(std::ostream& out, const VoteTable& table);
void write_cands(std::ostream& out, const VoteTable& table);

std::int64_t national_sum(const VoteTable& table, const std::string& label);
std::int64_t total_votes(const VoteTable& table);

// Ratio of national sums, (sum of v_X) / (sum of v).
double global_fraction(const VoteTable& table, const std::string& label);

// Unweighted mean of the per-area ratios v_X_j / v_j. Differs from
// global_fraction because area sizes span two decades.
double mean_fraction(const VoteTable& table, const std::string& label);

std::vector<double> proportions(const VoteTable& table, const std::string& label);

VoteTable select_areas(const VoteTable& table, const std::string& label,
                       const AreaPredicate& predicate);

}  // namespace digitfor
