#include "digitfor/vote_table.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "digitfor/benford.hpp"

namespace digitfor {

namespace {

struct Record {
  std::vector<std::string> tokens;
  int line = 0;
};

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    if (toks.empty() || toks[0][0] == '#') continue;
    out.push_back({std::move(toks), lineno});
  }
  return out;
}

std::int64_t parse_count(const std::string& tok, int line, const char* what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(std::string("expected an integer ") + what + ", got '" + tok + "'",
                     line);
  if (v < 0) throw ParseError(std::string("negative ") + what, line);
  return v;
}

}  // namespace

int VoteTable::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < candidate_labels.size(); ++i)
    if (candidate_labels[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("unknown candidate label: " + label);
}

std::vector<std::int64_t> VoteTable::totals() const {
  std::vector<std::int64_t> out;
  out.reserve(areas.size());
  for (const VoteArea& a : areas) out.push_back(a.total);
  return out;
}

std::vector<std::int64_t> VoteTable::counts_for(const std::string& label) const {
  int idx = label_index(label);
  std::vector<std::int64_t> out;
  out.reserve(areas.size());
  for (const VoteArea& a : areas) out.push_back(a.counts[idx]);
  return out;
}

AreaPredicate AreaPredicate::first_digit_equals(int d) {
  if (d < 1 || d > 9) throw std::invalid_argument("first digit must be 1..9");
  AreaPredicate p;
  p.kind = Kind::first_digit_equals;
  p.digit = d;
  return p;
}

AreaPredicate AreaPredicate::count_in_range(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) throw std::invalid_argument("empty count range");
  AreaPredicate p;
  p.kind = Kind::count_in_range;
  p.lo = lo;
  p.hi = hi;
  return p;
}

AreaPredicate AreaPredicate::top_n_by_total(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("top-n needs n >= 1");
  AreaPredicate p;
  p.kind = Kind::top_n_by_total;
  p.n = n;
  return p;
}

VoteTable parse_vote_table(std::istream& totals_source,
                           std::istream& candidates_source,
                           const std::vector<std::string>& labels) {
  if (labels.empty()) throw std::invalid_argument("parse_vote_table: no labels");
  std::vector<Record> totals = read_records(totals_source);
  std::vector<Record> cands = read_records(candidates_source);
  if (totals.size() != cands.size()) {
    const std::vector<Record>& longer = totals.size() > cands.size() ? totals : cands;
    const char* which = totals.size() > cands.size() ? "totals" : "candidates";
    throw ParseError("record count mismatch: " + std::to_string(totals.size()) +
                         " totals vs " + std::to_string(cands.size()) +
                         " candidate records; first unmatched record in the " +
                         which + " source",
                     longer[std::min(totals.size(), cands.size())].line);
  }

  VoteTable table;
  table.candidate_labels = labels;
  table.areas.reserve(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    VoteArea area;
    const Record& tr = totals[i];
    area.total = parse_count(tr.tokens.back(), tr.line, "total");
    if (tr.tokens.size() > 1) {
      std::string name = tr.tokens[0];
      for (std::size_t k = 1; k + 1 < tr.tokens.size(); ++k)
        name += " " + tr.tokens[k];
      area.name = name;
    } else {
      area.name = "area" + std::to_string(i + 1);
    }

    const Record& cr = cands[i];
    if (cr.tokens.size() < labels.size())
      throw ParseError("expected " + std::to_string(labels.size()) +
                           " candidate counts, got " + std::to_string(cr.tokens.size()),
                       cr.line);
    if (cr.tokens.size() > labels.size())
      throw ParseError("extra fields on candidate record", cr.line);
    area.counts.reserve(labels.size());
    for (const std::string& tok : cr.tokens)
      area.counts.push_back(parse_count(tok, cr.line, "candidate count"));
    table.areas.push_back(std::move(area));
  }
  return table;
}

ValidationReport validate(const VoteTable& table) {
  ValidationReport r;
  r.n_areas = static_cast<std::int64_t>(table.areas.size());
  for (const VoteArea& a : table.areas) {
    std::int64_t csum = std::accumulate(a.counts.begin(), a.counts.end(),
                                        std::int64_t{0});
    if (csum != a.total) r.mismatched_areas.push_back({a.name, a.total, csum});
    for (std::size_t i = 0; i < a.counts.size(); ++i)
      if (a.counts[i] == 0)
        r.zero_count_cells.push_back({a.name, table.candidate_labels[i]});
  }
  return r;
}

void write_totals(std::ostream& out, const VoteTable& table) {
  for (const VoteArea& a : table.areas)
    out << a.name << ' ' << a.total << '\n';
}

void write_cands(std::ostream& out, const VoteTable& table) {
  for (const VoteArea& a : table.areas) {
    for (std::size_t i = 0; i < a.counts.size(); ++i)
      out << (i ? " " : "") << a.counts[i];
    out << '\n';
  }
}

std::int64_t national_sum(const VoteTable& table, const std::string& label) {
  int idx = table.label_index(label);
  std::int64_t s = 0;
  for (const VoteArea& a : table.areas) s += a.counts[idx];
  return s;
}

std::int64_t total_votes(const VoteTable& table) {
  std::int64_t s = 0;
  for (const VoteArea& a : table.areas) s += a.total;
  return s;
}

double global_fraction(const VoteTable& table, const std::string& label) {
  std::int64_t tv = total_votes(table);
  if (tv <= 0) throw std::domain_error("global_fraction: zero total votes");
  return static_cast<double>(national_sum(table, label)) / static_cast<double>(tv);
}

double mean_fraction(const VoteTable& table, const std::string& label) {
  int idx = table.label_index(label);
  double s = 0.0;
  std::int64_t n = 0;
  for (const VoteArea& a : table.areas) {
    if (a.total <= 0) continue;
    s += static_cast<double>(a.counts[idx]) / static_cast<double>(a.total);
    ++n;
  }
  if (n == 0) throw std::domain_error("mean_fraction: no areas with votes");
  return s / static_cast<double>(n);
}

std::vector<double> proportions(const VoteTable& table, const std::string& label) {
  int idx = table.label_index(label);
  std::vector<double> out;
  out.reserve(table.areas.size());
  for (const VoteArea& a : table.areas) {
    if (a.total <= 0) throw std::domain_error("proportions: area with zero total");
    out.push_back(static_cast<double>(a.counts[idx]) / static_cast<double>(a.total));
  }
  return out;
}

VoteTable select_areas(const VoteTable& table, const std::string& label,
                       const AreaPredicate& predicate) {
  int idx = table.label_index(label);
  VoteTable out;
  out.candidate_labels = table.candidate_labels;

  if (predicate.kind == AreaPredicate::Kind::top_n_by_total) {
    std::vector<std::size_t> order(table.areas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&table](std::size_t a, std::size_t b) {
                       return table.areas[a].total > table.areas[b].total;
                     });
    std::size_t keep = std::min<std::size_t>(order.size(),
                                             static_cast<std::size_t>(predicate.n));
    std::vector<bool> take(table.areas.size(), false);
    for (std::size_t i = 0; i < keep; ++i) take[order[i]] = true;
    for (std::size_t i = 0; i < table.areas.size(); ++i)
      if (take[i]) out.areas.push_back(table.areas[i]);
    return out;
  }

  for (const VoteArea& a : table.areas) {
    std::int64_t c = a.counts[idx];
    bool keep = false;
    if (predicate.kind == AreaPredicate::Kind::first_digit_equals) {
      keep = c >= 1 && first_digit(static_cast<std::uint64_t>(c)) == predicate.digit;
    } else {
      keep = c >= predicate.lo && c < predicate.hi;
    }
    if (keep) out.areas.push_back(a);
  }
  return out;
}

}  // namespace digitfor
