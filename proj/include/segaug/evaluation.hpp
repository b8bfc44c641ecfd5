/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file evaluation.hpp
 * @brief Retrieval metrics: normalised average rank (NAR) and Recall@K over
 *        per-query ranked lists.
 */

#ifndef SEGAUG_EVALUATION_HPP
#define SEGAUG_EVALUATION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace segaug {

enum class EvalErrorKind {
  kRankOutOfRange,
  kDuplicateRank,
  kNoRelevant,
  kMissingQuery,
  kMissingRelevant,
  kInvalidRun,
  kParse,
};

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  EvalErrorKind kind() const noexcept { return kind_; }

 private:
  EvalErrorKind kind_;
};

/// NAR = (sum R_i - N_rel (N_rel + 1) / 2) / (N * N_rel). 0 when the relevant
/// items hold ranks 1..N_rel, 1 - N_rel/N when they hold the bottom ranks.
/// The numerator is accumulated in integers, so the result is the correctly
/// rounded quotient.
inline double nar_single(std::span<const std::size_t> ranks, std::size_t n,
                         std::size_t n_rel) {
  if (n_rel == 0) {
    throw EvalError(EvalErrorKind::kNoRelevant, "N_rel must be positive");
  }
  if (ranks.size() != n_rel) {
    throw EvalError(EvalErrorKind::kInvalidRun,
                    "expected one rank per relevant item");
  }
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 1 || sorted[i] > n) {
      throw EvalError(EvalErrorKind::kRankOutOfRange,
                      "rank " + std::to_string(sorted[i]) + " outside [1, " +
                          std::to_string(n) + "]");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw EvalError(EvalErrorKind::kDuplicateRank,
                      "rank " + std::to_string(sorted[i]) + " repeated");
    }
    sum += sorted[i];
  }
  const std::uint64_t baseline =
      static_cast<std::uint64_t>(n_rel) * (n_rel + 1) / 2;
  return static_cast<double>(sum - baseline) /
         static_cast<double>(static_cast<std::uint64_t>(n) * n_rel);
}

/// Per-query ranked document lists; position i holds rank i + 1. `total` is
/// the size N of the retrieval set, which may exceed the listed prefix.
struct RankingRun {
  std::size_t total = 0;
  std::map<std::string, std::vector<std::string>> lists;
};

struct RelevanceSet {
  std::map<std::string, std::set<std::string>> relevant;
};

enum class RecallMode { kHit, kFraction };
enum class MissingPolicy { kError, kPessimistic };

struct QueryResult {
  std::string query;
  double nar = 0.0;
  std::vector<double> recall;  // one per requested K
  std::size_t missing = 0;
};

struct EvalReport {
  std::vector<std::size_t> ks;
  RecallMode recall_mode = RecallMode::kHit;
  std::vector<QueryResult> queries;
  double mean_nar = 0.0;
  std::vector<double> mean_recall;
  std::size_t missing_total = 0;
};

/// Metrics for every query of `rel`. Under the pessimistic policy, relevant
/// documents absent from the listed ranking take the worst free ranks
/// (N, N-1, ...) and are tallied in `missing`.
inline EvalReport evaluate(const RankingRun& run, const RelevanceSet& rel,
                           std::vector<std::size_t> ks,
                           MissingPolicy missing_policy =
                               MissingPolicy::kPessimistic,
                           RecallMode recall_mode = RecallMode::kHit) {
  EvalReport report;
  report.ks = std::move(ks);
  report.recall_mode = recall_mode;
  report.mean_recall.assign(report.ks.size(), 0.0);
  const std::size_t n = run.total;

  for (const auto& [query, relevant] : rel.relevant) {
    const auto it = run.lists.find(query);
    if (it == run.lists.end()) {
      throw EvalError(EvalErrorKind::kMissingQuery,
                      "query '" + query + "' has no ranking");
    }
    if (relevant.empty()) {
      throw EvalError(EvalErrorKind::kNoRelevant,
                      "query '" + query + "' has no relevant documents");
    }
    const std::vector<std::string>& list = it->second;
    if (list.size() > n) {
      throw EvalError(EvalErrorKind::kInvalidRun,
                      "query '" + query + "' lists more than N documents");
    }

    std::unordered_map<std::string_view, std::size_t> position;
    position.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!position.emplace(list[i], i + 1).second) {
        throw EvalError(EvalErrorKind::kInvalidRun,
                        "query '" + query + "' lists '" + list[i] + "' twice");
      }
    }

    QueryResult qr;
    qr.query = query;
    std::vector<std::size_t> ranks;
    ranks.reserve(relevant.size());
    for (const std::string& doc : relevant) {
      const auto pos = position.find(doc);
      if (pos != position.end()) {
        ranks.push_back(pos->second);
      } else if (missing_policy == MissingPolicy::kError) {
        throw EvalError(EvalErrorKind::kMissingRelevant,
                        "relevant document '" + doc + "' missing from query '" +
                            query + "'");
      } else {
        ++qr.missing;
      }
    }
    if (qr.missing > n - list.size()) {
      throw EvalError(EvalErrorKind::kInvalidRun,
                      "query '" + query +
                          "' has more missing relevant documents than "
                          "unlisted ranks");
    }
    for (std::size_t m = 0; m < qr.missing; ++m) ranks.push_back(n - m);

    qr.nar = nar_single(ranks, n, relevant.size());
    for (std::size_t k : report.ks) {
      const auto within = static_cast<std::size_t>(std::count_if(
          ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; }));
      qr.recall.push_back(recall_mode == RecallMode::kHit
                              ? (within > 0 ? 1.0 : 0.0)
                              : static_cast<double>(within) /
                                    static_cast<double>(relevant.size()));
    }
    report.missing_total += qr.missing;
    report.queries.push_back(std::move(qr));
  }

  if (!report.queries.empty()) {
    const double count = static_cast<double>(report.queries.size());
    for (const QueryResult& qr : report.queries) {
      report.mean_nar += qr.nar;
      for (std::size_t i = 0; i < qr.recall.size(); ++i) {
        report.mean_recall[i] += qr.recall[i];
      }
    }
    report.mean_nar /= count;
    for (double& r : report.mean_recall) r /= count;
  }
  return report;
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

inline bool parse_size(const std::string& text, std::size_t& value) {
  if (text.empty() || text.size() > 18) return false;
  value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return true;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

[[noreturn]] inline void parse_fail(std::size_t line_no,
                                    const std::string& msg) {
  throw EvalError(EvalErrorKind::kParse,
                  "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace detail

/// `#N=<int>` header, then `query<TAB>doc<TAB>rank` lines. Each query's
/// ranks must run 1, 2, 3, ... in file order.
inline RankingRun parse_run(std::istream& in) {
  RankingRun run;
  bool have_n = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    if (line.rfind("#N=", 0) == 0) {
      if (have_n) detail::parse_fail(line_no, "duplicate #N header");
      if (!detail::parse_size(line.substr(3), run.total) || run.total == 0) {
        detail::parse_fail(line_no, "bad #N header '" + line + "'");
      }
      have_n = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_n) detail::parse_fail(line_no, "missing #N=<int> header");
    const auto fields = detail::split_tabs(line);
    std::size_t rank = 0;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        !detail::parse_size(fields[2], rank)) {
      detail::parse_fail(line_no, "expected query<TAB>doc<TAB>rank");
    }
    auto& list = run.lists[fields[0]];
    if (rank != list.size() + 1) {
      detail::parse_fail(line_no, "rank " + fields[2] + " for query '" +
                                      fields[0] + "', expected " +
                                      std::to_string(list.size() + 1));
    }
    if (rank > run.total) detail::parse_fail(line_no, "rank exceeds N");
    if (std::find(list.begin(), list.end(), fields[1]) != list.end()) {
      detail::parse_fail(line_no, "document '" + fields[1] +
                                      "' repeated for query '" + fields[0] +
                                      "'");
    }
    list.push_back(fields[1]);
  }
  if (!have_n) detail::parse_fail(line_no, "missing #N=<int> header");
  return run;
}

/// `query<TAB>doc` lines.
inline RelevanceSet parse_relevance(std::istream& in) {
  RelevanceSet rel;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      detail::parse_fail(line_no, "expected query<TAB>doc");
    }
    rel.relevant[fields[0]].insert(fields[1]);
  }
  return rel;
}

/// Aligned text table followed by one `key=value` line per query and a
/// summary line.
inline std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "query\tNAR";
  for (std::size_t k : report.ks) out << "\tR@" << k;
  out << '\n';
  const auto row = [&](const std::string& name, double nar,
                       const std::vector<double>& recall) {
    out << name;
    std::snprintf(buf, sizeof buf, "\t%.6f", nar);
    out << buf;
    for (double r : recall) {
      std::snprintf(buf, sizeof buf, "\t%.6f", r);
      out << buf;
    }
    out << '\n';
  };
  for (const QueryResult& q : report.queries) row(q.query, q.nar, q.recall);
  row("mean", report.mean_nar, report.mean_recall);
  out << '\n';
  for (const QueryResult& q : report.queries) {
    std::snprintf(buf, sizeof buf, "%.17g", q.nar);
    out << "query=" << q.query << " nar=" << buf;
    for (std::size_t i = 0; i < report.ks.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", q.recall[i]);
      out << " r@" << report.ks[i] << '=' << buf;
    }
    out << " missing=" << q.missing << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", report.mean_nar);
  out << "summary queries=" << report.queries.size() << " mean_nar=" << buf;
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", report.mean_recall[i]);
    out << " mean_r@" << report.ks[i] << '=' << buf;
  }
  out << " recall_mode="
      << (report.recall_mode == RecallMode::kHit ? "hit" : "fraction")
      << " missing_relevant=" << report.missing_total << '\n';
  return out.str();
}

}  // namespace segaug

#endif  // SEGAUG_EVALUATION_HPP
