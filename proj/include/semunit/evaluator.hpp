#pragma once

// Link-based MWE scoring, first-token supersense scoring, and their
// micro-combined and per-source macro aggregates.
//
// MWE: each unit t1 < ... < tk contributes links (t1,t2) ... (tk-1,tk). A
// predicted link is correct when both endpoints share a gold unit; a gold
// link is recovered when both endpoints share a predicted unit.
// Supersense: multisets of (first position, sense) over units whose sense is
// not "unknown", matched exactly.
// Combined: numerators and denominators of the two measures summed.
// Macro: mean combined F1 over source groups, where the group is the sentence
// id up to its first '.'; reported only when every id has such a prefix.

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semunit/corpus.hpp"
#include "semunit/error.hpp"

namespace semunit {

struct Counts {
  long long correct_pred = 0;  // numerator of precision
  long long total_pred = 0;
  long long correct_gold = 0;  // numerator of recall
  long long total_gold = 0;

  Counts& operator+=(const Counts& o) {
    correct_pred += o.correct_pred;
    total_pred += o.total_pred;
    correct_gold += o.correct_gold;
    total_gold += o.total_gold;
    return *this;
  }
  friend Counts operator+(Counts a, const Counts& b) { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Prf prf(const Counts& c) {
  Prf r;
  r.precision = c.total_pred ? static_cast<double>(c.correct_pred) / static_cast<double>(c.total_pred) : 0.0;
  r.recall = c.total_gold ? static_cast<double>(c.correct_gold) / static_cast<double>(c.total_gold) : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

struct ScoreReport {
  Counts mwe_counts;
  Counts sense_counts;
  Prf mwe;
  Prf supersense;
  Prf combined;
  std::optional<double> macro_f1;
  std::map<std::string, double> per_sense_recall;
};

inline std::vector<std::pair<int, int>> mwe_links(const std::vector<SemanticUnit>& units) {
  std::vector<std::pair<int, int>> links;
  for (const auto& u : units) {
    for (std::size_t k = 1; k < u.positions.size(); ++k) links.emplace_back(u.positions[k - 1], u.positions[k]);
  }
  return links;
}

namespace detail {

inline std::vector<int> unit_index(const std::vector<SemanticUnit>& units, int n) {
  std::vector<int> owner(static_cast<std::size_t>(n) + 1, -1);
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (int p : units[u].positions) owner.at(static_cast<std::size_t>(p)) = static_cast<int>(u);
  }
  return owner;
}

inline long long links_within(const std::vector<std::pair<int, int>>& links, const std::vector<int>& owner) {
  long long c = 0;
  for (auto [a, b] : links) {
    const int oa = owner[static_cast<std::size_t>(a)];
    if (oa >= 0 && oa == owner[static_cast<std::size_t>(b)]) ++c;
  }
  return c;
}

inline std::multiset<std::pair<int, std::string>> sense_pairs(const std::vector<SemanticUnit>& units) {
  std::multiset<std::pair<int, std::string>> out;
  for (const auto& u : units) {
    if (u.sense != kUnknownSense) out.emplace(u.first(), u.sense);
  }
  return out;
}

struct SentenceCounts {
  Counts mwe;
  Counts sense;
  std::map<std::string, std::pair<long long, long long>> per_sense;  // matched, total gold
};

inline SentenceCounts count_sentence(const Sentence& gold, const Sentence& pred) {
  if (gold.size() != pred.size()) {
    throw DataError("sentence " + gold.sent_id + ": gold has " + std::to_string(gold.size()) +
                    " tokens, prediction has " + std::to_string(pred.size()));
  }
  const auto gu = units_from_tags(gold);
  const auto pu = units_from_tags(pred);
  SentenceCounts sc;
  const auto gl = mwe_links(gu);
  const auto pl = mwe_links(pu);
  sc.mwe.total_gold = static_cast<long long>(gl.size());
  sc.mwe.total_pred = static_cast<long long>(pl.size());
  sc.mwe.correct_pred = links_within(pl, unit_index(gu, gold.size()));
  sc.mwe.correct_gold = links_within(gl, unit_index(pu, pred.size()));

  const auto gs = sense_pairs(gu);
  auto ps = sense_pairs(pu);
  long long matched = 0;
  for (const auto& pair : gs) {
    auto& slot = sc.per_sense[pair.second];
    ++slot.second;
    const auto it = ps.find(pair);
    if (it != ps.end()) {
      ps.erase(it);
      ++matched;
      ++slot.first;
    }
  }
  sc.sense.total_gold = static_cast<long long>(gs.size());
  sc.sense.total_pred = static_cast<long long>(sense_pairs(pu).size());
  sc.sense.correct_gold = matched;
  sc.sense.correct_pred = matched;
  return sc;
}

}  // namespace detail

inline ScoreReport score(const Corpus& gold, const Corpus& pred) {
  if (gold.sentences.size() != pred.sentences.size()) {
    throw DataError("gold has " + std::to_string(gold.sentences.size()) + " sentences, prediction has " +
                    std::to_string(pred.sentences.size()));
  }
  ScoreReport r;
  std::map<std::string, std::pair<long long, long long>> per_sense;
  std::map<std::string, Counts> by_source;
  bool sources = !gold.sentences.empty();
  for (std::size_t k = 0; k < gold.sentences.size(); ++k) {
    const auto sc = detail::count_sentence(gold.sentences[k], pred.sentences[k]);
    r.mwe_counts += sc.mwe;
    r.sense_counts += sc.sense;
    for (const auto& [sense, mt] : sc.per_sense) {
      per_sense[sense].first += mt.first;
      per_sense[sense].second += mt.second;
    }
    const std::string& id = gold.sentences[k].sent_id;
    const auto dot = id.find('.');
    if (dot == std::string::npos || dot == 0) {
      sources = false;
    } else {
      by_source[id.substr(0, dot)] += sc.mwe + sc.sense;
    }
  }
  r.mwe = prf(r.mwe_counts);
  r.supersense = prf(r.sense_counts);
  r.combined = prf(r.mwe_counts + r.sense_counts);
  if (sources) {
    double sum = 0.0;
    for (const auto& [src, c] : by_source) sum += prf(c).f1;
    r.macro_f1 = sum / static_cast<double>(by_source.size());
  }
  for (const auto& [sense, mt] : per_sense) {
    r.per_sense_recall[sense] = mt.second ? static_cast<double>(mt.first) / static_cast<double>(mt.second) : 0.0;
  }
  return r;
}

inline void print_report(const ScoreReport& r, std::ostream& out) {
  out << std::left << std::setw(14) << "Type" << std::right << std::setw(9) << "Prec" << std::setw(9) << "Recall"
      << std::setw(9) << "F1" << '\n';
  auto row = [&](const char* name, const Prf& p) {
    out << std::left << std::setw(14) << name << std::right << std::fixed << std::setprecision(4) << std::setw(9)
        << p.precision << std::setw(9) << p.recall << std::setw(8) << std::setprecision(2) << p.f1 * 100.0 << "%\n";
  };
  row("MWEs", r.mwe);
  row("Supersenses", r.supersense);
  row("Combined", r.combined);
  out << std::left << std::setw(14) << "Macro" << std::right << std::setw(18) << "";
  if (r.macro_f1) {
    out << std::fixed << std::setw(8) << std::setprecision(2) << *r.macro_f1 * 100.0 << "%\n";
  } else {
    out << std::setw(9) << "n/a" << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

inline void write_report_kv(const ScoreReport& r, std::ostream& out, const std::string& prefix = "") {
  auto put = [&](const std::string& key, double v) { out << prefix << key << '=' << std::setprecision(10) << v << '\n'; };
  put("mwe.precision", r.mwe.precision);
  put("mwe.recall", r.mwe.recall);
  put("mwe.f1", r.mwe.f1);
  put("supersense.precision", r.supersense.precision);
  put("supersense.recall", r.supersense.recall);
  put("supersense.f1", r.supersense.f1);
  put("combined.precision", r.combined.precision);
  put("combined.recall", r.combined.recall);
  put("combined.f1", r.combined.f1);
  if (r.macro_f1) {
    put("macro.f1", *r.macro_f1);
  } else {
    out << prefix << "macro.f1=n/a\n";
  }
  for (const auto& [sense, rec] : r.per_sense_recall) put("recall." + sense, rec);
}

}  // namespace semunit
