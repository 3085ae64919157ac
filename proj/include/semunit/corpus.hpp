#pragma once

// Reading and writing the DiMSUM 9-column corpus format, and conversion
// between per-token MWE tags and semantic-unit groupings.

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semunit/error.hpp"
#include "semunit/parse.hpp"
#include "semunit/text.hpp"

namespace semunit {

inline constexpr std::string_view kUnknownSense = "unknown";

struct Token {
  int index = 0;
  std::string surface;
  std::string lemma;
  std::string pos;
  char mwe_tag = 'O';  // one of O o B b I i
  int mwe_parent = 0;
  std::string strength;  // carried through verbatim, not modeled
  std::string supersense;
  std::string sent_id;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string sent_id;
  std::vector<Token> tokens;
  std::optional<DependencyParse> parse;

  int size() const { return static_cast<int>(tokens.size()); }
  const Token& token(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Token positions are 1-based and strictly increasing; gaps are allowed.
struct SemanticUnit {
  std::vector<int> positions;
  std::string sense{kUnknownSense};

  int first() const { return positions.front(); }
  int last() const { return positions.back(); }
  int size() const { return static_cast<int>(positions.size()); }

  friend bool operator==(const SemanticUnit&, const SemanticUnit&) = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  // "unknown" first, then every nonempty supersense in order of appearance.
  std::vector<std::string> sense_inventory{std::string(kUnknownSense)};

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct TokenTag {
  char mwe_tag = 'O';
  int mwe_parent = 0;
  std::string supersense;

  friend bool operator==(const TokenTag&, const TokenTag&) = default;
};

inline bool is_valid_mwe_tag(char t) {
  return t == 'O' || t == 'o' || t == 'B' || t == 'b' || t == 'I' || t == 'i';
}

inline bool is_continuation_tag(char t) { return t == 'I' || t == 'i'; }

// Groups tokens into units by following parent links. Standalone words become
// one-token units. Units come out ordered by their first position.
inline std::vector<SemanticUnit> units_from_tags(const Sentence& s) {
  std::vector<SemanticUnit> units;
  std::vector<int> unit_of(static_cast<std::size_t>(s.size()) + 1, -1);
  for (const Token& t : s.tokens) {
    const std::string where = "sentence " + s.sent_id + " token " + std::to_string(t.index);
    if (!is_valid_mwe_tag(t.mwe_tag)) throw DataError(where + ": invalid MWE tag");
    if (is_continuation_tag(t.mwe_tag)) {
      if (t.mwe_parent < 1 || t.mwe_parent >= t.index) {
        throw DataError(where + ": dangling MWE parent " + std::to_string(t.mwe_parent));
      }
      const int u = unit_of[static_cast<std::size_t>(t.mwe_parent)];
      if (units[static_cast<std::size_t>(u)].last() != t.mwe_parent) {
        throw DataError(where + ": MWE parent is not the previous member of its unit");
      }
      units[static_cast<std::size_t>(u)].positions.push_back(t.index);
      unit_of[static_cast<std::size_t>(t.index)] = u;
    } else {
      if (t.mwe_parent != 0) throw DataError(where + ": unit-initial token has a nonzero parent");
      unit_of[static_cast<std::size_t>(t.index)] = static_cast<int>(units.size());
      SemanticUnit unit;
      unit.positions.push_back(t.index);
      if (!t.supersense.empty()) unit.sense = t.supersense;
      units.push_back(std::move(unit));
    }
  }
  return units;
}

// Inverse of units_from_tags. Units must partition 1..n_tokens and nest at
// most one level deep: a unit may sit inside the gap of one other unit.
inline std::vector<TokenTag> tags_from_units(const std::vector<SemanticUnit>& units, int n_tokens) {
  const auto n = static_cast<std::size_t>(n_tokens);
  std::vector<int> unit_of(n + 1, -1);
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& pos = units[u].positions;
    if (pos.empty()) throw DataError("semantic unit without positions");
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (pos[k] < 1 || pos[k] > n_tokens) {
        throw DataError("unit position " + std::to_string(pos[k]) + " outside sentence");
      }
      if (k > 0 && pos[k] <= pos[k - 1]) throw DataError("unit positions not strictly increasing");
      auto& owner = unit_of[static_cast<std::size_t>(pos[k])];
      if (owner != -1) throw DataError("token " + std::to_string(pos[k]) + " belongs to two units");
      owner = static_cast<int>(u);
    }
  }
  for (std::size_t t = 1; t <= n; ++t) {
    if (unit_of[t] == -1) throw DataError("token " + std::to_string(t) + " is not covered by any unit");
  }

  // Units whose span strictly contains the token without owning it.
  auto enclosing = [&](int t) {
    std::vector<int> out;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (units[u].first() < t && t < units[u].last() && unit_of[static_cast<std::size_t>(t)] != static_cast<int>(u)) {
        out.push_back(static_cast<int>(u));
      }
    }
    return out;
  };

  std::vector<TokenTag> tags(n);
  for (const SemanticUnit& unit : units) {
    const auto outer = enclosing(unit.first());
    for (int p : unit.positions) {
      if (enclosing(p) != outer) {
        throw DataError("unit starting at " + std::to_string(unit.first()) + " crosses another unit");
      }
    }
    if (outer.size() > 1) {
      throw DataError("unit starting at " + std::to_string(unit.first()) + " nested deeper than two levels");
    }
    const bool in_gap = !outer.empty();
    for (std::size_t k = 0; k < unit.positions.size(); ++k) {
      TokenTag& tag = tags[static_cast<std::size_t>(unit.positions[k] - 1)];
      if (k == 0) {
        tag.mwe_tag = unit.size() == 1 ? (in_gap ? 'o' : 'O') : (in_gap ? 'b' : 'B');
        tag.mwe_parent = 0;
        if (unit.sense != kUnknownSense) tag.supersense = unit.sense;
      } else {
        tag.mwe_tag = in_gap ? 'i' : 'I';
        tag.mwe_parent = unit.positions[k - 1];
      }
    }
  }
  return tags;
}

// Checks tag well-formedness by regenerating tags from the implied units.
// Returns the 0-based offset of the first offending token, or -1.
inline int first_invalid_token(const Sentence& s) {
  const auto units = units_from_tags(s);
  const auto tags = tags_from_units(units, s.size());
  for (std::size_t k = 0; k < tags.size(); ++k) {
    const Token& t = s.tokens[k];
    const bool sense_ok = is_continuation_tag(t.mwe_tag) ? t.supersense.empty() : true;
    if (tags[k].mwe_tag != t.mwe_tag || tags[k].mwe_parent != t.mwe_parent || !sense_ok) {
      return static_cast<int>(k);
    }
  }
  return -1;
}

inline void rebuild_sense_inventory(Corpus& c) {
  c.sense_inventory.assign(1, std::string(kUnknownSense));
  std::unordered_set<std::string> seen{std::string(kUnknownSense)};
  for (const auto& s : c.sentences) {
    for (const auto& t : s.tokens) {
      if (!t.supersense.empty() && seen.insert(t.supersense).second) {
        c.sense_inventory.push_back(t.supersense);
      }
    }
  }
}

inline Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  Sentence current;
  std::vector<int> token_lines;
  std::string line;
  int line_no = 0;

  auto fail = [](int at, const std::string& what) {
    throw DataError("corpus line " + std::to_string(at) + ": " + what);
  };
  auto flush = [&] {
    if (current.tokens.empty()) return;
    int bad = -1;
    try {
      bad = first_invalid_token(current);
    } catch (const DataError& e) {
      fail(token_lines.front(), e.what());
    }
    if (bad >= 0) fail(token_lines[static_cast<std::size_t>(bad)], "inconsistent MWE tag, parent or supersense");
    current.sent_id = current.tokens.front().sent_id;
    corpus.sentences.push_back(std::move(current));
    current = {};
    token_lines.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 9) fail(line_no, "expected 9 tab-separated fields, got " + std::to_string(f.size()));
    Token t;
    if (!parse_int(f[0], t.index)) fail(line_no, "non-integer token index");
    if (t.index != current.size() + 1) fail(line_no, "token index " + std::to_string(t.index) + " out of sequence");
    t.surface = f[1];
    t.lemma = f[2];
    t.pos = f[3];
    if (f[4].size() != 1 || !is_valid_mwe_tag(f[4][0])) fail(line_no, "MWE tag must be one of O o B b I i");
    t.mwe_tag = f[4][0];
    if (!parse_int(f[5], t.mwe_parent)) fail(line_no, "non-integer MWE parent");
    if (t.mwe_parent < 0 || (t.mwe_parent != 0 && t.mwe_parent >= t.index)) {
      fail(line_no, "MWE parent must point to an earlier token");
    }
    t.strength = f[6];
    t.supersense = f[7];
    t.sent_id = f[8];
    current.tokens.push_back(std::move(t));
    token_lines.push_back(line_no);
  }
  flush();
  rebuild_sense_inventory(corpus);
  return corpus;
}

inline void write_corpus(const Corpus& c, std::ostream& out) {
  for (const Sentence& s : c.sentences) {
    if (first_invalid_token(s) >= 0) throw DataError("sentence " + s.sent_id + ": inconsistent MWE tags");
    for (const Token& t : s.tokens) {
      out << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << t.pos << '\t' << t.mwe_tag
          << '\t' << t.mwe_parent << '\t' << t.strength << '\t' << t.supersense << '\t' << t.sent_id
          << '\n';
    }
    out << '\n';
  }
}

// Replaces the tag columns of `s` with the grouping in `units`; strength is
// cleared since predicted units are not graded weak/strong.
inline void apply_units(Sentence& s, const std::vector<SemanticUnit>& units) {
  const auto tags = tags_from_units(units, s.size());
  for (std::size_t k = 0; k < tags.size(); ++k) {
    s.tokens[k].mwe_tag = tags[k].mwe_tag;
    s.tokens[k].mwe_parent = tags[k].mwe_parent;
    s.tokens[k].supersense = tags[k].supersense;
    s.tokens[k].strength.clear();
  }
}

}  // namespace semunit
