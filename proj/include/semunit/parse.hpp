#pragma once

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "semunit/error.hpp"
#include "semunit/text.hpp"

namespace semunit {

// Dependency heads for one sentence; head[i-1] is the head of token i, 0 is root.
struct DependencyParse {
  std::vector<int> head;

  int size() const { return static_cast<int>(head.size()); }
  int head_of(int token) const { return head.at(static_cast<std::size_t>(token - 1)); }

  friend bool operator==(const DependencyParse&, const DependencyParse&) = default;
};

// Checks that every head is in range and every chain reaches the root.
inline void validate_parse(const DependencyParse& parse) {
  const int n = parse.size();
  for (int i = 1; i <= n; ++i) {
    const int h = parse.head_of(i);
    if (h < 0 || h > n || h == i) {
      throw DataError("parse: token " + std::to_string(i) + " has invalid head " +
                      std::to_string(h));
    }
  }
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) throw DataError("parse: head cycle through token " + std::to_string(i));
      cur = parse.head_of(cur);
    }
  }
}

// Reads CoNLL-style parses: one token per line, blank line between sentences.
// Column 1 is the token index; the head index is column 7 (CoNLL-X / CoNLL-U)
// or column 4 for the short "index form pos head" layout. Lines starting with
// '#' and CoNLL-U multiword/empty-node rows ("3-4", "5.1") are skipped.
inline std::vector<DependencyParse> read_parses(std::istream& in) {
  std::vector<DependencyParse> parses;
  DependencyParse current;
  std::string line;
  int line_no = 0;
  auto flush = [&] {
    if (current.head.empty()) return;
    validate_parse(current);
    parses.push_back(std::move(current));
    current = {};
  };
  auto fail = [&](const std::string& what) {
    throw DataError("parse line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields[0].find_first_of("-.") != std::string_view::npos) continue;
    std::size_t head_col = 0;
    if (fields.size() >= 7) {
      head_col = 6;
    } else if (fields.size() == 4) {
      head_col = 3;
    } else {
      fail("expected 4 or at least 7 tab-separated columns, got " + std::to_string(fields.size()));
    }
    int index = 0;
    int head = 0;
    if (!parse_int(fields[0], index)) fail("non-integer token index");
    if (!parse_int(fields[head_col], head)) fail("non-integer head index");
    if (index != current.size() + 1) fail("token index " + std::to_string(index) + " out of sequence");
    current.head.push_back(head);
  }
  flush();
  return parses;
}

}  // namespace semunit
