#pragma once

#include <algorithm>
#include <climits>
#include <vector>

#include "semunit/parse.hpp"

namespace semunit::testkit {

// Edges from `from` up to `ancestor`, or -1 when it is not an ancestor.
inline int edges_up(const DependencyParse& p, int from, int ancestor) {
  int steps = 0;
  for (int cur = from;; cur = p.head[static_cast<std::size_t>(cur - 1)]) {
    if (cur == ancestor) return steps;
    if (cur == 0) return -1;
    ++steps;
  }
}

// Minimum over every shared ancestor (the root included) of the larger of the
// two path lengths.
inline int brute_force_distance(const DependencyParse& p, int i, int j) {
  int best = INT_MAX;
  for (int a = 0; a <= p.size(); ++a) {
    const int di = edges_up(p, i, a);
    const int dj = edges_up(p, j, a);
    if (di >= 0 && dj >= 0) best = std::min(best, std::max(di, dj));
  }
  return best;
}

}  // namespace semunit::testkit
