#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "asep/matrix.hpp"
#include "asep/rational.hpp"

namespace asep {

// Arc (i,j), i != j, lives at k = i*(n-1) + (j < i ? j : j-1): row-major over
// the off-diagonal entries of the n x n matrix form.
struct ArcIndex {
  int n = 0;
  explicit ArcIndex(int n_) : n(n_) {}
  int m() const { return n * (n - 1); }
  int arc(int i, int j) const { return i * (n - 1) + (j < i ? j : j - 1); }
  std::pair<int, int> endpoints(int k) const {
    const int i = k / (n - 1), r = k % (n - 1);
    return {i, r < i ? r : r + 1};
  }
};

// Node subsets as bitmasks; subtour rows use 2 <= |S| <= n-2.
struct NodeSet {
  int n = 0;
  uint32_t mask = 0;
  int size() const { return __builtin_popcount(mask); }
  bool contains(int v) const { return (mask >> v) & 1u; }
  bool proper() const { return mask != 0 && mask != (n >= 32 ? ~0u : ((1u << n) - 1)); }
  NodeSet complement() const { return {n, ~mask & ((1u << n) - 1)}; }
  std::string to_string() const;
};

// Subset scans are exact and exhaustive; beyond this many nodes the module
// refuses instead of approximating.
inline constexpr int kMaxScanNodes = 22;

struct SolutionPoint {
  int n = 0;
  std::vector<Rat> x;  // length n(n-1), ArcIndex order

  static SolutionPoint make(int n, std::vector<Rat> entries);

  const Rat& at(int i, int j) const { return x[ArcIndex(n).arc(i, j)]; }
  Rat& at(int i, int j) { return x[ArcIndex(n).arc(i, j)]; }
  int zero_count() const;
  std::string serialize() const;  // "n=<n>;" + comma-joined p/q entries

  bool operator==(const SolutionPoint& o) const { return n == o.n && x == o.x; }
};

// The full inequality description of the polytope with stable row order:
// in-degree rows 0..n-1, out-degree rows n..2n-1, then subtour rows indexed
// by ascending bitmask; nonnegativity is implicit per arc.
struct ConstraintSystem {
  int n = 0;
  std::vector<uint32_t> sec_masks;

  static ConstraintSystem make(int n);
  int num_rows() const { return 2 * n + static_cast<int>(sec_masks.size()); }
  std::string row_name(int row) const;
};

Rat cut_value(const SolutionPoint& x, const NodeSet& s);

struct MemberResult {
  bool member = false;
  std::string violated_row;  // empty when member
  explicit operator bool() const { return member; }
};

MemberResult is_member(const SolutionPoint& x);

// Rank test: x is a vertex iff the rows tight at x span all m coordinates.
// Faults when x is not a member.
bool is_vertex(const SolutionPoint& x);

std::vector<NodeSet> tight_sets(const SolutionPoint& x);

std::map<Rat, int> component_histogram(const SolutionPoint& x);

// Incidence vector of the tour order[0] -> order[1] -> ... -> order[0].
SolutionPoint tour_point(const std::vector<int>& order);
SolutionPoint standard_cycle(int n);

}  // namespace asep
