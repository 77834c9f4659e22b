#pragma once

#include "asep/lp.hpp"
#include "asep/polytope.hpp"
#include "asep/symmetry.hpp"

namespace asep {

struct CostVector {
  int n = 0;
  std::vector<Rat> c;  // length n(n-1), ArcIndex order, entries >= 0

  static CostVector make(int n, std::vector<Rat> entries);
  const Rat& at(int i, int j) const { return c[ArcIndex(n).arc(i, j)]; }
  bool is_pq_metric() const;  // nonnegative + directed triangle inequality
};

// Exact dynamic programming over node subsets; memory-bounded to this size.
inline constexpr int kAtspMaxNodes = 22;

struct AtspResult {
  Rat value;
  std::vector<int> tour;  // starts at node 0
};

AtspResult solve_atsp(const CostVector& c);

inline constexpr int kAsepMaxNodes = 14;

struct AsepResult {
  Rat value;
  SolutionPoint minimizer;
};

// min c.x over the subtour elimination polytope, cuts generated lazily with
// an exhaustive separation scan.
AsepResult solve_asep(const CostVector& c);

struct GapCertificate {
  SolutionPoint vertex;
  CostVector costs;  // optimal c*
  std::vector<Rat> y_out, y_in;
  std::vector<std::pair<uint32_t, Rat>> duals_by_set;  // tight-set mask -> d_S
  Rat gap_value;  // = c* . x = ASEP(c*)
  Rat ig_value;   // = 1 / gap_value
};

struct GapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The inner program: cheapest pq-metric costs whose relaxation optimum sits
// at x while every tour costs at least 1. Tour rows are separated with the
// exact DP oracle; for n > 8 the triangle family is separated lazily as well
// and re-checked in full at the optimum. Certificates at n <= 8 are
// re-verified against the independent ATSP and ASEP oracles.
GapCertificate solve_gap(const SolutionPoint& x);

struct BoundEntry {
  int n = 0;
  Rat ig;
  std::string witness_key;
};

// Best integrality gap per node count with a witness, ascending in n.
std::vector<BoundEntry> lower_bound_report(const std::vector<OrbitRecord>& records);

// All (n-1)! tours with node 0 first; shared by tests and cross-checks.
std::vector<std::vector<int>> enumerate_tours(int n);

}  // namespace asep
