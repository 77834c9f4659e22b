#pragma once

#include <map>
#include <string>
#include <vector>

#include "asep/gap.hpp"
#include "asep/matrix.hpp"
#include "asep/polytope.hpp"

namespace asep::testing {

// --- fixture points ------------------------------------------------------

inline SolutionPoint from_arcs(int n, const std::map<std::pair<int, int>, Rat>& arcs) {
  std::vector<Rat> entries(static_cast<size_t>(n) * (n - 1), Rat(0));
  ArcIndex ai(n);
  for (const auto& [arc, val] : arcs) entries[ai.arc(arc.first, arc.second)] = val;
  return SolutionPoint::make(n, std::move(entries));
}

// the unique fractional orbit at n=4: eight 1/2 entries
inline SolutionPoint halfint_n4() {
  const Rat h(1, 2);
  return from_arcs(4, {{{0, 1}, h}, {{0, 3}, h}, {{1, 0}, h}, {{1, 2}, h},
                       {{2, 0}, h}, {{2, 3}, h}, {{3, 1}, h}, {{3, 2}, h}});
}

// n=5 orbit reps. maxgap attains ig 5/4: a standalone half loop plus a
// chained loop pair, six tight sets. twoloops carries two disjoint half
// loops and only reaches 6/5. thirds has entries {1/3, 2/3}; mixed carries
// one integral arc.
inline SolutionPoint maxgap_n5() {
  const Rat h(1, 2);
  return from_arcs(5, {{{0, 3}, h}, {{0, 4}, h}, {{4, 1}, h}, {{4, 0}, h}, {{3, 4}, h},
                       {{1, 2}, h}, {{1, 0}, h}, {{2, 1}, h}, {{2, 3}, h}, {{3, 2}, h}});
}

inline SolutionPoint twoloops_n5() {
  const Rat h(1, 2);
  return from_arcs(5, {{{0, 3}, h}, {{0, 4}, h}, {{3, 1}, h}, {{3, 2}, h}, {{4, 0}, h},
                       {{4, 2}, h}, {{1, 3}, h}, {{1, 4}, h}, {{2, 0}, h}, {{2, 1}, h}});
}

inline SolutionPoint thirds_n5() {
  const Rat a(1, 3), b(2, 3);
  return from_arcs(5, {{{0, 4}, b}, {{3, 0}, b}, {{4, 1}, b}, {{1, 2}, b},
                       {{0, 3}, a}, {{3, 2}, a}, {{4, 3}, a}, {{1, 3}, a},
                       {{2, 0}, a}, {{2, 1}, a}, {{2, 4}, a}});
}

inline SolutionPoint mixed_n5() {
  const Rat h(1, 2);
  return from_arcs(5, {{{0, 4}, Rat(1)}, {{4, 1}, h}, {{4, 2}, h}, {{1, 2}, h}, {{1, 3}, h},
                       {{2, 0}, h}, {{2, 3}, h}, {{3, 0}, h}, {{3, 1}, h}});
}

// n=6 pivot seed with entries {1/3, 2/3}
inline SolutionPoint seed_n6() {
  const Rat a(1, 3), b(2, 3);
  return from_arcs(6, {{{0, 3}, a}, {{0, 4}, b}, {{1, 0}, b}, {{1, 5}, a}, {{2, 0}, a},
                       {{2, 1}, a}, {{2, 4}, a}, {{3, 2}, a}, {{3, 5}, b}, {{4, 2}, b},
                       {{4, 3}, a}, {{5, 1}, b}, {{5, 3}, a}});
}

// n=6 vertex attaining ig 4/3: twelve 1/2 entries, two chained loop pairs
inline SolutionPoint maxgap_n6() {
  const Rat h(1, 2);
  return from_arcs(6, {{{0, 4}, h}, {{0, 5}, h}, {{4, 0}, h}, {{4, 1}, h},
                       {{5, 0}, h}, {{5, 2}, h}, {{1, 3}, h}, {{1, 5}, h},
                       {{3, 1}, h}, {{3, 2}, h}, {{2, 3}, h}, {{2, 4}, h}});
}

// --- independent oracles --------------------------------------------------

// rank by plain rational elimination, pivoting from the rightmost column
inline int rank_oracle(const RatMatrix& m) {
  std::vector<std::vector<Rat>> a(m.rows, std::vector<Rat>(m.cols));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) a[i][j] = m.at(i, j);
  int r = 0;
  for (int c = m.cols - 1; c >= 0 && r < m.rows; --c) {
    int piv = -1;
    for (int i = r; i < m.rows; ++i)
      if (a[i][c] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    for (int i = r + 1; i < m.rows; ++i) {
      if (a[i][c] == 0) continue;
      const Rat f = a[i][c] / a[r][c];
      for (int j = 0; j < m.cols; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

// exhaustive cut sum straight from the definition
inline Rat cut_oracle(const SolutionPoint& x, uint32_t mask) {
  Rat total = 0;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (i == j) continue;
      if (((mask >> i) & 1u) && !((mask >> j) & 1u)) total += x.at(i, j);
    }
  return total;
}

// all tight sets by scanning every subset with the direct sum
inline std::vector<uint32_t> tight_sets_oracle(const SolutionPoint& x) {
  std::vector<uint32_t> out;
  for (uint32_t mask = 1; mask + 1 < (1u << x.n); ++mask) {
    const int sz = __builtin_popcount(mask);
    if (sz < 2 || sz > x.n - 2) continue;
    if (cut_oracle(x, mask) == 1) out.push_back(mask);
  }
  return out;
}

// cheapest tour cost by full enumeration
inline Rat atsp_brute(const CostVector& c) {
  Rat best;
  bool first = true;
  for (const std::vector<int>& tour : enumerate_tours(c.n)) {
    Rat cost = 0;
    for (size_t t = 0; t < tour.size(); ++t) cost += c.at(tour[t], tour[(t + 1) % tour.size()]);
    if (first || cost < best) {
      best = cost;
      first = false;
    }
  }
  return best;
}

inline SolutionPoint midpoint(const SolutionPoint& a, const SolutionPoint& b) {
  std::vector<Rat> e(a.x.size());
  for (size_t k = 0; k < e.size(); ++k) e[k] = (a.x[k] + b.x[k]) / 2;
  return SolutionPoint::make(a.n, std::move(e));
}

inline std::string fixture_path(const std::string& name) {
  return std::string(ASEP_FIXTURE_DIR) + "/" + name;
}

}  // namespace asep::testing
