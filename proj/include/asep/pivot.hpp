#pragma once

#include <functional>

#include "asep/symmetry.hpp"

namespace asep {

// Equality system over arc variables plus one surplus variable per subtour
// row: degree rows and x(cut(S)) - s_S = 1, all variables >= 0. The last
// out-degree row is linearly dependent and excluded from the working rows;
// the basis size equals the system rank 2n - 1 + #subtour rows.
struct StandardForm {
  int n = 0;
  ArcIndex arcs{2};
  std::vector<uint32_t> sec_masks;  // ascending

  static StandardForm make(int n);
  int num_vars() const { return arcs.m() + static_cast<int>(sec_masks.size()); }
  int num_rows() const { return 2 * n - 1 + static_cast<int>(sec_masks.size()); }
  std::vector<Rat> extend(const SolutionPoint& x) const;  // append surplus values
  SolutionPoint restrict_to_arcs(const std::vector<Rat>& z) const;
};

struct PivotBudget {
  long max_pivots = -1;     // < 0 means unlimited
  double max_seconds = -1;  // < 0 means unlimited
};

struct PivotStats {
  long pivots = 0;
  long bases = 0;
  bool budget_hit = false;
};

// All vertices reachable by one admissible pivot from some feasible basis of
// x, deduplicated by coordinates. Exhaustive when the budget allows; basis
// enumeration is depth-first over degenerate exchanges. Enumeration order is
// deterministic for n <= 8 and seed-shuffled above that.
std::vector<SolutionPoint> neighbors(const SolutionPoint& x, const PivotBudget& budget = {},
                                     uint64_t seed = 0, PivotStats* stats = nullptr);

// Independent adjacency test: the rows tight at both points span a face of
// dimension exactly one.
bool adjacent(const SolutionPoint& x, const SolutionPoint& y);

struct ExploreConfig {
  int n = 0;
  long max_iterations = -1;     // M;  < 0 unlimited
  double t_total = -1;          // seconds
  double t_iter = -1;           // seconds per pivoted vertex
  long pivots_total = -1;       // deterministic counterpart of t_total
  long pivots_per_vertex = -1;  // deterministic counterpart of t_iter
  uint64_t seed = 0;
  int jobs = 1;
  bool solve_gaps = true;
};

struct ProgressEvent {
  std::string kind;  // "orbit", "gap", "pivoted"
  std::string detail;
};

using ProgressFn = std::function<void(const ProgressEvent&)>;

struct ExploreResult {
  std::vector<OrbitRecord> records;  // discovery order
  std::map<std::string, long> neighbor_counts;  // per pivoted canonical key
  bool budget_exhausted = false;
  long iterations = 0;
  long pivots = 0;
};

// The worklist loop: extend starts when they sit one node below cfg.n, sort
// by zero count, pivot on the next unseen orbit, insert unseen neighbors in
// sorted position, stop on any budget. Every discovered orbit is gap-solved
// (on cfg.jobs workers) unless solve_gaps is off.
ExploreResult explore(const std::vector<SolutionPoint>& starts, const ExploreConfig& cfg,
                      const ProgressFn& progress = nullptr);

}  // namespace asep
