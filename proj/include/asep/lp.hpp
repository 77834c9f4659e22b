#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asep/rational.hpp"

namespace asep {

struct LpRow {
  std::vector<Rat> coeffs;  // dense, length num_vars
  Rat rhs;
};

// min objective.x  s.t.  equalities hold, inequalities are >=, and every
// variable is either nonnegative or free.
struct LpProblem {
  int num_vars = 0;
  std::vector<Rat> objective;
  std::vector<LpRow> equalities;
  std::vector<LpRow> inequalities;
  std::vector<bool> nonneg;

  static LpProblem make(int vars);
  void add_eq(std::vector<Rat> coeffs, Rat rhs);
  void add_ge(std::vector<Rat> coeffs, Rat rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rat> x;
  Rat objective;
  std::vector<std::string> basis;  // identifiers of basic columns, in row order
  long pivots = 0;
};

// Exact two-phase primal simplex. Pricing is steepest-coefficient while the
// objective moves and falls back to Bland's rule during degenerate stretches,
// which is what guarantees termination on these heavily degenerate systems.
LpSolution solve_lp(const LpProblem& p);

// Lazy row generation: gen returns a violated inequality for the candidate
// point, or nullopt once the full implicit family is satisfied.
using RowGenerator = std::function<std::optional<LpRow>(const std::vector<Rat>&)>;

LpSolution solve_lp_with_rows(LpProblem p, const RowGenerator& gen);

}  // namespace asep
