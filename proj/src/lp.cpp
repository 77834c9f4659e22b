#include "asep/lp.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace asep {

LpProblem LpProblem::make(int vars) {
  LpProblem p;
  p.num_vars = vars;
  p.objective.assign(vars, Rat(0));
  p.nonneg.assign(vars, true);
  return p;
}

void LpProblem::add_eq(std::vector<Rat> coeffs, Rat rhs) {
  if (static_cast<int>(coeffs.size()) != num_vars) throw std::invalid_argument("row width mismatch");
  equalities.push_back({std::move(coeffs), std::move(rhs)});
}

void LpProblem::add_ge(std::vector<Rat> coeffs, Rat rhs) {
  if (static_cast<int>(coeffs.size()) != num_vars) throw std::invalid_argument("row width mismatch");
  inequalities.push_back({std::move(coeffs), std::move(rhs)});
}

namespace {

std::string row_key(const LpRow& r) {
  std::string k = rat_to_string(r.rhs);
  for (const Rat& q : r.coeffs) {
    k += ';';
    k += rat_to_string(q);
  }
  return k;
}

// Columns of the internal standard form A z = b, z >= 0.
struct ColId {
  enum Kind { VarPlus, VarMinus, Surplus } kind;
  int index;  // user variable or inequality row
};

constexpr int kArtificial = -1;

class Simplex {
 public:
  Simplex(const LpProblem& p, std::vector<const LpRow*> eqs, std::vector<const LpRow*> ges)
      : prob_(p) {
    build(eqs, ges);
  }

  LpSolution run() {
    LpSolution out;
    if (!phase1()) {
      out.status = LpStatus::Infeasible;
      out.pivots = pivots_;
      return out;
    }
    const int st = phase2();
    if (st == 1) {
      out.status = LpStatus::Unbounded;
      out.pivots = pivots_;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.x.assign(prob_.num_vars, Rat(0));
    for (int r = 0; r < nrows_; ++r) {
      if (!active_[r] || basis_[r] == kArtificial) continue;
      const ColId& c = cols_[basis_[r]];
      if (c.kind == ColId::VarPlus) out.x[c.index] += rhs_[r];
      else if (c.kind == ColId::VarMinus) out.x[c.index] -= rhs_[r];
    }
    out.objective = 0;
    for (int i = 0; i < prob_.num_vars; ++i)
      if (prob_.objective[i] != 0) out.objective += prob_.objective[i] * out.x[i];
    for (int r = 0; r < nrows_; ++r) {
      if (!active_[r]) continue;
      out.basis.push_back(col_name(basis_[r]));
    }
    out.pivots = pivots_;
    return out;
  }

 private:
  const LpProblem& prob_;
  int nrows_ = 0;
  int ncols_ = 0;
  std::vector<ColId> cols_;
  std::vector<std::vector<Rat>> tab_;  // nrows x ncols
  std::vector<Rat> rhs_;
  std::vector<int> basis_;             // column index or kArtificial
  std::vector<bool> active_;           // rows not deleted as redundant
  std::vector<Rat> dcost_;             // reduced costs of current phase
  Rat dobj_;                           // current phase objective value
  long pivots_ = 0;

  std::string col_name(int c) const {
    if (c == kArtificial) return "art";
    const ColId& id = cols_[c];
    switch (id.kind) {
      case ColId::VarPlus: return "v" + std::to_string(id.index);
      case ColId::VarMinus: return "v" + std::to_string(id.index) + "-";
      default: return "s" + std::to_string(id.index);
    }
  }

  void build(const std::vector<const LpRow*>& eqs, const std::vector<const LpRow*>& ges) {
    std::vector<int> plus_col(prob_.num_vars), minus_col(prob_.num_vars, -1);
    for (int i = 0; i < prob_.num_vars; ++i) {
      plus_col[i] = ncols_++;
      cols_.push_back({ColId::VarPlus, i});
      if (!prob_.nonneg[i]) {
        minus_col[i] = ncols_++;
        cols_.push_back({ColId::VarMinus, i});
      }
    }
    std::vector<int> surplus_col(ges.size());
    for (size_t k = 0; k < ges.size(); ++k) {
      surplus_col[k] = ncols_++;
      cols_.push_back({ColId::Surplus, static_cast<int>(k)});
    }

    nrows_ = static_cast<int>(eqs.size() + ges.size());
    tab_.assign(nrows_, std::vector<Rat>(ncols_));
    rhs_.assign(nrows_, Rat(0));
    basis_.assign(nrows_, kArtificial);
    active_.assign(nrows_, true);

    auto fill = [&](int r, const LpRow& src) {
      for (int i = 0; i < prob_.num_vars; ++i) {
        if (src.coeffs[i] == 0) continue;
        tab_[r][plus_col[i]] = src.coeffs[i];
        if (minus_col[i] >= 0) tab_[r][minus_col[i]] = -src.coeffs[i];
      }
      rhs_[r] = src.rhs;
    };
    int r = 0;
    for (const LpRow* e : eqs) fill(r++, *e);
    for (size_t k = 0; k < ges.size(); ++k, ++r) {
      fill(r, *ges[k]);
      tab_[r][surplus_col[k]] = -1;
      // rows with rhs <= 0 take their own surplus as the starting basic
      // column (feasible at z = 0); others get an artificial.
      if (rhs_[r] <= 0) {
        negate_row(r);
        basis_[r] = surplus_col[k];
      }
    }
    for (int i = 0; i < static_cast<int>(eqs.size()); ++i)
      if (rhs_[i] < 0) negate_row(i);
  }

  void negate_row(int r) {
    for (Rat& q : tab_[r]) q = -q;
    rhs_[r] = -rhs_[r];
  }

  // Reduced costs for min sum of artificial variables.
  void init_phase1_costs() {
    dcost_.assign(ncols_, Rat(0));
    dobj_ = 0;
    for (int r = 0; r < nrows_; ++r) {
      if (basis_[r] != kArtificial) continue;
      for (int j = 0; j < ncols_; ++j)
        if (tab_[r][j] != 0) dcost_[j] -= tab_[r][j];
      dobj_ += rhs_[r];
    }
  }

  void init_phase2_costs() {
    dcost_.assign(ncols_, Rat(0));
    dobj_ = 0;
    for (int i = 0, c = 0; i < prob_.num_vars; ++i) {
      const Rat& q = prob_.objective[i];
      dcost_[c++] = q;
      if (!prob_.nonneg[i]) dcost_[c++] = -q;
    }
    for (int r = 0; r < nrows_; ++r) {
      if (!active_[r] || basis_[r] == kArtificial) continue;
      const Rat cb = dcost_[basis_[r]];
      if (cb == 0) continue;
      for (int j = 0; j < ncols_; ++j)
        if (tab_[r][j] != 0) dcost_[j] -= cb * tab_[r][j];
      dobj_ += cb * rhs_[r];
    }
  }

  void pivot(int r, int e) {
    ++pivots_;
    std::vector<Rat>& prow = tab_[r];
    const Rat pv = prow[e];
    if (pv != 1) {
      for (Rat& q : prow)
        if (q != 0) q /= pv;
      prow[e] = 1;
      rhs_[r] /= pv;
    }
    std::vector<int> nz;
    nz.reserve(ncols_);
    for (int j = 0; j < ncols_; ++j)
      if (prow[j] != 0) nz.push_back(j);
    for (int i = 0; i < nrows_; ++i) {
      if (i == r || !active_[i]) continue;
      const Rat f = tab_[i][e];
      if (f == 0) continue;
      for (int j : nz) tab_[i][j] -= f * prow[j];
      tab_[i][e] = 0;
      if (rhs_[r] != 0) rhs_[i] -= f * rhs_[r];
    }
    const Rat fd = dcost_[e];
    if (fd != 0) {
      for (int j : nz) dcost_[j] -= fd * prow[j];
      dcost_[e] = 0;
      dobj_ += fd * rhs_[r];  // objective moves by d[e] * step
    }
    basis_[r] = e;
  }

  // Returns the leaving row for entering column e, or -1 when no coefficient
  // is positive (unbounded direction).
  int ratio_test(int e) const {
    int best = -1;
    Rat best_num, best_den;
    for (int r = 0; r < nrows_; ++r) {
      if (!active_[r]) continue;
      const Rat& a = tab_[r][e];
      if (a <= 0) continue;
      if (best < 0 || rhs_[r] * best_den < best_num * a ||
          (rhs_[r] * best_den == best_num * a && leave_order(r) < leave_order(best))) {
        best = r;
        best_num = rhs_[r];
        best_den = a;
      }
    }
    return best;
  }

  // Bland-compatible tie order: artificials leave first, then lowest column.
  long leave_order(int r) const {
    return basis_[r] == kArtificial ? static_cast<long>(-nrows_ + r) : static_cast<long>(basis_[r]);
  }

  // Returns 0 = optimal for this phase, 1 = unbounded. Artificial columns
  // are never materialized, so they can never re-enter.
  int optimize() {
    int degen_streak = 0;
    bool bland = false;
    while (true) {
      int enter = -1;
      if (bland) {
        for (int j = 0; j < ncols_; ++j)
          if (dcost_[j] < 0) { enter = j; break; }
      } else {
        for (int j = 0; j < ncols_; ++j)
          if (dcost_[j] < 0 && (enter < 0 || dcost_[j] < dcost_[enter])) enter = j;
      }
      if (enter < 0) return 0;
      const int leave = ratio_test(enter);
      if (leave < 0) return 1;
      const bool degenerate = (rhs_[leave] == 0);
      pivot(leave, enter);
      if (degenerate) {
        if (++degen_streak >= 400) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }
      if (pivots_ > 50'000'000) throw std::runtime_error("simplex pivot limit exceeded");
    }
  }

  bool phase1() {
    bool any_artificial = false;
    for (int r = 0; r < nrows_; ++r) any_artificial |= (basis_[r] == kArtificial);
    if (!any_artificial) return true;
    init_phase1_costs();
    optimize();  // bounded below by 0, can't be unbounded
    if (dobj_ != 0) return false;
    // Drive leftover zero-valued artificials out of the basis; rows whose
    // structural part vanished are redundant and get dropped.
    for (int r = 0; r < nrows_; ++r) {
      if (!active_[r] || basis_[r] != kArtificial) continue;
      int e = -1;
      for (int j = 0; j < ncols_; ++j)
        if (tab_[r][j] != 0) { e = j; break; }
      if (e < 0) {
        active_[r] = false;
        continue;
      }
      pivot(r, e);
    }
    return true;
  }

  int phase2() {
    init_phase2_costs();
    return optimize();
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  // presolve: drop exact duplicate rows
  std::vector<const LpRow*> eqs, ges;
  {
    std::unordered_set<std::string> seen;
    for (const LpRow& r : p.equalities)
      if (seen.insert("e" + row_key(r)).second) eqs.push_back(&r);
    for (const LpRow& r : p.inequalities)
      if (seen.insert("g" + row_key(r)).second) ges.push_back(&r);
  }
  Simplex s(p, std::move(eqs), std::move(ges));
  return s.run();
}

LpSolution solve_lp_with_rows(LpProblem p, const RowGenerator& gen) {
  while (true) {
    LpSolution sol = solve_lp(p);
    if (sol.status != LpStatus::Optimal) return sol;
    std::optional<LpRow> cut = gen(sol.x);
    if (!cut) return sol;
    p.inequalities.push_back(std::move(*cut));
  }
}

}  // namespace asep
