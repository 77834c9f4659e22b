#include "asep/gap.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace asep {

CostVector CostVector::make(int n, std::vector<Rat> entries) {
  if (static_cast<int>(entries.size()) != n * (n - 1))
    throw std::invalid_argument("cost vector length mismatch");
  for (const Rat& q : entries)
    if (q < 0) throw std::invalid_argument("negative cost entry");
  CostVector cv;
  cv.n = n;
  cv.c = std::move(entries);
  return cv;
}

bool CostVector::is_pq_metric() const {
  for (const Rat& q : c)
    if (q < 0) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (at(i, j) > at(i, k) + at(k, j)) return false;
      }
    }
  return true;
}

namespace {

template <class W>
struct HkOutcome {
  W value;
  std::vector<int> tour;
};

// dp over subsets of {1..n-1}; node 0 is the fixed tour start.
template <class W>
HkOutcome<W> held_karp(int n, const std::vector<W>& w, const W& inf) {
  auto weight = [&](int i, int j) -> const W& { return w[static_cast<size_t>(i) * n + j]; };
  const int k = n - 1;
  const size_t states = static_cast<size_t>(1) << k;
  std::vector<W> dp(states * static_cast<size_t>(k), inf);
  for (int v = 1; v < n; ++v) dp[(static_cast<size_t>(1) << (v - 1)) * k + (v - 1)] = weight(0, v);
  for (size_t mask = 1; mask < states; ++mask) {
    for (int last = 0; last < k; ++last) {
      if (!((mask >> last) & 1)) continue;
      const W& cur = dp[mask * k + last];
      if (cur == inf) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if ((mask >> nxt) & 1) continue;
        W cand = cur + weight(last + 1, nxt + 1);
        W& slot = dp[(mask | (static_cast<size_t>(1) << nxt)) * k + nxt];
        if (cand < slot) slot = cand;
      }
    }
  }
  const size_t full = states - 1;
  int best_last = -1;
  W best = inf;
  for (int last = 0; last < k; ++last) {
    if (dp[full * k + last] == inf) continue;
    W cand = dp[full * k + last] + weight(last + 1, 0);
    if (best_last < 0 || cand < best) {
      best = cand;
      best_last = last;
    }
  }
  // walk the dp backwards to recover one optimal tour
  std::vector<int> rev;
  size_t mask = full;
  int last = best_last;
  while (last >= 0) {
    rev.push_back(last + 1);
    const size_t pm = mask & ~(static_cast<size_t>(1) << last);
    int pred = -1;
    if (pm != 0) {
      for (int p = 0; p < k; ++p) {
        if (!((pm >> p) & 1)) continue;
        if (dp[pm * k + p] != inf && dp[pm * k + p] + weight(p + 1, last + 1) == dp[mask * k + last]) {
          pred = p;
          break;
        }
      }
    }
    mask = pm;
    last = pred;
  }
  rev.push_back(0);
  std::reverse(rev.begin(), rev.end());
  return {best, rev};
}

}  // namespace

AtspResult solve_atsp(const CostVector& c) {
  const int n = c.n;
  if (n > kAtspMaxNodes)
    throw std::invalid_argument("exact tour solve limited to n <= " + std::to_string(kAtspMaxNodes));
  if (n < 2) throw std::invalid_argument("need at least 2 nodes");
  if (n == 2) return {c.at(0, 1) + c.at(1, 0), {0, 1}};

  const Int scale = common_denominator(c.c);
  std::vector<Int> w(static_cast<size_t>(n) * n, 0);
  Int maxw = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Rat& q = c.at(i, j);
      Int v = numer(q) * (scale / denom(q));
      if (v > maxw) maxw = v;
      w[static_cast<size_t>(i) * n + j] = v;
    }

  const Int limit = (Int(1) << 60) / (n + 1);
  if (maxw <= limit) {
    std::vector<int64_t> wi(w.size());
    for (size_t i = 0; i < w.size(); ++i) wi[i] = w[i].convert_to<int64_t>();
    const int64_t inf = std::numeric_limits<int64_t>::max() / 2;
    HkOutcome<int64_t> r = held_karp<int64_t>(n, wi, inf);
    return {Rat(Int(r.value), scale), r.tour};
  }
  if (n > 18) throw std::invalid_argument("costs too large for exact tour solve at this n");
  Int inf = maxw * (n + 1) + 1;
  HkOutcome<Int> r = held_karp<Int>(n, w, inf);
  return {Rat(r.value, scale), r.tour};
}

AsepResult solve_asep(const CostVector& c) {
  const int n = c.n;
  if (n > kAsepMaxNodes)
    throw std::invalid_argument("relaxation solve limited to n <= " + std::to_string(kAsepMaxNodes));
  const ArcIndex arcs(n);
  LpProblem p = LpProblem::make(arcs.m());
  p.objective = c.c;
  for (int v = 0; v < n; ++v) {
    std::vector<Rat> out_row(arcs.m(), Rat(0)), in_row(arcs.m(), Rat(0));
    for (int j = 0; j < n; ++j) {
      if (j == v) continue;
      out_row[arcs.arc(v, j)] = 1;
      in_row[arcs.arc(j, v)] = 1;
    }
    p.add_eq(std::move(in_row), Rat(1));
    p.add_eq(std::move(out_row), Rat(1));
  }

  RowGenerator sec_gen = [n, arcs](const std::vector<Rat>& xv) -> std::optional<LpRow> {
    SolutionPoint pt;
    pt.n = n;
    pt.x = xv;
    uint32_t best_mask = 0;
    Rat best_cut;
    const uint64_t total = 1ull << n;
    for (uint64_t mask = 1; mask + 1 < total; ++mask) {
      const int sz = __builtin_popcountll(mask);
      if (sz < 2 || sz > n - 2) continue;
      Rat cut = cut_value(pt, {n, static_cast<uint32_t>(mask)});
      if (cut < 1 && (best_mask == 0 || cut < best_cut)) {
        best_mask = static_cast<uint32_t>(mask);
        best_cut = cut;
      }
    }
    if (best_mask == 0) return std::nullopt;
    std::vector<Rat> row(arcs.m(), Rat(0));
    for (int i = 0; i < n; ++i) {
      if (!((best_mask >> i) & 1u)) continue;
      for (int j = 0; j < n; ++j) {
        if (i == j || ((best_mask >> j) & 1u)) continue;
        row[arcs.arc(i, j)] = 1;
      }
    }
    return LpRow{std::move(row), Rat(1)};
  };

  LpSolution sol = solve_lp_with_rows(std::move(p), sec_gen);
  if (sol.status != LpStatus::Optimal)
    throw std::runtime_error("relaxation solve did not reach an optimum");
  SolutionPoint minimizer;
  minimizer.n = n;
  minimizer.x = sol.x;
  return {sol.objective, std::move(minimizer)};
}

namespace {

// Lazy families of the gap program. All violated triangle rows of a round
// are added in one batch (one row per round restarts the solve far too
// often); tours stream in one optimal witness at a time.
struct GapSeparator {
  int n;
  ArcIndex arcs;
  bool lazy_triangles;

  GapSeparator(int n_, bool lazy) : n(n_), arcs(n_), lazy_triangles(lazy) {}

  // returns the number of rows appended to p
  int separate(LpProblem& p, const std::vector<Rat>& sol) {
    int added = 0;
    if (lazy_triangles) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            if (sol[arcs.arc(i, j)] > sol[arcs.arc(i, k)] + sol[arcs.arc(k, j)]) {
              std::vector<Rat> row(p.num_vars, Rat(0));
              row[arcs.arc(i, k)] = 1;
              row[arcs.arc(k, j)] += 1;
              row[arcs.arc(i, j)] -= 1;
              p.add_ge(std::move(row), Rat(0));
              ++added;
            }
          }
        }
      if (added > 0) return added;
    }
    CostVector cv;
    cv.n = n;
    cv.c.assign(sol.begin(), sol.begin() + arcs.m());
    AtspResult best = solve_atsp(cv);
    if (best.value >= 1) return added;
    std::vector<Rat> row(p.num_vars, Rat(0));
    for (size_t t = 0; t < best.tour.size(); ++t)
      row[arcs.arc(best.tour[t], best.tour[(t + 1) % best.tour.size()])] = 1;
    p.add_ge(std::move(row), Rat(1));
    return added + 1;
  }
};

}  // namespace

GapCertificate solve_gap(const SolutionPoint& x) {
  const int n = x.n;
  const ArcIndex arcs(n);
  const int m = arcs.m();
  if (!is_vertex(x)) throw GapError("gap program requires a vertex");

  const std::vector<NodeSet> tights = tight_sets(x);
  const int t_count = static_cast<int>(tights.size());
  // variable layout: c | y_out | y_in | d
  const int y_out0 = m, y_in0 = m + n, d0 = m + 2 * n;
  const int num_vars = m + 2 * n + t_count;

  LpProblem p = LpProblem::make(num_vars);
  for (int k = 0; k < m; ++k) p.objective[k] = x.x[k];
  for (int i = 0; i < n; ++i) {
    p.nonneg[y_out0 + i] = false;
    p.nonneg[y_in0 + i] = false;
  }

  // dual feasibility: c_ij - y_i^out - y_j^in - sum of d_S over tight sets
  // cut by (i,j); equality on the support, >= 0 elsewhere
  for (int k = 0; k < m; ++k) {
    auto [i, j] = arcs.endpoints(k);
    std::vector<Rat> row(num_vars, Rat(0));
    row[k] = 1;
    row[y_out0 + i] = -1;
    row[y_in0 + j] = -1;
    for (int t = 0; t < t_count; ++t)
      if (tights[t].contains(i) && !tights[t].contains(j)) row[d0 + t] = -1;
    if (x.x[k] > 0) p.add_eq(std::move(row), Rat(0));
    else p.add_ge(std::move(row), Rat(0));
  }

  const bool lazy_triangles = n > 7;
  if (!lazy_triangles) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (int k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          std::vector<Rat> row(num_vars, Rat(0));
          row[arcs.arc(i, k)] = 1;
          row[arcs.arc(k, j)] += 1;
          row[arcs.arc(i, j)] -= 1;
          p.add_ge(std::move(row), Rat(0));
        }
      }
  }

  GapSeparator sep(n, lazy_triangles);
  LpSolution sol;
  while (true) {
    sol = solve_lp(p);
    if (sol.status == LpStatus::Infeasible)
      throw GapError("gap program infeasible; input is not a vertex or the system is corrupt");
    if (sol.status != LpStatus::Optimal) throw GapError("gap program unbounded");
    if (sep.separate(p, sol.x) == 0) break;
  }

  GapCertificate cert;
  cert.vertex = x;
  cert.costs = CostVector::make(n, std::vector<Rat>(sol.x.begin(), sol.x.begin() + m));
  cert.y_out.assign(sol.x.begin() + y_out0, sol.x.begin() + y_out0 + n);
  cert.y_in.assign(sol.x.begin() + y_in0, sol.x.begin() + y_in0 + n);
  for (int t = 0; t < t_count; ++t) cert.duals_by_set.emplace_back(tights[t].mask, sol.x[d0 + t]);
  cert.gap_value = sol.objective;
  if (cert.gap_value <= 0) throw GapError("gap program returned a nonpositive optimum");
  cert.ig_value = 1 / cert.gap_value;

  if (!cert.costs.is_pq_metric()) throw GapError("optimal costs violate the triangle family");
  AtspResult ts = solve_atsp(cert.costs);
  if (ts.value != 1) throw GapError("optimal costs do not have tour value exactly 1");
  if (n <= 8) {
    AsepResult as = solve_asep(cert.costs);
    if (as.value != cert.gap_value)
      throw GapError("relaxation value disagrees with the gap optimum");
    Rat at_x = 0;
    for (int k = 0; k < m; ++k)
      if (x.x[k] != 0) at_x += x.x[k] * cert.costs.c[k];
    if (at_x != cert.gap_value) throw GapError("gap optimum not attained at the input vertex");
  }
  return cert;
}

std::vector<BoundEntry> lower_bound_report(const std::vector<OrbitRecord>& records) {
  std::map<int, BoundEntry> best;
  for (const OrbitRecord& r : records) {
    if (!r.ig_value) continue;
    auto it = best.find(r.n);
    if (it == best.end() || *r.ig_value > it->second.ig)
      best[r.n] = {r.n, *r.ig_value, r.canonical_key};
  }
  std::vector<BoundEntry> out;
  for (auto& [n, e] : best) out.push_back(e);
  return out;
}

std::vector<std::vector<int>> enumerate_tours(int n) {
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<std::vector<int>> tours;
  do {
    std::vector<int> tour;
    tour.reserve(n);
    tour.push_back(0);
    tour.insert(tour.end(), rest.begin(), rest.end());
    tours.push_back(std::move(tour));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return tours;
}

}  // namespace asep
