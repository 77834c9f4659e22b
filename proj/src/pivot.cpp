#include "asep/pivot.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include "asep/gap.hpp"
#include "asep/loops.hpp"

namespace asep {

StandardForm StandardForm::make(int n) {
  StandardForm sf;
  sf.n = n;
  sf.arcs = ArcIndex(n);
  sf.sec_masks = ConstraintSystem::make(n).sec_masks;
  return sf;
}

std::vector<Rat> StandardForm::extend(const SolutionPoint& x) const {
  std::vector<Rat> z = x.x;
  z.reserve(num_vars());
  for (uint32_t mask : sec_masks) z.push_back(cut_value(x, {n, mask}) - 1);
  return z;
}

SolutionPoint StandardForm::restrict_to_arcs(const std::vector<Rat>& z) const {
  SolutionPoint p;
  p.n = n;
  p.x.assign(z.begin(), z.begin() + arcs.m());
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Deadline {
  long max_pivots;
  Clock::time_point end;
  bool timed;
  bool hit = false;

  explicit Deadline(const PivotBudget& b)
      : max_pivots(b.max_pivots),
        end(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(b.max_seconds > 0 ? b.max_seconds : 0))),
        timed(b.max_seconds >= 0) {}

  bool exhausted(long pivots) {
    if (hit) return true;
    if (max_pivots >= 0 && pivots >= max_pivots) hit = true;
    else if (timed && Clock::now() >= end) hit = true;
    return hit;
  }
};

// Dense simplex tableau fixed to one vertex; enumerates the feasible bases
// representing it and collects the targets of all nondegenerate pivots.
class VertexPivoter {
 public:
  VertexPivoter(const StandardForm& sf, const SolutionPoint& x, uint64_t seed)
      : sf_(sf), ncols_(sf.num_vars()), seed_(seed) {
    build_rows();
    init_tableau(sf.extend(x));
  }

  void enumerate(Deadline& dl, std::map<std::vector<Rat>, char>& found, PivotStats& stats) {
    walk(dl, found, stats);
  }

 private:
  const StandardForm& sf_;
  int ncols_;
  int nrows_ = 0;
  uint64_t seed_;
  std::vector<std::vector<Rat>> tab_;  // nrows x (ncols + 1), rhs last
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  std::set<std::vector<uint16_t>> visited_;
  long pivots_ = 0;

  void build_rows() {
    const int n = sf_.n;
    const int m = sf_.arcs.m();
    nrows_ = sf_.num_rows();
    tab_.assign(nrows_, std::vector<Rat>(ncols_ + 1, Rat(0)));
    int r = 0;
    for (int v = 0; v < n; ++v, ++r) {  // in-degree
      for (int j = 0; j < n; ++j)
        if (j != v) tab_[r][sf_.arcs.arc(j, v)] = 1;
      tab_[r][ncols_] = 1;
    }
    for (int v = 0; v + 1 < n; ++v, ++r) {  // out-degree, last row dependent
      for (int j = 0; j < n; ++j)
        if (j != v) tab_[r][sf_.arcs.arc(v, j)] = 1;
      tab_[r][ncols_] = 1;
    }
    for (size_t t = 0; t < sf_.sec_masks.size(); ++t, ++r) {
      const uint32_t mask = sf_.sec_masks[t];
      for (int i = 0; i < n; ++i) {
        if (!((mask >> i) & 1u)) continue;
        for (int j = 0; j < n; ++j)
          if (i != j && !((mask >> j) & 1u)) tab_[r][sf_.arcs.arc(i, j)] = 1;
      }
      tab_[r][m + t] = -1;
      tab_[r][ncols_] = 1;
    }
  }

  void init_tableau(const std::vector<Rat>& z) {
    std::vector<int> order;
    order.reserve(ncols_);
    for (int c = 0; c < ncols_; ++c)
      if (z[c] != 0) order.push_back(c);
    const size_t support = order.size();
    for (int c = 0; c < ncols_; ++c)
      if (z[c] == 0) order.push_back(c);

    basis_.assign(nrows_, -1);
    in_basis_.assign(ncols_, 0);
    std::vector<char> row_done(nrows_, 0);
    int placed = 0;
    for (size_t oi = 0; oi < order.size() && placed < nrows_; ++oi) {
      const int c = order[oi];
      int pr = -1;
      for (int i = 0; i < nrows_; ++i)
        if (!row_done[i] && tab_[i][c] != 0) { pr = i; break; }
      if (pr < 0) {
        if (oi < support) throw std::logic_error("support columns dependent; not a vertex");
        continue;
      }
      pivot_row(pr, c);
      row_done[pr] = 1;
      basis_[pr] = c;
      in_basis_[c] = 1;
      ++placed;
    }
    if (placed != nrows_) throw std::logic_error("standard form lost row rank");
  }

  void pivot_row(int r, int c) {
    std::vector<Rat>& prow = tab_[r];
    const Rat pv = prow[c];
    if (pv != 1) {
      for (Rat& q : prow)
        if (q != 0) q /= pv;
    }
    std::vector<int> nz;
    for (int j = 0; j <= ncols_; ++j)
      if (prow[j] != 0) nz.push_back(j);
    for (int i = 0; i < nrows_; ++i) {
      if (i == r) continue;
      const Rat f = tab_[i][c];
      if (f == 0) continue;
      for (int j : nz) tab_[i][j] -= f * prow[j];
      tab_[i][c] = 0;
    }
  }

  void exchange(int row, int enter) {
    const int leave = basis_[row];
    pivot_row(row, enter);
    in_basis_[leave] = 0;
    in_basis_[enter] = 1;
    basis_[row] = enter;
    ++pivots_;
  }

  std::vector<uint16_t> basis_key() const {
    std::vector<uint16_t> k;
    k.reserve(basis_.size());
    for (int c : basis_) k.push_back(static_cast<uint16_t>(c));
    std::sort(k.begin(), k.end());
    return k;
  }

  // One DFS node: scan the entering columns of the current basis, record
  // nondegenerate targets, and queue the degenerate exchanges.
  std::vector<std::pair<int, int>> visit_basis(std::map<std::vector<Rat>, char>& found,
                                               PivotStats& stats) {
    visited_.insert(basis_key());
    ++stats.bases;
    std::vector<int> entering;
    for (int c = 0; c < ncols_; ++c)
      if (!in_basis_[c]) entering.push_back(c);
    if (sf_.n > 8) {
      std::mt19937_64 rng(seed_ ^ (stats.bases * 0x9e3779b97f4a7c15ull));
      std::shuffle(entering.begin(), entering.end(), rng);
    }
    std::vector<std::pair<int, int>> exchanges;  // (zero row, entering col)
    for (int e : entering) {
      // ratio test along entering column e
      int min_row = -1;
      Rat min_num, min_den;
      bool blocked_at_zero = false;
      for (int i = 0; i < nrows_; ++i) {
        const Rat& a = tab_[i][e];
        if (a == 0) continue;
        const Rat& rhs = tab_[i][ncols_];
        if (rhs == 0) {
          exchanges.emplace_back(i, e);
          if (a > 0) blocked_at_zero = true;
          continue;
        }
        if (a > 0 && (min_row < 0 || rhs * min_den < min_num * a)) {
          min_row = i;
          min_num = rhs;
          min_den = a;
        }
      }
      if (!blocked_at_zero) {
        // the step is strictly positive: it ends at an adjacent vertex
        if (min_row < 0) throw std::logic_error("unbounded edge on a bounded polytope");
        record_neighbor(e, min_num / min_den, found);
      }
    }
    return exchanges;
  }

  struct Frame {
    std::vector<std::pair<int, int>> exchanges;
    size_t next = 0;
    int undo_row = -1;
    int undo_col = -1;
  };

  void walk(Deadline& dl, std::map<std::vector<Rat>, char>& found, PivotStats& stats) {
    std::vector<Frame> stack;
    stack.push_back({visit_basis(found, stats), 0, -1, -1});
    while (!stack.empty()) {
      Frame& f = stack.back();
      bool descended = false;
      while (f.next < f.exchanges.size()) {
        if (dl.exhausted(pivots_)) break;
        auto [zr, e] = f.exchanges[f.next++];
        const int old_col = basis_[zr];
        std::vector<uint16_t> key = basis_key();
        std::replace(key.begin(), key.end(), static_cast<uint16_t>(old_col),
                     static_cast<uint16_t>(e));
        std::sort(key.begin(), key.end());
        if (visited_.count(key)) continue;
        exchange(zr, e);
        stack.push_back({visit_basis(found, stats), 0, zr, old_col});
        descended = true;
        break;
      }
      if (descended) continue;
      if (f.undo_row >= 0) exchange(f.undo_row, f.undo_col);
      stack.pop_back();
      if (dl.exhausted(pivots_)) {
        // unwind the remaining undo trail
        while (!stack.empty()) {
          if (stack.back().undo_row >= 0) exchange(stack.back().undo_row, stack.back().undo_col);
          stack.pop_back();
        }
      }
    }
    stats.pivots = pivots_;
    stats.budget_hit = dl.hit;
  }

  void record_neighbor(int e, const Rat& step, std::map<std::vector<Rat>, char>& found) {
    const int m = sf_.arcs.m();
    std::vector<Rat> y(m, Rat(0));
    if (e < m) y[e] = step;
    for (int i = 0; i < nrows_; ++i) {
      if (basis_[i] >= m) continue;
      Rat v = tab_[i][ncols_];
      if (tab_[i][e] != 0) v -= step * tab_[i][e];
      if (v != 0) y[basis_[i]] = v;
    }
    found.emplace(std::move(y), 0);
  }
};

}  // namespace

std::vector<SolutionPoint> neighbors(const SolutionPoint& x, const PivotBudget& budget,
                                     uint64_t seed, PivotStats* stats) {
  if (!is_vertex(x)) throw std::invalid_argument("pivoting requires a vertex");
  PivotStats local;
  PivotStats& st = stats ? *stats : local;
  std::map<std::vector<Rat>, char> found;
  Deadline dl(budget);
  if (!dl.exhausted(0)) {
    StandardForm sf = StandardForm::make(x.n);
    VertexPivoter vp(sf, x, seed);
    vp.enumerate(dl, found, st);
  } else {
    st.budget_hit = true;
  }
  std::vector<SolutionPoint> out;
  out.reserve(found.size());
  for (auto& [coords, mark] : found) {
    if (coords == x.x) continue;
    SolutionPoint y;
    y.n = x.n;
    y.x = coords;
    out.push_back(std::move(y));
  }
  return out;
}

bool adjacent(const SolutionPoint& x, const SolutionPoint& y) {
  if (x.n != y.n) throw std::invalid_argument("adjacency needs equal node counts");
  if (x == y) return false;
  const int n = x.n;
  const ArcIndex arcs(n);
  std::vector<int> joint;  // columns where either point is nonzero
  for (int k = 0; k < arcs.m(); ++k)
    if (x.x[k] != 0 || y.x[k] != 0) joint.push_back(k);

  std::vector<NodeSet> tx = tight_sets(x), ty = tight_sets(y);
  std::vector<uint32_t> mx, my, common;
  for (const NodeSet& s : tx) mx.push_back(s.mask);
  for (const NodeSet& s : ty) my.push_back(s.mask);
  std::set_intersection(mx.begin(), mx.end(), my.begin(), my.end(), std::back_inserter(common));

  std::vector<std::vector<Int>> rows;
  for (int v = 0; v < n; ++v) {
    std::vector<Int> in_row(joint.size(), 0), out_row(joint.size(), 0);
    for (size_t c = 0; c < joint.size(); ++c) {
      auto [a, b] = arcs.endpoints(joint[c]);
      if (a == v) out_row[c] = 1;
      if (b == v) in_row[c] = 1;
    }
    rows.push_back(std::move(in_row));
    rows.push_back(std::move(out_row));
  }
  for (uint32_t mask : common) {
    std::vector<Int> row(joint.size(), 0);
    for (size_t c = 0; c < joint.size(); ++c) {
      auto [a, b] = arcs.endpoints(joint[c]);
      if (((mask >> a) & 1u) && !((mask >> b) & 1u)) row[c] = 1;
    }
    rows.push_back(std::move(row));
  }
  return rank_int_rows(std::move(rows)) == static_cast<int>(joint.size()) - 1;
}

namespace {

struct WorkKey {
  int zeros;
  std::string key;
  bool operator<(const WorkKey& o) const {
    return zeros != o.zeros ? zeros < o.zeros : key < o.key;
  }
};

}  // namespace

ExploreResult explore(const std::vector<SolutionPoint>& starts, const ExploreConfig& cfg,
                      const ProgressFn& progress) {
  if (starts.empty()) throw std::invalid_argument("explore needs at least one start");
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  std::vector<SolutionPoint> seeds;
  const int sn = starts.front().n;
  for (const SolutionPoint& s : starts)
    if (s.n != sn) throw std::invalid_argument("starts must share one node count");
  if (sn == cfg.n) {
    seeds = starts;
  } else if (sn + 1 == cfg.n) {
    for (const SolutionPoint& s : starts) {
      if (!is_vertex(s)) throw std::invalid_argument("explore start is not a vertex");
      for (SolutionPoint& c : extend_all(s)) seeds.push_back(std::move(c));
    }
    if (seeds.empty()) throw std::invalid_argument("starts have no loops to extend");
  } else {
    throw std::invalid_argument("starts must live at n or n-1");
  }

  ExploreResult res;
  std::map<std::string, size_t> index_of;   // canonical key -> records slot
  std::set<WorkKey> worklist;
  std::mutex reg_mu;

  // gap workers drain a queue of record slots; a total-time budget cuts the
  // queue off as well, leaving later records ungapped
  std::vector<size_t> gap_queue;
  std::mutex gap_mu;
  bool done_feeding = false;
  auto out_of_time = [&] { return cfg.t_total >= 0 && elapsed() >= cfg.t_total; };
  std::vector<std::thread> workers;
  auto gap_worker = [&]() {
    while (true) {
      size_t slot;
      {
        std::lock_guard<std::mutex> lk(gap_mu);
        if (gap_queue.empty() || (done_feeding && out_of_time())) {
          if (done_feeding) return;
          slot = SIZE_MAX;
        } else {
          slot = gap_queue.back();
          gap_queue.pop_back();
        }
      }
      if (slot == SIZE_MAX) {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        continue;
      }
      SolutionPoint rep;
      {
        std::lock_guard<std::mutex> lk(reg_mu);
        rep = res.records[slot].representative;
      }
      try {
        GapCertificate cert = solve_gap(rep);
        {
          std::lock_guard<std::mutex> lk(reg_mu);
          res.records[slot].gap_value = cert.gap_value;
          res.records[slot].ig_value = cert.ig_value;
        }
        if (progress) progress({"gap", rat_to_string(cert.ig_value)});
      } catch (const std::exception& e) {
        if (progress) progress({"gap-error", e.what()});
      }
    }
  };

  auto register_point = [&](const SolutionPoint& pt) {
    OrbitRecord rec = make_orbit_record(pt);
    const std::string key = rec.canonical_key;
    size_t slot;
    {
      std::lock_guard<std::mutex> lk(reg_mu);
      if (index_of.count(key)) return;
      slot = res.records.size();
      index_of[key] = slot;
      worklist.insert({rec.zero_count, key});
      res.records.push_back(std::move(rec));
    }
    if (cfg.solve_gaps) {
      std::lock_guard<std::mutex> gk(gap_mu);
      gap_queue.push_back(slot);
    }
    if (progress) progress({"orbit", key.substr(0, 24)});
  };

  if (cfg.solve_gaps)
    for (int w = 0; w < std::max(1, cfg.jobs); ++w) workers.emplace_back(gap_worker);

  for (const SolutionPoint& s : seeds) {
    if (!is_vertex(s)) throw std::invalid_argument("explore start is not a vertex");
    register_point(s);
  }

  while (!worklist.empty()) {
    if (cfg.max_iterations >= 0 && res.iterations >= cfg.max_iterations) {
      res.budget_exhausted = true;
      break;
    }
    if (cfg.t_total >= 0 && elapsed() >= cfg.t_total) {
      res.budget_exhausted = true;
      break;
    }
    if (cfg.pivots_total >= 0 && res.pivots >= cfg.pivots_total) {
      res.budget_exhausted = true;
      break;
    }
    WorkKey wk = *worklist.begin();
    worklist.erase(worklist.begin());
    SolutionPoint rep;
    {
      std::lock_guard<std::mutex> lk(reg_mu);
      rep = res.records[index_of[wk.key]].representative;
    }
    PivotBudget pb;
    pb.max_pivots = cfg.pivots_per_vertex;
    pb.max_seconds = cfg.t_iter;
    if (cfg.pivots_total >= 0) {
      const long left = cfg.pivots_total - res.pivots;
      pb.max_pivots = pb.max_pivots < 0 ? left : std::min(pb.max_pivots, left);
    }
    if (cfg.t_total >= 0) {
      const double left = cfg.t_total - elapsed();
      pb.max_seconds = pb.max_seconds < 0 ? left : std::min(pb.max_seconds, left);
    }
    PivotStats st;
    std::vector<SolutionPoint> ns = neighbors(rep, pb, cfg.seed, &st);
    res.pivots += st.pivots;
    ++res.iterations;
    res.neighbor_counts[wk.key] = static_cast<long>(ns.size());
    if (progress) progress({"pivoted", std::to_string(ns.size()) + " neighbors"});
    for (const SolutionPoint& y : ns) register_point(y);
  }

  {
    std::lock_guard<std::mutex> lk(gap_mu);
    done_feeding = true;
  }
  for (std::thread& t : workers) t.join();
  return res;
}

}  // namespace asep
