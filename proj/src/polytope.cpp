#include "asep/polytope.hpp"

#include <algorithm>
#include <stdexcept>

namespace asep {

std::string NodeSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int v = 0; v < n; ++v) {
    if (!contains(v)) continue;
    if (!first) s += ',';
    s += std::to_string(v);
    first = false;
  }
  return s + "}";
}

SolutionPoint SolutionPoint::make(int n, std::vector<Rat> entries) {
  if (n < 2) throw std::invalid_argument("need at least 2 nodes");
  if (static_cast<int>(entries.size()) != n * (n - 1))
    throw std::invalid_argument("expected " + std::to_string(n * (n - 1)) + " entries, got " +
                                std::to_string(entries.size()));
  for (size_t k = 0; k < entries.size(); ++k) {
    if (entries[k] < 0 || entries[k] > 1)
      throw std::invalid_argument("entry " + std::to_string(k) + " out of [0,1]: " +
                                  rat_to_string(entries[k]));
  }
  SolutionPoint p;
  p.n = n;
  p.x = std::move(entries);
  return p;
}

int SolutionPoint::zero_count() const {
  int z = 0;
  for (const Rat& q : x) z += (q == 0);
  return z;
}

std::string SolutionPoint::serialize() const {
  std::string s = "n=" + std::to_string(n) + ";";
  for (size_t k = 0; k < x.size(); ++k) {
    if (k) s += ',';
    s += rat_to_string(x[k]);
  }
  return s;
}

ConstraintSystem ConstraintSystem::make(int n) {
  if (n > kMaxScanNodes) throw std::invalid_argument("constraint system limited to n <= 22");
  ConstraintSystem cs;
  cs.n = n;
  const uint32_t full = (n >= 32) ? ~0u : ((1u << n) - 1);
  for (uint32_t s = 1; s < full; ++s) {
    const int sz = __builtin_popcount(s);
    if (sz >= 2 && sz <= n - 2) cs.sec_masks.push_back(s);
  }
  return cs;
}

std::string ConstraintSystem::row_name(int row) const {
  if (row < n) return "indeg(" + std::to_string(row) + ")";
  if (row < 2 * n) return "outdeg(" + std::to_string(row - n) + ")";
  return "sec(" + NodeSet{n, sec_masks[row - 2 * n]}.to_string() + ")";
}

Rat cut_value(const SolutionPoint& x, const NodeSet& s) {
  if (s.n != x.n) throw std::invalid_argument("node set size mismatch");
  if (!s.proper()) throw std::invalid_argument("cut of empty or full node set");
  Rat total = 0;
  for (int i = 0; i < x.n; ++i) {
    if (!s.contains(i)) continue;
    for (int j = 0; j < x.n; ++j) {
      if (i == j || s.contains(j)) continue;
      const Rat& q = x.at(i, j);
      if (q != 0) total += q;
    }
  }
  return total;
}

namespace {

// Visits every proper nonempty subset with its exact cut value, updating the
// value incrementally along a Gray-code walk (O(n) work per subset).
template <class F>
void scan_cuts(const SolutionPoint& x, F&& visit) {
  const int n = x.n;
  if (n > kMaxScanNodes) throw std::invalid_argument("subset scan limited to n <= 22");
  const uint64_t total = 1ull << n;
  const uint32_t full = static_cast<uint32_t>(total - 1);
  uint32_t cur = 0;
  Rat cut = 0;
  for (uint64_t k = 1; k < total; ++k) {
    const int v = __builtin_ctzll(k);
    if (!((cur >> v) & 1u)) {
      // v joins S: gains arcs v->outside, loses arcs inside->v
      for (int j = 0; j < n; ++j) {
        if (j == v) continue;
        if ((cur >> j) & 1u) {
          const Rat& in = x.at(j, v);
          if (in != 0) cut -= in;
        } else {
          const Rat& out = x.at(v, j);
          if (out != 0) cut += out;
        }
      }
      cur |= 1u << v;
    } else {
      cur &= ~(1u << v);
      // v leaves S: loses arcs v->outside, gains arcs inside->v
      for (int j = 0; j < n; ++j) {
        if (j == v) continue;
        if ((cur >> j) & 1u) {
          const Rat& in = x.at(j, v);
          if (in != 0) cut += in;
        } else {
          const Rat& out = x.at(v, j);
          if (out != 0) cut -= out;
        }
      }
    }
    if (cur != 0 && cur != full) visit(cur, cut);
  }
}

}  // namespace

MemberResult is_member(const SolutionPoint& x) {
  const int n = x.n;
  for (const Rat& q : x.x)
    if (q < 0) return {false, "nonneg"};
  for (int i = 0; i < n; ++i) {
    Rat out = 0, in = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out += x.at(i, j);
      in += x.at(j, i);
    }
    if (out != 1) return {false, "outdeg(" + std::to_string(i) + ")"};
    if (in != 1) return {false, "indeg(" + std::to_string(i) + ")"};
  }
  uint32_t worst = 0;
  scan_cuts(x, [&](uint32_t mask, const Rat& cut) {
    const int sz = __builtin_popcount(mask);
    if (sz < 2 || sz > n - 2) return;
    if (cut < 1 && (worst == 0 || mask < worst)) worst = mask;
  });
  if (worst != 0) return {false, "sec(" + NodeSet{n, worst}.to_string() + ")"};
  return {true, ""};
}

std::vector<NodeSet> tight_sets(const SolutionPoint& x) {
  std::vector<uint32_t> masks;
  scan_cuts(x, [&](uint32_t mask, const Rat& cut) {
    const int sz = __builtin_popcount(mask);
    if (sz >= 2 && sz <= x.n - 2 && cut == 1) masks.push_back(mask);
  });
  std::sort(masks.begin(), masks.end());
  std::vector<NodeSet> out;
  out.reserve(masks.size());
  for (uint32_t m : masks) out.push_back({x.n, m});
  return out;
}

bool is_vertex(const SolutionPoint& x) {
  MemberResult mem = is_member(x);
  if (!mem) throw std::invalid_argument("is_vertex on non-member (" + mem.violated_row + ")");
  const int n = x.n;
  const ArcIndex arcs(n);
  // Unit rows for zero arcs knock their columns out; the remaining tight
  // rows only need to span the support columns.
  std::vector<int> support;
  for (int k = 0; k < arcs.m(); ++k)
    if (x.x[k] != 0) support.push_back(k);
  std::vector<std::vector<Int>> rows;
  auto add_degree_rows = [&]() {
    for (int i = 0; i < n; ++i) {
      std::vector<Int> out_row(support.size(), 0), in_row(support.size(), 0);
      for (size_t c = 0; c < support.size(); ++c) {
        auto [a, b] = arcs.endpoints(support[c]);
        if (a == i) out_row[c] = 1;
        if (b == i) in_row[c] = 1;
      }
      rows.push_back(std::move(in_row));
      rows.push_back(std::move(out_row));
    }
  };
  add_degree_rows();
  for (const NodeSet& s : tight_sets(x)) {
    std::vector<Int> row(support.size(), 0);
    for (size_t c = 0; c < support.size(); ++c) {
      auto [a, b] = arcs.endpoints(support[c]);
      if (s.contains(a) && !s.contains(b)) row[c] = 1;
    }
    rows.push_back(std::move(row));
  }
  return rank_int_rows(std::move(rows)) == static_cast<int>(support.size());
}

std::map<Rat, int> component_histogram(const SolutionPoint& x) {
  std::map<Rat, int> h;
  for (const Rat& q : x.x) ++h[q];
  return h;
}

SolutionPoint tour_point(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  std::vector<Rat> entries(static_cast<size_t>(n) * (n - 1), Rat(0));
  SolutionPoint p;
  p.n = n;
  p.x = std::move(entries);
  for (int i = 0; i < n; ++i) p.at(order[i], order[(i + 1) % n]) = 1;
  return p;
}

SolutionPoint standard_cycle(int n) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  return tour_point(order);
}

}  // namespace asep
