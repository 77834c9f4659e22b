#include "asep/loops.hpp"

#include <algorithm>
#include <stdexcept>

namespace asep {

std::vector<LambdaLoop> detect_loops(const SolutionPoint& x) {
  std::vector<LambdaLoop> loops;
  for (int v1 = 0; v1 < x.n; ++v1)
    for (int v2 = v1 + 1; v2 < x.n; ++v2) {
      const Rat& a = x.at(v1, v2);
      const Rat& b = x.at(v2, v1);
      if (a > 0 && a < 1 && a + b == 1) loops.push_back({v1, v2, a});
    }
  return loops;
}

SolutionPoint break_loop(const SolutionPoint& x, const LambdaLoop& loop, int new_node) {
  if (new_node != x.n)
    throw std::invalid_argument("new node must be labeled n (append)");
  const int v1 = loop.v1, v2 = loop.v2;
  if (v1 < 0 || v2 < 0 || v1 >= x.n || v2 >= x.n || v1 == v2)
    throw std::invalid_argument("bad loop nodes");
  if (x.at(v1, v2) != loop.lambda || x.at(v2, v1) != 1 - loop.lambda ||
      loop.lambda <= 0 || loop.lambda >= 1)
    throw std::invalid_argument("point does not contain the given loop");

  const int n1 = x.n + 1;
  SolutionPoint y;
  y.n = n1;
  y.x.assign(static_cast<size_t>(n1) * (n1 - 1), Rat(0));
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      if (i == j) continue;
      y.at(i, j) = x.at(i, j);
    }
  const int v3 = new_node;
  y.at(v1, v2) = 0;
  y.at(v2, v1) = 0;
  y.at(v1, v3) = loop.lambda;
  y.at(v3, v2) = loop.lambda;
  y.at(v3, v1) = 1 - loop.lambda;
  y.at(v2, v3) = 1 - loop.lambda;
  // every other arc touching v3 stays zero

  if (n1 <= 10 && !is_vertex(y))
    throw std::logic_error("loop breaking failed to produce a vertex");
  return y;
}

CollapseResult collapse(const SolutionPoint& x, const CollapseSpec& spec) {
  if (spec.set.n != x.n) throw std::invalid_argument("collapse set size mismatch");
  const int sz = spec.set.size();
  if (sz < 2 || sz > x.n - 2) throw std::invalid_argument("collapse set must have 2 <= |S| <= n-2");
  if (cut_value(x, spec.set) != 1) throw std::invalid_argument("collapse set is not tight");

  const int n_out = x.n - sz + 1;
  if (spec.target < 0 || spec.target >= n_out)
    throw std::invalid_argument("collapse target label out of range");

  // survivors keep their relative order around the merged label
  std::vector<int> node_map(x.n, -1);
  {
    int next = 0;
    for (int v = 0; v < x.n; ++v) {
      if (spec.set.contains(v)) {
        node_map[v] = spec.target;
        continue;
      }
      if (next == spec.target) ++next;
      node_map[v] = next++;
    }
  }

  SolutionPoint y;
  y.n = n_out;
  y.x.assign(static_cast<size_t>(n_out) * (n_out - 1), Rat(0));
  for (int i = 0; i < x.n; ++i) {
    if (spec.set.contains(i)) continue;
    for (int j = 0; j < x.n; ++j) {
      if (i == j || spec.set.contains(j)) continue;
      y.at(node_map[i], node_map[j]) += x.at(i, j);
    }
    Rat into_set = 0, from_set = 0;
    for (int s = 0; s < x.n; ++s) {
      if (!spec.set.contains(s)) continue;
      into_set += x.at(i, s);
      from_set += x.at(s, i);
    }
    if (into_set != 0) y.at(node_map[i], spec.target) = into_set;
    if (from_set != 0) y.at(spec.target, node_map[i]) = from_set;
  }

  MemberResult mem = is_member(y);
  if (!mem) throw std::logic_error("collapse of a tight set left the polytope: " + mem.violated_row);
  return {y, is_vertex(y), node_map};
}

std::vector<SolutionPoint> extend_all(const SolutionPoint& x) {
  std::vector<SolutionPoint> out;
  for (const LambdaLoop& loop : detect_loops(x)) out.push_back(break_loop(x, loop, x.n));
  return out;
}

}  // namespace asep
