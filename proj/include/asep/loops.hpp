#pragma once

#include "asep/polytope.hpp"

namespace asep {

// Arc pair with x[v1][v2] = lambda and x[v2][v1] = 1 - lambda, both
// fractional; reported once with v1 < v2.
struct LambdaLoop {
  int v1 = 0;
  int v2 = 0;
  Rat lambda;
};

struct CollapseSpec {
  NodeSet set;  // must be tight in the input point
  int target = 0;  // output label of the merged node
};

std::vector<LambdaLoop> detect_loops(const SolutionPoint& x);

// Splices a new node (always labeled n) into the loop; the result is a point
// on n+1 nodes and, for vertex inputs, a vertex again. The vertex property is
// asserted outright up to 10 nodes.
SolutionPoint break_loop(const SolutionPoint& x, const LambdaLoop& loop, int new_node);

struct CollapseResult {
  SolutionPoint point;
  bool vertex = false;          // collapsing need not preserve vertexhood
  std::vector<int> node_map;    // original node -> output label
};

CollapseResult collapse(const SolutionPoint& x, const CollapseSpec& spec);

// One loop-break child per detected loop, new node labeled n.
std::vector<SolutionPoint> extend_all(const SolutionPoint& x);

}  // namespace asep
