#pragma once

#include <vector>

#include "asep/rational.hpp"

namespace asep {

// Dense rational matrix, row-major.
struct RatMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Rat> a;

  RatMatrix() = default;
  RatMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  Rat& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const Rat& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  static RatMatrix identity(int n);
};

// Exact rank via fraction-free (Bareiss) elimination; rows are scaled to
// integers first so all intermediate values stay integral.
int rank(const RatMatrix& m);

// Rank of a 0/±1-style integer row system without materializing a RatMatrix.
int rank_int_rows(std::vector<std::vector<Int>> rows);

}  // namespace asep
