#include "asep/matrix.hpp"

namespace asep {

RatMatrix RatMatrix::identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

int rank_int_rows(std::vector<std::vector<Int>> rows) {
  const int nr = static_cast<int>(rows.size());
  if (nr == 0) return 0;
  const int nc = static_cast<int>(rows[0].size());
  // Bareiss with column skipping: entries remain determinants of minors of
  // the original matrix, so the division by the previous pivot is exact.
  Int prev = 1;
  int r = 0;
  for (int c = 0; c < nc && r < nr; ++c) {
    int piv = -1;
    for (int i = r; i < nr; ++i) {
      if (rows[i][c] != 0) { piv = i; break; }
    }
    if (piv < 0) continue;
    if (piv != r) std::swap(rows[piv], rows[r]);
    for (int i = r + 1; i < nr; ++i) {
      for (int j = c + 1; j < nc; ++j)
        rows[i][j] = (rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]) / prev;
      rows[i][c] = 0;
    }
    prev = rows[r][c];
    ++r;
  }
  return r;
}

int rank(const RatMatrix& m) {
  std::vector<std::vector<Int>> rows(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    Int l = 1;
    for (int j = 0; j < m.cols; ++j) l = int_lcm(l, denom(m.at(i, j)));
    rows[i].resize(m.cols);
    for (int j = 0; j < m.cols; ++j) {
      const Rat& q = m.at(i, j);
      rows[i][j] = numer(q) * (l / denom(q));
    }
  }
  return rank_int_rows(std::move(rows));
}

}  // namespace asep
