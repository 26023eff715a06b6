#include "geoknit/assign/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoknit/error.hpp"

namespace geoknit {

namespace {

// Shortest augmenting path with potentials; requires rows <= cols.
// Returns col assigned to each row.
std::vector<int> solve_wide(const CostMatrix& a) {
  const std::size_t n = a.rows, m = a.cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) col_of[p[j] - 1] = static_cast<int>(j - 1);
  return col_of;
}

// Optimal pairs of any shape.
std::vector<std::pair<int, int>> solve_any(const CostMatrix& a) {
  std::vector<std::pair<int, int>> pairs;
  if (a.rows == 0 || a.cols == 0) return pairs;
  if (a.rows <= a.cols) {
    const auto col = solve_wide(a);
    for (std::size_t r = 0; r < a.rows; ++r) pairs.emplace_back(static_cast<int>(r), col[r]);
  } else {
    CostMatrix t(a.cols, a.rows);
    for (std::size_t r = 0; r < a.rows; ++r)
      for (std::size_t c = 0; c < a.cols; ++c) t(c, r) = a(r, c);
    const auto row = solve_wide(t);
    for (std::size_t c = 0; c < a.cols; ++c) pairs.emplace_back(row[c], static_cast<int>(c));
    std::sort(pairs.begin(), pairs.end());
  }
  return pairs;
}

double cost_of(const CostMatrix& a, const std::vector<std::pair<int, int>>& pairs) {
  double s = 0.0;
  for (auto [r, c] : pairs) s += a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  return s;
}

// Optimal cost of matching exactly `need` pairs among the free rows (index >=
// first_row) and free cols; +inf when impossible.
double sub_optimum(const CostMatrix& a, std::size_t first_row, const std::vector<char>& col_used, std::size_t need) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < a.cols; ++c)
    if (!col_used[c]) cols.push_back(c);
  const std::size_t rows = a.rows - first_row;
  if (std::min(rows, cols.size()) != need) return std::numeric_limits<double>::infinity();
  if (need == 0) return 0.0;
  CostMatrix sub(rows, cols.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols.size(); ++k) sub(r, k) = a(first_row + r, cols[k]);
  return cost_of(sub, solve_any(sub));
}

}  // namespace

Assignment hungarian(const CostMatrix& costs, TieBreak ties) {
  if (costs.rows == 0 || costs.cols == 0 || costs.data.size() != costs.rows * costs.cols)
    throw Error("invalid-cost", "cost matrix must be non-empty");
  for (double x : costs.data)
    if (!std::isfinite(x)) throw Error("invalid-cost", "cost matrix has a non-finite entry");

  Assignment out;
  out.pairs = solve_any(costs);
  out.total_cost = cost_of(costs, out.pairs);
  if (ties == TieBreak::any) return out;

  // Fix rows in order to the smallest column that still allows an optimal
  // completion; leave a row unmatched only when no column does.
  const double opt = out.total_cost;
  double scale = 1.0;
  for (double x : costs.data) scale = std::max(scale, std::abs(x));
  const double tol = 1e-12 * scale * static_cast<double>(costs.rows + costs.cols);
  const std::size_t size = std::min(costs.rows, costs.cols);
  std::vector<char> col_used(costs.cols, 0);
  std::vector<std::pair<int, int>> chosen;
  double fixed = 0.0;
  for (std::size_t r = 0; r < costs.rows && chosen.size() < size; ++r) {
    bool placed = false;
    for (std::size_t c = 0; c < costs.cols && !placed; ++c) {
      if (col_used[c]) continue;
      col_used[c] = 1;
      const double rest = sub_optimum(costs, r + 1, col_used, size - chosen.size() - 1);
      if (fixed + costs(r, c) + rest <= opt + tol) {
        chosen.emplace_back(static_cast<int>(r), static_cast<int>(c));
        fixed += costs(r, c);
        placed = true;
      } else {
        col_used[c] = 0;
      }
    }
  }
  if (chosen.size() == size) {
    out.pairs = std::move(chosen);
    out.total_cost = cost_of(costs, out.pairs);
  }
  return out;
}

}  // namespace geoknit
