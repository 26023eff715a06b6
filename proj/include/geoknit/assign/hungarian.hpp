#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace geoknit {

/// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
};

enum class TieBreak {
  lexicographic,  // smallest sorted pair list among optimal matchings
  any,            // whatever the augmenting-path solver returns
};

/// Minimum-cost matching of size min(rows, cols). Throws Error "invalid-cost"
/// on non-finite entries or an empty matrix.
Assignment hungarian(const CostMatrix& costs, TieBreak ties = TieBreak::lexicographic);

}  // namespace geoknit
