#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvlab {

struct Assignment {
  std::vector<int> column_of_row;  ///< row i is matched to column column_of_row[i]
  double cost = 0.0;               ///< sum of matched entries, accumulated in row order
};

/// Exact minimum-cost perfect matching on a dense n x n row-major cost matrix
/// (Kuhn-Munkres with potentials, O(n^3)).
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace mvlab
