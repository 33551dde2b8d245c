#include "mvlab/assignment.hpp"

#include <limits>

#include "mvlab/error.hpp"

namespace mvlab {

Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw DomainError("assignment cost matrix must be n x n");
  Assignment result;
  if (n == 0) return result;

  // 1-based shortest augmenting path formulation; column 0 is a sentinel.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - row_pot[i0] - col_pot[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[row_of_col[j]] += delta;
          col_pot[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  result.column_of_row.assign(n, -1);
  for (std::size_t j = 1; j <= n; ++j) result.column_of_row[row_of_col[j] - 1] = int(j - 1);
  for (std::size_t i = 0; i < n; ++i) result.cost += cost[i * n + std::size_t(result.column_of_row[i])];
  return result;
}

}  // namespace mvlab
