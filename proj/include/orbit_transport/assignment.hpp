// Linear and bottleneck assignment on dense cost matrices.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "orbit_transport/errors.hpp"

namespace ot::detail {

// Kuhn-Munkres via shortest augmenting paths (the classic O(n^3) scheme with
// dual potentials). perm[i] is the column matched to row i.
inline std::vector<std::size_t> min_cost_assignment(const std::vector<double>& cost,
                                                    std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> perm(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) perm[p[j] - 1] = j - 1;
  return perm;
}

// Kuhn's augmenting-path matching restricted to arcs with cost <= threshold.
inline bool perfect_matching_under(const std::vector<double>& cost, std::size_t n,
                                   double threshold, std::vector<int>& match_col) {
  match_col.assign(n, -1);
  std::vector<int> match_row(n, -1);
  std::vector<char> seen(n);
  std::function<bool(std::size_t)> try_row = [&](std::size_t i) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (seen[j] || cost[i * n + j] > threshold) continue;
      seen[j] = 1;
      if (match_col[j] < 0 || try_row(static_cast<std::size_t>(match_col[j]))) {
        match_col[j] = static_cast<int>(i);
        match_row[i] = static_cast<int>(j);
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!try_row(i)) return false;
  }
  return true;
}

// Minimizes the largest matched cost. Binary search over the sorted distinct
// costs; the optimum is always one of them.
inline std::vector<std::size_t> bottleneck_assignment(const std::vector<double>& cost,
                                                      std::size_t n, double* value = nullptr) {
  std::vector<double> levels(cost);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<int> match_col;
  std::size_t lo = 0, hi = levels.size() - 1;
  // the full matrix always admits a perfect matching at the largest level
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (perfect_matching_under(cost, n, levels[mid], match_col)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  perfect_matching_under(cost, n, levels[lo], match_col);
  std::vector<std::size_t> perm(n, 0);
  for (std::size_t j = 0; j < n; ++j) perm[static_cast<std::size_t>(match_col[j])] = j;
  if (value) *value = levels[lo];
  return perm;
}

}  // namespace ot::detail
