// Couplings between discrete measures and the values they certify.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "orbit_transport/errors.hpp"
#include "orbit_transport/measure.hpp"

namespace ot {

constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

// Nonnegative m x n coupling matrix. Row sums must match the source weights
// and column sums the target weights (within tolerance `marginal`).
struct TransferencePlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major, rows*cols

  double& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  static TransferencePlan zero(std::size_t m, std::size_t n) {
    TransferencePlan p;
    p.rows = m;
    p.cols = n;
    p.entries.assign(m * n, 0.0);
    return p;
  }

  std::vector<double> row_sums() const {
    std::vector<double> s(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) s[i] += at(i, j);
    return s;
  }

  std::vector<double> col_sums() const {
    std::vector<double> s(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) s[j] += at(i, j);
    return s;
  }

  std::size_t support_size(double mass_eps = 0.0) const {
    std::size_t k = 0;
    for (double e : entries) k += (e > mass_eps);
    return k;
  }
};

inline double marginal_violation(const TransferencePlan& plan, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu) {
  if (plan.rows != mu.size() || plan.cols != nu.size()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (double e : plan.entries) {
    if (e < 0.0) worst = std::max(worst, -e);
  }
  auto rs = plan.row_sums();
  auto cs = plan.col_sums();
  for (std::size_t i = 0; i < plan.rows; ++i) worst = std::max(worst, std::abs(rs[i] - mu.weights[i]));
  for (std::size_t j = 0; j < plan.cols; ++j) worst = std::max(worst, std::abs(cs[j] - nu.weights[j]));
  return worst;
}

inline bool plan_valid(const TransferencePlan& plan, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, const tolerances& tol = default_tolerances()) {
  return marginal_violation(plan, mu, nu) <= tol.marginal;
}

// Cost functional of a plan under the measures' ground distances.
// Finite p: (sum pi_ij rho_ij^p)^(1/p), evaluated with the largest distance
// factored out to keep powers in range; exponents are capped at 128 like the
// solver costs. p = inf: largest distance carrying positive mass.
inline double plan_cost(const TransferencePlan& plan, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, double p, double mass_eps = 1e-15) {
  double dmax = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i)
    for (std::size_t j = 0; j < plan.cols; ++j)
      if (plan.at(i, j) > mass_eps) dmax = std::max(dmax, dist(mu.atoms[i], nu.atoms[j]));
  if (dmax == 0.0) return 0.0;
  if (std::isinf(p)) return dmax;
  const double p_eff = std::min(p, 128.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i)
    for (std::size_t j = 0; j < plan.cols; ++j) {
      double mass = plan.at(i, j);
      if (mass > mass_eps) acc += mass * std::pow(dist(mu.atoms[i], nu.atoms[j]) / dmax, p_eff);
    }
  return dmax * std::pow(acc, 1.0 / p_eff);
}

struct TransportResult {
  double distance = 0.0;
  TransferencePlan plan;
  double p = 2.0;  // exponent, kInfiniteP for the bottleneck case
};

}  // namespace ot
