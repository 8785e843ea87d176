// p-Wasserstein distances between discrete measures: minimum-cost coupling
// for finite p, bottleneck matching for p = inf, the permutation
// specialization for uniform atoms, and exhaustive enumeration as an oracle.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "orbit_transport/assignment.hpp"
#include "orbit_transport/errors.hpp"
#include "orbit_transport/measure.hpp"
#include "orbit_transport/mincostflow.hpp"
#include "orbit_transport/plan.hpp"

namespace ot {

// Exponents above this are clamped; rho^128 stays inside double range on any
// support of diameter below ~200 once distances are normalized.
inline constexpr double kMaxFiniteP = 128.0;

using GroundMetric = std::function<double(const Point&, const Point&)>;

inline double euclidean_metric(const Point& a, const Point& b) { return dist(a, b); }

namespace detail {

inline void check_inputs(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(measure_valid(mu), errc::invalid_argument, "source measure violates its invariants");
  require(measure_valid(nu), errc::invalid_argument, "target measure violates its invariants");
}

inline std::vector<double> pairwise(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const GroundMetric& rho) {
  std::vector<double> d(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) d[i * nu.size() + j] = rho(mu.atoms[i], nu.atoms[j]);
  return d;
}

// (sum_ij pi_ij rho_ij^p)^(1/p) with the largest support distance factored out.
inline double cost_from_plan(const std::vector<double>& flow, const std::vector<double>& d,
                             double p) {
  double dmax = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k)
    if (flow[k] > kMassEps) dmax = std::max(dmax, d[k]);
  if (dmax == 0.0) return 0.0;
  if (std::isinf(p)) return dmax;
  double acc = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k)
    if (flow[k] > kMassEps) acc += flow[k] * std::pow(d[k] / dmax, p);
  return dmax * std::pow(acc, 1.0 / p);
}

}  // namespace detail

// Globally optimal W_p coupling for finite p >= 1 under an arbitrary ground
// metric. The returned plan is a vertex of the transport polytope.
inline TransportResult wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double p, const GroundMetric& rho = euclidean_metric) {
  require(std::isfinite(p) && p >= 1.0, errc::invalid_argument,
          "finite exponent p >= 1 required (use wasserstein_inf for p = inf)");
  detail::check_inputs(mu, nu);
  const double p_eff = std::min(p, kMaxFiniteP);
  const std::size_t m = mu.size(), n = nu.size();

  TransportResult out;
  out.p = p;
  if (m == 1 && n == 1) {
    out.plan = TransferencePlan::zero(1, 1);
    out.plan.at(0, 0) = 1.0;
    out.distance = rho(mu.atoms[0], nu.atoms[0]);
    return out;
  }

  std::vector<double> d = detail::pairwise(mu, nu, rho);
  const double dmax = *std::max_element(d.begin(), d.end());
  std::vector<double> costs(d.size(), 0.0);
  if (dmax > 0.0) {
    for (std::size_t k = 0; k < d.size(); ++k) costs[k] = std::pow(d[k] / dmax, p_eff);
  }

  std::vector<double> flow = detail::solve_transportation(costs, mu.weights, nu.weights);
  detail::cancel_support_cycles(flow, m, n, costs);

  out.plan.rows = m;
  out.plan.cols = n;
  out.plan.entries = std::move(flow);
  out.distance = detail::cost_from_plan(out.plan.entries, d, p_eff);
  return out;
}

// Bottleneck optimum: binary search over the sorted pairwise distances with a
// max-flow feasibility check at each threshold. The optimum is attained at a
// pairwise distance; ties resolve to the smallest feasible one.
inline TransportResult wasserstein_inf(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       const GroundMetric& rho = euclidean_metric) {
  detail::check_inputs(mu, nu);
  const std::size_t m = mu.size(), n = nu.size();

  TransportResult out;
  out.p = kInfiniteP;
  if (m == 1 && n == 1) {
    out.plan = TransferencePlan::zero(1, 1);
    out.plan.at(0, 0) = 1.0;
    out.distance = rho(mu.atoms[0], nu.atoms[0]);
    return out;
  }

  std::vector<double> d = detail::pairwise(mu, nu, rho);
  std::vector<double> levels(d);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const double total = 1.0;
  const double feas_tol = 1e-11;
  std::vector<char> allowed(m * n);
  std::vector<double> flow;
  auto feasible = [&](double r) {
    for (std::size_t k = 0; k < d.size(); ++k) allowed[k] = (d[k] <= r);
    double routed = detail::max_flow_thresholded(mu.weights, nu.weights, allowed, flow);
    return routed >= total - feas_tol;
  };

  std::size_t lo = 0, hi = levels.size() - 1;
  require(feasible(levels[hi]), errc::solver_failure,
          "full bipartite graph infeasible (marginals inconsistent)");
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  feasible(levels[lo]);  // recompute the witness flow at the optimum

  out.plan.rows = m;
  out.plan.cols = n;
  out.plan.entries = std::move(flow);
  out.distance = detail::cost_from_plan(out.plan.entries, d, kInfiniteP);
  return out;
}

inline TransportResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                   const GroundMetric& rho = euclidean_metric) {
  return std::isinf(p) ? wasserstein_inf(mu, nu, rho) : wasserstein_p(mu, nu, p, rho);
}

struct AssignmentResult {
  double distance = 0.0;
  std::vector<std::size_t> permutation;  // alpha[i] matched to beta[permutation[i]]
};

// W_p between uniform measures on two equal-length point lists, solved as a
// (bottleneck) assignment over the permutation group.
inline AssignmentResult assignment_wp(const std::vector<Point>& alpha,
                                      const std::vector<Point>& beta, double p,
                                      const GroundMetric& rho = euclidean_metric) {
  require(alpha.size() == beta.size(), errc::length_mismatch,
          "point lists must have equal length");
  require(!alpha.empty(), errc::length_mismatch, "point lists must be nonempty");
  require(p >= 1.0, errc::invalid_argument, "p must be >= 1");
  const std::size_t n = alpha.size();

  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = rho(alpha[i], beta[j]);

  AssignmentResult out;
  if (std::isinf(p)) {
    out.permutation = detail::bottleneck_assignment(d, n, &out.distance);
    return out;
  }

  const double p_eff = std::min(p, kMaxFiniteP);
  const double dmax = *std::max_element(d.begin(), d.end());
  std::vector<double> costs(n * n, 0.0);
  if (dmax > 0.0)
    for (std::size_t k = 0; k < n * n; ++k) costs[k] = std::pow(d[k] / dmax, p_eff);
  out.permutation = detail::min_cost_assignment(costs, n);

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += costs[i * n + out.permutation[i]];
  out.distance = (dmax > 0.0) ? dmax * std::pow(acc / static_cast<double>(n), 1.0 / p_eff) : 0.0;
  return out;
}

// Exhaustive minimum over all n! permutations; the independent oracle for
// assignment_wp and the uniform-atom specialisations.
inline AssignmentResult brute_force_wp(const std::vector<Point>& alpha,
                                       const std::vector<Point>& beta, double p,
                                       const GroundMetric& rho = euclidean_metric) {
  require(alpha.size() == beta.size(), errc::length_mismatch,
          "point lists must have equal length");
  require(!alpha.empty(), errc::length_mismatch, "point lists must be nonempty");
  const std::size_t n = alpha.size();
  require(n <= 9, errc::too_large, "exhaustive search limited to n <= 9");
  const double p_eff = std::isinf(p) ? p : std::min(p, kMaxFiniteP);

  std::vector<double> d(n * n);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = rho(alpha[i], beta[j]);
      dmax = std::max(dmax, d[i * n + j]);
    }

  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  AssignmentResult best;
  double best_key = std::numeric_limits<double>::infinity();
  do {
    double key;
    if (std::isinf(p_eff)) {
      key = 0.0;
      for (std::size_t i = 0; i < n; ++i) key = std::max(key, d[i * n + sigma[i]]);
    } else {
      key = 0.0;
      if (dmax > 0.0)
        for (std::size_t i = 0; i < n; ++i) key += std::pow(d[i * n + sigma[i]] / dmax, p_eff);
    }
    if (key < best_key) {
      best_key = key;
      best.permutation = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  if (std::isinf(p_eff)) {
    best.distance = best_key;
  } else {
    best.distance =
        (dmax > 0.0) ? dmax * std::pow(best_key / static_cast<double>(n), 1.0 / p_eff) : 0.0;
  }
  return best;
}

// Plan induced by a permutation on uniform atom lists (mass 1/n per pair).
inline TransferencePlan permutation_plan(const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  TransferencePlan plan = TransferencePlan::zero(n, n);
  for (std::size_t i = 0; i < n; ++i) plan.at(i, perm[i]) = 1.0 / static_cast<double>(n);
  return plan;
}

}  // namespace ot
