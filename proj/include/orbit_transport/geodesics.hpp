// Displacement interpolation along optimal couplings and the constant-speed
// geodesic checks, including the diagonal-representative reading for unitary
// orbits.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "orbit_transport/errors.hpp"
#include "orbit_transport/matrices.hpp"
#include "orbit_transport/measure.hpp"
#include "orbit_transport/plan.hpp"
#include "orbit_transport/transport.hpp"

namespace ot {

// One atom per positive plan entry at (1-t)*w_i + t*z_j; coincident atoms
// merged. The plan must couple mu with nu.
inline DiscreteMeasure displacement_interpolation(const DiscreteMeasure& mu,
                                                  const DiscreteMeasure& nu,
                                                  const TransferencePlan& plan, double t,
                                                  const tolerances& tol = default_tolerances()) {
  require(t >= 0.0 && t <= 1.0, errc::invalid_argument, "time must lie in [0, 1]");
  require(marginal_violation(plan, mu, nu) <= tol.marginal, errc::bad_plan,
          "plan marginals do not match the endpoint measures");

  DiscreteMeasure raw;
  for (std::size_t i = 0; i < plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.cols; ++j) {
      double mass = plan.at(i, j);
      if (mass <= detail::kMassEps) continue;
      raw.atoms.emplace_back((1.0 - t) * mu.atoms[i].re + t * nu.atoms[j].re,
                             (1.0 - t) * mu.atoms[i].im + t * nu.atoms[j].im);
      raw.weights.push_back(mass);
    }
  }
  return merge_atoms(raw, tol.merge_radius);
}

struct GeodesicPath {
  DiscreteMeasure mu0;
  DiscreteMeasure mu1;
  TransferencePlan plan;  // optimal p = 2 coupling of the endpoints
  std::vector<std::pair<double, DiscreteMeasure>> samples;
};

struct GeodesicPairCheck {
  double s = 0.0;
  double t = 0.0;
  double expected = 0.0;  // (t - s) * W_2(mu0, mu1)
  double actual = 0.0;    // W_2(mu_s, mu_t)
  bool pass = false;
};

struct GeodesicReport {
  GeodesicPath path;
  double base_distance = 0.0;
  std::vector<GeodesicPairCheck> checks;
  double worst_violation = 0.0;
  bool pass = false;
};

// Builds the displacement interpolation at the given times and verifies the
// constant-speed identity W_2(mu_s, mu_t) = (t-s) W_2(mu_0, mu_1) on every
// sampled pair.
inline GeodesicReport verify_geodesic(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                      const std::vector<double>& ts,
                                      const tolerances& tol = default_tolerances()) {
  require(!ts.empty() && std::is_sorted(ts.begin(), ts.end()), errc::invalid_argument,
          "sample times must be sorted");
  require(std::abs(ts.front()) <= 1e-15 && std::abs(ts.back() - 1.0) <= 1e-15,
          errc::invalid_argument, "sample times must contain 0 and 1");

  GeodesicReport report;
  auto base = wasserstein_p(mu0, mu1, 2);
  report.base_distance = base.distance;
  report.path.mu0 = mu0;
  report.path.mu1 = mu1;
  report.path.plan = base.plan;
  for (double t : ts) {
    report.path.samples.emplace_back(t,
                                     displacement_interpolation(mu0, mu1, base.plan, t, tol));
  }

  report.worst_violation = 0.0;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      GeodesicPairCheck check;
      check.s = ts[a];
      check.t = ts[b];
      check.expected = (ts[b] - ts[a]) * base.distance;
      check.actual = wasserstein_p(report.path.samples[a].second,
                                   report.path.samples[b].second, 2)
                         .distance;
      double violation = std::abs(check.actual - check.expected);
      check.pass = violation <= tol.geodesic_speed;
      report.worst_violation = std::max(report.worst_violation, violation);
      report.checks.push_back(check);
    }
  }
  report.pass = report.worst_violation <= tol.geodesic_speed;
  return report;
}

// Diagonal representatives of the orbit geodesic: eigenvalues of the
// endpoints matched by the optimal p = 2 assignment and interpolated linearly.
inline std::vector<NormalMatrix> orbit_geodesic_matrices(const NormalMatrix& x,
                                                         const NormalMatrix& y,
                                                         const std::vector<double>& ts) {
  require(x.dim() == y.dim(), errc::dim_mismatch, "matrices must share a dimension");
  const std::size_t n = x.dim();
  auto alpha = eigenvalues_of(x);
  auto beta = eigenvalues_of(y);

  std::vector<Point> pa, pb;
  for (const Cx& z : alpha) pa.emplace_back(z);
  for (const Cx& z : beta) pb.emplace_back(z);
  auto matching = assignment_wp(pa, pb, 2);

  std::vector<NormalMatrix> out;
  out.reserve(ts.size());
  for (double t : ts) {
    require(t >= 0.0 && t <= 1.0, errc::invalid_argument, "time must lie in [0, 1]");
    CMat d = CMat::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
      d(i, i) = (1.0 - t) * alpha[i] + t * beta[matching.permutation[i]];
    out.push_back(make_normal(std::move(d)));
  }
  return out;
}

// Grid-occupancy diagnostic for interpolant supports: the fraction of cells
// of the endpoint bounding box containing at least one atom, per sample. A
// displacement interpolation of fully supported discretizations may thin out
// in the middle; this is recorded, never asserted.
struct SupportCoverage {
  std::size_t grid = 0;
  std::vector<std::pair<double, double>> occupancy;  // (t, fraction)
};

inline SupportCoverage support_coverage(const GeodesicPath& path, std::size_t grid = 8) {
  SupportCoverage cov;
  cov.grid = grid;
  double lo_re = 1e300, hi_re = -1e300, lo_im = 1e300, hi_im = -1e300;
  for (const auto* m : {&path.mu0, &path.mu1}) {
    for (const Point& a : m->atoms) {
      lo_re = std::min(lo_re, a.re);
      hi_re = std::max(hi_re, a.re);
      lo_im = std::min(lo_im, a.im);
      hi_im = std::max(hi_im, a.im);
    }
  }
  double w = std::max(hi_re - lo_re, 1e-12), h = std::max(hi_im - lo_im, 1e-12);
  for (const auto& [t, m] : path.samples) {
    std::vector<char> cell(grid * grid, 0);
    for (const Point& a : m.atoms) {
      auto gx = static_cast<std::size_t>(
          std::clamp((a.re - lo_re) / w * static_cast<double>(grid), 0.0,
                     static_cast<double>(grid) - 1.0));
      auto gy = static_cast<std::size_t>(
          std::clamp((a.im - lo_im) / h * static_cast<double>(grid), 0.0,
                     static_cast<double>(grid) - 1.0));
      cell[gy * grid + gx] = 1;
    }
    std::size_t occupied = 0;
    for (char c : cell) occupied += c;
    cov.occupancy.emplace_back(t, static_cast<double>(occupied) /
                                      static_cast<double>(grid * grid));
  }
  return cov;
}

}  // namespace ot
