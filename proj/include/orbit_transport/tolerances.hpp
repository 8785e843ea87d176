// Central table of numeric tolerances. Every check in the library and the
// selftest harness pins its threshold here so CLI overrides reach one place.
#pragma once

#include <map>
#include <string>

#include "orbit_transport/errors.hpp"

namespace ot {

struct tolerances {
  // measures
  double weight_sum = 1e-12;          // |sum(weights) - 1|
  double merge_radius = 1e-9;         // atom coincidence radius (absolute)
  // transport
  double marginal = 1e-9;             // plan row/col sums vs marginals
  double plan_cost_rel = 1e-9;        // reported distance vs plan cost functional
  double metric_axioms = 1e-9;
  double monotonicity = 1e-9;         // W_p <= W_p' + tol for p <= p'
  double convexity = 1e-9;            // mixture convexity of W_p^p
  double vertex_assignment = 1e-9;    // LP value vs assignment on uniform atoms
  double brute_force = 1e-10;         // assignment vs exhaustive enumeration
  double winf_p64_rel = 0.02;         // W_64 vs W_inf on diameter<=2 supports
  // line & circle
  double quantile_vs_lp = 1e-9;
  double circle_vs_brute = 1e-9;
  double sandwich = 1e-9;             // chordal <= intrinsic <= (pi/2) chordal
  double rotation_invariance = 1e-9;
  double cut_search_gap = 1e-7;       // LP beating every shift flags a search gap
  double off_circle_rel = 1e-6;       // projection displacement, relative to radius
  // matrices
  double normality_rel = 1e-8;        // ||xx*-x*x||_F <= tol*(1+||x||_F^2)
  double unitarity = 1e-10;           // ||u*u-1||_F <= tol*n
  double schatten_triangle = 1e-9;
  double schatten_monotone = 1e-9;
  double hw_gap = 1e-8;               // W_2 <= ||x-y||_{2,tau} + tol
  double spectral_conjugation = 1e-8; // W_1 tolerance under unitary conjugation
  // orbit
  double certificate_rel = 1e-6;      // upper - lower <= tol*(1+lower)
  double certificate_bracket = 1e-7;  // lower <= optimized <= upper slack
  double witness_objective = 1e-9;    // stored witness reproduces the value
  double grad_norm_stop = 1e-8;
  double riemannian_upper = 1e-7;     // optimized <= assignment upper + tol
  double unitary_invariance = 1e-7;
  double translation_invariance = 1e-8;
  double weyl_rel = 1e-3;             // sorted/circular matching vs estimate
  double gap_ratio = 1e-3;            // delta/estimate > 1 + tol marks a candidate
  double gap_invariant = 1e-6;        // estimate <= delta + tol, always
  // geodesics
  double geodesic_speed = 1e-7;
  double geodesic_endpoint = 1e-9;
  double orbit_geodesic = 1e-6;
  double interpolant_mass = 1e-12;

  double& by_name(const std::string& key);
  const double& by_name(const std::string& key) const {
    return const_cast<tolerances*>(this)->by_name(key);
  }
  static const std::map<std::string, double tolerances::*>& table();
};

inline const std::map<std::string, double tolerances::*>& tolerances::table() {
  static const std::map<std::string, double tolerances::*> t = {
      {"weight_sum", &tolerances::weight_sum},
      {"merge_radius", &tolerances::merge_radius},
      {"marginal", &tolerances::marginal},
      {"plan_cost_rel", &tolerances::plan_cost_rel},
      {"metric_axioms", &tolerances::metric_axioms},
      {"monotonicity", &tolerances::monotonicity},
      {"convexity", &tolerances::convexity},
      {"vertex_assignment", &tolerances::vertex_assignment},
      {"brute_force", &tolerances::brute_force},
      {"winf_p64_rel", &tolerances::winf_p64_rel},
      {"quantile_vs_lp", &tolerances::quantile_vs_lp},
      {"circle_vs_brute", &tolerances::circle_vs_brute},
      {"sandwich", &tolerances::sandwich},
      {"rotation_invariance", &tolerances::rotation_invariance},
      {"cut_search_gap", &tolerances::cut_search_gap},
      {"off_circle_rel", &tolerances::off_circle_rel},
      {"normality_rel", &tolerances::normality_rel},
      {"unitarity", &tolerances::unitarity},
      {"schatten_triangle", &tolerances::schatten_triangle},
      {"schatten_monotone", &tolerances::schatten_monotone},
      {"hw_gap", &tolerances::hw_gap},
      {"spectral_conjugation", &tolerances::spectral_conjugation},
      {"certificate_rel", &tolerances::certificate_rel},
      {"certificate_bracket", &tolerances::certificate_bracket},
      {"witness_objective", &tolerances::witness_objective},
      {"grad_norm_stop", &tolerances::grad_norm_stop},
      {"riemannian_upper", &tolerances::riemannian_upper},
      {"unitary_invariance", &tolerances::unitary_invariance},
      {"translation_invariance", &tolerances::translation_invariance},
      {"weyl_rel", &tolerances::weyl_rel},
      {"gap_ratio", &tolerances::gap_ratio},
      {"gap_invariant", &tolerances::gap_invariant},
      {"geodesic_speed", &tolerances::geodesic_speed},
      {"geodesic_endpoint", &tolerances::geodesic_endpoint},
      {"orbit_geodesic", &tolerances::orbit_geodesic},
      {"interpolant_mass", &tolerances::interpolant_mass},
  };
  return t;
}

inline double& tolerances::by_name(const std::string& key) {
  auto it = table().find(key);
  require(it != table().end(), errc::invalid_argument, "unknown tolerance '" + key + "'");
  return this->*(it->second);
}

inline const tolerances& default_tolerances() {
  static const tolerances t{};
  return t;
}

}  // namespace ot
