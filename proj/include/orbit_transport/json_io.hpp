// JSON encodings for measures, plans, matrices, certificates, geodesic paths
// and gap reports. Complex numbers are [re, im] pairs throughout; the
// exponent p serializes as a number, or the string "inf" for the bottleneck
// case. Insertion-ordered objects keep emitted reports byte-stable.
#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "orbit_transport/errors.hpp"
#include "orbit_transport/geodesics.hpp"
#include "orbit_transport/matrices.hpp"
#include "orbit_transport/measure.hpp"
#include "orbit_transport/orbit.hpp"
#include "orbit_transport/plan.hpp"

namespace ot {

using json = nlohmann::ordered_json;

inline json p_to_json(double p) {
  if (std::isinf(p)) return json("inf");
  return json(p);
}

inline double p_from_json(const json& j) {
  if (j.is_string()) {
    require(j.get<std::string>() == "inf", errc::invalid_argument,
            "exponent must be a number or \"inf\"");
    return kInfiniteP;
  }
  require(j.is_number(), errc::invalid_argument, "exponent must be a number or \"inf\"");
  double p = j.get<double>();
  require(std::isfinite(p) && p >= 1.0, errc::invalid_argument, "exponent must be >= 1");
  return p;
}

inline double finite_number(const json& j, const char* what) {
  require(j.is_number(), errc::non_finite, std::string(what) + " must be a number");
  double v = j.get<double>();
  require(std::isfinite(v), errc::non_finite, std::string(what) + " must be finite");
  return v;
}

// {"atoms": [[re, im], ...], "weights": [w, ...]}
inline json measure_to_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (const Point& a : m.atoms) atoms.push_back({a.re, a.im});
  json weights = json::array();
  for (double w : m.weights) weights.push_back(w);
  return json{{"atoms", atoms}, {"weights", weights}};
}

inline DiscreteMeasure measure_from_json(const json& j) {
  require(j.is_object() && j.contains("atoms") && j.contains("weights"), errc::invalid_argument,
          "measure JSON needs \"atoms\" and \"weights\"");
  const json& atoms = j.at("atoms");
  const json& weights = j.at("weights");
  require(atoms.is_array() && weights.is_array(), errc::invalid_argument,
          "\"atoms\" and \"weights\" must be arrays");
  require(atoms.size() == weights.size(), errc::length_mismatch,
          "atom and weight lists differ in length");
  std::vector<Point> pts;
  std::vector<double> ws;
  for (const json& a : atoms) {
    require(a.is_array() && a.size() == 2, errc::invalid_argument,
            "each atom must be an [re, im] pair");
    pts.emplace_back(finite_number(a[0], "atom coordinate"),
                     finite_number(a[1], "atom coordinate"));
  }
  for (const json& w : weights) ws.push_back(finite_number(w, "weight"));
  return make_measure(std::move(pts), std::move(ws));
}

// {"rows": m, "cols": n, "entries": [[...], ...], "distance": d, "p": p}
inline json plan_to_json(const TransportResult& result) {
  json rows = json::array();
  for (std::size_t i = 0; i < result.plan.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < result.plan.cols; ++j) row.push_back(result.plan.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", result.plan.rows},
              {"cols", result.plan.cols},
              {"entries", std::move(rows)},
              {"distance", result.distance},
              {"p", p_to_json(result.p)}};
}

inline TransportResult plan_from_json(const json& j) {
  require(j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("entries"),
          errc::invalid_argument, "plan JSON needs \"rows\", \"cols\", \"entries\"");
  TransportResult out;
  std::size_t m = j.at("rows").get<std::size_t>();
  std::size_t n = j.at("cols").get<std::size_t>();
  const json& entries = j.at("entries");
  require(entries.is_array() && entries.size() == m, errc::length_mismatch,
          "entry row count disagrees with \"rows\"");
  out.plan = TransferencePlan::zero(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    require(entries[i].is_array() && entries[i].size() == n, errc::length_mismatch,
            "entry column count disagrees with \"cols\"");
    for (std::size_t k = 0; k < n; ++k)
      out.plan.at(i, k) = finite_number(entries[i][k], "plan entry");
  }
  if (j.contains("distance")) out.distance = finite_number(j.at("distance"), "distance");
  if (j.contains("p")) out.p = j.at("p").is_string() ? kInfiniteP : j.at("p").get<double>();
  return out;
}

// {"dim": n, "entries": [[[re, im], ...], ...]}
inline json matrix_to_json(const CMat& x) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      row.push_back({x(i, j).real(), x(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"dim", static_cast<std::size_t>(x.rows())}, {"entries", std::move(rows)}};
}

inline CMat matrix_from_json(const json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("entries"), errc::invalid_argument,
          "matrix JSON needs \"dim\" and \"entries\"");
  std::size_t n = j.at("dim").get<std::size_t>();
  require(n >= 1, errc::invalid_argument, "dimension must be at least 1");
  const json& entries = j.at("entries");
  require(entries.is_array() && entries.size() == n, errc::length_mismatch,
          "entry row count disagrees with \"dim\"");
  CMat x(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    require(entries[i].is_array() && entries[i].size() == n, errc::length_mismatch,
            "entry column count disagrees with \"dim\"");
    for (std::size_t k = 0; k < n; ++k) {
      const json& e = entries[i][k];
      require(e.is_array() && e.size() == 2, errc::invalid_argument,
              "each entry must be an [re, im] pair");
      x(i, k) = Cx(finite_number(e[0], "matrix entry"), finite_number(e[1], "matrix entry"));
    }
  }
  return x;
}

inline json certificate_to_json(const DistanceCertificate& cert) {
  json perm = json::array();
  for (std::size_t s : cert.witness_permutation) perm.push_back(s);
  return json{{"p", p_to_json(cert.p)},
              {"lower", cert.lower},
              {"upper", cert.upper},
              {"optimized", cert.optimized},
              {"witness_unitary", matrix_to_json(cert.witness_unitary.entries)},
              {"witness_unitarity_residual", cert.witness_unitary.unitarity_residual},
              {"witness_permutation", std::move(perm)},
              {"optimizer_converged", cert.optimizer_converged}};
}

inline json geodesic_report_to_json(const GeodesicReport& report) {
  json samples = json::array();
  for (const auto& [t, m] : report.path.samples)
    samples.push_back(json{{"t", t}, {"measure", measure_to_json(m)}});
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back(json{{"s", c.s},
                          {"t", c.t},
                          {"expected", c.expected},
                          {"actual", c.actual},
                          {"pass", c.pass}});
  auto coverage = support_coverage(report.path);
  json cov = json::array();
  for (const auto& [t, frac] : coverage.occupancy)
    cov.push_back(json{{"t", t}, {"occupied_fraction", frac}});
  return json{{"base_distance", report.base_distance},
              {"p", 2.0},
              {"samples", std::move(samples)},
              {"constant_speed_checks", std::move(checks)},
              {"worst_violation", report.worst_violation},
              {"pass", report.pass},
              {"support_coverage", json{{"grid", coverage.grid}, {"per_sample", std::move(cov)}}}};
}

inline const char* spectrum_kind_name(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::disc: return "disc";
    case SpectrumKind::interval: return "interval";
    case SpectrumKind::circle: return "circle";
  }
  return "disc";
}

inline json gap_report_to_json(const GapReport& report) {
  json cands = json::array();
  for (const auto& c : report.candidates)
    cands.push_back(json{{"trial", c.trial},
                         {"delta", c.delta},
                         {"estimate", c.estimate},
                         {"ratio", c.ratio},
                         {"ratio_refined", c.ratio_refined},
                         {"confirmed", c.confirmed}});
  return json{{"dim", report.dim},
              {"trials", report.trials},
              {"spectrum", spectrum_kind_name(report.kind)},
              {"invariant_violations", report.invariant_violations},
              {"worst_invariant_slack", report.worst_invariant_slack},
              {"worst_ratio_deviation", report.worst_ratio_deviation},
              {"candidates", std::move(cands)}};
}

}  // namespace ot
