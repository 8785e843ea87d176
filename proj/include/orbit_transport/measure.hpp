// Finitely supported probability measures on the complex plane.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "orbit_transport/errors.hpp"
#include "orbit_transport/rng.hpp"
#include "orbit_transport/tolerances.hpp"

namespace ot {

struct Point {
  double re = 0.0;
  double im = 0.0;

  Point() = default;
  Point(double re_, double im_) : re(re_), im(im_) {}
  explicit Point(std::complex<double> z) : re(z.real()), im(z.imag()) {}

  std::complex<double> to_complex() const { return {re, im}; }
  bool finite() const { return std::isfinite(re) && std::isfinite(im); }
};

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a.re - b.re, a.im - b.im);
}

// Atoms with strictly positive weights summing to 1. Coincident atoms are
// permitted until merge_atoms is applied.
struct DiscreteMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;

  std::size_t size() const { return atoms.size(); }
  double total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j) d = std::max(d, dist(atoms[i], atoms[j]));
    return d;
  }
};

inline DiscreteMeasure make_measure(std::vector<Point> atoms, std::vector<double> weights) {
  require(atoms.size() == weights.size(), errc::length_mismatch,
          "atom and weight lists differ in length");
  require(!atoms.empty(), errc::empty_measure, "no atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(atoms[i].finite(), errc::non_finite, "atom coordinate is not finite");
    require(std::isfinite(weights[i]), errc::non_finite, "weight is not finite");
    require(weights[i] >= 0.0, errc::negative_weight, "weights must be nonnegative");
    total += weights[i];
  }
  require(total > 0.0, errc::empty_measure, "no positive weight");

  DiscreteMeasure m;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] > 0.0) {
      m.atoms.push_back(atoms[i]);
      m.weights.push_back(weights[i] / total);
    }
  }
  return m;
}

inline DiscreteMeasure delta(Point p) { return make_measure({p}, {1.0}); }
inline DiscreteMeasure delta(std::complex<double> z) { return delta(Point(z)); }

// Clusters atoms against earlier representatives; resulting atoms are
// pairwise distinct at the given radius.
inline DiscreteMeasure merge_atoms(const DiscreteMeasure& m,
                                   double radius = default_tolerances().merge_radius) {
  DiscreteMeasure out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool merged = false;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (dist(m.atoms[i], out.atoms[k]) <= radius) {
        out.weights[k] += m.weights[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.atoms.push_back(m.atoms[i]);
      out.weights.push_back(m.weights[i]);
    }
  }
  return out;
}

inline DiscreteMeasure pushforward(const DiscreteMeasure& m,
                                   const std::function<Point(const Point&)>& f) {
  std::vector<Point> atoms;
  atoms.reserve(m.size());
  for (const Point& a : m.atoms) {
    Point fa = f(a);
    require(fa.finite(), errc::non_finite, "map produced a non-finite image");
    atoms.push_back(fa);
  }
  DiscreteMeasure raw;
  raw.atoms = std::move(atoms);
  raw.weights = m.weights;
  return merge_atoms(raw);
}

struct UniformAtomsResult {
  DiscreteMeasure measure;      // n atoms, each of weight 1/n (repeats allowed)
  double resolution_bound;      // W_inf(input, output) <= diameter(support) * bound
};

// Largest-remainder apportionment of n*weight, ties broken by atom index.
// Deterministic; the seed parameter is accepted for interface stability and
// does not influence the apportionment.
inline UniformAtomsResult uniform_atoms(const DiscreteMeasure& m, std::size_t n,
                                        std::uint64_t /*seed*/ = 0) {
  require(n >= 1, errc::invalid_argument, "atom count must be at least 1");
  const std::size_t k = m.size();
  std::vector<std::size_t> counts(k, 0);
  std::vector<double> remainders(k, 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double quota = static_cast<double>(n) * m.weights[i];
    counts[i] = static_cast<std::size_t>(std::floor(quota + 1e-12));
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t r = 0; assigned < n; ++r) {
    counts[order[r % k]] += 1;
    ++assigned;
  }
  // The integer-rescue nudge in the floor can over-assign; take quanta back
  // from the smallest remainders.
  for (std::size_t r = k; assigned > n;) {
    r = (r == 0) ? k - 1 : r - 1;
    if (counts[order[r]] > 0) {
      counts[order[r]] -= 1;
      --assigned;
    }
  }

  DiscreteMeasure out;
  double quantization = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    quantization = std::max(quantization,
                            std::abs(m.weights[i] - static_cast<double>(counts[i]) / n));
    for (std::size_t c = 0; c < counts[i]; ++c) {
      out.atoms.push_back(m.atoms[i]);
      out.weights.push_back(1.0 / static_cast<double>(n));
    }
  }
  return {out, quantization > 1e-12 ? 1.0 : 0.0};
}

inline bool measure_valid(const DiscreteMeasure& m,
                          const tolerances& tol = default_tolerances()) {
  if (m.atoms.size() != m.weights.size() || m.atoms.empty()) return false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.atoms[i].finite() || !(m.weights[i] > 0.0)) return false;
  }
  return std::abs(m.total_mass() - 1.0) <= tol.weight_sum;
}

}  // namespace ot
