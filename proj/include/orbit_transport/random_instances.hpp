// Seeded generators for measures and spectra used by the selftest harness,
// the gap search, and the experiment CLI.
#pragma once

#include <complex>
#include <vector>

#include "orbit_transport/measure.hpp"
#include "orbit_transport/rng.hpp"

namespace ot {

enum class SpectrumKind {
  disc,      // general normal: eigenvalues uniform on the unit disc
  interval,  // self-adjoint: eigenvalues uniform in [-1, 1]
  circle,    // unitary: eigenvalues uniform on the unit circle
};

inline std::vector<std::complex<double>> random_spectrum(rng& r, std::size_t n,
                                                         SpectrumKind kind) {
  std::vector<std::complex<double>> s(n);
  for (auto& z : s) {
    switch (kind) {
      case SpectrumKind::disc:
        z = r.unit_disc();
        break;
      case SpectrumKind::interval:
        z = {r.uniform(-1.0, 1.0), 0.0};
        break;
      case SpectrumKind::circle:
        z = std::polar(1.0, r.uniform(0.0, 6.283185307179586476925286766559));
        break;
    }
  }
  return s;
}

// Random measure with `n` atoms in the unit disc and positive normalized
// weights bounded away from zero.
inline DiscreteMeasure random_measure(rng& r, std::size_t n) {
  std::vector<Point> atoms;
  std::vector<double> weights;
  atoms.reserve(n);
  weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    atoms.emplace_back(r.unit_disc());
    weights.push_back(0.05 + r.uniform());
  }
  return make_measure(std::move(atoms), std::move(weights));
}

// Uniform-weight measure on n random points of the unit disc.
inline DiscreteMeasure random_uniform_measure(rng& r, std::size_t n) {
  std::vector<Point> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.emplace_back(r.unit_disc());
  return make_measure(std::move(atoms), std::vector<double>(n, 1.0));
}

// Random measure with all atoms on the real line (for the interval module).
inline DiscreteMeasure random_real_measure(rng& r, std::size_t n) {
  std::vector<Point> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    atoms.emplace_back(r.uniform(-1.0, 1.0), 0.0);
    weights.push_back(0.05 + r.uniform());
  }
  return make_measure(std::move(atoms), std::move(weights));
}

// Random measure supported on the circle of given radius.
inline DiscreteMeasure random_circle_measure(rng& r, std::size_t n, double radius) {
  std::vector<Point> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    double a = r.uniform(0.0, 6.283185307179586476925286766559);
    atoms.emplace_back(radius * std::cos(a), radius * std::sin(a));
    weights.push_back(0.05 + r.uniform());
  }
  return make_measure(std::move(atoms), std::move(weights));
}

}  // namespace ot
