// Normal-matrix utilities: certification, spectra as tracial measures,
// Schatten p-norms relative to the normalized trace, and seeded Haar-orbit
// instance generation.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <vector>

#include "orbit_transport/errors.hpp"
#include "orbit_transport/measure.hpp"
#include "orbit_transport/random_instances.hpp"
#include "orbit_transport/rng.hpp"
#include "orbit_transport/tolerances.hpp"
#include "orbit_transport/transport.hpp"

namespace ot {

using Cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline double normality_residual_of(const CMat& x) {
  return (x * x.adjoint() - x.adjoint() * x).norm();
}

// Square complex matrix certified normal: ||xx*-x*x||_F <= tol*(1+||x||_F^2).
// Matrices failing the bound are rejected, not repaired.
struct NormalMatrix {
  CMat entries;
  double normality_residual = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
};

inline NormalMatrix make_normal(CMat x, const tolerances& tol = default_tolerances()) {
  require(x.rows() == x.cols() && x.rows() >= 1, errc::invalid_argument,
          "square nonempty matrix required");
  require(x.allFinite(), errc::non_finite, "matrix entries must be finite");
  double res = normality_residual_of(x);
  require(res <= tol.normality_rel * (1.0 + x.squaredNorm()), errc::not_normal,
          "normality residual exceeds tolerance");
  return {std::move(x), res};
}

struct UnitaryCandidate {
  CMat entries;
  double unitarity_residual = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
};

inline double unitarity_residual_of(const CMat& u) {
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).norm();
}

inline UnitaryCandidate make_unitary(CMat u, const tolerances& tol = default_tolerances()) {
  require(u.rows() == u.cols() && u.rows() >= 1, errc::invalid_argument,
          "square nonempty matrix required");
  require(u.allFinite(), errc::non_finite, "matrix entries must be finite");
  double res = unitarity_residual_of(u);
  require(res <= tol.unitarity * static_cast<double>(u.rows()), errc::not_unitary,
          "unitarity residual exceeds tolerance");
  return {std::move(u), res};
}

// Eigenvalues of a certified normal matrix via the Schur form (the triangular
// factor is diagonal to working precision), ordered lexicographically.
inline std::vector<Cx> eigenvalues_of(const NormalMatrix& x, CMat* diagonalizer = nullptr) {
  Eigen::ComplexSchur<CMat> schur(x.entries, diagonalizer != nullptr);
  require(schur.info() == Eigen::Success, errc::eigen_failure, "Schur decomposition failed");
  const std::size_t n = x.dim();
  std::vector<Cx> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = schur.matrixT()(i, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (eigs[a].real() != eigs[b].real()) return eigs[a].real() < eigs[b].real();
    return eigs[a].imag() < eigs[b].imag();
  });

  std::vector<Cx> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = eigs[order[i]];
  if (diagonalizer) {
    CMat v(n, n);
    for (std::size_t i = 0; i < n; ++i) v.col(i) = schur.matrixU().col(order[i]);
    *diagonalizer = std::move(v);
  }
  return sorted;
}

// Trace-induced spectral measure: weight 1/n per eigenvalue, coincident
// eigenvalues merged.
inline DiscreteMeasure spectral_measure(const NormalMatrix& x,
                                        double merge_radius = default_tolerances().merge_radius) {
  auto eigs = eigenvalues_of(x);
  std::vector<Point> atoms;
  atoms.reserve(eigs.size());
  for (const Cx& z : eigs) atoms.emplace_back(z);
  DiscreteMeasure raw;
  raw.atoms = std::move(atoms);
  raw.weights.assign(eigs.size(), 1.0 / static_cast<double>(eigs.size()));
  return merge_atoms(raw, merge_radius);
}

// Schatten p-norm relative to the normalized trace: ((1/n) sum s_i^p)^(1/p),
// the operator norm for p = inf. Powers are taken on s/s_max to stay in range.
inline double schatten_norm(const CMat& a, double p) {
  require(a.rows() == a.cols() && a.rows() >= 1, errc::invalid_argument, "square matrix required");
  require(p >= 1.0, errc::invalid_argument, "p must be >= 1");
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& s = svd.singularValues();
  require(s.allFinite(), errc::svd_failure, "singular values not finite");
  double smax = s.maxCoeff();
  if (std::isinf(p) || smax == 0.0) return smax;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
  return smax * std::pow(acc / static_cast<double>(s.size()), 1.0 / p);
}

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
// the R diagonal absorbed into Q.
inline CMat haar_unitary(std::size_t n, rng& r) {
  CMat g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = r.complex_gaussian();
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t k = 0; k < n; ++k) {
    Cx d = rm(k, k);
    double ad = std::abs(d);
    q.col(k) *= (ad > 0.0) ? d / ad : Cx(1.0, 0.0);
  }
  return q;
}

inline NormalMatrix random_normal(std::size_t n, const std::vector<Cx>& spectrum,
                                  std::uint64_t seed) {
  require(n >= 1, errc::invalid_argument, "dimension must be at least 1");
  require(spectrum.size() == n, errc::length_mismatch, "spectrum size must equal the dimension");
  rng r(seed);
  CMat u = haar_unitary(n, r);
  CVec d(n);
  for (std::size_t i = 0; i < n; ++i) d(i) = spectrum[i];
  CMat x = u * d.asDiagonal() * u.adjoint();
  double res = normality_residual_of(x);
  return {std::move(x), res};
}

inline NormalMatrix random_normal(std::size_t n, SpectrumKind kind, std::uint64_t seed) {
  rng r(derive_seed(seed, 0x5f3759df));
  return random_normal(n, random_spectrum(r, n, kind), seed);
}

struct HoffmanWielandtGap {
  double w2 = 0.0;     // W_2 between the spectral measures
  double norm2 = 0.0;  // ||x - y||_{2,tau}; always an upper bound for w2
};

inline HoffmanWielandtGap hoffman_wielandt_gap(const NormalMatrix& x, const NormalMatrix& y) {
  require(x.dim() == y.dim(), errc::dim_mismatch, "matrices must share a dimension");
  HoffmanWielandtGap g;
  g.w2 = wasserstein_p(spectral_measure(x), spectral_measure(y), 2).distance;
  g.norm2 = schatten_norm(x.entries - y.entries, 2);
  return g;
}

}  // namespace ot
