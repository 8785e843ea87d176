#include <catch2/catch_amalgamated.hpp>

#include "orbit_transport/matrices.hpp"
#include "orbit_transport/transport.hpp"

using namespace ot;

namespace {

CMat diag2(Cx a, Cx b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// rank-1 projection onto (1,1)/sqrt(2)
CMat half_projection() {
  CMat m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}

}  // namespace

TEST_CASE("normality certification") {
  REQUIRE_NOTHROW(make_normal(diag2(0, 1)));
  REQUIRE_NOTHROW(make_normal(half_projection()));

  CMat shift(2, 2);
  shift << 0, 1, 0, 0;  // nilpotent, maximally non-normal
  REQUIRE_THROWS_AS(make_normal(shift), error);

  // the tolerance is relative: scaling a normal matrix keeps it certified
  REQUIRE_NOTHROW(make_normal(1e6 * half_projection()));
}

TEST_CASE("spectral measure of simple matrices") {
  auto m = spectral_measure(make_normal(diag2(0, 1)));
  REQUIRE(m.size() == 2);
  REQUIRE(m.weights[0] == Catch::Approx(0.5));
  REQUIRE(m.atoms[0].re == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(m.atoms[1].re == Catch::Approx(1.0));

  // characteristic polynomial of the half projection is z^2 - z
  auto p = spectral_measure(make_normal(half_projection()));
  REQUIRE(p.size() == 2);
  REQUIRE(p.atoms[0].re == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(p.atoms[1].re == Catch::Approx(1.0));

  // eigenvalue multiplicity merges
  auto id = spectral_measure(make_normal(diag2(1, 1)));
  REQUIRE(id.size() == 1);
  REQUIRE(id.weights[0] == Catch::Approx(1.0));
}

TEST_CASE("spectral measure is invariant under conjugation") {
  rng r(101);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 2 + r.index(5);
    auto spec = random_spectrum(r, n, SpectrumKind::disc);
    auto x = random_normal(n, spec, r.bits());
    CMat u = haar_unitary(n, r);
    auto y = make_normal(u * x.entries * u.adjoint());
    double w1 = wasserstein_p(spectral_measure(x), spectral_measure(y), 1).distance;
    REQUIRE(w1 <= 1e-8);

    // and the spectral measure is the uniform measure on the input spectrum
    std::vector<Point> pts;
    for (auto z : spec) pts.emplace_back(z);
    auto target = merge_atoms(make_measure(pts, std::vector<double>(n, 1.0)));
    REQUIRE(wasserstein_p(spectral_measure(x), target, 1).distance <= 1e-8);
  }
}

TEST_CASE("schatten norms") {
  for (double p : {1.0, 2.0, 7.0}) {
    REQUIRE(schatten_norm(CMat::Identity(3, 3), p) == Catch::Approx(1.0));
  }
  REQUIRE(schatten_norm(CMat::Identity(3, 3), kInfiniteP) == Catch::Approx(1.0));

  REQUIRE(schatten_norm(diag2(0, 2), 2) == Catch::Approx(std::sqrt(2.0)));
  REQUIRE(schatten_norm(diag2(0, 2), kInfiniteP) == Catch::Approx(2.0));

  REQUIRE_THROWS_AS(schatten_norm(CMat::Zero(2, 3), 2), error);
}

TEST_CASE("schatten norm triangle inequality and monotonicity in p") {
  rng r(103);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + r.index(6);
    CMat a(n, n), b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = r.complex_gaussian();
        b(i, j) = r.complex_gaussian();
      }
    for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
      REQUIRE(schatten_norm(a + b, p) <= schatten_norm(a, p) + schatten_norm(b, p) + 1e-9);
    }
    double prev = 0.0;
    for (double p : {1.0, 2.0, 4.0, 16.0, 64.0}) {
      double v = schatten_norm(a, p);
      REQUIRE(prev <= v + 1e-9);
      prev = v;
    }
    REQUIRE(prev <= schatten_norm(a, kInfiniteP) + 1e-9);
    // ||a||_64 is within a factor n^(1/64) of the operator norm
    double op = schatten_norm(a, kInfiniteP);
    REQUIRE(op <= std::pow(static_cast<double>(n), 1.0 / 64.0) * schatten_norm(a, 64.0) + 1e-9);
  }
}

TEST_CASE("random_normal determinism and structure") {
  auto spec = std::vector<Cx>{{0, 0}, {1, 0}, {0, 1}};
  auto a = random_normal(3, spec, 12345);
  auto b = random_normal(3, spec, 12345);
  REQUIRE((a.entries - b.entries).norm() == 0.0);

  auto c = random_normal(3, spec, 54321);
  REQUIRE((a.entries - c.entries).norm() > 1e-3);

  auto one = random_normal(1, std::vector<Cx>{{2, 3}}, 9);
  REQUIRE(one.entries(0, 0).real() == Catch::Approx(2.0));
  REQUIRE(one.entries(0, 0).imag() == Catch::Approx(3.0));

  REQUIRE(a.normality_residual <= 1e-12 * (1 + a.entries.squaredNorm()));
}

TEST_CASE("hoffman-wielandt gap") {
  auto x = make_normal(diag2(0, 1));
  auto same = hoffman_wielandt_gap(x, x);
  REQUIRE(same.w2 == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(same.norm2 == Catch::Approx(0.0).margin(1e-12));

  // same spectra, tau-norm of the difference is 1/sqrt(2)
  auto y = make_normal(half_projection());
  auto g = hoffman_wielandt_gap(x, y);
  REQUIRE(g.w2 == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(g.norm2 == Catch::Approx(1.0 / std::sqrt(2.0)));

  // swapped diagonal: same spectral measure, norm 1
  auto z = make_normal(diag2(1, 0));
  auto h = hoffman_wielandt_gap(x, z);
  REQUIRE(h.w2 == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(h.norm2 == Catch::Approx(1.0));

  auto big = random_normal(3, SpectrumKind::disc, 1);
  REQUIRE_THROWS_AS(hoffman_wielandt_gap(x, big), error);
}

TEST_CASE("hoffman-wielandt inequality on random pairs") {
  rng r(107);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + r.index(11);  // up to 12
    auto x = random_normal(n, SpectrumKind::disc, r.bits());
    auto y = random_normal(n, SpectrumKind::disc, r.bits());
    auto g = hoffman_wielandt_gap(x, y);
    REQUIRE(g.w2 <= g.norm2 + 1e-8);
  }
}

TEST_CASE("unitary candidates") {
  rng r(109);
  auto u = make_unitary(haar_unitary(4, r));
  REQUIRE(u.unitarity_residual <= 1e-10 * 4);
  CMat bad = CMat::Identity(3, 3) * 1.5;
  REQUIRE_THROWS_AS(make_unitary(bad), error);
}
