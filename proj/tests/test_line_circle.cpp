#include <catch2/catch_amalgamated.hpp>

#include "orbit_transport/line_circle.hpp"
#include "orbit_transport/random_instances.hpp"

using namespace ot;

namespace {

DiscreteMeasure reals(std::vector<double> xs, std::vector<double> ws) {
  std::vector<Point> atoms;
  for (double x : xs) atoms.emplace_back(x, 0.0);
  return make_measure(atoms, ws);
}

DiscreteMeasure roots_of_unity(std::size_t n, double offset = 0.0) {
  std::vector<Point> atoms;
  for (std::size_t k = 0; k < n; ++k) {
    double t = offset + kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    atoms.emplace_back(std::cos(t), std::sin(t));
  }
  return make_measure(atoms, std::vector<double>(n, 1.0));
}

double angle_of(const Point& z) {
  double t = std::atan2(z.im, z.re);
  return t < 0 ? t + kTwoPi : t;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("quantile coupling on the line") {
  auto same = reals({0, 1}, {0.5, 0.5});
  REQUIRE(quantile_wp_1d(same, same, 2).distance <= 1e-12);

  // monotone matching 0->1, 2->3 beats the crossing
  auto mu = reals({0, 2}, {0.5, 0.5});
  auto nu = reals({1, 3}, {0.5, 0.5});
  REQUIRE(quantile_wp_1d(mu, nu, 1).distance == Catch::Approx(1.0));

  // quantile functions differ on [1/3, 2/3): mass 1/3 moves distance 1
  auto a = reals({0, 1}, {2.0 / 3.0, 1.0 / 3.0});
  auto b = reals({0, 1}, {1.0 / 3.0, 2.0 / 3.0});
  REQUIRE(quantile_wp_1d(a, b, 1).distance == Catch::Approx(1.0 / 3.0));
  REQUIRE(quantile_wp_1d(a, b, 1).distance ==
          Catch::Approx(wasserstein_p(a, b, 1).distance).margin(1e-12));

  auto off = make_measure({{0, 0.5}}, {1.0});
  REQUIRE_THROWS_AS(quantile_wp_1d(off, same, 1), error);
}

TEST_CASE("quantile equals the LP for p in {1,2,4,inf}") {
  rng r(61);
  for (int trial = 0; trial < 40; ++trial) {
    auto mu = random_real_measure(r, 1 + r.index(8));
    auto nu = random_real_measure(r, 1 + r.index(8));
    for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
      auto q = quantile_wp_1d(mu, nu, p);
      double lp = wasserstein(mu, nu, p).distance;
      REQUIRE(q.distance == Catch::Approx(lp).margin(1e-9));
      REQUIRE(marginal_violation(q.plan, mu, nu) <= 1e-9);
    }
  }
}

TEST_CASE("chordal conversion") {
  CircleGeometry unit{1.0, MetricKind::chordal};
  REQUIRE(chordal_from_intrinsic_winf(0.0, unit) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(chordal_from_intrinsic_winf(kPi, unit) == Catch::Approx(2.0));
  REQUIRE(chordal_from_intrinsic_winf(kPi / 2, unit) == Catch::Approx(std::sqrt(2.0)));
  REQUIRE_THROWS_AS(chordal_from_intrinsic_winf(4.0, unit), error);
  REQUIRE_THROWS_AS(chordal_from_intrinsic_winf(-0.5, unit), error);

  CircleGeometry big{3.0, MetricKind::chordal};
  double gamma = kPi * 3.0 / 2.0;  // quarter arc of radius 3
  REQUIRE(chordal_from_intrinsic_winf(gamma, big) == Catch::Approx(6.0 * std::sin(kPi / 4)));
}

TEST_CASE("antipodal point masses") {
  auto mu = delta(Point{1, 0});
  auto nu = delta(Point{-1, 0});
  for (double p : {1.0, 2.0, kInfiniteP}) {
    auto intr = circle_wp(mu, nu, p, {1.0, MetricKind::intrinsic});
    REQUIRE(intr.transport.distance == Catch::Approx(kPi));
    auto chor = circle_wp(mu, nu, p, {1.0, MetricKind::chordal});
    REQUIRE(chor.transport.distance == Catch::Approx(2.0));
  }
}

TEST_CASE("rotated roots of unity move by the rotation angle") {
  auto mu = roots_of_unity(4);
  auto nu = roots_of_unity(4, kPi / 4);
  for (double p : {1.0, 2.0, kInfiniteP}) {
    auto res = circle_wp(mu, nu, p, {1.0, MetricKind::intrinsic});
    REQUIRE(res.transport.distance == Catch::Approx(kPi / 4));
  }
  auto same = roots_of_unity(6);
  REQUIRE(circle_wp(same, same, 2, {1.0, MetricKind::intrinsic}).transport.distance <= 1e-12);
}

TEST_CASE("off-circle atoms are rejected") {
  auto bad = make_measure({{0.5, 0}}, {1.0});
  REQUIRE_THROWS_AS(circle_wp(bad, delta(Point{1, 0}), 2, {1.0, MetricKind::intrinsic}), error);
  auto zero = make_measure({{0, 0}}, {1.0});
  REQUIRE_THROWS_AS(circle_wp(zero, delta(Point{1, 0}), 2, {1.0, MetricKind::intrinsic}), error);
}

TEST_CASE("shift search equals brute force with arc costs") {
  rng r(71);
  GroundMetric arc = [](const Point& x, const Point& y) {
    double d = std::abs(angle_of(x) - angle_of(y));
    return std::min(d, kTwoPi - d);
  };
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + r.index(5);  // up to 6 for the factorial oracle
    auto mu = make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
    auto nu = make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
    for (double p : {1.0, 2.0, kInfiniteP}) {
      auto shift = circle_wp(mu, nu, p, {1.0, MetricKind::intrinsic});
      auto oracle = brute_force_wp(mu.atoms, nu.atoms, p, arc);
      REQUIRE(shift.transport.distance == Catch::Approx(oracle.distance).margin(1e-9));
      REQUIRE(!shift.cut_search_gap);
    }
  }
}

TEST_CASE("sandwich between chordal and intrinsic") {
  rng r(73);
  for (int trial = 0; trial < 30; ++trial) {
    double radius = 0.5 + r.uniform(0.0, 2.0);
    auto mu = random_circle_measure(r, 1 + r.index(6), radius);
    auto nu = random_circle_measure(r, 1 + r.index(6), radius);
    for (double p : {1.0, 2.0, kInfiniteP}) {
      double chordal = circle_wp(mu, nu, p, {radius, MetricKind::chordal}).transport.distance;
      double intrinsic = circle_wp(mu, nu, p, {radius, MetricKind::intrinsic}).transport.distance;
      REQUIRE(chordal <= intrinsic + 1e-9);
      REQUIRE(intrinsic <= (kPi / 2.0) * chordal + 1e-9);
    }
  }
}

TEST_CASE("chordal W_inf agrees with the coupling LP") {
  rng r(79);
  for (int trial = 0; trial < 25; ++trial) {
    auto mu = random_circle_measure(r, 1 + r.index(6), 1.0);
    auto nu = random_circle_measure(r, 1 + r.index(6), 1.0);
    auto res = circle_wp(mu, nu, kInfiniteP, {1.0, MetricKind::chordal});
    REQUIRE(res.transport.distance == Catch::Approx(res.lp_value).margin(1e-9));
  }
}

TEST_CASE("rotation invariance") {
  rng r(83);
  for (int trial = 0; trial < 20; ++trial) {
    auto mu = random_circle_measure(r, 1 + r.index(5), 1.0);
    auto nu = random_circle_measure(r, 1 + r.index(5), 1.0);
    double angle = r.uniform(0.0, kTwoPi);
    auto rotate = [angle](const Point& z) {
      double c = std::cos(angle), s = std::sin(angle);
      return Point{c * z.re - s * z.im, s * z.re + c * z.im};
    };
    auto mur = pushforward(mu, rotate);
    auto nur = pushforward(nu, rotate);
    for (double p : {1.0, 2.0, kInfiniteP}) {
      for (MetricKind kind : {MetricKind::intrinsic, MetricKind::chordal}) {
        double before = circle_wp(mu, nu, p, {1.0, kind}).transport.distance;
        double after = circle_wp(mur, nur, p, {1.0, kind}).transport.distance;
        REQUIRE(before == Catch::Approx(after).margin(1e-9));
      }
    }
  }
}

TEST_CASE("shift matching is cyclically monotone") {
  rng r(89);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = 2 + r.index(5), n = 2 + r.index(5);
    auto mu = random_circle_measure(r, m, 1.0);
    auto nu = random_circle_measure(r, n, 1.0);
    auto res = circle_wp(mu, nu, 2, {1.0, MetricKind::intrinsic});

    auto unroll = [](double theta, double cut) {
      double u = theta - cut;
      if (u < 0) u += kTwoPi;
      return u;
    };
    std::vector<double> us, vs;
    for (const auto& [i, j, mass] : res.shift.matches) {
      if (mass <= 1e-13) continue;
      us.push_back(unroll(angle_of(mu.atoms[i]), res.shift.cut_source));
      vs.push_back(unroll(angle_of(nu.atoms[j]), res.shift.cut_target));
    }
    // matched arcs, read from the cuts, never cross
    for (std::size_t x = 0; x < us.size(); ++x)
      for (std::size_t y = x + 1; y < us.size(); ++y)
        REQUIRE((us[x] - us[y]) * (vs[x] - vs[y]) >= -1e-12);
  }
}

TEST_CASE("plan marginals from shift plans") {
  rng r(97);
  for (int trial = 0; trial < 15; ++trial) {
    auto mu = random_circle_measure(r, 1 + r.index(6), 1.0);
    auto nu = random_circle_measure(r, 1 + r.index(6), 1.0);
    auto res = circle_wp(mu, nu, 2, {1.0, MetricKind::intrinsic});
    REQUIRE(marginal_violation(res.shift.to_plan(mu.size(), nu.size()), mu, nu) <= 1e-9);
  }
}
