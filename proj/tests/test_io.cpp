#include <catch2/catch_amalgamated.hpp>

#include "orbit_transport/geodesics.hpp"
#include "orbit_transport/json_io.hpp"
#include "orbit_transport/random_instances.hpp"

using namespace ot;

TEST_CASE("measure JSON schema") {
  auto m = make_measure({{0, 0}, {1, -2}}, {0.25, 0.75});
  auto j = measure_to_json(m);
  REQUIRE(j["atoms"].size() == 2);
  REQUIRE(j["atoms"][1][1] == -2.0);

  auto back = measure_from_json(j);
  REQUIRE(back.size() == 2);
  REQUIRE(back.weights[1] == Catch::Approx(0.75));

  REQUIRE_THROWS_AS(measure_from_json(json::parse(R"({"atoms": [[0,0]], "weights": [1, 2]})")),
                    error);
  REQUIRE_THROWS_AS(measure_from_json(json::parse(R"({"atoms": [[0]], "weights": [1]})")), error);
  REQUIRE_THROWS_AS(measure_from_json(json::parse(R"({"atoms": [["a",0]], "weights": [1]})")),
                    error);
  REQUIRE_THROWS_AS(measure_from_json(json::parse(R"({"weights": [1]})")), error);
}

TEST_CASE("measure JSON round-trip preserves transport distances") {
  rng r(313);
  for (int trial = 0; trial < 20; ++trial) {
    auto mu = random_measure(r, 1 + r.index(6));
    auto back = measure_from_json(measure_to_json(mu));
    REQUIRE(wasserstein_p(mu, back, 1).distance <= 1e-12);
  }
}

TEST_CASE("plan JSON carries p as number or inf") {
  auto mu = make_measure({{0, 0}, {1, 0}}, {0.5, 0.5});
  auto nu = make_measure({{0.5, 0}}, {1.0});
  auto res = wasserstein_p(mu, nu, 2);
  auto j = plan_to_json(res);
  REQUIRE(j["p"] == 2.0);
  REQUIRE(j["rows"] == 2);
  auto back = plan_from_json(j);
  REQUIRE(back.plan.at(0, 0) == Catch::Approx(0.5));
  REQUIRE(back.distance == Catch::Approx(res.distance));

  auto resi = wasserstein_inf(mu, nu);
  auto ji = plan_to_json(resi);
  REQUIRE(ji["p"] == "inf");
  REQUIRE(std::isinf(plan_from_json(ji).p));
}

TEST_CASE("matrix JSON round-trip") {
  rng r(317);
  auto x = random_normal(3, SpectrumKind::disc, 42);
  auto j = matrix_to_json(x.entries);
  auto back = matrix_from_json(j);
  REQUIRE((back - x.entries).norm() <= 1e-15);

  REQUIRE_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 2, "entries": [[[0,0],[0,0]]]})")),
                    error);
  REQUIRE_THROWS_AS(matrix_from_json(json::parse(R"({"dim": 1, "entries": [[[0]]]})")), error);
}

TEST_CASE("p parsing") {
  REQUIRE(p_from_json(json(2.5)) == 2.5);
  REQUIRE(std::isinf(p_from_json(json("inf"))));
  REQUIRE_THROWS_AS(p_from_json(json("two")), error);
  REQUIRE_THROWS_AS(p_from_json(json(0.5)), error);
}

TEST_CASE("geodesic path JSON lists samples and checks") {
  rng r(331);
  auto mu = random_uniform_measure(r, 4);
  auto nu = random_uniform_measure(r, 4);
  auto report = verify_geodesic(mu, nu, {0.0, 0.5, 1.0});
  auto j = geodesic_report_to_json(report);

  REQUIRE(j["samples"].size() == 3);
  REQUIRE(j["samples"][0]["t"] == 0.0);
  REQUIRE(j["samples"][2]["t"] == 1.0);
  REQUIRE(j["samples"][1].contains("measure"));
  // a sampled measure round-trips through the measure schema
  auto mid = measure_from_json(j["samples"][1]["measure"]);
  REQUIRE(std::abs(mid.total_mass() - 1.0) <= 1e-12);

  REQUIRE(j["constant_speed_checks"].size() == 3);  // pairs (0,.5), (0,1), (.5,1)
  for (const auto& check : j["constant_speed_checks"]) {
    REQUIRE(check.contains("expected"));
    REQUIRE(check.contains("actual"));
    REQUIRE(check["pass"].is_boolean());
  }
  REQUIRE(j["support_coverage"]["per_sample"].size() == 3);
  REQUIRE(j["pass"].is_boolean());
}

TEST_CASE("gap report JSON shape") {
  RiemannianOptions opts;
  opts.restarts = 2;
  opts.max_iters = 100;
  auto report = gap_search(2, 4, 12321, opts, SpectrumKind::interval);
  auto j = gap_report_to_json(report);
  REQUIRE(j["dim"] == 2);
  REQUIRE(j["trials"] == 4);
  REQUIRE(j["spectrum"] == "interval");
  REQUIRE(j["invariant_violations"] == 0);
  REQUIRE(j["candidates"].is_array());
  REQUIRE(j.contains("worst_ratio_deviation"));
}

TEST_CASE("certificate JSON mirrors the fields") {
  auto x = random_normal(3, SpectrumKind::disc, 1001);
  auto y = random_normal(3, SpectrumKind::disc, 1002);
  RiemannianOptions opts;
  opts.restarts = 2;
  opts.max_iters = 150;
  auto cert = d_u2_certificate(x, y, opts);
  auto j = certificate_to_json(cert);
  REQUIRE(j["p"] == 2.0);
  REQUIRE(j["lower"].get<double>() <= j["upper"].get<double>() + 1e-9);
  REQUIRE(j["witness_permutation"].size() == 3);
  REQUIRE(j["witness_unitary"]["dim"] == 3);
}
