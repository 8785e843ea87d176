// Property-suite runner behind the `selftest` subcommand. Every invariant the
// library promises is exercised here with seeded trials; each suite reports
// its worst raw violation against the configured tolerance.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "orbit_transport/geodesics.hpp"
#include "orbit_transport/line_circle.hpp"
#include "orbit_transport/matrices.hpp"
#include "orbit_transport/orbit.hpp"
#include "orbit_transport/parallel.hpp"
#include "orbit_transport/random_instances.hpp"
#include "orbit_transport/transport.hpp"

namespace ot {

struct SelftestConfig {
  std::uint64_t seed = 7;
  // -1 keeps per-suite defaults; otherwise every suite runs this many trials
  long trials = -1;
  tolerances tol;
};

struct SuiteResult {
  std::string name;
  std::string anchor;  // the mathematical fact the suite exercises
  std::size_t trials = 0;
  double tolerance = 0.0;
  double worst_violation = 0.0;
  bool pass = false;
  double wall_ms = 0.0;
};

struct SelftestReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  bool all_pass = true;
};

namespace detail {

// max over trials of a per-trial violation, evaluated in parallel with
// per-trial seed streams
inline double worst_over_trials(std::size_t trials, std::uint64_t seed,
                                const std::function<double(rng&)>& trial_violation) {
  std::vector<double> v(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    rng r(derive_seed(seed, t));
    v[t] = trial_violation(r);
  });
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, x);
  return worst;
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestConfig& config) {
  SelftestReport report;
  report.seed = config.seed;
  const tolerances& tol = config.tol;

  struct Suite {
    const char* name;
    const char* anchor;
    std::size_t default_trials;
    double tolerance;
    std::function<double(std::size_t, std::uint64_t)> run;  // -> worst violation
  };

  auto positive_part = [](double x) { return std::max(x, 0.0); };

  std::vector<Suite> suites;

  suites.push_back(
      {"measures.pushforward", "pushforward preserves mass; identity map acts trivially", 60,
       tol.weight_sum, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto m = random_measure(r, 1 + r.index(8));
           double a = r.uniform(-2, 2), b = r.uniform(-2, 2);
           auto fm = pushforward(
               m, [&](const Point& z) { return Point{a * z.re - b * z.im, b * z.re + a * z.im}; });
           double v = std::abs(fm.total_mass() - 1.0);
           auto idm = pushforward(m, [](const Point& z) { return z; });
           double w1 = wasserstein_p(idm, m, 1).distance;
           return std::max(v, w1);
         });
       }});

  suites.push_back(
      {"measures.uniform_atoms", "largest-remainder apportionment is exact at the denominator",
       40, tol.marginal, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t k = 1 + r.index(5);
           std::size_t denom = 0;
           std::vector<Point> atoms;
           std::vector<double> weights;
           for (std::size_t i = 0; i < k; ++i) {
             std::size_t q = 1 + r.index(4);
             denom += q;
             atoms.emplace_back(r.unit_disc());
             weights.push_back(static_cast<double>(q));
           }
           auto m = make_measure(atoms, weights);
           auto u = uniform_atoms(m, denom);
           return wasserstein_inf(m, u.measure).distance;
         });
       }});

  suites.push_back({"transport.metric_axioms",
                    "W_p symmetry, triangle inequality, identity of indiscernibles", 50,
                    tol.metric_axioms, [&](std::size_t trials, std::uint64_t seed) {
                      return detail::worst_over_trials(trials, seed, [&](rng& r) {
                        auto mu = random_measure(r, 2 + r.index(5));
                        auto nu = random_measure(r, 2 + r.index(5));
                        auto la = random_measure(r, 2 + r.index(5));
                        double worst = 0.0;
                        for (double p : {1.0, 2.0, kInfiniteP}) {
                          double ab = wasserstein(mu, nu, p).distance;
                          double ba = wasserstein(nu, mu, p).distance;
                          double ac = wasserstein(mu, la, p).distance;
                          double bc = wasserstein(nu, la, p).distance;
                          worst = std::max(worst, std::abs(ab - ba));
                          worst = std::max(worst, positive_part(ac - ab - bc));
                          worst = std::max(worst, wasserstein(mu, mu, p).distance);
                        }
                        return worst;
                      });
                    }});

  suites.push_back(
      {"transport.monotone_in_p", "W_p is nondecreasing in p with limit W_inf", 40,
       tol.monotonicity, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_measure(r, 1 + r.index(6));
           auto nu = random_measure(r, 1 + r.index(6));
           double worst = 0.0, prev = 0.0;
           for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0}) {
             double w = wasserstein_p(mu, nu, p).distance;
             worst = std::max(worst, positive_part(prev - w));
             prev = w;
           }
           worst = std::max(worst, positive_part(prev - wasserstein_inf(mu, nu).distance));
           return worst;
         });
       }});

  suites.push_back(
      {"transport.w64_near_winf",
       "W_64 within 2% of W_inf (equal-size uniform pairs, n <= 3)", 40, tol.winf_p64_rel,
       [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(2);
           auto mu = random_uniform_measure(r, n);
           auto nu = random_uniform_measure(r, n);
           double w64 = wasserstein_p(mu, nu, 64).distance;
           double wi = wasserstein_inf(mu, nu).distance;
           return wi > 1e-12 ? std::abs(w64 - wi) / wi : 0.0;
         });
       }});

  suites.push_back(
      {"transport.convexity", "W_p^p is convex under mixtures", 40, tol.convexity,
       [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::vector<DiscreteMeasure> mus, nus;
           std::vector<double> lambda;
           double z = 0.0;
           for (int i = 0; i < 3; ++i) {
             mus.push_back(random_measure(r, 1 + r.index(4)));
             nus.push_back(random_measure(r, 1 + r.index(4)));
             lambda.push_back(0.1 + r.uniform());
             z += lambda.back();
           }
           std::vector<Point> am, an;
           std::vector<double> wm, wn;
           for (int i = 0; i < 3; ++i) {
             lambda[i] /= z;
             for (std::size_t k = 0; k < mus[i].size(); ++k) {
               am.push_back(mus[i].atoms[k]);
               wm.push_back(lambda[i] * mus[i].weights[k]);
             }
             for (std::size_t k = 0; k < nus[i].size(); ++k) {
               an.push_back(nus[i].atoms[k]);
               wn.push_back(lambda[i] * nus[i].weights[k]);
             }
           }
           auto mix_mu = make_measure(am, wm);
           auto mix_nu = make_measure(an, wn);
           double worst = 0.0;
           for (double p : {1.0, 2.0, 4.0}) {
             double lhs = std::pow(wasserstein_p(mix_mu, mix_nu, p).distance, p);
             double rhs = 0.0;
             for (int i = 0; i < 3; ++i)
               rhs += lambda[i] * std::pow(wasserstein_p(mus[i], nus[i], p).distance, p);
             worst = std::max(worst, positive_part(lhs - rhs));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"transport.vertex_optimality",
       "optimal couplings of uniform atoms sit on permutations", 30, tol.vertex_assignment,
       [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(5);
           auto mu = random_uniform_measure(r, n);
           auto nu = random_uniform_measure(r, n);
           double worst = 0.0;
           for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
             double lp = wasserstein(mu, nu, p).distance;
             double as = assignment_wp(mu.atoms, nu.atoms, p).distance;
             double bf = brute_force_wp(mu.atoms, nu.atoms, p).distance;
             worst = std::max({worst, std::abs(lp - as), std::abs(as - bf)});
           }
           return worst;
         });
       }});

  suites.push_back(
      {"transport.plan_feasibility", "returned plans satisfy their marginals and cost",
       40, tol.marginal, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_measure(r, 1 + r.index(7));
           auto nu = random_measure(r, 1 + r.index(7));
           double worst = 0.0;
           for (double p : {1.0, 2.0, kInfiniteP}) {
             auto res = wasserstein(mu, nu, p);
             worst = std::max(worst, marginal_violation(res.plan, mu, nu));
             double recomputed = plan_cost(res.plan, mu, nu, std::isinf(p) ? p : p);
             worst = std::max(worst, std::abs(res.distance - recomputed) / (1.0 + recomputed));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"interval.quantile", "monotone rearrangement is optimal on the line", 50,
       tol.quantile_vs_lp, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_real_measure(r, 1 + r.index(8));
           auto nu = random_real_measure(r, 1 + r.index(8));
           double worst = 0.0;
           for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
             double q = quantile_wp_1d(mu, nu, p).distance;
             double lp = wasserstein(mu, nu, p).distance;
             worst = std::max(worst, std::abs(q - lp));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"circle.shift_optimality", "locally optimal circle plans are shifts", 20,
       tol.circle_vs_brute, [&](std::size_t trials, std::uint64_t seed) {
         GroundMetric arc = [](const Point& x, const Point& y) {
           double tx = std::atan2(x.im, x.re), ty = std::atan2(y.im, y.re);
           double d = std::abs(tx - ty);
           return std::min(d, kTwoPi - d);
         };
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(5);
           auto mu =
               make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
           auto nu =
               make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
           double worst = 0.0;
           for (double p : {1.0, 2.0, kInfiniteP}) {
             double shift = circle_wp(mu, nu, p, {1.0, MetricKind::intrinsic}).transport.distance;
             double oracle = brute_force_wp(mu.atoms, nu.atoms, p, arc).distance;
             worst = std::max(worst, std::abs(shift - oracle));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"circle.sandwich", "chordal <= intrinsic <= (pi/2) chordal", 30, tol.sandwich,
       [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           double radius = 0.5 + r.uniform(0.0, 2.0);
           auto mu = random_circle_measure(r, 1 + r.index(6), radius);
           auto nu = random_circle_measure(r, 1 + r.index(6), radius);
           double worst = 0.0;
           for (double p : {1.0, 2.0, kInfiniteP}) {
             double ch = circle_wp(mu, nu, p, {radius, MetricKind::chordal}).transport.distance;
             double in = circle_wp(mu, nu, p, {radius, MetricKind::intrinsic}).transport.distance;
             worst = std::max(worst, positive_part(ch - in));
             worst = std::max(worst, positive_part(in - 1.5707963267948966 * ch));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"circle.rotation_invariance", "common rotations change no circle distance", 20,
       tol.rotation_invariance, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_circle_measure(r, 1 + r.index(5), 1.0);
           auto nu = random_circle_measure(r, 1 + r.index(5), 1.0);
           double angle = r.uniform(0.0, kTwoPi);
           auto rot = [angle](const Point& z) {
             double c = std::cos(angle), s = std::sin(angle);
             return Point{c * z.re - s * z.im, s * z.re + c * z.im};
           };
           auto mur = pushforward(mu, rot);
           auto nur = pushforward(nu, rot);
           double worst = 0.0;
           for (double p : {2.0, kInfiniteP}) {
             for (MetricKind kind : {MetricKind::intrinsic, MetricKind::chordal}) {
               double a = circle_wp(mu, nu, p, {1.0, kind}).transport.distance;
               double b = circle_wp(mur, nur, p, {1.0, kind}).transport.distance;
               worst = std::max(worst, std::abs(a - b));
             }
           }
           return worst;
         });
       }});

  suites.push_back(
      {"matrices.schatten", "tracial Schatten norms: triangle inequality, monotone in p", 40,
       tol.schatten_triangle, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 1 + r.index(6);
           CMat a(n, n), b(n, n);
           for (std::size_t i = 0; i < n; ++i)
             for (std::size_t j = 0; j < n; ++j) {
               a(i, j) = r.complex_gaussian();
               b(i, j) = r.complex_gaussian();
             }
           double worst = 0.0;
           for (double p : {1.0, 2.0, 4.0, kInfiniteP})
             worst = std::max(worst, positive_part(schatten_norm(a + b, p) - schatten_norm(a, p) -
                                                   schatten_norm(b, p)));
           double prev = 0.0;
           for (double p : {1.0, 2.0, 4.0, 16.0, 64.0}) {
             double v = schatten_norm(a, p);
             worst = std::max(worst, positive_part(prev - v));
             prev = v;
           }
           worst = std::max(worst, positive_part(prev - schatten_norm(a, kInfiniteP)));
           return worst;
         });
       }});

  suites.push_back(
      {"matrices.hoffman_wielandt", "W_2 of spectral measures <= tracial 2-norm difference",
       400, tol.hw_gap, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(11);
           auto x = random_normal(n, SpectrumKind::disc, r.bits());
           auto y = random_normal(n, SpectrumKind::disc, r.bits());
           auto g = hoffman_wielandt_gap(x, y);
           return positive_part(g.w2 - g.norm2);
         });
       }});

  suites.push_back(
      {"matrices.spectral_conjugation", "spectral measures are conjugation invariants", 25,
       tol.spectral_conjugation, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(5);
           auto x = random_normal(n, SpectrumKind::disc, r.bits());
           CMat u = haar_unitary(n, r);
           auto y = make_normal(u * x.entries * u.adjoint());
           return wasserstein_p(spectral_measure(x), spectral_measure(y), 1).distance;
         });
       }});

  suites.push_back(
      {"orbit.certificate", "d_{U,2} upper and lower bounds close to equality", 30,
       tol.certificate_rel, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(6);
           auto x = random_normal(n, SpectrumKind::disc, r.bits());
           auto y = random_normal(n, SpectrumKind::disc, r.bits());
           RiemannianOptions opts;
           opts.restarts = 2;
           opts.max_iters = 150;
           opts.seed = r.bits();
           auto cert = d_u2_certificate(x, y, opts, tol);
           return positive_part(cert.upper - cert.lower) / (1.0 + cert.lower);
         });
       }});

  suites.push_back(
      {"orbit.descent_bracket", "optimized value stays within the certificate bracket", 20,
       tol.certificate_bracket, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(5);
           auto x = random_normal(n, SpectrumKind::disc, r.bits());
           auto y = random_normal(n, SpectrumKind::disc, r.bits());
           RiemannianOptions opts;
           opts.restarts = 2;
           opts.max_iters = 150;
           opts.seed = r.bits();
           auto cert = d_u2_certificate(x, y, opts, tol);
           double worst = positive_part(cert.lower - cert.optimized);
           worst = std::max(worst, positive_part(cert.optimized - cert.upper));
           auto ub = orbit_upper(x, y, kInfiniteP, tol);
           auto opt = riemannian_minimize(x, y, kInfiniteP, opts, tol);
           worst = std::max(worst, positive_part(opt.value - ub.value));
           return worst;
         });
       }});

  suites.push_back(
      {"orbit.invariance", "certificates are unitary- and translation-invariant", 8,
       tol.unitary_invariance, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(3);
           auto x = random_normal(n, SpectrumKind::disc, r.bits());
           auto y = random_normal(n, SpectrumKind::disc, r.bits());
           RiemannianOptions opts;
           opts.restarts = 2;
           opts.max_iters = 150;
           opts.seed = 11;
           auto base = d_u2_certificate(x, y, opts, tol);
           CMat v = haar_unitary(n, r);
           auto conj = d_u2_certificate(x, make_normal(v * y.entries * v.adjoint()), opts, tol);
           double worst = std::abs(conj.optimized - base.optimized);
           Cx lambda = r.complex_gaussian();
           auto xs = make_normal(x.entries + lambda * CMat::Identity(n, n));
           auto ys = make_normal(y.entries + lambda * CMat::Identity(n, n));
           auto shifted = d_u2_certificate(xs, ys, opts, tol);
           worst = std::max(worst, std::abs(shifted.optimized - base.optimized));
           return worst;
         });
       }});

  suites.push_back(
      {"orbit.weyl_bhatia_davis",
       "sorted/circular matching equals the orbit distance for self-adjoint and unitary pairs",
       20, tol.weyl_rel, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           std::size_t n = 2 + r.index(5);
           SpectrumKind kind = (r.bits() & 1) ? SpectrumKind::interval : SpectrumKind::circle;
           auto x = random_normal(n, kind, r.bits());
           auto y = random_normal(n, kind, r.bits());
           double delta = orbit_upper(x, y, kInfiniteP, tol).value;
           RiemannianOptions opts;
           opts.restarts = 2;
           opts.max_iters = 150;
           opts.seed = r.bits();
           double est = riemannian_minimize(x, y, kInfiniteP, opts, tol).value;
           return delta > 1e-12 ? std::abs(delta - est) / delta : 0.0;
         });
       }});

  suites.push_back(
      {"geodesics.constant_speed", "displacement interpolation moves at constant speed", 15,
       tol.geodesic_speed, [&](std::size_t trials, std::uint64_t seed) {
         std::vector<double> ts;
         for (int k = 0; k <= 10; ++k) ts.push_back(k / 10.0);
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_uniform_measure(r, 6);
           auto nu = random_uniform_measure(r, 6);
           return verify_geodesic(mu, nu, ts, tol).worst_violation;
         });
       }});

  suites.push_back(
      {"geodesics.interpolant_mass", "interpolants carry total mass one", 20,
       tol.interpolant_mass, [&](std::size_t trials, std::uint64_t seed) {
         return detail::worst_over_trials(trials, seed, [&](rng& r) {
           auto mu = random_measure(r, 1 + r.index(6));
           auto nu = random_measure(r, 1 + r.index(6));
           auto plan = wasserstein_p(mu, nu, 2).plan;
           double worst = 0.0;
           for (double t : {0.25, 0.5, 0.75}) {
             auto m = displacement_interpolation(mu, nu, plan, t, tol);
             worst = std::max(worst, std::abs(m.total_mass() - 1.0));
           }
           return worst;
         });
       }});

  suites.push_back(
      {"orbit.gap_invariant", "multistart estimates never exceed the matching distance", 1,
       tol.gap_invariant, [&](std::size_t trials, std::uint64_t seed) {
         if (trials == 0) return 0.0;
         RiemannianOptions opts;
         opts.restarts = 4;
         opts.max_iters = 150;
         auto report = gap_search(3, 10 * trials, seed, opts, SpectrumKind::disc, tol);
         return std::max(report.worst_invariant_slack, 0.0);
       }});

  for (std::size_t idx = 0; idx < suites.size(); ++idx) {
    const Suite& suite = suites[idx];
    SuiteResult result;
    result.name = suite.name;
    result.anchor = suite.anchor;
    result.trials = config.trials >= 0 ? static_cast<std::size_t>(config.trials)
                                       : suite.default_trials;
    result.tolerance = suite.tolerance;
    auto started = std::chrono::steady_clock::now();
    if (result.trials == 0) {
      result.worst_violation = 0.0;
    } else {
      try {
        result.worst_violation =
            suite.run(result.trials, derive_seed(config.seed, 0xabcd0000ULL + idx));
      } catch (const std::exception&) {
        // an operation refused to certify under the configured tolerances
        result.worst_violation = std::numeric_limits<double>::infinity();
      }
    }
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    result.pass = result.worst_violation <= result.tolerance;
    report.all_pass = report.all_pass && result.pass;
    report.suites.push_back(std::move(result));
  }

  return report;
}

}  // namespace ot
