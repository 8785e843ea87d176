// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. The CLI binary path may be passed as argv[1] for the determinism
// criterion; without it that criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "orbit_transport/geodesics.hpp"
#include "orbit_transport/line_circle.hpp"
#include "orbit_transport/orbit.hpp"
#include "orbit_transport/parallel.hpp"
#include "orbit_transport/random_instances.hpp"
#include "orbit_transport/selftest.hpp"

using namespace ot;

namespace {

constexpr std::uint64_t kRootSeed = 20250807;

double worst_of(std::size_t trials, std::uint64_t salt,
                const std::function<double(rng&)>& trial_violation) {
  std::vector<double> v(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    rng r(derive_seed(kRootSeed ^ salt, t));
    v[t] = trial_violation(r);
  });
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, x);
  return worst;
}

double positive(double x) { return std::max(x, 0.0); }

// ---------------------------------------------------------------- criterion 1

bool criterion_equality_certificate(std::string& detail) {
  const std::size_t trials = 500;
  std::vector<double> gap(trials, 0.0), escape(trials, 0.0);
  parallel_for(trials, [&](std::size_t t) {
    rng r(derive_seed(kRootSeed ^ 0x11ULL, t));
    std::size_t n = 2 + r.index(9);  // n in {2,...,10}
    auto x = random_normal(n, SpectrumKind::disc, r.bits());
    auto y = random_normal(n, SpectrumKind::disc, r.bits());
    RiemannianOptions opts;
    opts.restarts = 16;
    opts.max_iters = 200;
    opts.seed = r.bits();
    auto cert = d_u2_certificate(x, y, opts);
    gap[t] = (cert.upper - cert.lower) / (1.0 + cert.lower);
    escape[t] = std::max(positive(cert.lower - cert.optimized),
                         positive(cert.optimized - cert.upper));
  });
  double worst_gap = 0.0, worst_escape = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    worst_gap = std::max(worst_gap, gap[t]);
    worst_escape = std::max(worst_escape, escape[t]);
  }
  std::ostringstream os;
  os << "500 pairs, worst relative gap " << worst_gap << " (tol 1e-6), worst bracket escape "
     << worst_escape << " (tol 1e-7)";
  detail = os.str();
  return worst_gap <= 1e-6 && worst_escape <= 1e-7;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_hoffman_wielandt(std::string& detail) {
  const std::size_t trials = 10000;
  double worst = worst_of(trials, 0x22ULL, [](rng& r) {
    std::size_t n = 2 + r.index(11);  // n <= 12
    auto x = random_normal(n, SpectrumKind::disc, r.bits());
    auto y = random_normal(n, SpectrumKind::disc, r.bits());
    auto g = hoffman_wielandt_gap(x, y);
    return positive(g.w2 - g.norm2);
  });
  std::ostringstream os;
  os << "10000 pairs, worst W_2 excess " << worst << " (tol 1e-8)";
  detail = os.str();
  return worst <= 1e-8;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_permutation_optimality(std::string& detail) {
  const std::size_t trials = 200;
  double worst = worst_of(trials, 0x33ULL, [](rng& r) {
    std::size_t n = 2 + r.index(7);  // n <= 8
    auto mu = random_uniform_measure(r, n);
    auto nu = random_uniform_measure(r, n);
    double w = 0.0;
    for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
      double lp = wasserstein(mu, nu, p).distance;
      double as = assignment_wp(mu.atoms, nu.atoms, p).distance;
      double bf = brute_force_wp(mu.atoms, nu.atoms, p).distance;
      w = std::max({w, std::abs(lp - as), std::abs(as - bf)});
    }
    return w;
  });
  std::ostringstream os;
  os << "200 uniform pairs x p in {1,2,4,inf}, worst spread " << worst << " (tol 1e-9)";
  detail = os.str();
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_wasserstein_structure(std::string& detail) {
  const std::size_t trials = 500;

  double mono = worst_of(trials, 0x441ULL, [](rng& r) {
    auto mu = random_measure(r, 1 + r.index(6));
    auto nu = random_measure(r, 1 + r.index(6));
    double w = 0.0, prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 64.0}) {
      double d = wasserstein_p(mu, nu, p).distance;
      w = std::max(w, positive(prev - d));
      prev = d;
    }
    w = std::max(w, positive(prev - wasserstein_inf(mu, nu).distance));
    return w;
  });

  double convex = worst_of(trials, 0x442ULL, [](rng& r) {
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
    double w = 0.0;
    for (double p : {1.0, 2.0, 4.0}) {
      double lhs = std::pow(wasserstein_p(mix_mu, mix_nu, p).distance, p);
      double rhs = 0.0;
      for (int i = 0; i < 3; ++i)
        rhs += lambda[i] * std::pow(wasserstein_p(mus[i], nus[i], p).distance, p);
      w = std::max(w, positive(lhs - rhs));
    }
    return w;
  });

  double metric = worst_of(trials, 0x443ULL, [](rng& r) {
    auto mu = random_measure(r, 2 + r.index(5));
    auto nu = random_measure(r, 2 + r.index(5));
    auto la = random_measure(r, 2 + r.index(5));
    double w = 0.0;
    for (double p : {1.0, 2.0, kInfiniteP}) {
      double ab = wasserstein(mu, nu, p).distance;
      double ba = wasserstein(nu, mu, p).distance;
      double ac = wasserstein(mu, la, p).distance;
      double bc = wasserstein(nu, la, p).distance;
      w = std::max(w, std::abs(ab - ba));
      w = std::max(w, positive(ac - ab - bc));
      w = std::max(w, wasserstein(mu, mu, p).distance);
    }
    return w;
  });

  // the 2% clause is a theorem for equal-size uniform pairs with n <= 3
  double limit = worst_of(trials, 0x444ULL, [](rng& r) {
    std::size_t n = 2 + r.index(2);
    auto mu = random_uniform_measure(r, n);
    auto nu = random_uniform_measure(r, n);
    double w64 = wasserstein_p(mu, nu, 64).distance;
    double wi = wasserstein_inf(mu, nu).distance;
    return wi > 1e-12 ? std::abs(w64 - wi) / wi : 0.0;
  });

  std::ostringstream os;
  os << "500 trials each: monotone " << mono << ", convex " << convex << ", metric " << metric
     << " (tol 1e-9); W64-vs-Winf " << limit << " (tol 0.02)";
  detail = os.str();
  return mono <= 1e-9 && convex <= 1e-9 && metric <= 1e-9 && limit <= 0.02;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_interval_transport(std::string& detail) {
  const std::size_t trials = 500;
  double worst = worst_of(trials, 0x55ULL, [](rng& r) {
    auto mu = random_real_measure(r, 1 + r.index(8));
    auto nu = random_real_measure(r, 1 + r.index(8));
    double w = 0.0;
    for (double p : {1.0, 2.0, 4.0, kInfiniteP}) {
      double q = quantile_wp_1d(mu, nu, p).distance;
      double lp = wasserstein(mu, nu, p).distance;
      w = std::max(w, std::abs(q - lp));
    }
    return w;
  });
  std::ostringstream os;
  os << "500 real pairs x p in {1,2,4,inf}, worst |quantile - LP| " << worst << " (tol 1e-9)";
  detail = os.str();
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_circle_transport(std::string& detail) {
  GroundMetric arc = [](const Point& x, const Point& y) {
    double tx = std::atan2(x.im, x.re), ty = std::atan2(y.im, y.re);
    double d = std::abs(tx - ty);
    return std::min(d, kTwoPi - d);
  };

  // shift search vs exhaustive matching with arc costs, uniform atoms n <= 8
  double shift_worst = worst_of(150, 0x661ULL, [&](rng& r) {
    std::size_t n = 2 + r.index(7);
    auto mu = make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
    auto nu = make_measure(random_circle_measure(r, n, 1.0).atoms, std::vector<double>(n, 1.0));
    double w = 0.0;
    for (double p : {1.0, 2.0, kInfiniteP}) {
      double shift = circle_wp(mu, nu, p, {1.0, MetricKind::intrinsic}).transport.distance;
      double oracle = brute_force_wp(mu.atoms, nu.atoms, p, arc).distance;
      w = std::max(w, std::abs(shift - oracle));
    }
    return w;
  });

  // sandwich and the W_inf chord conversion on 500 random pairs
  double sandwich_worst = worst_of(500, 0x662ULL, [](rng& r) {
    double radius = 0.5 + r.uniform(0.0, 2.0);
    auto mu = random_circle_measure(r, 1 + r.index(6), radius);
    auto nu = random_circle_measure(r, 1 + r.index(6), radius);
    double w = 0.0;
    for (double p : {1.0, 2.0, kInfiniteP}) {
      double ch = circle_wp(mu, nu, p, {radius, MetricKind::chordal}).transport.distance;
      double in = circle_wp(mu, nu, p, {radius, MetricKind::intrinsic}).transport.distance;
      w = std::max(w, positive(ch - in));
      w = std::max(w, positive(in - 1.5707963267948966 * ch));
    }
    return w;
  });

  double conversion_worst = worst_of(500, 0x663ULL, [](rng& r) {
    double radius = 0.5 + r.uniform(0.0, 2.0);
    auto mu = random_circle_measure(r, 1 + r.index(6), radius);
    auto nu = random_circle_measure(r, 1 + r.index(6), radius);
    CircleGeometry geom{radius, MetricKind::chordal};
    auto res = circle_wp(mu, nu, kInfiniteP, geom);
    double intrinsic =
        circle_wp(mu, nu, kInfiniteP, {radius, MetricKind::intrinsic}).transport.distance;
    double converted = chordal_from_intrinsic_winf(intrinsic, geom);
    // the converted value must match both the shift result and the LP optimum
    return std::max(std::abs(res.transport.distance - converted),
                    std::abs(res.lp_value - converted));
  });

  std::ostringstream os;
  os << "shift-vs-brute " << shift_worst << ", sandwich " << sandwich_worst
     << ", W_inf chord conversion " << conversion_worst << " (tol 1e-9)";
  detail = os.str();
  return shift_worst <= 1e-9 && sandwich_worst <= 1e-9 && conversion_worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 7

bool criterion_weyl_bhatia_davis(std::string& detail) {
  auto run = [](SpectrumKind kind, std::uint64_t salt) {
    return worst_of(200, salt, [kind](rng& r) {
      std::size_t n = 2 + r.index(5);  // n <= 6
      auto x = random_normal(n, kind, r.bits());
      auto y = random_normal(n, kind, r.bits());
      double delta = orbit_upper(x, y, kInfiniteP).value;
      RiemannianOptions opts;
      opts.restarts = 4;
      opts.max_iters = 200;
      opts.seed = r.bits();
      double est = riemannian_minimize(x, y, kInfiniteP, opts).value;
      return delta > 1e-12 ? std::abs(delta - est) / delta : 0.0;
    });
  };
  double sa = run(SpectrumKind::interval, 0x771ULL);
  double un = run(SpectrumKind::circle, 0x772ULL);
  std::ostringstream os;
  os << "200 self-adjoint pairs worst rel dev " << sa << ", 200 unitary pairs " << un
     << " (tol 1e-3)";
  detail = os.str();
  return sa <= 1e-3 && un <= 1e-3;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_geodesics(std::string& detail) {
  std::vector<double> ts;
  for (int k = 0; k <= 10; ++k) ts.push_back(k / 10.0);
  double speed = worst_of(100, 0x881ULL, [&](rng& r) {
    auto mu = random_uniform_measure(r, 6);
    auto nu = random_uniform_measure(r, 6);
    return verify_geodesic(mu, nu, ts).worst_violation;
  });

  std::vector<double> knots{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  double orbit_consistency = worst_of(20, 0x882ULL, [&](rng& r) {
    std::size_t n = 2 + r.index(3);
    auto x = random_normal(n, SpectrumKind::disc, r.bits());
    auto y = random_normal(n, SpectrumKind::disc, r.bits());
    RiemannianOptions opts;
    opts.restarts = 2;
    opts.max_iters = 150;
    opts.seed = r.bits();
    double total = d_u2_certificate(x, y, opts).optimized;
    auto path = orbit_geodesic_matrices(x, y, knots);
    double w = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      auto cert = d_u2_certificate(path[k], path[k + 1], opts);
      w = std::max(w, std::abs(cert.optimized - (knots[k + 1] - knots[k]) * total));
    }
    return w;
  });

  std::ostringstream os;
  os << "constant speed worst " << speed << " (tol 1e-7, 100 pairs, 11 samples); orbit path "
     << orbit_consistency << " (tol 1e-6, 20 pairs)";
  detail = os.str();
  return speed <= 1e-7 && orbit_consistency <= 1e-6;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_gap_search(std::string& detail) {
  RiemannianOptions opts;
  opts.restarts = 16;
  opts.max_iters = 200;
  auto report = gap_search(3, 1000, kRootSeed ^ 0x99ULL, opts, SpectrumKind::disc);
  std::size_t confirmed = 0;
  for (const auto& c : report.candidates) confirmed += c.confirmed;
  std::ostringstream os;
  os << "1000 M_3 trials: invariant violations " << report.invariant_violations
     << " (required 0), worst slack " << report.worst_invariant_slack << ", candidates "
     << report.candidates.size() << " raw / " << confirmed << " confirmed";
  detail = os.str();
  return report.invariant_violations == 0;
}

// --------------------------------------------------------------- criterion 10

bool criterion_determinism(const std::string& cli, std::string& detail) {
  if (cli.empty()) {
    detail = "CLI binary path not supplied (pass it as argv[1])";
    return false;
  }
  std::string out1 = "/tmp/orbit_selftest_run1.json";
  std::string out2 = "/tmp/orbit_selftest_run2.json";
  auto run = [&](const std::string& out) {
    std::string cmd = cli + " selftest --seed 7 --no-timestamps --emit " + out;
    return std::system(cmd.c_str());
  };
  int rc1 = run(out1);
  int rc2 = run(out2);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = slurp(out1), b = slurp(out2);
  bool identical = !a.empty() && a == b;
  std::ostringstream os;
  os << "two selftest runs: exit codes " << rc1 << "/" << rc2 << ", " << a.size() << " bytes, "
     << (identical ? "byte-identical" : "DIFFER");
  detail = os.str();
  return rc1 == 0 && rc2 == 0 && identical;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";

  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  std::vector<Criterion> criteria{
      {1, "equality certificate d_U2 = W_2", criterion_equality_certificate},
      {2, "Hoffman-Wielandt inequality", criterion_hoffman_wielandt},
      {3, "permutation optimality on uniform atoms", criterion_permutation_optimality},
      {4, "Wasserstein metric structure", criterion_wasserstein_structure},
      {5, "interval quantile transport", criterion_interval_transport},
      {6, "circle shift transport and chord sandwich", criterion_circle_transport},
      {7, "Weyl / Bhatia-Davis matching equality", criterion_weyl_bhatia_davis},
      {8, "displacement geodesics", criterion_geodesics},
      {9, "gap search invariant", criterion_gap_search},
      {10, "selftest determinism", [&cli](std::string& d) { return criterion_determinism(cli, d); }},
  };

  bool all_pass = true;
  for (auto& criterion : criteria) {
    auto started = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      pass = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("%s criterion %2d: %s — %s [%.1fs]\n", pass ? "PASS" : "FAIL", criterion.id,
                criterion.label, detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  std::printf("%s\n", all_pass ? "ACCEPTANCE: ALL CRITERIA PASS" : "ACCEPTANCE: FAILURES PRESENT");
  return all_pass ? 0 : 1;
}
