// orbit-transport: Wasserstein distances between spectral measures, unitary
// orbit certificates, circle/interval closed forms, displacement geodesics,
// gap searches, and the property selftest.
//
// Exit codes: 0 success, 1 property or certificate violation, 2 input error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "orbit_transport/geodesics.hpp"
#include "orbit_transport/json_io.hpp"
#include "orbit_transport/line_circle.hpp"
#include "orbit_transport/orbit.hpp"
#include "orbit_transport/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

ot::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  ot::require(in.good(), ot::errc::invalid_argument, "cannot open '" + path + "'");
  try {
    return ot::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    ot::fail(ot::errc::invalid_argument, "cannot parse '" + path + "': " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  ot::require(out.good(), ot::errc::invalid_argument, "cannot write '" + path + "'");
  out << text << '\n';
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity") {
    return ot::kInfiniteP;
  }
  try {
    std::size_t used = 0;
    double p = std::stod(text, &used);
    ot::require(used == text.size() && std::isfinite(p) && p >= 1.0, ot::errc::invalid_argument,
                "p must be a real number >= 1 or 'inf'");
    return p;
  } catch (const ot::error&) {
    throw;
  } catch (const std::exception&) {
    ot::fail(ot::errc::invalid_argument, "p must be a real number >= 1 or 'inf'");
  }
}

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os << p;
  return os.str();
}

struct CommonEmit {
  std::string emit;  // machine-readable output path; empty prints a human summary
};

void deliver(const CommonEmit& common, const ot::json& payload,
             const std::function<void()>& human_summary) {
  if (!common.emit.empty()) {
    write_file(common.emit, payload.dump(2));
  } else {
    human_summary();
  }
}

// ----------------------------------------------------------------- wasserstein

struct WassersteinArgs {
  std::string p = "2";
  std::string mu_path, nu_path, emit_plan;
  CommonEmit common;
};

int run_wasserstein(const WassersteinArgs& args) {
  double p = parse_p(args.p);
  auto mu = ot::measure_from_json(read_json_file(args.mu_path));
  auto nu = ot::measure_from_json(read_json_file(args.nu_path));
  auto result = ot::wasserstein(mu, nu, p);

  ot::json payload{{"command", "wasserstein"},
                   {"p", ot::p_to_json(p)},
                   {"distance", result.distance},
                   {"plan", ot::plan_to_json(result)}};
  if (!args.emit_plan.empty()) write_file(args.emit_plan, ot::plan_to_json(result).dump(2));
  deliver(args.common, payload, [&] {
    std::printf("W_%s = %.12g  (%zu x %zu atoms, plan support %zu)\n", format_p(p).c_str(),
                result.distance, mu.size(), nu.size(), result.plan.support_size(1e-13));
  });
  return kExitOk;
}

// ----------------------------------------------------------------------- circle

struct CircleArgs {
  std::string p = "2";
  std::string metric = "intrinsic";
  double radius = 1.0;
  std::string mu_path, nu_path;
  CommonEmit common;
};

int run_circle(const CircleArgs& args) {
  double p = parse_p(args.p);
  ot::require(args.metric == "intrinsic" || args.metric == "chordal", ot::errc::invalid_argument,
              "metric must be 'intrinsic' or 'chordal'");
  auto mu = ot::measure_from_json(read_json_file(args.mu_path));
  auto nu = ot::measure_from_json(read_json_file(args.nu_path));

  ot::CircleGeometry geom{args.radius, args.metric == "intrinsic" ? ot::MetricKind::intrinsic
                                                                  : ot::MetricKind::chordal};
  auto requested = ot::circle_wp(mu, nu, p, geom);
  ot::CircleGeometry other_geom{args.radius, geom.metric_kind == ot::MetricKind::intrinsic
                                                 ? ot::MetricKind::chordal
                                                 : ot::MetricKind::intrinsic};
  auto other = ot::circle_wp(mu, nu, p, other_geom);

  double intrinsic = geom.metric_kind == ot::MetricKind::intrinsic ? requested.transport.distance
                                                                   : other.transport.distance;
  double chordal = geom.metric_kind == ot::MetricKind::chordal ? requested.transport.distance
                                                               : other.transport.distance;
  double ratio = chordal > 0.0 ? intrinsic / chordal : 1.0;

  ot::json payload{{"command", "circle"},
                   {"p", ot::p_to_json(p)},
                   {"radius", args.radius},
                   {"metric", args.metric},
                   {"distance", requested.transport.distance},
                   {"intrinsic", intrinsic},
                   {"chordal", chordal},
                   {"ratio_intrinsic_over_chordal", ratio},
                   {"shift", ot::json{{"cut_source", requested.shift.cut_source},
                                      {"cut_target", requested.shift.cut_target},
                                      {"value", requested.shift_value}}},
                   {"lp_value", requested.lp_value},
                   {"cut_search_gap", requested.cut_search_gap},
                   {"plan", ot::plan_to_json(requested.transport)}};
  deliver(args.common, payload, [&] {
    std::printf("circle W_%s (%s, r = %g) = %.12g\n", format_p(p).c_str(), args.metric.c_str(),
                args.radius, requested.transport.distance);
    std::printf("  intrinsic = %.12g, chordal = %.12g, ratio = %.6f (pi/2 = %.6f)\n", intrinsic,
                chordal, ratio, 1.5707963267948966);
    std::printf("  shift cuts: source %.6f rad, target %.6f rad; LP cross-check %.12g\n",
                requested.shift.cut_source, requested.shift.cut_target, requested.lp_value);
    if (requested.cut_search_gap)
      std::printf("  warning: LP beat every shift beyond tolerance (cut-search gap)\n");
  });
  return kExitOk;
}

// --------------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string matrix_path;
  CommonEmit common;
};

int run_spectrum(const SpectrumArgs& args) {
  auto x = ot::make_normal(ot::matrix_from_json(read_json_file(args.matrix_path)));
  auto measure = ot::spectral_measure(x);
  ot::json payload = ot::measure_to_json(measure);
  deliver(args.common, payload, [&] {
    std::printf("spectral measure of a %zu x %zu normal matrix (residual %.3g):\n", x.dim(),
                x.dim(), x.normality_residual);
    for (std::size_t i = 0; i < measure.size(); ++i)
      std::printf("  (% .12g, % .12g)  weight %.12g\n", measure.atoms[i].re, measure.atoms[i].im,
                  measure.weights[i]);
  });
  return kExitOk;
}

// ------------------------------------------------------------------------ orbit

struct OrbitArgs {
  std::string p = "2";
  std::string x_path, y_path, emit_certificate;
  std::size_t restarts = 16;
  std::size_t max_iters = 300;
  std::uint64_t seed = 7;
  bool inject_forged_certificate = false;  // test hook
  CommonEmit common;
};

int run_orbit(const OrbitArgs& args) {
  double p = parse_p(args.p);
  auto x = ot::make_normal(ot::matrix_from_json(read_json_file(args.x_path)));
  auto y = ot::make_normal(ot::matrix_from_json(read_json_file(args.y_path)));

  ot::RiemannianOptions opts;
  opts.restarts = args.restarts;
  opts.max_iters = args.max_iters;
  opts.seed = args.seed;

  const auto& tol = ot::default_tolerances();
  if (p == 2.0) {
    auto cert = ot::d_u2_certificate(x, y, opts);
    if (args.inject_forged_certificate) cert.upper = cert.lower - 1.0;

    // independent validation of the emitted certificate
    bool valid = cert.lower <= cert.optimized + tol.certificate_bracket &&
                 cert.optimized <= cert.upper + tol.certificate_bracket &&
                 cert.upper - cert.lower <= tol.certificate_rel * (1.0 + cert.lower);
    double achieved = ot::schatten_norm(
        x.entries - cert.witness_unitary.entries * y.entries *
                        cert.witness_unitary.entries.adjoint(),
        2.0);
    valid = valid && std::abs(achieved - cert.optimized) <=
                         tol.witness_objective * (1.0 + achieved) + 1e-12;

    ot::json payload = ot::certificate_to_json(cert);
    payload["valid"] = valid;
    if (!args.emit_certificate.empty()) write_file(args.emit_certificate, payload.dump(2));
    deliver(args.common, payload, [&] {
      std::printf("d_U2 certificate: lower %.12g <= optimized %.12g <= upper %.12g\n", cert.lower,
                  cert.optimized, cert.upper);
      std::printf("  witness objective %.12g, optimizer %s, %s\n", achieved,
                  cert.optimizer_converged ? "converged" : "iteration-capped",
                  valid ? "VALID" : "INVALID");
    });
    if (!valid) {
      std::fprintf(stderr, "certificate validation failed\n");
      return kExitViolation;
    }
    return kExitOk;
  }

  auto upper = ot::orbit_upper(x, y, p);
  auto opt = ot::riemannian_minimize(x, y, p, opts);
  bool valid = opt.value <= upper.value + tol.riemannian_upper;
  ot::json payload{{"command", "orbit"},
                   {"p", ot::p_to_json(p)},
                   {"upper", upper.value},
                   {"optimized", opt.value},
                   {"optimizer_converged", opt.converged},
                   {"witness_unitary", ot::matrix_to_json(opt.minimizer.entries)},
                   {"valid", valid}};
  if (!args.emit_certificate.empty()) write_file(args.emit_certificate, payload.dump(2));
  deliver(args.common, payload, [&] {
    std::printf("orbit distance estimate at p = %s: optimized %.12g (assignment upper %.12g)\n",
                format_p(p).c_str(), opt.value, upper.value);
  });
  return valid ? kExitOk : kExitViolation;
}

// --------------------------------------------------------------------- geodesic

struct GeodesicArgs {
  std::string mu_path, nu_path;
  std::size_t samples = 11;
  CommonEmit common;
};

int run_geodesic(const GeodesicArgs& args) {
  ot::require(args.samples >= 2, ot::errc::invalid_argument, "need at least 2 samples");
  auto mu = ot::measure_from_json(read_json_file(args.mu_path));
  auto nu = ot::measure_from_json(read_json_file(args.nu_path));
  std::vector<double> ts;
  for (std::size_t k = 0; k < args.samples; ++k)
    ts.push_back(static_cast<double>(k) / static_cast<double>(args.samples - 1));
  ts.front() = 0.0;
  ts.back() = 1.0;

  auto report = ot::verify_geodesic(mu, nu, ts);
  ot::json payload = ot::geodesic_report_to_json(report);
  payload["command"] = "geodesic";
  deliver(args.common, payload, [&] {
    std::printf("geodesic with %zu samples: W_2 = %.12g, worst constant-speed violation %.3g\n",
                args.samples, report.base_distance, report.worst_violation);
    std::printf("  %s\n", report.pass ? "PASS" : "FAIL");
  });
  return report.pass ? kExitOk : kExitViolation;
}

// ------------------------------------------------------------------- gap-search

struct GapArgs {
  std::size_t dim = 3;
  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  std::size_t restarts = 16;
  std::string spectrum = "disc";
  std::string report_path;
  CommonEmit common;
};

int run_gap_search(const GapArgs& args) {
  ot::SpectrumKind kind = ot::SpectrumKind::disc;
  if (args.spectrum == "interval") {
    kind = ot::SpectrumKind::interval;
  } else if (args.spectrum == "circle") {
    kind = ot::SpectrumKind::circle;
  } else {
    ot::require(args.spectrum == "disc", ot::errc::invalid_argument,
                "spectrum must be disc, interval, or circle");
  }

  ot::RiemannianOptions opts;
  opts.restarts = args.restarts;
  opts.seed = args.seed;
  auto report = ot::gap_search(args.dim, args.trials, args.seed, opts, kind);

  ot::json payload = ot::gap_report_to_json(report);
  payload["command"] = "gap-search";
  if (!args.report_path.empty()) write_file(args.report_path, payload.dump(2));
  deliver(args.common, payload, [&] {
    std::printf("gap search: dim %zu, %zu trials (%s spectra)\n", report.dim, report.trials,
                ot::spectrum_kind_name(report.kind));
    std::printf("  invariant violations: %zu (worst slack %.3g)\n", report.invariant_violations,
                report.worst_invariant_slack);
    std::size_t confirmed = 0;
    for (const auto& c : report.candidates) confirmed += c.confirmed;
    std::printf("  strict-gap candidates: %zu raw, %zu confirmed\n", report.candidates.size(),
                confirmed);
    for (const auto& c : report.candidates) {
      if (c.confirmed)
        std::printf("    trial %zu: delta %.9g vs estimate %.9g (ratio %.6f)\n", c.trial, c.delta,
                    c.estimate, c.ratio_refined);
    }
  });
  return report.invariant_violations == 0 ? kExitOk : kExitViolation;
}

// --------------------------------------------------------------------- selftest

struct SelftestArgs {
  std::uint64_t seed = 7;
  long trials = -1;
  bool no_timestamps = false;
  std::vector<std::pair<std::string, double>> tol_overrides;
  CommonEmit common;
};

int run_selftest(const SelftestArgs& args) {
  ot::SelftestConfig config;
  config.seed = args.seed;
  config.trials = args.trials;
  ot::json overrides = ot::json::object();
  for (const auto& [name, value] : args.tol_overrides) {
    config.tol.by_name(name) = value;  // unknown keys rejected here
    overrides[name] = value;
  }

  // digest of the effective inputs (seed, trial count, overrides)
  std::ostringstream digest_src;
  digest_src << config.seed << '|' << config.trials;
  for (const auto& [name, value] : args.tol_overrides) digest_src << '|' << name << '=' << value;
  std::uint64_t digest_state = 0x6f72626974ULL;
  for (unsigned char c : digest_src.str()) {
    digest_state ^= c;
    ot::splitmix64(digest_state);
  }
  char digest_hex[20];
  std::snprintf(digest_hex, sizeof(digest_hex), "%016llx",
                static_cast<unsigned long long>(ot::splitmix64(digest_state)));

  auto started = std::chrono::steady_clock::now();
  auto report = ot::run_selftest(config);
  double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();

  ot::json suites = ot::json::array();
  for (const auto& s : report.suites) {
    ot::json row{{"name", s.name},
                 {"anchor", s.anchor},
                 {"trials", s.trials},
                 {"tolerance", s.tolerance},
                 {"worst_violation", std::isfinite(s.worst_violation)
                                         ? ot::json(s.worst_violation)
                                         : ot::json("unsatisfiable")},
                 {"pass", s.pass}};
    if (!args.no_timestamps) row["wall_ms"] = s.wall_ms;
    suites.push_back(std::move(row));
  }
  ot::json payload{{"command", "selftest"},
                   {"seed", report.seed},
                   {"trials", args.trials},
                   {"tolerance_overrides", overrides},
                   {"inputs_digest", std::string(digest_hex)},
                   {"suites", std::move(suites)},
                   {"all_pass", report.all_pass}};
  if (!args.no_timestamps) payload["wall_ms"] = wall_ms;

  deliver(args.common, payload, [&] {
    for (const auto& s : report.suites)
      std::printf("%s %-28s trials %4zu  worst %.3g vs tol %.3g  [%s]\n",
                  s.pass ? "PASS" : "FAIL", s.name.c_str(), s.trials, s.worst_violation,
                  s.tolerance, s.anchor.c_str());
    std::printf("%s\n", report.all_pass ? "ALL SUITES PASS" : "SUITE FAILURES PRESENT");
  });
  return report.all_pass ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbit-transport: Wasserstein distances between unitary orbits of normal matrices"};
  app.require_subcommand(1);

  WassersteinArgs wargs;
  auto* wcmd = app.add_subcommand("wasserstein", "p-Wasserstein distance between two measures");
  wcmd->add_option("--p", wargs.p, "exponent p >= 1 or 'inf'");
  wcmd->add_option("--mu", wargs.mu_path, "source measure JSON")->required();
  wcmd->add_option("--nu", wargs.nu_path, "target measure JSON")->required();
  wcmd->add_option("--emit-plan", wargs.emit_plan, "write the optimal plan JSON here");
  wcmd->add_option("--emit", wargs.common.emit, "write the full result JSON here");

  CircleArgs cargs;
  auto* ccmd = app.add_subcommand("circle", "transport on a circle (shift search)");
  ccmd->add_option("--p", cargs.p, "exponent p >= 1 or 'inf'");
  ccmd->add_option("--metric", cargs.metric, "intrinsic or chordal");
  ccmd->add_option("--radius", cargs.radius, "circle radius");
  ccmd->add_option("--mu", cargs.mu_path, "source measure JSON")->required();
  ccmd->add_option("--nu", cargs.nu_path, "target measure JSON")->required();
  ccmd->add_option("--emit", cargs.common.emit, "write the result JSON here");

  SpectrumArgs sargs;
  auto* scmd = app.add_subcommand("spectrum", "spectral measure of a normal matrix");
  scmd->add_option("--matrix", sargs.matrix_path, "matrix JSON")->required();
  scmd->add_option("--emit", sargs.common.emit, "write the measure JSON here");

  OrbitArgs oargs;
  auto* ocmd = app.add_subcommand("orbit", "unitary-orbit distance with certificate");
  ocmd->add_option("--p", oargs.p, "exponent (2 emits the equality certificate)");
  ocmd->add_option("--x", oargs.x_path, "first matrix JSON")->required();
  ocmd->add_option("--y", oargs.y_path, "second matrix JSON")->required();
  ocmd->add_option("--restarts", oargs.restarts, "multistart count");
  ocmd->add_option("--max-iters", oargs.max_iters, "iteration cap per restart");
  ocmd->add_option("--seed", oargs.seed, "root seed");
  ocmd->add_option("--emit-certificate", oargs.emit_certificate, "write the certificate here");
  ocmd->add_option("--emit", oargs.common.emit, "write the result JSON here");
  ocmd->add_flag("--inject-forged-certificate", oargs.inject_forged_certificate,
                 "test hook: corrupt the certificate before validation")
      ->group("");  // hidden

  GeodesicArgs gargs;
  auto* gcmd = app.add_subcommand("geodesic", "displacement interpolation with speed checks");
  gcmd->add_option("--mu", gargs.mu_path, "source measure JSON")->required();
  gcmd->add_option("--nu", gargs.nu_path, "target measure JSON")->required();
  gcmd->add_option("--samples", gargs.samples, "number of samples (including both endpoints)");
  gcmd->add_option("--emit", gargs.common.emit, "write the path JSON here");

  GapArgs papargs;
  auto* pcmd = app.add_subcommand("gap-search", "search for strict matching gaps at p = inf");
  pcmd->add_option("--dim", papargs.dim, "matrix dimension");
  pcmd->add_option("--trials", papargs.trials, "number of random pairs");
  pcmd->add_option("--seed", papargs.seed, "root seed");
  pcmd->add_option("--restarts", papargs.restarts, "multistart count per trial");
  pcmd->add_option("--spectrum", papargs.spectrum, "disc, interval, or circle");
  pcmd->add_option("--report", papargs.report_path, "write the report JSON here");
  pcmd->add_option("--emit", papargs.common.emit, "write the report JSON here");

  SelftestArgs stargs;
  auto* tcmd = app.add_subcommand("selftest", "run every property suite");
  tcmd->add_option("--seed", stargs.seed, "root seed");
  tcmd->add_option("--trials", stargs.trials, "trials per suite (-1 keeps per-suite defaults)");
  tcmd->add_flag("--no-timestamps", stargs.no_timestamps, "omit wall-clock fields");
  tcmd->add_option("--emit", stargs.common.emit, "write the report JSON here");
  std::map<std::string, double> tol_values;
  for (const auto& [name, member] : ot::tolerances::table()) {
    tol_values[name] = ot::default_tolerances().*member;
    tcmd->add_option("--tol." + name, tol_values[name], "override tolerance " + name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  // collect only the overrides that were explicitly passed
  for (const auto& [name, member] : ot::tolerances::table()) {
    if (tcmd->count("--tol." + name) > 0) stargs.tol_overrides.emplace_back(name, tol_values[name]);
  }

  try {
    if (wcmd->parsed()) return run_wasserstein(wargs);
    if (ccmd->parsed()) return run_circle(cargs);
    if (scmd->parsed()) return run_spectrum(sargs);
    if (ocmd->parsed()) return run_orbit(oargs);
    if (gcmd->parsed()) return run_geodesic(gargs);
    if (pcmd->parsed()) return run_gap_search(papargs);
    if (tcmd->parsed()) return run_selftest(stargs);
  } catch (const ot::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ot::errc::certificate_gap ? kExitViolation : kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
