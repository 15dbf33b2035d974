#pragma once

// The four CLI commands. Each writes its outputs atomically into `out_dir`
// and returns an exit code: 0 pass, 1 check failed, 2 configuration error,
// 3 numeric failure (run_command maps exceptions to the last two).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include "uhwave/scenario.hpp"

namespace uhwave {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumeric = 3 };

// Writes to a sibling temp file, then renames over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigurationError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// 17 significant digits.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace detail {

inline void append_row(std::string& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out += ',';
    out += csv_number(row[k]);
  }
  out += '\n';
}

inline std::string indexed(const char* base, int count) {
  std::string out;
  for (int k = 1; k <= count; ++k) out += std::string(k > 1 ? "," : "") + base + std::to_string(k);
  return out;
}

inline Json complex_report(const Complex& c) { return Json::array({c.real(), c.imag()}); }

// JSON cannot hold infinities; degenerate fits report null with a flag.
inline Json slope_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json fit_json(const DecayFit& fit) {
  Json j{{"ray", fit.ray},
         {"slope", slope_json(fit.slope)},
         {"fit_residual", fit.fit_residual},
         {"degenerate", fit.degenerate},
         {"window_policy", fit.window_policy},
         {"s", fit.s},
         {"values", fit.values}};
  if (!std::isnan(fit.last_half_slope)) j["last_half_slope"] = fit.last_half_slope;
  if (fit.underflow) j["underflow"] = true;
  return j;
}

inline std::filesystem::path output_path(const Scenario& s, const std::string& out_dir, const std::string& suffix) {
  return std::filesystem::path(out_dir.empty() ? s.output.dir : out_dir) / (s.prefix() + suffix);
}

inline bool has_data(const Scenario& s) { return s.density.family != "none" || s.source.family != "none"; }

}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<SpacetimePoint> synthesis_points(const Scenario& s) {
  std::vector<SpacetimePoint> pts = s.sampling.points;
  const int count = s.sampling.ray_count;
  for (const auto& spec : s.rays.timelike) {
    const TimelikeRay ray = make_timelike(spec);
    for (int k = 0; k < count; ++k) {
      const double sv = count == 1 ? s.sampling.ray_s_lo
                                   : s.sampling.ray_s_lo + (s.sampling.ray_s_hi - s.sampling.ray_s_lo) * k / (count - 1);
      pts.push_back(ray_point(ray, sv));
    }
  }
  return pts;
}

// CSV columns: x1..xd, t1..tn, re_u, im_u.
inline int cmd_synthesize(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const auto pts = synthesis_points(s);
  std::string csv = detail::indexed("x", s.sig.d) + "," + detail::indexed("t", s.sig.n) + ",re_u,im_u\n";
  if (!pts.empty()) {
    const SolutionField field = build_field(s);
    const auto values = evaluate_batch(field, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<double> row(pts[i].x);
      row.insert(row.end(), pts[i].t.begin(), pts[i].t.end());
      row.push_back(values[i].real());
      row.push_back(values[i].imag());
      detail::append_row(csv, row);
    }
  }
  const auto path = detail::output_path(s, out_dir, "_samples.csv");
  write_atomic(path, csv);
  log << "synthesize: " << pts.size() << " samples -> " << path.string() << "\n";
  return kExitPass;
}

// Amplitude table CSV columns: ray, theta1..d, omega1..n, then re/im of
// U+, U-, Ua+, Ua-, Uf+, Uf-. The JSON report adds leading-term and remainder-fit data per ray.
inline int cmd_asymptotics(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const auto density = build_density(s);
  const auto source = build_source(s);
  const AmplitudePair amps =
      detail::has_data(s) ? amplitude_from_data(density, source, s.sig) : zero_amplitudes();
  std::optional<SolutionField> field;
  if (detail::has_data(s) && s.sig.quadrature_supported()) field.emplace(s.sig, source, density, s.scheme);

  std::string csv = "ray," + detail::indexed("theta", s.sig.d) + "," + detail::indexed("omega", s.sig.n) +
                    ",re_up,im_up,re_um,im_um,re_ua_p,im_ua_p,re_ua_m,im_ua_m,re_uf_p,im_uf_p,re_uf_m,im_uf_m\n";
  const double target = -0.5 * (s.sig.d + s.sig.n + 1);
  Json report{{"scenario", s.name},
              {"d", s.sig.d},
              {"n", s.sig.n},
              {"m", s.sig.m},
              {"exponent_target", target},
              {"leading_exponent", -0.5 * (s.sig.d + s.sig.n - 1)},
              {"rays", Json::array()}};
  for (std::size_t r = 0; r < s.rays.timelike.size(); ++r) {
    const TimelikeRay ray = make_timelike(s.rays.timelike[r]);
    const Complex up = amps.plus(ray.theta, ray.omega), um = amps.minus(ray.theta, ray.omega);
    const Complex uap = amps.ua_plus(ray.theta, ray.omega), uam = amps.ua_minus(ray.theta, ray.omega);
    const Complex ufp = amps.uf_plus(ray.theta, ray.omega), ufm = amps.uf_minus(ray.theta, ray.omega);
    std::vector<double> row{static_cast<double>(r)};
    row.insert(row.end(), ray.theta.begin(), ray.theta.end());
    row.insert(row.end(), ray.omega.begin(), ray.omega.end());
    for (const Complex& c : {up, um, uap, uam, ufp, ufm}) {
      row.push_back(c.real());
      row.push_back(c.imag());
    }
    detail::append_row(csv, row);

    Json entry{{"index", r},
               {"theta", ray.theta},
               {"omega", ray.omega},
               {"u_plus", detail::complex_report(up)},
               {"u_minus", detail::complex_report(um)},
               {"ua_plus", detail::complex_report(uap)},
               {"ua_minus", detail::complex_report(uam)},
               {"uf_plus", detail::complex_report(ufp)},
               {"uf_minus", detail::complex_report(ufm)},
               {"exponent_target", target}};
    const double sl = s.sampling.leading_s;
    const double predicted = std::abs(predict_leading(amps, ray, sl, s.sig));
    const double measured = field ? std::abs(evaluate_u(*field, ray_point(ray, sl))) : 0.0;
    entry["leading_s"] = sl;
    entry["predicted_modulus"] = predicted;
    entry["measured_modulus"] = measured;
    if (predicted > 0.0) entry["relative_error"] = std::abs(measured - predicted) / predicted;
    if (s.checks.timelike_fit) {
      if (field) {
        entry["fit"] = detail::fit_json(timelike_remainder_fit(*field, amps, ray, s.sampling.timelike));
      } else {
        DecayFit sentinel;
        sentinel.ray = "no field";
        sentinel.degenerate = true;
        sentinel.slope = -std::numeric_limits<double>::infinity();
        entry["fit"] = detail::fit_json(sentinel);
      }
    }
    report["rays"].push_back(entry);
  }
  const auto table = detail::output_path(s, out_dir, "_amplitudes.csv");
  const auto json = detail::output_path(s, out_dir, "_asymptotics.json");
  write_atomic(table, csv);
  write_atomic(json, report.dump(2) + "\n");
  log << "asymptotics: " << s.rays.timelike.size() << " rays -> " << table.string() << ", " << json.string() << "\n";
  return kExitPass;
}

namespace detail {

struct RoundTrip {
  double deviation = 0.0;  // relative to max |given|, absolute when given is 0
  double max_given = 0.0;
};

inline RoundTrip inversion_round_trip(const BoundaryFlatAmplitude& given, Branch branch, const AmplitudePair& amps,
                                      const std::vector<AmplitudeProbe>& probes) {
  RoundTrip rt;
  double worst = 0.0;
  for (const auto& p : probes) {
    const Complex want = given.eval(p.theta, p.omega);
    const Complex got = branch == Branch::plus ? amps.plus(p.theta, p.omega) : amps.minus(p.theta, p.omega);
    worst = std::max(worst, std::abs(got - want));
    rt.max_given = std::max(rt.max_given, std::abs(want));
  }
  rt.deviation = rt.max_given > 0.0 ? worst / rt.max_given : worst;
  return rt;
}

}  // namespace detail

// Density dump CSV columns: xi1..d, sigma1..n, re_A, im_A, re_a, im_a.
inline int cmd_invert(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const BoundaryFlatAmplitude given = build_given_amplitude(s);
  const Branch branch = build_branch(s);
  const auto source = build_source(s);
  const MassShellDensity density = invert_amplitude(given, branch, source, s.sig);
  const AmplitudePair amps = amplitude_from_data(density, source, s.sig);
  const auto probes = amplitude_probes(s.sig, s.sampling.amplitude_probes, s.seed);
  const auto rt = detail::inversion_round_trip(given, branch, amps, probes);

  Json report{{"scenario", s.name},
              {"branch", s.amplitude.branch},
              {"probes", probes.size()},
              {"roundtrip_deviation", rt.deviation},
              {"max_given", rt.max_given},
              {"with_source", source.has_value()},
              {"reconstructed_other", Json::array()}};
  for (const auto& p : probes) {
    const Complex other = branch == Branch::plus ? amps.minus(p.theta, p.omega) : amps.plus(p.theta, p.omega);
    report["reconstructed_other"].push_back(
        Json{{"theta", p.theta}, {"omega", p.omega}, {"value", detail::complex_report(other)}});
  }

  // Chart dump on a uniform xi grid and a coarse sphere rule.
  const double half = 4.0 * s.sig.m;
  const int per_axis = s.sig.d == 1 ? 33 : (s.sig.d == 2 ? 17 : 9);
  const SphereRule sphere = sphere_rule(s.sig.n, 8);
  std::string csv = detail::indexed("xi", s.sig.d) + "," + detail::indexed("sigma", s.sig.n) + ",re_A,im_A,re_a,im_a\n";
  int total = 1;
  for (int k = 0; k < s.sig.d; ++k) total *= per_axis;
  RealVector xi(static_cast<std::size_t>(s.sig.d));
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    for (int k = s.sig.d - 1; k >= 0; --k) {
      xi[static_cast<std::size_t>(k)] = -half + 2.0 * half * (rest % per_axis) / (per_axis - 1);
      rest /= per_axis;
    }
    for (std::size_t j = 0; j < sphere.size(); ++j) {
      const auto sigma = sphere.node(j);
      const Complex chart = density.eval_chart(xi, sigma);
      const ShellPoint sp = shell_embed(xi, sigma, s.sig);
      const Complex onshell = density.eval_onshell(sp);
      std::vector<double> row(xi);
      row.insert(row.end(), sigma.begin(), sigma.end());
      for (double v : {chart.real(), chart.imag(), onshell.real(), onshell.imag()}) row.push_back(v);
      detail::append_row(csv, row);
    }
  }
  const auto dump = detail::output_path(s, out_dir, "_density.csv");
  const auto json = detail::output_path(s, out_dir, "_invert.json");
  write_atomic(dump, csv);
  write_atomic(json, report.dump(2) + "\n");
  log << "invert: round-trip deviation " << rt.deviation << " -> " << dump.string() << ", " << json.string() << "\n";
  return rt.deviation <= s.tol.roundtrip ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=" or "in"
  bool passed = false;
  Json detail;
};

inline Json check_json(const CheckRecord& c) {
  Json j{{"name", c.name},
         {"value", detail::slope_json(c.value)},
         {"threshold", c.threshold},
         {"relation", c.relation},
         {"passed", c.passed}};
  if (!c.detail.is_null()) j["detail"] = c.detail;
  return j;
}

inline CheckRecord check_at_most(std::string name, double value, double threshold, Json extra = {}) {
  return CheckRecord{std::move(name), value, threshold, "<=", value <= threshold, std::move(extra)};
}

inline CheckRecord check_at_least(std::string name, double value, double threshold, Json extra = {}) {
  return CheckRecord{std::move(name), value, threshold, ">=", value >= threshold, std::move(extra)};
}

// Runs every enabled check that applies to the scenario.
inline std::vector<CheckRecord> run_checks(const Scenario& s) {
  if (!detail::has_data(s)) throw ConfigurationError("verify: scenario needs a density or a source");
  const auto density = build_density(s);
  const auto source = build_source(s);
  const SolutionField field(s.sig, source, density, s.scheme);
  std::vector<CheckRecord> out;

  if (s.checks.symmetry) {
    const auto probes = amplitude_probes(s.sig, s.sampling.amplitude_probes, s.seed);
    if (density)
      out.push_back(check_at_most("symmetry_homogeneous",
                                  symmetry_check(amplitude_from_data(density, std::nullopt, s.sig),
                                                 SymmetryMode::homogeneous, s.sig, probes),
                                  s.tol.symmetry));
    if (source)
      out.push_back(check_at_most("symmetry_source_only",
                                  symmetry_check(amplitude_from_data(std::nullopt, source, s.sig),
                                                 SymmetryMode::source_only, s.sig, probes),
                                  s.tol.symmetry));
  }

  if (s.checks.residual) {
    const auto rep = pde_residual(field, residual_probes(s), s.sampling.residual_h, s.tol.residual);
    const double rel = rep.scale > 0.0 ? rep.max_abs_residual / rep.scale : rep.max_abs_residual;
    out.push_back(check_at_most("pde_residual", rel, s.tol.residual,
                                Json{{"h", rep.h}, {"max_abs_residual", rep.max_abs_residual}, {"scale", rep.scale}}));
  }

  const AmplitudePair amps = amplitude_from_data(density, source, s.sig);
  const double target = -0.5 * (s.sig.d + s.sig.n + 1);
  for (std::size_t r = 0; r < s.rays.timelike.size(); ++r) {
    const TimelikeRay ray = make_timelike(s.rays.timelike[r]);
    const std::string tag = "[" + std::to_string(r) + "]";
    if (s.checks.timelike_fit) {
      const DecayFit fit = timelike_remainder_fit(field, amps, ray, s.sampling.timelike);
      CheckRecord c{"timelike_remainder_slope" + tag, fit.slope, target, "in", false, detail::fit_json(fit)};
      c.detail["window"] = Json::array({target - s.tol.slope_below, target + s.tol.slope_above});
      c.passed = fit.degenerate ||
                 (fit.slope >= target - s.tol.slope_below && fit.slope <= target + s.tol.slope_above);
      out.push_back(c);
    }
    if (s.checks.leading) {
      const double sl = s.sampling.leading_s;
      const double predicted = std::abs(predict_leading(amps, ray, sl, s.sig));
      const double measured = std::abs(evaluate_u(field, ray_point(ray, sl)));
      const double rel = predicted > 0.0 ? std::abs(measured - predicted) / predicted : measured;
      out.push_back(check_at_most("leading_modulus" + tag, rel, s.tol.leading,
                                  Json{{"s", sl}, {"predicted", predicted}, {"measured", measured}}));
    }
  }

  if (s.checks.characteristic && !source) {
    for (std::size_t r = 0; r < s.rays.characteristic.size(); ++r) {
      const std::string tag = "[" + std::to_string(r) + "]";
      const DecayFit fit =
          characteristic_decay_fit(field, make_characteristic(s.rays.characteristic[r]), s.sampling.characteristic);
      out.push_back(check_at_most("characteristic_slope" + tag, fit.slope, s.tol.characteristic_slope,
                                  detail::fit_json(fit)));
      out.push_back(check_at_most("characteristic_steepening" + tag, fit.last_half_slope, fit.slope));
    }
    for (std::size_t r = 0; r < s.rays.control.size(); ++r) {
      const DecayFit fit =
          characteristic_decay_fit(field, make_timelike(s.rays.control[r]), s.sampling.characteristic);
      out.push_back(check_at_least("control_slope[" + std::to_string(r) + "]", fit.slope, s.tol.control_slope,
                                   detail::fit_json(fit)));
    }
  }

  if (s.checks.inverse && s.density.family == "inverted") {
    const BoundaryFlatAmplitude given = build_given_amplitude(s);
    const Branch branch = build_branch(s);
    const auto probes = amplitude_probes(s.sig, s.sampling.amplitude_probes, s.seed);
    const auto rt = detail::inversion_round_trip(given, branch, amps, probes);
    out.push_back(check_at_most("inverse_roundtrip", rt.deviation, s.tol.roundtrip));
    for (std::size_t r = 0; r < s.rays.timelike.size(); ++r) {
      const TimelikeRay ray = make_timelike(s.rays.timelike[r]);
      const ExtractedAmplitudes ex = extract_amplitudes(field, ray, s.sampling.extraction);
      const double want = std::abs(given.eval(ray.theta, ray.omega));
      const double got = std::abs(branch == Branch::plus ? ex.u_plus : ex.u_minus);
      const double rel = want > 0.0 ? std::abs(got - want) / want : got;
      out.push_back(check_at_most("inverse_extracted_modulus[" + std::to_string(r) + "]", rel, s.tol.amplitude,
                                  Json{{"given", want}, {"extracted", got}, {"fit_rms", ex.rms_residual}}));
    }
  }

  if (s.checks.cauchy && s.density.family == "cauchy") {
    const SpatialGaussian u0 = s.density.u0, u1 = s.density.u1;
    double worst_value = 0.0, worst_dt = 0.0;
    const double h = s.tol.cauchy_h;
    for (double c : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      RealVector x(static_cast<std::size_t>(s.sig.d), 0.0);
      x[0] = c;
      const RealVector shifted0 = u0.center.empty() ? RealVector(x.size(), 0.0) : u0.center;
      const RealVector shifted1 = u1.center.empty() ? RealVector(x.size(), 0.0) : u1.center;
      const SpatialGaussian g0{u0.amplitude, shifted0, u0.width}, g1{u1.amplitude, shifted1, u1.width};
      const Complex value = evaluate_u(field, SpacetimePoint{x, {0.0}});
      const Complex dt = (evaluate_u(field, SpacetimePoint{x, {h}}) - evaluate_u(field, SpacetimePoint{x, {-h}})) / (2 * h);
      worst_value = std::max(worst_value, std::abs(value - g0.value(x)));
      worst_dt = std::max(worst_dt, std::abs(dt - g1.value(x)));
    }
    out.push_back(check_at_most("cauchy_initial_value", worst_value, s.tol.cauchy_value));
    out.push_back(check_at_most("cauchy_initial_velocity", worst_dt, s.tol.cauchy_dt, Json{{"h", h}}));
  }
  return out;
}

inline int cmd_verify(const Scenario& s, const std::string& out_dir, std::ostream& log) {
  const auto checks = run_checks(s);
  Json report{{"scenario", s.name}, {"checks", Json::array()}};
  bool all = true;
  for (const auto& c : checks) {
    report["checks"].push_back(check_json(c));
    all = all && c.passed;
    log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.value << " " << c.relation << " " << c.threshold
        << "\n";
  }
  report["passed"] = all;
  const auto json = detail::output_path(s, out_dir, "_verify.json");
  write_atomic(json, report.dump(2) + "\n");
  log << "verify: " << (all ? "all checks passed" : "some checks failed") << " -> " << json.string() << "\n";
  return all ? kExitPass : kExitCheckFailed;
}

// Dispatches a command and maps library errors to exit codes.
inline int run_command(const std::string& command, const std::string& config_path, const std::string& out_dir,
                       bool force_deterministic, double resolution_scale, std::ostream& log, std::ostream& err) {
  Scenario s;
  try {
    s = load_scenario(config_path);
    if (force_deterministic) {
      s.deterministic = true;
      s.scheme.deterministic = true;
    }
    if (resolution_scale > 0.0) s.scheme.resolution_scale *= resolution_scale;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (command == "synthesize") return cmd_synthesize(s, out_dir, log);
    if (command == "asymptotics") return cmd_asymptotics(s, out_dir, log);
    if (command == "invert") return cmd_invert(s, out_dir, log);
    if (command == "verify") return cmd_verify(s, out_dir, log);
    err << "config error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace uhwave
