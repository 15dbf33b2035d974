#pragma once

// Scenario files: INI-style sections whose values are JSON literals,
//
//   [signature]
//   d = 1
//   center = [0.0, 0.5]
//
// A file whose first non-blank character is '{' is read as one JSON object of
// sections instead. Unknown sections and keys are rejected by name.

#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "uhwave/asymptotics.hpp"
#include "uhwave/field_synthesis.hpp"
#include "uhwave/verification.hpp"

namespace uhwave {

using Json = nlohmann::ordered_json;

struct SourceSpec {
  std::string family = "none";  // none | gaussian
  RealVector center_x, center_t, xi_shift, tau_shift;
  double width = 1.0;
  double amplitude = 1.0;
};

struct DensitySpec {
  std::string family = "none";  // none | gaussian | cauchy | inverted
  RealVector center;
  double width = 1.0;
  std::vector<SectorTerm> sector;  // empty: constant 1
  bool hermitian = false;
  SpatialGaussian u0{0.0, {}, 1.0};
  SpatialGaussian u1{0.0, {}, 1.0};
};

// Given amplitude U = profile * exp(-flatness / (1 - theta^2)), inverted on `branch`.
struct AmplitudeSpec {
  std::vector<ProfileTerm> profile;
  double flatness = 1.0;
  std::string branch = "plus";
};

struct RaySpec {
  RealVector theta;
  RealVector omega;
  double q = 0.0;
};

struct RaySet {
  std::vector<RaySpec> timelike;
  std::vector<RaySpec> characteristic;
  std::vector<RaySpec> control;  // timelike rays for the characteristic-decay control
};

struct Sampling {
  std::vector<SpacetimePoint> points;
  int ray_count = 0;  // extra synthesize samples per timelike ray, s uniform in [ray_s_lo, ray_s_hi]
  double ray_s_lo = 1.0;
  double ray_s_hi = 64.0;
  SRange timelike{20.0, 80.0, 16};
  SRange characteristic{10.0, 60.0, 12};
  SRange extraction{50.0, 70.0, 24};
  double leading_s = 60.0;
  std::vector<SpacetimePoint> residual_probes;  // empty: generated from the seed
  int residual_probe_count = 9;
  double residual_probe_radius = 1.0;
  double residual_h = 0.0;  // 0: quad_tol^{1/4}
  int amplitude_probes = 100;
};

struct Tolerances {
  double residual = 1e-3;
  double slope_below = 0.4;
  double slope_above = 0.3;
  double leading = 0.05;
  double characteristic_slope = -6.0;
  double control_slope = -1.0;
  double roundtrip = 1e-12;
  double symmetry = 1e-12;
  double amplitude = 0.05;
  double cauchy_value = 1e-7;
  double cauchy_dt = 1e-5;
  double cauchy_h = 1e-3;
};

struct Checks {
  bool residual = true;
  bool timelike_fit = true;
  bool leading = true;
  bool characteristic = true;
  bool symmetry = true;
  bool inverse = true;
  bool cauchy = true;
};

struct OutputSpec {
  std::string dir = ".";
  std::string prefix;  // empty: scenario name
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  bool deterministic = true;
  ProblemSignature sig;
  DensitySpec density;
  SourceSpec source;
  AmplitudeSpec amplitude;
  RaySet rays;
  Sampling sampling;
  QuadratureScheme scheme;
  Tolerances tol;
  Checks checks;
  OutputSpec output;

  std::string prefix() const { return output.prefix.empty() ? name : output.prefix; }
};

// ---------------------------------------------------------------------------
// JSON <-> scenario

namespace config {

// Reads one section, remembering which keys were consumed.
class Section {
 public:
  Section(const Json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      obj_ = root.at(name_);
      if (!obj_.is_object()) throw ConfigurationError("section '" + name_ + "' must be a table");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!obj_.contains(key)) return;
    seen_.insert(key);
    try {
      read(obj_.at(key), out);
    } catch (const ConfigurationError& e) {
      throw ConfigurationError("bad value for '" + name_ + "." + key + "': " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError("bad value for '" + name_ + "." + key + "': " + e.what());
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigurationError("unknown key '" + name_ + "." + it.key() + "'");
  }

 private:
  static void read(const Json& j, double& v) {
    if (!j.is_number()) throw ConfigurationError("expected a number");
    v = j.get<double>();
  }
  static void read(const Json& j, int& v) {
    if (!j.is_number_integer()) throw ConfigurationError("expected an integer");
    v = j.get<int>();
  }
  static void read(const Json& j, std::uint64_t& v) {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigurationError("expected a non-negative integer");
    v = j.get<std::uint64_t>();
  }
  static void read(const Json& j, bool& v) {
    if (!j.is_boolean()) throw ConfigurationError("expected true or false");
    v = j.get<bool>();
  }
  static void read(const Json& j, std::string& v) {
    if (!j.is_string()) throw ConfigurationError("expected a string");
    v = j.get<std::string>();
  }
  static void read(const Json& j, RealVector& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of numbers");
    v.clear();
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigurationError("expected an array of numbers");
      v.push_back(e.get<double>());
    }
  }
  static void read(const Json& j, std::vector<int>& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of integers");
    v.clear();
    for (const auto& e : j) {
      if (!e.is_number_integer()) throw ConfigurationError("expected an array of integers");
      v.push_back(e.get<int>());
    }
  }
  static void read(const Json& j, Complex& v) {
    if (j.is_number()) {
      v = j.get<double>();
      return;
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
      throw ConfigurationError("expected a number or [re, im]");
    v = Complex(j[0].get<double>(), j[1].get<double>());
  }
  template <typename Fn>
  static void read_object(const Json& j, std::initializer_list<const char*> allowed, Fn&& fn) {
    if (!j.is_object()) throw ConfigurationError("expected a table");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) throw ConfigurationError("unknown field '" + it.key() + "'");
    }
    fn(j);
  }
  template <typename T>
  static void opt(const Json& j, const char* key, T& out) {
    if (j.contains(key)) read(j.at(key), out);
  }
  static void read(const Json& j, SpatialGaussian& g) {
    read_object(j, {"amplitude", "center", "width"}, [&](const Json& o) {
      opt(o, "amplitude", g.amplitude);
      opt(o, "center", g.center);
      opt(o, "width", g.width);
    });
  }
  static void read(const Json& j, SRange& r) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number_integer())
      throw ConfigurationError("expected [lo, hi, count]");
    r = SRange{j[0].get<double>(), j[1].get<double>(), j[2].get<int>()};
  }
  static void read(const Json& j, std::vector<SectorTerm>& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of terms");
    v.clear();
    for (const auto& e : j) {
      SectorTerm t{1.0, {}};
      read_object(e, {"coeff", "powers"}, [&](const Json& o) {
        opt(o, "coeff", t.coeff);
        opt(o, "powers", t.powers);
      });
      v.push_back(t);
    }
  }
  static void read(const Json& j, std::vector<ProfileTerm>& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of terms");
    v.clear();
    for (const auto& e : j) {
      ProfileTerm t{1.0, {}, {}};
      read_object(e, {"coeff", "theta", "omega"}, [&](const Json& o) {
        opt(o, "coeff", t.coeff);
        opt(o, "theta", t.theta_powers);
        opt(o, "omega", t.omega_powers);
      });
      v.push_back(t);
    }
  }
  static void read(const Json& j, std::vector<RaySpec>& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of rays");
    v.clear();
    for (const auto& e : j) {
      RaySpec r;
      read_object(e, {"theta", "omega", "q"}, [&](const Json& o) {
        opt(o, "theta", r.theta);
        opt(o, "omega", r.omega);
        opt(o, "q", r.q);
      });
      v.push_back(r);
    }
  }
  static void read(const Json& j, std::vector<SpacetimePoint>& v) {
    if (!j.is_array()) throw ConfigurationError("expected an array of points");
    v.clear();
    for (const auto& e : j) {
      SpacetimePoint p;
      read_object(e, {"x", "t"}, [&](const Json& o) {
        opt(o, "x", p.x);
        opt(o, "t", p.t);
      });
      v.push_back(p);
    }
  }

  std::string name_;
  Json obj_ = Json::object();
  std::set<std::string> seen_;
};

inline Json complex_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }
inline Json range_json(const SRange& r) { return Json::array({r.lo, r.hi, r.count}); }
inline Json gaussian_json(const SpatialGaussian& g) {
  return Json{{"amplitude", g.amplitude}, {"center", g.center}, {"width", g.width}};
}
inline Json rays_json(const std::vector<RaySpec>& rays, bool with_q) {
  Json out = Json::array();
  for (const auto& r : rays) {
    Json j{{"theta", r.theta}, {"omega", r.omega}};
    if (with_q) j["q"] = r.q;
    out.push_back(j);
  }
  return out;
}
inline Json points_json(const std::vector<SpacetimePoint>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(Json{{"x", p.x}, {"t", p.t}});
  return out;
}

}  // namespace config

inline Json scenario_to_json(const Scenario& s) {
  using namespace config;
  Json root;
  root["scenario"] = Json{{"name", s.name}, {"seed", s.seed}, {"deterministic", s.deterministic}};
  root["signature"] = Json{{"d", s.sig.d}, {"n", s.sig.n}, {"m", s.sig.m}};

  Json sector = Json::array();
  for (const auto& t : s.density.sector) sector.push_back(Json{{"coeff", complex_json(t.coeff)}, {"powers", t.powers}});
  root["density"] = Json{{"family", s.density.family},   {"center", s.density.center},
                         {"width", s.density.width},     {"sector", sector},
                         {"hermitian", s.density.hermitian}, {"u0", gaussian_json(s.density.u0)},
                         {"u1", gaussian_json(s.density.u1)}};
  root["source"] = Json{{"family", s.source.family},     {"center_x", s.source.center_x},
                        {"center_t", s.source.center_t}, {"xi_shift", s.source.xi_shift},
                        {"tau_shift", s.source.tau_shift}, {"width", s.source.width},
                        {"amplitude", s.source.amplitude}};
  Json profile = Json::array();
  for (const auto& t : s.amplitude.profile)
    profile.push_back(Json{{"coeff", complex_json(t.coeff)}, {"theta", t.theta_powers}, {"omega", t.omega_powers}});
  root["amplitude"] = Json{{"profile", profile}, {"flatness", s.amplitude.flatness}, {"branch", s.amplitude.branch}};
  root["rays"] = Json{{"timelike", rays_json(s.rays.timelike, false)},
                      {"characteristic", rays_json(s.rays.characteristic, true)},
                      {"control", rays_json(s.rays.control, false)}};
  const auto& sm = s.sampling;
  root["sampling"] = Json{{"points", points_json(sm.points)},
                          {"ray_count", sm.ray_count},
                          {"ray_s_lo", sm.ray_s_lo},
                          {"ray_s_hi", sm.ray_s_hi},
                          {"timelike", range_json(sm.timelike)},
                          {"characteristic", range_json(sm.characteristic)},
                          {"extraction", range_json(sm.extraction)},
                          {"leading_s", sm.leading_s},
                          {"residual_probes", points_json(sm.residual_probes)},
                          {"residual_probe_count", sm.residual_probe_count},
                          {"residual_probe_radius", sm.residual_probe_radius},
                          {"residual_h", sm.residual_h},
                          {"amplitude_probes", sm.amplitude_probes}};
  const auto& q = s.scheme;
  root["scheme"] = Json{{"panel_order", q.panel_order},         {"phase_budget", q.phase_budget},
                        {"resolution_scale", q.resolution_scale}, {"truncation_tol", q.truncation_tol},
                        {"quad_tol", q.quad_tol},               {"rho_window", q.rho_window},
                        {"rho_outer_cap", q.rho_outer_cap},     {"sphere_resolution", q.sphere_resolution},
                        {"shape_panels", q.shape_panels},       {"workers", q.workers}};
  const auto& t = s.tol;
  root["tolerances"] = Json{{"residual", t.residual},
                            {"slope_below", t.slope_below},
                            {"slope_above", t.slope_above},
                            {"leading", t.leading},
                            {"characteristic_slope", t.characteristic_slope},
                            {"control_slope", t.control_slope},
                            {"roundtrip", t.roundtrip},
                            {"symmetry", t.symmetry},
                            {"amplitude", t.amplitude},
                            {"cauchy_value", t.cauchy_value},
                            {"cauchy_dt", t.cauchy_dt},
                            {"cauchy_h", t.cauchy_h}};
  const auto& c = s.checks;
  root["checks"] = Json{{"residual", c.residual},   {"timelike_fit", c.timelike_fit},
                        {"leading", c.leading},     {"characteristic", c.characteristic},
                        {"symmetry", c.symmetry},   {"inverse", c.inverse},
                        {"cauchy", c.cauchy}};
  root["output"] = Json{{"dir", s.output.dir}, {"prefix", s.output.prefix}};
  return root;
}

inline void validate_scenario(const Scenario& s);

inline Scenario scenario_from_json(const Json& root) {
  using config::Section;
  if (!root.is_object()) throw ConfigurationError("scenario must be a table of sections");
  static const std::set<std::string> known = {"scenario", "signature", "density", "source",     "amplitude",
                                              "rays",     "sampling",  "scheme",  "tolerances", "checks",
                                              "output"};
  for (auto it = root.begin(); it != root.end(); ++it)
    if (!known.count(it.key())) throw ConfigurationError("unknown section '" + it.key() + "'");

  Scenario s;
  {
    Section sec(root, "scenario");
    sec.get("name", s.name);
    sec.get("seed", s.seed);
    sec.get("deterministic", s.deterministic);
    sec.finish();
  }
  {
    Section sec(root, "signature");
    int d = 1, n = 1;
    double m = 1.0;
    sec.get("d", d);
    sec.get("n", n);
    sec.get("m", m);
    sec.finish();
    try {
      s.sig = ProblemSignature::make(d, n, m);
    } catch (const DomainError& e) {
      throw ConfigurationError(e.what());
    }
  }
  {
    Section sec(root, "density");
    auto& ds = s.density;
    sec.get("family", ds.family);
    sec.get("center", ds.center);
    sec.get("width", ds.width);
    sec.get("sector", ds.sector);
    sec.get("hermitian", ds.hermitian);
    sec.get("u0", ds.u0);
    sec.get("u1", ds.u1);
    sec.finish();
  }
  {
    Section sec(root, "source");
    auto& ss = s.source;
    sec.get("family", ss.family);
    sec.get("center_x", ss.center_x);
    sec.get("center_t", ss.center_t);
    sec.get("xi_shift", ss.xi_shift);
    sec.get("tau_shift", ss.tau_shift);
    sec.get("width", ss.width);
    sec.get("amplitude", ss.amplitude);
    sec.finish();
  }
  {
    Section sec(root, "amplitude");
    sec.get("profile", s.amplitude.profile);
    sec.get("flatness", s.amplitude.flatness);
    sec.get("branch", s.amplitude.branch);
    sec.finish();
  }
  {
    Section sec(root, "rays");
    sec.get("timelike", s.rays.timelike);
    sec.get("characteristic", s.rays.characteristic);
    sec.get("control", s.rays.control);
    sec.finish();
  }
  {
    Section sec(root, "sampling");
    auto& sm = s.sampling;
    sec.get("points", sm.points);
    sec.get("ray_count", sm.ray_count);
    sec.get("ray_s_lo", sm.ray_s_lo);
    sec.get("ray_s_hi", sm.ray_s_hi);
    sec.get("timelike", sm.timelike);
    sec.get("characteristic", sm.characteristic);
    sec.get("extraction", sm.extraction);
    sec.get("leading_s", sm.leading_s);
    sec.get("residual_probes", sm.residual_probes);
    sec.get("residual_probe_count", sm.residual_probe_count);
    sec.get("residual_probe_radius", sm.residual_probe_radius);
    sec.get("residual_h", sm.residual_h);
    sec.get("amplitude_probes", sm.amplitude_probes);
    sec.finish();
  }
  {
    Section sec(root, "scheme");
    auto& q = s.scheme;
    sec.get("panel_order", q.panel_order);
    sec.get("phase_budget", q.phase_budget);
    sec.get("resolution_scale", q.resolution_scale);
    sec.get("truncation_tol", q.truncation_tol);
    sec.get("quad_tol", q.quad_tol);
    sec.get("rho_window", q.rho_window);
    sec.get("rho_outer_cap", q.rho_outer_cap);
    sec.get("sphere_resolution", q.sphere_resolution);
    sec.get("shape_panels", q.shape_panels);
    sec.get("workers", q.workers);
    sec.finish();
  }
  {
    Section sec(root, "tolerances");
    auto& t = s.tol;
    sec.get("residual", t.residual);
    sec.get("slope_below", t.slope_below);
    sec.get("slope_above", t.slope_above);
    sec.get("leading", t.leading);
    sec.get("characteristic_slope", t.characteristic_slope);
    sec.get("control_slope", t.control_slope);
    sec.get("roundtrip", t.roundtrip);
    sec.get("symmetry", t.symmetry);
    sec.get("amplitude", t.amplitude);
    sec.get("cauchy_value", t.cauchy_value);
    sec.get("cauchy_dt", t.cauchy_dt);
    sec.get("cauchy_h", t.cauchy_h);
    sec.finish();
  }
  {
    Section sec(root, "checks");
    auto& c = s.checks;
    sec.get("residual", c.residual);
    sec.get("timelike_fit", c.timelike_fit);
    sec.get("leading", c.leading);
    sec.get("characteristic", c.characteristic);
    sec.get("symmetry", c.symmetry);
    sec.get("inverse", c.inverse);
    sec.get("cauchy", c.cauchy);
    sec.finish();
  }
  {
    Section sec(root, "output");
    sec.get("dir", s.output.dir);
    sec.get("prefix", s.output.prefix);
    sec.finish();
  }
  s.scheme.deterministic = s.deterministic;
  validate_scenario(s);
  return s;
}

inline std::string trim(const std::string& in) {
  const auto first = in.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = in.find_last_not_of(" \t\r");
  return in.substr(first, last - first + 1);
}

inline Json parse_scenario_tree(const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      return Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigurationError(std::string("malformed JSON scenario: ") + e.what());
    }
  }
  Json root = Json::object();
  std::string section = "scenario";
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigurationError("line " + std::to_string(number) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (root.contains(section)) throw ConfigurationError("duplicate section '" + section + "'");
      root[section] = Json::object();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigurationError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigurationError("line " + std::to_string(number) + ": empty key");
    if (root[section].contains(key)) throw ConfigurationError("duplicate key '" + section + "." + key + "'");
    try {
      root[section][key] = Json::parse(value);
    } catch (const nlohmann::json::exception&) {
      throw ConfigurationError("line " + std::to_string(number) + ": value of '" + section + "." + key +
                               "' is not a JSON literal");
    }
  }
  return root;
}

inline Scenario parse_scenario(const std::string& text) { return scenario_from_json(parse_scenario_tree(text)); }

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// INI text; numbers are written in shortest round-trip form, so parsing it back is lossless.
inline std::string serialize_scenario(const Scenario& s) {
  const Json root = scenario_to_json(s);
  std::string out;
  for (auto sec = root.begin(); sec != root.end(); ++sec) {
    if (!out.empty()) out += "\n";
    out += "[" + sec.key() + "]\n";
    for (auto kv = sec.value().begin(); kv != sec.value().end(); ++kv) out += kv.key() + " = " + kv.value().dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Building library objects from a scenario

inline TimelikeRay make_timelike(const RaySpec& r) { return TimelikeRay::make(r.theta, r.omega); }
inline CharacteristicRay make_characteristic(const RaySpec& r) { return CharacteristicRay::make(r.theta, r.omega, r.q); }

inline std::optional<SchwartzSource> build_source(const Scenario& s) {
  const auto& ss = s.source;
  if (ss.family == "none") return std::nullopt;
  return gaussian_source(s.sig, ss.center_x.empty() ? RealVector(s.sig.d, 0.0) : ss.center_x,
                         ss.center_t.empty() ? RealVector(s.sig.n, 0.0) : ss.center_t, ss.width, ss.xi_shift,
                         ss.tau_shift, ss.amplitude);
}

inline BoundaryFlatAmplitude build_given_amplitude(const Scenario& s) {
  ProfilePolynomial profile{s.amplitude.profile};
  return bump_amplitude(s.sig, profile, s.amplitude.flatness);
}

inline Branch build_branch(const Scenario& s) { return s.amplitude.branch == "minus" ? Branch::minus : Branch::plus; }

inline std::optional<MassShellDensity> build_density(const Scenario& s) {
  const auto& ds = s.density;
  if (ds.family == "none") return std::nullopt;
  if (ds.family == "gaussian") {
    SectorPolynomial sector{ds.sector};
    if (sector.terms.empty()) sector = SectorPolynomial::constant(s.sig.n, 1.0);
    return gaussian_shell_density(s.sig, ds.center, ds.width, sector, ds.hermitian);
  }
  if (ds.family == "cauchy") {
    SpatialGaussian u0 = ds.u0, u1 = ds.u1;
    if (u0.center.empty()) u0.center.assign(static_cast<std::size_t>(s.sig.d), 0.0);
    if (u1.center.empty()) u1.center.assign(static_cast<std::size_t>(s.sig.d), 0.0);
    return cauchy_bridge(u0, u1, s.sig);
  }
  return invert_amplitude(build_given_amplitude(s), build_branch(s), build_source(s), s.sig);
}

inline SolutionField build_field(const Scenario& s) {
  return SolutionField(s.sig, build_source(s), build_density(s), s.scheme);
}

inline std::vector<SpacetimePoint> residual_probes(const Scenario& s) {
  if (!s.sampling.residual_probes.empty()) return s.sampling.residual_probes;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-s.sampling.residual_probe_radius, s.sampling.residual_probe_radius);
  std::vector<SpacetimePoint> out;
  for (int k = 0; k < s.sampling.residual_probe_count; ++k) {
    SpacetimePoint p{RealVector(static_cast<std::size_t>(s.sig.d)), RealVector(static_cast<std::size_t>(s.sig.n))};
    for (double& v : p.x) v = u(rng);
    for (double& v : p.t) v = u(rng);
    out.push_back(std::move(p));
  }
  return out;
}

// Random (theta, omega) with |theta| <= 0.95.
inline std::vector<AmplitudeProbe> amplitude_probes(const ProblemSignature& sig, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<AmplitudeProbe> out;
  for (int k = 0; k < count; ++k) {
    AmplitudeProbe p{RealVector(static_cast<std::size_t>(sig.d)), RealVector(static_cast<std::size_t>(sig.n))};
    for (double& v : p.theta) v = gauss(rng);
    for (double& v : p.omega) v = gauss(rng);
    const double radius = 0.95 * std::pow(unit(rng), 1.0 / sig.d);
    const double tn = norm(p.theta), on = norm(p.omega);
    for (double& v : p.theta) v *= radius / tn;
    for (double& v : p.omega) v /= on;
    out.push_back(std::move(p));
  }
  return out;
}

inline void validate_scenario(const Scenario& s) {
  auto fail = [](const std::string& what) { throw ConfigurationError(what); };
  const std::set<std::string> densities = {"none", "gaussian", "cauchy", "inverted"};
  if (!densities.count(s.density.family)) fail("unknown density family '" + s.density.family + "'");
  if (s.source.family != "none" && s.source.family != "gaussian")
    fail("unknown source family '" + s.source.family + "'");
  if (s.amplitude.branch != "plus" && s.amplitude.branch != "minus")
    fail("amplitude.branch must be \"plus\" or \"minus\"");
  if (s.density.family == "cauchy" && s.sig.n != 1) fail("density family 'cauchy' requires n = 1");
  try {
    s.scheme.validate();
    for (const auto& r : s.rays.timelike) make_timelike(r);
    for (const auto& r : s.rays.control) make_timelike(r);
    for (const auto& r : s.rays.characteristic) make_characteristic(r);
    for (const auto& r : s.rays.timelike)
      if (static_cast<int>(r.theta.size()) != s.sig.d || static_cast<int>(r.omega.size()) != s.sig.n)
        fail("timelike ray dimension mismatch");
    for (const auto& r : s.rays.characteristic)
      if (static_cast<int>(r.theta.size()) != s.sig.d || static_cast<int>(r.omega.size()) != s.sig.n)
        fail("characteristic ray dimension mismatch");
    for (const auto& p : s.sampling.points) make_point(s.sig, p.x, p.t);
    for (const auto& p : s.sampling.residual_probes) make_point(s.sig, p.x, p.t);
    s.sampling.timelike.samples();
    s.sampling.characteristic.samples();
    s.sampling.extraction.samples();
    // Building the data objects checks their parameters.
    build_source(s);
    build_density(s);
  } catch (const DomainError& e) {
    throw ConfigurationError(e.what());
  }
  if (s.sampling.ray_count < 0) fail("sampling.ray_count must be >= 0");
  if (s.sampling.residual_probe_count < 0) fail("sampling.residual_probe_count must be >= 0");
}

}  // namespace uhwave
