#pragma once

// Numerical checks on synthesized fields: finite-difference residuals of
// (Delta_t - Delta_x + m^2) u - f, remainder and decay exponent fits along
// rays, the n = 1 Cauchy-data density, and least-squares amplitude extraction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uhwave/asymptotics.hpp"
#include "uhwave/field_synthesis.hpp"

namespace uhwave {

struct ResidualReport {
  std::vector<SpacetimePoint> probes;
  double h = 0.0;
  std::vector<Complex> residuals;
  std::vector<Complex> values;  // u at the probes
  double max_abs_residual = 0.0;
  double scale = 0.0;           // m^2 max |u|
  double tolerance = 0.0;
  bool passed = false;
  // max |residual| at h, h/2, h/4 when a sweep was requested.
  std::vector<double> sweep;
};

inline double default_step(const QuadratureScheme& scheme) { return std::pow(scheme.quad_tol, 0.25); }

namespace detail {

// Second-order central stencil: 2(d+n)+1 points per probe, center first.
inline std::vector<SpacetimePoint> stencil(const SpacetimePoint& p, double h) {
  std::vector<SpacetimePoint> pts{p};
  for (std::size_t k = 0; k < p.x.size(); ++k)
    for (double sgn : {1.0, -1.0}) {
      SpacetimePoint q = p;
      q.x[k] += sgn * h;
      pts.push_back(q);
    }
  for (std::size_t k = 0; k < p.t.size(); ++k)
    for (double sgn : {1.0, -1.0}) {
      SpacetimePoint q = p;
      q.t[k] += sgn * h;
      pts.push_back(q);
    }
  return pts;
}

inline std::vector<Complex> residuals_at(const SolutionField& field, const std::vector<SpacetimePoint>& probes,
                                         double h, std::vector<Complex>* centers) {
  std::vector<SpacetimePoint> all;
  for (const auto& p : probes) {
    auto s = stencil(p, h);
    all.insert(all.end(), s.begin(), s.end());
  }
  const auto values = evaluate_batch(field, all);
  const double m2 = field.signature().m * field.signature().m;
  std::vector<Complex> out;
  std::size_t at = 0;
  for (const auto& p : probes) {
    const Complex u0 = values[at];
    Complex lap_x = 0.0, lap_t = 0.0;
    std::size_t j = at + 1;
    for (std::size_t k = 0; k < p.x.size(); ++k, j += 2) lap_x += (values[j] + values[j + 1] - 2.0 * u0) / (h * h);
    for (std::size_t k = 0; k < p.t.size(); ++k, j += 2) lap_t += (values[j] + values[j + 1] - 2.0 * u0) / (h * h);
    Complex f = 0.0;
    if (field.source()) f = field.source()->eval_spacetime(p.x, p.t);
    out.push_back(lap_t - lap_x + m2 * u0 - f);
    if (centers) centers->push_back(u0);
    at = j;
  }
  return out;
}

}  // namespace detail

// h <= 0 selects quad_tol^{1/4}. `relative_tolerance` is measured against m^2 max |u|.
inline ResidualReport pde_residual(const SolutionField& field, const std::vector<SpacetimePoint>& probes,
                                   double h = 0.0, double relative_tolerance = 1e-3, bool sweep = false) {
  ResidualReport report;
  report.probes = probes;
  report.h = h > 0.0 ? h : default_step(field.scheme());
  report.residuals = detail::residuals_at(field, probes, report.h, &report.values);
  double max_u = 0.0;
  for (const auto& v : report.values) max_u = std::max(max_u, std::abs(v));
  for (const auto& r : report.residuals) report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r));
  const double m = field.signature().m;
  report.scale = m * m * max_u;
  report.tolerance = relative_tolerance * report.scale;
  report.passed = report.max_abs_residual <= report.tolerance;
  if (sweep) {
    report.sweep.push_back(report.max_abs_residual);
    for (double div : {2.0, 4.0}) {
      double worst = 0.0;
      for (const auto& r : detail::residuals_at(field, probes, report.h / div, nullptr)) worst = std::max(worst, std::abs(r));
      report.sweep.push_back(worst);
    }
  }
  return report;
}

struct SRange {
  double lo = 20.0;
  double hi = 80.0;
  int count = 16;

  std::vector<double> samples() const {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("s range: need 0 < lo < hi and count >= 2");
    std::vector<double> s(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) s[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, double(k) / (count - 1));
    return s;
  }
};

struct DecayFit {
  std::string ray;
  std::vector<double> s;
  std::vector<double> values;  // envelope |r(s)| or |u(s)|
  double slope = 0.0;
  double fit_residual = 0.0;   // rms of the log-log fit
  double last_half_slope = std::numeric_limits<double>::quiet_NaN();
  bool underflow = false;
  bool degenerate = false;     // all values negligible; slope = -inf
  std::string window_policy;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double rms = 0.0;
};

inline LineFit log_log_fit(const std::vector<double>& s, const std::vector<double>& v, std::size_t first = 0) {
  const std::size_t n = s.size() - first;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < s.size(); ++i) {
    const double x = std::log(s[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = first; i < s.size(); ++i) {
    const double e = std::log(v[i]) - (intercept + fit.slope * std::log(s[i]));
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

inline std::string describe(const TimelikeRay& r) {
  std::string out = "timelike theta=(";
  for (std::size_t k = 0; k < r.theta.size(); ++k) out += (k ? "," : "") + std::to_string(r.theta[k]);
  out += ") omega=(";
  for (std::size_t k = 0; k < r.omega.size(); ++k) out += (k ? "," : "") + std::to_string(r.omega[k]);
  return out + ")";
}

inline std::string describe(const CharacteristicRay& r) {
  std::string out = "characteristic theta=(";
  for (std::size_t k = 0; k < r.theta.size(); ++k) out += (k ? "," : "") + std::to_string(r.theta[k]);
  out += ") omega=(";
  for (std::size_t k = 0; k < r.omega.size(); ++k) out += (k ? "," : "") + std::to_string(r.omega[k]);
  return out + ") q=" + std::to_string(r.q);
}

}  // namespace detail

inline constexpr double kNegligible = 1e-14;

// r(s) = u(s theta, s omega) - leading prediction. Each sample s_k is paired with
// s_k + pi / (2 m sqrt(1 - theta^2)), a quarter turn of the beat e^{2 i s m g}, and the
// larger |r| of the pair is fitted; this keeps near-zeros of |r| out of the log fit.
inline DecayFit timelike_remainder_fit(const SolutionField& field, const AmplitudePair& amps, const TimelikeRay& ray,
                                       const SRange& range = {}) {
  const auto& sig = field.signature();
  DecayFit fit;
  fit.ray = detail::describe(ray);
  fit.s = range.samples();
  fit.window_policy = "max over (s, s + pi/(2 m sqrt(1-theta^2)))";
  const double shift = kPi / (2.0 * ray.phase_rate(sig.m));
  std::vector<SpacetimePoint> pts;
  std::vector<double> all_s;
  for (double s : fit.s)
    for (double sv : {s, s + shift}) {
      pts.push_back(ray_point(ray, sv));
      all_s.push_back(sv);
    }
  const auto u = evaluate_batch(field, pts);
  bool any = false;
  for (std::size_t k = 0; k < fit.s.size(); ++k) {
    double env = 0.0;
    for (std::size_t j = 2 * k; j < 2 * k + 2; ++j)
      env = std::max(env, std::abs(u[j] - predict_leading(amps, ray, all_s[j], sig)));
    fit.values.push_back(env);
    if (env >= kNegligible) any = true;
  }
  if (!any) {
    fit.degenerate = true;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }
  for (double& v : fit.values) v = std::max(v, 1e-300);
  const auto line = detail::log_log_fit(fit.s, fit.values);
  fit.slope = line.slope;
  fit.fit_residual = line.rms;
  return fit;
}

namespace detail {

template <typename R>
DecayFit magnitude_fit(const SolutionField& field, const R& ray, const SRange& range) {
  DecayFit fit;
  fit.ray = describe(ray);
  fit.s = range.samples();
  if (fit.s.size() < 8) throw DomainError("decay fit: need at least 8 samples");
  fit.window_policy = "raw |u|, full window and last half";
  std::vector<SpacetimePoint> pts;
  for (double s : fit.s) pts.push_back(ray_point(ray, s));
  const auto u = evaluate_batch(field, pts);
  for (const auto& v : u) {
    double a = std::abs(v);
    if (a < 1e-300) {
      a = 1e-300;
      fit.underflow = true;
    }
    fit.values.push_back(a);
  }
  const auto line = log_log_fit(fit.s, fit.values);
  fit.slope = line.slope;
  fit.fit_residual = line.rms;
  fit.last_half_slope = log_log_fit(fit.s, fit.values, fit.s.size() / 2).slope;
  return fit;
}

}  // namespace detail

inline DecayFit characteristic_decay_fit(const SolutionField& field, const CharacteristicRay& ray,
                                         const SRange& range = {10.0, 60.0, 12}) {
  return detail::magnitude_fit(field, ray, range);
}

// Same fit on a timelike ray, as a control.
inline DecayFit characteristic_decay_fit(const SolutionField& field, const TimelikeRay& ray,
                                         const SRange& range = {10.0, 60.0, 12}) {
  return detail::magnitude_fit(field, ray, range);
}

// n = 1 density whose field has u(x, 0) = u0(x) and d_t u(x, 0) = u1(x):
//   A(xi, +-1) = pi u0^(xi) +- i pi u1^(xi) / sqrt(xi^2 + m^2).
inline MassShellDensity cauchy_bridge(const SpatialGaussian& u0, const SpatialGaussian& u1,
                                      const ProblemSignature& sig) {
  if (sig.n != 1) throw DomainError("cauchy_bridge: requires n = 1");
  for (const auto* g : {&u0, &u1}) {
    if (static_cast<int>(g->center.size()) != sig.d) throw DomainError("cauchy_bridge: profile dimension mismatch");
    if (!(g->width > 0.0)) throw DomainError("cauchy_bridge: profile width must be positive");
  }
  const double m = sig.m;
  ChartMap chart = [u0, u1, m](std::span<const double> xi, std::span<const double> sigma) {
    const double r = shell_radius(xi, m);
    return kPi * u0.fourier(xi) + Complex(0.0, sigma[0] * kPi / r) * u1.fourier(xi);
  };
  double width = 0.0;
  if (u0.amplitude != 0.0) width = std::max(width, 1.0 / u0.width);
  if (u1.amplitude != 0.0) width = std::max(width, 1.0 / u1.width);
  std::optional<GaussianEnvelope> env;
  env = GaussianEnvelope{RealVector(static_cast<std::size_t>(sig.d), 0.0), {}, width > 0.0 ? width : 1.0};
  return MassShellDensity::from_chart(sig, std::move(chart), env, "cauchy data density");
}

struct ExtractedAmplitudes {
  Complex u_plus;
  Complex u_minus;
  Complex v_plus;   // s^{-1} corrections
  Complex v_minus;
  double rms_residual = 0.0;
};

// Least-squares fit of
//   s^{(d+n-1)/2} u(s theta, s omega) ~ (U+ + V+/s) e^{i s m g} + (U- + V-/s) e^{-i s m g}
// over `count` uniformly spaced s in [lo, hi].
inline ExtractedAmplitudes extract_amplitudes(const SolutionField& field, const TimelikeRay& ray,
                                              const SRange& range = {50.0, 70.0, 24}) {
  const auto& sig = field.signature();
  if (range.count < 4 || !(range.hi > range.lo) || !(range.lo > 0.0)) throw DomainError("extract_amplitudes: bad s range");
  std::vector<double> s(static_cast<std::size_t>(range.count));
  std::vector<SpacetimePoint> pts;
  for (int k = 0; k < range.count; ++k) {
    s[static_cast<std::size_t>(k)] = range.lo + (range.hi - range.lo) * k / (range.count - 1);
    pts.push_back(ray_point(ray, s[static_cast<std::size_t>(k)]));
  }
  const auto u = evaluate_batch(field, pts);
  const double rate = ray.phase_rate(sig.m);
  const double power = 0.5 * (sig.d + sig.n - 1);
  Eigen::MatrixXcd a(range.count, 4);
  Eigen::VectorXcd b(range.count);
  for (int k = 0; k < range.count; ++k) {
    const double sk = s[static_cast<std::size_t>(k)];
    const Complex ep = std::polar(1.0, sk * rate), em = std::polar(1.0, -sk * rate);
    a(k, 0) = ep;
    a(k, 1) = ep / sk;
    a(k, 2) = em;
    a(k, 3) = em / sk;
    b(k) = std::pow(sk, power) * u[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXcd c = a.colPivHouseholderQr().solve(b);
  ExtractedAmplitudes out{c(0), c(2), c(1), c(3), 0.0};
  out.rms_residual = (a * c - b).norm() / std::sqrt(static_cast<double>(range.count));
  return out;
}

}  // namespace uhwave
