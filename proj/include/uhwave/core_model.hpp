#pragma once

// Problem signature, spacetime/frequency geometry, the mass shell chart and
// ray parameterizations for (Delta_t - Delta_x + m^2) u = f on R^d x R^n.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uhwave/errors.hpp"

namespace uhwave {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest d or n accepted by the closed-form formulas; quadrature stops at 3.
inline constexpr int kMaxDim = 8;

// Unit vectors within this distance of |v| = 1 are accepted and renormalized.
inline constexpr double kUnitTolerance = 1e-12;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm_squared(std::span<const double> a) { return dot(a, a); }
inline double norm(std::span<const double> a) { return std::sqrt(norm_squared(a)); }

inline RealVector scaled(std::span<const double> a, double factor) {
  RealVector out(a.begin(), a.end());
  for (double& v : out) v *= factor;
  return out;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Renormalizes v in place; rejects vectors that are not unit to within `tolerance`.
inline void normalize_unit(RealVector& v, const char* what, double tolerance = kUnitTolerance) {
  if (v.empty() || !all_finite(v)) throw DomainError(std::string(what) + ": not a finite vector");
  const double len = norm(v);
  if (std::abs(len - 1.0) > tolerance)
    throw DomainError(std::string(what) + ": expected a unit vector, |v| = " + std::to_string(len));
  for (double& c : v) c /= len;
}

struct ProblemSignature {
  int d = 1;  // spatial dimension
  int n = 1;  // time dimension
  double m = 1.0;

  static ProblemSignature make(int d, int n, double m) {
    if (d < 1 || n < 1) throw DomainError("signature: d and n must be >= 1");
    if (d > kMaxDim || n > kMaxDim) throw DomainError("signature: d and n must be <= 8");
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("signature: mass must be positive");
    return ProblemSignature{d, n, m};
  }

  // Quadrature-based synthesis is implemented for d, n <= 3.
  bool quadrature_supported() const { return d <= 3 && n <= 3; }

  bool operator==(const ProblemSignature&) const = default;
};

struct SpacetimePoint {
  RealVector x;
  RealVector t;

  bool operator==(const SpacetimePoint&) const = default;
};

inline SpacetimePoint make_point(const ProblemSignature& sig, RealVector x, RealVector t) {
  if (static_cast<int>(x.size()) != sig.d || static_cast<int>(t.size()) != sig.n)
    throw DomainError("spacetime point: dimension mismatch");
  if (!all_finite(x) || !all_finite(t)) throw DomainError("spacetime point: non-finite component");
  return SpacetimePoint{std::move(x), std::move(t)};
}

// Direction (theta, omega) in B^d x S^{n-1}; the ray is (s theta, s omega).
struct TimelikeRay {
  RealVector theta;
  RealVector omega;

  static TimelikeRay make(RealVector theta, RealVector omega) {
    if (theta.empty() || !all_finite(theta)) throw DomainError("timelike ray: bad theta");
    if (!(norm(theta) < 1.0)) throw DomainError("timelike ray: |theta| must be < 1");
    normalize_unit(omega, "timelike ray omega");
    return TimelikeRay{std::move(theta), std::move(omega)};
  }

  // m sqrt(1 - theta^2): the phase speed of both oscillating terms.
  double phase_rate(double m) const { return m * std::sqrt(1.0 - norm_squared(theta)); }
};

// Light-cone direction: x(s) = (s + q) theta, t(s) = s omega with |theta| = |omega| = 1.
struct CharacteristicRay {
  RealVector theta;
  RealVector omega;
  double q = 0.0;

  static CharacteristicRay make(RealVector theta, RealVector omega, double q) {
    normalize_unit(theta, "characteristic ray theta");
    normalize_unit(omega, "characteristic ray omega");
    if (!std::isfinite(q)) throw DomainError("characteristic ray: non-finite offset");
    return CharacteristicRay{std::move(theta), std::move(omega), q};
  }
};

using Ray = std::variant<TimelikeRay, CharacteristicRay>;

struct ShellPoint {
  RealVector xi;
  RealVector tau;
};

// sqrt(|xi|^2 + m^2)
inline double shell_radius(std::span<const double> xi, double m) {
  return std::sqrt(norm_squared(xi) + m * m);
}

// (xi, sigma) -> (xi, sigma sqrt(xi^2 + m^2)).
inline ShellPoint shell_embed(std::span<const double> xi, std::span<const double> sigma,
                              const ProblemSignature& sig) {
  if (static_cast<int>(xi.size()) != sig.d || static_cast<int>(sigma.size()) != sig.n)
    throw DomainError("shell_embed: dimension mismatch");
  RealVector unit(sigma.begin(), sigma.end());
  normalize_unit(unit, "shell_embed sigma");
  const double r = shell_radius(xi, sig.m);
  return ShellPoint{RealVector(xi.begin(), xi.end()), scaled(unit, r)};
}

struct ShellChartPoint {
  RealVector xi;
  RealVector sigma;
};

inline ShellChartPoint shell_project(const ShellPoint& p, const ProblemSignature& sig) {
  if (static_cast<int>(p.xi.size()) != sig.d || static_cast<int>(p.tau.size()) != sig.n)
    throw DomainError("shell_project: dimension mismatch");
  const double tau_len = norm(p.tau);
  if (tau_len < sig.m * (1.0 - 1e-10)) throw OffShellError("shell_project: |tau| < m");
  const double r = shell_radius(p.xi, sig.m);
  if (std::abs(r * r - tau_len * tau_len) > 1e-10 * tau_len * tau_len)
    throw OffShellError("shell_project: xi^2 + m^2 - tau^2 != 0");
  return ShellChartPoint{p.xi, scaled(p.tau, 1.0 / tau_len)};
}

inline SpacetimePoint ray_point(const TimelikeRay& r, double s) {
  if (!(s > 0.0)) throw DomainError("ray_point: s must be positive");
  return SpacetimePoint{scaled(r.theta, s), scaled(r.omega, s)};
}

inline SpacetimePoint ray_point(const CharacteristicRay& r, double s) {
  if (!(s > 0.0)) throw DomainError("ray_point: s must be positive");
  return SpacetimePoint{scaled(r.theta, s + r.q), scaled(r.omega, s)};
}

inline SpacetimePoint ray_point(const Ray& r, double s) {
  return std::visit([s](const auto& ray) { return ray_point(ray, s); }, r);
}

}  // namespace uhwave
