#pragma once

// Timelike asymptotics:
//   u(s theta, s omega) = s^{-(d+n-1)/2} [U+ e^{i s m g} + U- e^{-i s m g}] + O(s^{-(d+n+1)/2}),
//   g = sqrt(1 - theta^2),
//   U+-(theta, omega) = e^{+-i pi (d-n+1)/4} / (4 pi m) [m / (2 pi g)]^{(d+n-1)/2}
//                       (a -+ i pi f^)(-+ m theta / g, -+ m omega / g).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uhwave/core_model.hpp"
#include "uhwave/density_library.hpp"

namespace uhwave {

// e^{i pi k / 4} from a table, so that products of these phases stay exact.
inline Complex eighth_turn(int k) {
  static const double r = std::sqrt(0.5);
  static const std::array<Complex, 8> table = {Complex(1, 0),  Complex(r, r),   Complex(0, 1),  Complex(-r, r),
                                               Complex(-1, 0), Complex(-r, -r), Complex(0, -1), Complex(r, -r)};
  return table[static_cast<std::size_t>(((k % 8) + 8) % 8)];
}

// (+-i)^k, exactly.
inline Complex quarter_power(int sign, int k) { return eighth_turn(2 * sign * k); }

enum class CriticalSign { kappa, kappa_prime };

struct CriticalPointData {
  CriticalSign kappa_sign = CriticalSign::kappa;
  RealVector xi_star;
  RealVector sigma_star;
  double phase_value = 0.0;
  double hessian_absdet = 0.0;
  int hessian_signature = 0;
  int rho_derivative_sign = 0;
};

// Critical points of Phi(xi, sigma, rho) = <theta, xi> - rho <omega, sigma> sqrt(xi^2 + m^2) restricted to the shell (rho = 1).
inline std::pair<CriticalPointData, CriticalPointData> critical_points(const TimelikeRay& ray,
                                                                        const ProblemSignature& sig) {
  const double theta2 = norm_squared(ray.theta);
  if (!(theta2 < 1.0)) throw DomainError("critical_points: |theta| must be < 1");
  if (static_cast<int>(ray.theta.size()) != sig.d || static_cast<int>(ray.omega.size()) != sig.n)
    throw DomainError("critical_points: ray dimension mismatch");
  const double g = std::sqrt(1.0 - theta2);
  const double m = sig.m;
  const double absdet = std::pow(1.0 - theta2, 0.5 * (sig.d - sig.n + 3)) / std::pow(m, sig.d - sig.n + 1);

  CriticalPointData k;
  k.kappa_sign = CriticalSign::kappa;
  k.xi_star = scaled(ray.theta, m / g);
  k.sigma_star = ray.omega;
  k.phase_value = -m * g;
  k.hessian_absdet = absdet;
  k.hessian_signature = sig.n - 1 - sig.d;
  k.rho_derivative_sign = -1;

  CriticalPointData kp;
  kp.kappa_sign = CriticalSign::kappa_prime;
  kp.xi_star = scaled(ray.theta, -m / g);
  kp.sigma_star = scaled(ray.omega, -1.0);
  kp.phase_value = m * g;
  kp.hessian_absdet = absdet;
  kp.hessian_signature = sig.d - sig.n + 1;
  kp.rho_derivative_sign = +1;
  return {k, kp};
}

enum class Provenance { from_data, given };

struct AmplitudePair {
  AmplitudeMap u_plus;
  AmplitudeMap u_minus;
  Provenance provenance = Provenance::given;
  // Split into density and source contributions; present when built from data.
  AmplitudeMap ua_plus, ua_minus, uf_plus, uf_minus;

  Complex plus(std::span<const double> theta, std::span<const double> omega) const { return u_plus(theta, omega); }
  Complex minus(std::span<const double> theta, std::span<const double> omega) const { return u_minus(theta, omega); }
};

namespace detail {

// sign = +1 for U+, -1 for U-. part: 0 both, 1 density only, 2 source only.
inline Complex amplitude_value(const std::optional<MassShellDensity>& density,
                               const std::optional<SchwartzSource>& source, const ProblemSignature& sig, int sign,
                               int part, std::span<const double> theta, std::span<const double> omega) {
  if (static_cast<int>(theta.size()) != sig.d || static_cast<int>(omega.size()) != sig.n)
    throw DomainError("amplitude: dimension mismatch");
  const double theta2 = norm_squared(theta);
  if (!(theta2 < 1.0)) throw DomainError("amplitude: |theta| must be < 1");
  const double g = std::sqrt(1.0 - theta2);
  const double m = sig.m;
  double xi[kMaxDim], tau[kMaxDim];
  for (int k = 0; k < sig.d; ++k) xi[k] = -sign * m * theta[static_cast<std::size_t>(k)] / g;
  for (int k = 0; k < sig.n; ++k) tau[k] = -sign * m * omega[static_cast<std::size_t>(k)] / g;
  const std::span<const double> xs(xi, static_cast<std::size_t>(sig.d));
  const std::span<const double> ts(tau, static_cast<std::size_t>(sig.n));

  Complex data = 0.0;
  if (density && part != 2) data += density->eval_onshell(xs, ts);
  if (source && part != 1) data += Complex(0.0, -sign * kPi) * source->eval_freq(xs, ts);
  if (data == Complex(0.0)) return 0.0;
  const double magnitude = std::pow(m / (kTwoPi * g), 0.5 * (sig.d + sig.n - 1)) / (4.0 * kPi * m);
  return eighth_turn(sign * (sig.d - sig.n + 1)) * magnitude * data;
}

}  // namespace detail

inline AmplitudePair amplitude_from_data(std::optional<MassShellDensity> density, std::optional<SchwartzSource> source,
                                         const ProblemSignature& sig) {
  if (density && !(density->sig == sig)) throw DomainError("amplitude_from_data: density signature mismatch");
  if (source && !(source->sig == sig)) throw DomainError("amplitude_from_data: source signature mismatch");
  auto make = [density, source, sig](int sign, int part) -> AmplitudeMap {
    return [density, source, sig, sign, part](std::span<const double> theta, std::span<const double> omega) {
      return detail::amplitude_value(density, source, sig, sign, part, theta, omega);
    };
  };
  AmplitudePair out;
  out.provenance = Provenance::from_data;
  out.u_plus = make(+1, 0);
  out.u_minus = make(-1, 0);
  out.ua_plus = make(+1, 1);
  out.ua_minus = make(-1, 1);
  out.uf_plus = make(+1, 2);
  out.uf_minus = make(-1, 2);
  return out;
}

inline AmplitudePair zero_amplitudes() {
  AmplitudeMap zero = [](std::span<const double>, std::span<const double>) { return Complex(0.0); };
  return AmplitudePair{zero, zero, Provenance::given, zero, zero, zero, zero};
}

inline Complex predict_leading(const AmplitudePair& amps, const TimelikeRay& ray, double s,
                               const ProblemSignature& sig) {
  if (!(s > 0.0)) throw DomainError("predict_leading: s must be positive");
  const double phase = s * ray.phase_rate(sig.m);
  const Complex sum = amps.plus(ray.theta, ray.omega) * std::polar(1.0, phase) +
                      amps.minus(ray.theta, ray.omega) * std::polar(1.0, -phase);
  return std::pow(s, -0.5 * (sig.d + sig.n - 1)) * sum;
}

enum class Branch { plus, minus };

// Density whose field has the given U+ (or U-) as its amplitude:
//   plus:  a(xi, tau) = 4 pi m e^{-i pi (d-n+1)/4} (2 pi / |tau|)^{(d+n-1)/2} U+(-xi/|tau|, -tau/|tau|) + i pi f^(xi, tau)
//   minus: a(xi, tau) = 4 pi m e^{+i pi (d-n+1)/4} (2 pi / |tau|)^{(d+n-1)/2} U-( xi/|tau|,  tau/|tau|) - i pi f^(xi, tau)
inline MassShellDensity invert_amplitude(const BoundaryFlatAmplitude& given, Branch which,
                                         std::optional<SchwartzSource> source, const ProblemSignature& sig) {
  if (!(given.sig == sig)) throw DomainError("invert_amplitude: amplitude signature mismatch");
  if (source && !(source->sig == sig)) throw DomainError("invert_amplitude: source signature mismatch");
  const int sign = which == Branch::plus ? +1 : -1;
  const Complex phase = eighth_turn(-sign * (sig.d - sig.n + 1));
  const AmplitudeMap u = given.amplitude;
  ShellMap onshell = [u, source, sig, sign, phase](std::span<const double> xi, std::span<const double> tau) {
    const double r = norm(tau);
    double theta[kMaxDim], omega[kMaxDim];
    for (int k = 0; k < sig.d; ++k) theta[k] = -sign * xi[static_cast<std::size_t>(k)] / r;
    for (int k = 0; k < sig.n; ++k) omega[k] = -sign * tau[static_cast<std::size_t>(k)] / r;
    const Complex given_value = u(std::span<const double>(theta, static_cast<std::size_t>(sig.d)),
                                  std::span<const double>(omega, static_cast<std::size_t>(sig.n)));
    Complex a = 4.0 * kPi * sig.m * phase * std::pow(kTwoPi / r, 0.5 * (sig.d + sig.n - 1)) * given_value;
    if (source) a += Complex(0.0, sign * kPi) * source->eval_freq(xi, tau);
    return a;
  };
  return MassShellDensity::from_onshell(sig, std::move(onshell), std::nullopt,
                                        std::string("inverted from ") + (which == Branch::plus ? "U+" : "U-") + ": " +
                                            given.description);
}

enum class SymmetryMode { homogeneous, source_only };

struct AmplitudeProbe {
  RealVector theta;
  RealVector omega;
};

// max |U+-(-theta, -omega) - (+-i)^k U-+(theta, omega)|, k = d-n+1 (homogeneous) or d-n-1 (source only).
inline double symmetry_check(const AmplitudePair& amps, SymmetryMode mode, const ProblemSignature& sig,
                             const std::vector<AmplitudeProbe>& probes) {
  const int k = mode == SymmetryMode::homogeneous ? sig.d - sig.n + 1 : sig.d - sig.n - 1;
  double worst = 0.0;
  for (const auto& p : probes) {
    const RealVector mtheta = scaled(p.theta, -1.0);
    const RealVector momega = scaled(p.omega, -1.0);
    const Complex dev_plus = amps.plus(mtheta, momega) - quarter_power(+1, k) * amps.minus(p.theta, p.omega);
    const Complex dev_minus = amps.minus(mtheta, momega) - quarter_power(-1, k) * amps.plus(p.theta, p.omega);
    worst = std::max({worst, std::abs(dev_plus), std::abs(dev_minus)});
  }
  return worst;
}

}  // namespace uhwave
