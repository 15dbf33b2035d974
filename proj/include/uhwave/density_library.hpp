#pragma once

// Closed-form test families: Schwartz sources f with exact transform f^,
// mass-shell densities given through their chart A(xi, sigma), and
// amplitudes on B^d x S^{n-1} vanishing to infinite order at |theta| = 1.
//
// Fourier convention throughout:
//   f^(xi, tau) = int exp(i(-<x,xi> + <t,tau>)) f(x, t) dx dt.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uhwave/core_model.hpp"

namespace uhwave {

using SpacetimeMap = std::function<Complex(std::span<const double>, std::span<const double>)>;
using FrequencyMap = std::function<Complex(std::span<const double>, std::span<const double>)>;
using ChartMap = std::function<Complex(std::span<const double> xi, std::span<const double> sigma)>;
using ShellMap = std::function<Complex(std::span<const double> xi, std::span<const double> tau)>;
using AmplitudeMap = std::function<Complex(std::span<const double> theta, std::span<const double> omega)>;

// Gaussian-type decay hint in frequency space: magnitude <= peak * exp(-r^2 / (2 width^2))
// at distance r from the center. Lets the synthesis pick truncation radii analytically.
struct GaussianEnvelope {
  RealVector xi_center;
  RealVector tau_center;  // empty for densities
  double width = 1.0;
  double offset = 0.0;  // extra radius for multi-lobe densities

  // Distance beyond which the magnitude is below tol * peak.
  double radius(double tol) const { return offset + width * std::sqrt(2.0 * std::log(1.0 / tol)); }
};

// Complex polynomial in the components of a unit vector, degree <= 4.
struct SectorTerm {
  Complex coeff;
  std::vector<int> powers;

  bool operator==(const SectorTerm&) const = default;
};

struct SectorPolynomial {
  std::vector<SectorTerm> terms;

  static SectorPolynomial constant(int n, Complex c) {
    return SectorPolynomial{{SectorTerm{c, std::vector<int>(static_cast<std::size_t>(n), 0)}}};
  }

  void validate(int n) const {
    for (const auto& term : terms) {
      if (static_cast<int>(term.powers.size()) != n)
        throw DomainError("sector polynomial: term has wrong number of powers");
      int degree = 0;
      for (int p : term.powers) {
        if (p < 0) throw DomainError("sector polynomial: negative power");
        degree += p;
      }
      if (degree > 4) throw DomainError("sector polynomial: degree must be <= 4");
    }
  }

  Complex operator()(std::span<const double> sigma) const {
    Complex sum = 0.0;
    for (const auto& term : terms) {
      double mono = 1.0;
      for (std::size_t k = 0; k < term.powers.size(); ++k) mono *= std::pow(sigma[k], term.powers[k]);
      sum += term.coeff * mono;
    }
    return sum;
  }

  bool operator==(const SectorPolynomial&) const = default;
};

// Polynomial in (theta, omega) used as the smooth profile of a bump amplitude.
struct ProfileTerm {
  Complex coeff;
  std::vector<int> theta_powers;
  std::vector<int> omega_powers;

  bool operator==(const ProfileTerm&) const = default;
};

struct ProfilePolynomial {
  std::vector<ProfileTerm> terms;

  Complex operator()(std::span<const double> theta, std::span<const double> omega) const {
    Complex sum = 0.0;
    for (const auto& term : terms) {
      double mono = 1.0;
      for (std::size_t k = 0; k < term.theta_powers.size(); ++k) mono *= std::pow(theta[k], term.theta_powers[k]);
      for (std::size_t k = 0; k < term.omega_powers.size(); ++k) mono *= std::pow(omega[k], term.omega_powers[k]);
      sum += term.coeff * mono;
    }
    return sum;
  }

  bool operator==(const ProfilePolynomial&) const = default;
};

struct SchwartzSource {
  ProblemSignature sig;
  SpacetimeMap spacetime;
  FrequencyMap frequency;
  GaussianEnvelope envelope;
  bool real_valued = false;
  std::string description;

  Complex eval_spacetime(std::span<const double> x, std::span<const double> t) const { return spacetime(x, t); }
  Complex eval_freq(std::span<const double> xi, std::span<const double> tau) const { return frequency(xi, tau); }
};

// Density a on the mass shell, carried by its chart
//   A(xi, sigma) = 1/2 (xi^2 + m^2)^{n/2 - 1} a(xi, sigma sqrt(xi^2 + m^2)).
struct MassShellDensity {
  ProblemSignature sig;
  ChartMap chart;
  ShellMap onshell;
  std::optional<GaussianEnvelope> envelope;
  std::string description;

  Complex eval_chart(std::span<const double> xi, std::span<const double> sigma) const { return chart(xi, sigma); }
  Complex eval_onshell(std::span<const double> xi, std::span<const double> tau) const { return onshell(xi, tau); }
  Complex eval_onshell(const ShellPoint& p) const { return onshell(p.xi, p.tau); }

  static MassShellDensity from_chart(const ProblemSignature& sig, ChartMap chart,
                                     std::optional<GaussianEnvelope> envelope, std::string description) {
    const int n = sig.n;
    const double m = sig.m;
    ShellMap onshell = [chart, n, m](std::span<const double> xi, std::span<const double> tau) {
      const double r = shell_radius(xi, m);
      const double tau_len = norm(tau);
      double sigma[kMaxDim];
      for (int k = 0; k < n; ++k) sigma[k] = tau[k] / tau_len;
      return 2.0 * std::pow(r, 2.0 - n) * chart(xi, std::span<const double>(sigma, static_cast<std::size_t>(n)));
    };
    return MassShellDensity{sig, std::move(chart), std::move(onshell), std::move(envelope), std::move(description)};
  }

  static MassShellDensity from_onshell(const ProblemSignature& sig, ShellMap onshell,
                                       std::optional<GaussianEnvelope> envelope, std::string description) {
    const int n = sig.n;
    const double m = sig.m;
    ChartMap chart = [onshell, n, m](std::span<const double> xi, std::span<const double> sigma) {
      const double r = shell_radius(xi, m);
      double tau[kMaxDim];
      for (int k = 0; k < n; ++k) tau[k] = sigma[k] * r;
      return 0.5 * std::pow(r, n - 2.0) * onshell(xi, std::span<const double>(tau, static_cast<std::size_t>(n)));
    };
    return MassShellDensity{sig, std::move(chart), std::move(onshell), std::move(envelope), std::move(description)};
  }
};

struct BoundaryFlatAmplitude {
  ProblemSignature sig;
  AmplitudeMap amplitude;
  std::string description;

  Complex eval(std::span<const double> theta, std::span<const double> omega) const { return amplitude(theta, omega); }
};

namespace detail {

inline void check_length(std::span<const double> v, int expected, const char* what) {
  if (static_cast<int>(v.size()) != expected) throw DomainError(std::string(what) + ": dimension mismatch");
}

inline RealVector zeros_if_empty(RealVector v, int dim) {
  if (v.empty()) v.assign(static_cast<std::size_t>(dim), 0.0);
  return v;
}

}  // namespace detail

// f(x, t) = amp * exp(-(|x - x0|^2 + |t - t0|^2) / (2 w^2)) * exp(i(<x, xi0> - <t, tau0>)),
// with its exact transform. Empty shift vectors mean zero shift.
inline SchwartzSource gaussian_source(const ProblemSignature& sig, RealVector center_x, RealVector center_t,
                                      double width, RealVector xi_shift = {}, RealVector tau_shift = {},
                                      double amplitude = 1.0) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("gaussian_source: width must be positive");
  xi_shift = detail::zeros_if_empty(std::move(xi_shift), sig.d);
  tau_shift = detail::zeros_if_empty(std::move(tau_shift), sig.n);
  detail::check_length(center_x, sig.d, "gaussian_source center_x");
  detail::check_length(center_t, sig.n, "gaussian_source center_t");
  detail::check_length(xi_shift, sig.d, "gaussian_source xi_shift");
  detail::check_length(tau_shift, sig.n, "gaussian_source tau_shift");

  const double w2 = width * width;
  const double norm_factor = amplitude * std::pow(kTwoPi * w2, 0.5 * (sig.d + sig.n));

  SpacetimeMap spacetime = [=](std::span<const double> x, std::span<const double> t) {
    double r2 = 0.0, phase = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      r2 += (x[k] - center_x[k]) * (x[k] - center_x[k]);
      phase += x[k] * xi_shift[k];
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
      r2 += (t[k] - center_t[k]) * (t[k] - center_t[k]);
      phase -= t[k] * tau_shift[k];
    }
    return amplitude * std::exp(-r2 / (2.0 * w2)) * std::polar(1.0, phase);
  };
  FrequencyMap frequency = [=](std::span<const double> xi, std::span<const double> tau) {
    double q2 = 0.0, phase = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double dxi = xi[k] - xi_shift[k];
      q2 += dxi * dxi;
      phase -= center_x[k] * dxi;
    }
    for (std::size_t k = 0; k < tau.size(); ++k) {
      const double dtau = tau[k] - tau_shift[k];
      q2 += dtau * dtau;
      phase += center_t[k] * dtau;
    }
    return norm_factor * std::exp(-0.5 * w2 * q2) * std::polar(1.0, phase);
  };

  const bool real = norm(xi_shift) == 0.0 && norm(tau_shift) == 0.0;
  GaussianEnvelope env{xi_shift, tau_shift, 1.0 / width};
  return SchwartzSource{sig, std::move(spacetime), std::move(frequency), std::move(env), real,
                        "gaussian source (width " + std::to_string(width) + ")"};
}

// A(xi, sigma) = wgt(sigma) exp(-|xi - xi0|^2 / (2 w^2)). With `hermitian`, the chart is
// symmetrized to A(xi, sigma) = [A0(xi, sigma) + conj A0(-xi, -sigma)] / 2 so that the
// synthesized field is real.
inline MassShellDensity gaussian_shell_density(const ProblemSignature& sig, RealVector center_xi, double width,
                                               SectorPolynomial sector, bool hermitian = false) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("gaussian_shell_density: width must be positive");
  center_xi = detail::zeros_if_empty(std::move(center_xi), sig.d);
  detail::check_length(center_xi, sig.d, "gaussian_shell_density center");
  sector.validate(sig.n);

  const double w2 = width * width;
  auto base = [center_xi, w2, sector](std::span<const double> xi, std::span<const double> sigma) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) r2 += (xi[k] - center_xi[k]) * (xi[k] - center_xi[k]);
    return sector(sigma) * std::exp(-r2 / (2.0 * w2));
  };

  ChartMap chart;
  GaussianEnvelope env{center_xi, {}, width};
  if (hermitian) {
    chart = [base](std::span<const double> xi, std::span<const double> sigma) {
      double mxi[kMaxDim], msig[kMaxDim];
      for (std::size_t k = 0; k < xi.size(); ++k) mxi[k] = -xi[k];
      for (std::size_t k = 0; k < sigma.size(); ++k) msig[k] = -sigma[k];
      const Complex mirrored = base(std::span<const double>(mxi, xi.size()), std::span<const double>(msig, sigma.size()));
      return 0.5 * (base(xi, sigma) + std::conj(mirrored));
    };
    // Two lobes at +-xi0: one envelope about the origin covering both.
    env = GaussianEnvelope{RealVector(static_cast<std::size_t>(sig.d), 0.0), {}, width, norm(center_xi)};
  } else {
    chart = base;
  }
  return MassShellDensity::from_chart(sig, std::move(chart), env,
                                      "gaussian shell density (width " + std::to_string(width) + ")");
}

// U(theta, omega) = profile(theta, omega) exp(-flatness / (1 - |theta|^2)) inside the ball, 0 outside.
inline BoundaryFlatAmplitude bump_amplitude(const ProblemSignature& sig, AmplitudeMap profile, double flatness) {
  if (!(flatness > 0.0) || !std::isfinite(flatness)) throw DomainError("bump_amplitude: flatness must be positive");
  AmplitudeMap u = [profile = std::move(profile), flatness](std::span<const double> theta,
                                                            std::span<const double> omega) -> Complex {
    const double gap = 1.0 - norm_squared(theta);
    if (gap <= 0.0) return 0.0;
    const double envelope = std::exp(-flatness / gap);
    if (envelope == 0.0) return 0.0;
    return profile(theta, omega) * envelope;
  };
  return BoundaryFlatAmplitude{sig, std::move(u), "bump amplitude (flatness " + std::to_string(flatness) + ")"};
}

// Real Gaussian profile on R^d used as Cauchy data.
struct SpatialGaussian {
  double amplitude = 0.0;
  RealVector center;
  double width = 1.0;

  double value(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - center[k]) * (x[k] - center[k]);
    return amplitude * std::exp(-r2 / (2.0 * width * width));
  }

  // int exp(-i<x, xi>) value(x) dx
  Complex fourier(std::span<const double> xi) const {
    const double d = static_cast<double>(xi.size());
    double q2 = 0.0, phase = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
      q2 += xi[k] * xi[k];
      phase -= center[k] * xi[k];
    }
    return amplitude * std::pow(kTwoPi * width * width, 0.5 * d) * std::exp(-0.5 * width * width * q2) *
           std::polar(1.0, phase);
  }

  bool operator==(const SpatialGaussian&) const = default;
};

}  // namespace uhwave
