#pragma once

// Quadrature engines: composite Gauss-Legendre panels, rules on S^{n-1},
// truncated tensor grids on R^d and a Cauchy principal value rule built on
// symmetric pairing about the singularity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uhwave/core_model.hpp"

namespace uhwave {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_order.
inline GaussRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

// How finely a composite rule splits an interval: panels are at most `base_width`
// wide and carry at most `phase_budget` radians of oscillation each.
struct PanelPolicy {
  int order = 16;
  double phase_budget = 8.0;
  double resolution_scale = 1.0;

  int panels(double length, double frequency, double base_width) const {
    if (!(length > 0.0)) return 0;
    const double by_shape = length / base_width;
    const double by_phase = length * std::abs(frequency) / phase_budget;
    const double count = std::ceil(resolution_scale * std::max({by_shape, by_phase, 1.0}));
    return static_cast<int>(std::min(count, 1e7));
  }
};

// Sum of w * f(z) over `panels` equal Gauss panels on [a, b].
template <typename Fn>
auto integrate_panels(double a, double b, int panels, const GaussRule& rule, Fn&& f) -> decltype(f(a)) {
  using Result = decltype(f(a));
  Result sum{};
  if (panels <= 0) return sum;
  const double h = (b - a) / panels;
  const double half = 0.5 * h;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += (rule.weights[j] * half) * f(mid + half * rule.nodes[j]);
  }
  return sum;
}

struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline CompositeRule composite_gauss(double a, double b, int panels, const GaussRule& rule) {
  CompositeRule out;
  const double h = (b - a) / panels;
  out.nodes.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
  out.weights.reserve(out.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      out.nodes.push_back(mid + 0.5 * h * rule.nodes[j]);
      out.weights.push_back(0.5 * h * rule.weights[j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sphere rules

inline double sphere_measure(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return kTwoPi;
    case 3: return 4.0 * kPi;
    default: throw DomainError("sphere_measure: n must be 1, 2 or 3");
  }
}

struct SphereRule {
  int n = 1;
  std::vector<double> nodes;  // count * n, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t j) const {
    return std::span<const double>(nodes).subspan(j * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  }
};

// n = 1: the two points {+1, -1} with unit weights.
// n = 2: `resolution` equally spaced angles (trapezoid).
// n = 3: `resolution` Gauss nodes in cos(polar) times 2*resolution azimuthal angles.
inline SphereRule sphere_rule(int n, int resolution) {
  SphereRule rule;
  rule.n = n;
  if (n == 1) {
    rule.nodes = {1.0, -1.0};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (n != 2 && n != 3) throw DomainError("sphere_rule: n must be 1, 2 or 3");
  if (resolution < 4) throw DomainError("sphere_rule: resolution must be >= 4");
  if (n == 2) {
    const double w = kTwoPi / resolution;
    for (int j = 0; j < resolution; ++j) {
      const double phi = kTwoPi * j / resolution;
      rule.nodes.push_back(std::cos(phi));
      rule.nodes.push_back(std::sin(phi));
      rule.weights.push_back(w);
    }
    return rule;
  }
  const GaussRule polar = gauss_legendre(resolution);
  const int azimuth = 2 * resolution;
  const double wphi = kTwoPi / azimuth;
  for (int i = 0; i < resolution; ++i) {
    const double mu = polar.nodes[static_cast<std::size_t>(i)];
    const double rho = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < azimuth; ++j) {
      const double phi = kTwoPi * j / azimuth;
      rule.nodes.push_back(rho * std::cos(phi));
      rule.nodes.push_back(rho * std::sin(phi));
      rule.nodes.push_back(mu);
      rule.weights.push_back(polar.weights[static_cast<std::size_t>(i)] * wphi);
    }
  }
  return rule;
}

// Resolution that integrates exp(i z <e, sigma>) times a low-degree polynomial to
// near machine precision, z = `angular_frequency`.
inline int sphere_resolution_for(int n, double angular_frequency, int base_resolution, double scale = 1.0) {
  const double z = std::abs(angular_frequency);
  if (n == 1) return 0;
  double needed = 0.0;
  if (n == 2) needed = 1.2 * z + 24.0;
  else needed = 0.75 * z + 16.0;
  const int count = static_cast<int>(std::ceil(scale * needed));
  return std::max(base_resolution, count);
}

// ---------------------------------------------------------------------------
// Frequency grids

// Tensor product of one composite Gauss rule on [-L, L] per axis.
struct FrequencyGrid {
  int d = 1;
  double half_width = 1.0;
  int panels = 1;
  int order = 16;
  std::vector<double> axis_nodes;
  std::vector<double> axis_weights;

  std::size_t nodes_per_axis() const { return axis_nodes.size(); }
  // Polynomials of degree up to this are integrated exactly along each axis.
  int exact_degree() const { return 2 * order - 1; }
};

inline FrequencyGrid make_frequency_grid(int d, double half_width, int panels, const GaussRule& rule) {
  if (d < 1 || d > 3) throw DomainError("frequency grid: d must be 1, 2 or 3");
  if (!(half_width > 0.0)) throw DomainError("frequency grid: half width must be positive");
  if (panels < 1) throw DomainError("frequency grid: need at least one panel");
  CompositeRule axis = composite_gauss(-half_width, half_width, panels, rule);
  return FrequencyGrid{d, half_width, panels, static_cast<int>(rule.nodes.size()), std::move(axis.nodes),
                       std::move(axis.weights)};
}

// Weighted sum over the grid. Node order is lexicographic with the last axis
// fastest; the accumulation is serial, so results are reproducible bit for bit.
template <typename Fn>
Complex tensor_integrate(Fn&& integrand, const FrequencyGrid& grid) {
  const std::size_t count = grid.nodes_per_axis();
  double xi[3] = {0.0, 0.0, 0.0};
  const std::span<const double> view(xi, static_cast<std::size_t>(grid.d));
  Complex sum = 0.0;
  if (grid.d == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      xi[0] = grid.axis_nodes[i];
      sum += grid.axis_weights[i] * Complex(integrand(view));
    }
  } else if (grid.d == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      xi[0] = grid.axis_nodes[i];
      for (std::size_t j = 0; j < count; ++j) {
        xi[1] = grid.axis_nodes[j];
        sum += (grid.axis_weights[i] * grid.axis_weights[j]) * Complex(integrand(view));
      }
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      xi[0] = grid.axis_nodes[i];
      for (std::size_t j = 0; j < count; ++j) {
        xi[1] = grid.axis_nodes[j];
        const double wij = grid.axis_weights[i] * grid.axis_weights[j];
        for (std::size_t k = 0; k < count; ++k) {
          xi[2] = grid.axis_nodes[k];
          sum += (wij * grid.axis_weights[k]) * Complex(integrand(view));
        }
      }
    }
  }
  if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag()))
    throw EvaluationError("tensor_integrate: non-finite result");
  return sum;
}

// ---------------------------------------------------------------------------
// Principal value rule

// v.p. int_lower^upper g(z) / (z - center) dz, split as
//   int_0^W [g(center + w) - g(center - w)] / w dw        (pairing window)
//   + int_lower^{center - W} g / (z - center) + int_{center + W}^upper g / (z - center).
// Gauss nodes never touch w = 0, so the paired integrand is evaluated directly.
struct PrincipalValueRule {
  double center = 0.0;
  double half_width = 1.0;
  double lower = -12.0;
  double upper = 12.0;
  double base_width = 0.25;
  PanelPolicy policy{};

  void validate() const {
    if (!(half_width > 0.0)) throw DomainError("principal value rule: half width must be positive");
    if (!(lower <= center - half_width) || !(upper >= center + half_width))
      throw DomainError("principal value rule: pairing window must lie inside [lower, upper]");
  }
};

// `g` already contains any oscillating factor; `frequency` is its angular
// frequency, used only to size panels.
template <typename Fn>
Complex pv_integrate(Fn&& g, const PrincipalValueRule& rule, double frequency, const GaussRule& gauss) {
  const double c = rule.center;
  const double w = rule.half_width;
  Complex sum = integrate_panels(0.0, w, rule.policy.panels(w, frequency, rule.base_width), gauss,
                                 [&](double dw) { return Complex(g(c + dw) - g(c - dw)) / dw; });
  const double left = (c - w) - rule.lower;
  if (left > 0.0)
    sum += integrate_panels(rule.lower, c - w, rule.policy.panels(left, frequency, rule.base_width), gauss,
                            [&](double z) { return Complex(g(z)) / (z - c); });
  const double right = rule.upper - (c + w);
  if (right > 0.0)
    sum += integrate_panels(c + w, rule.upper, rule.policy.panels(right, frequency, rule.base_width), gauss,
                            [&](double z) { return Complex(g(z)) / (z - c); });
  return sum;
}

// v.p. int F(z) exp(i s z) / (z - center) dz over [rule.lower, rule.upper].
template <typename Fn>
Complex vp_integral_1d(Fn&& F, double s, const PrincipalValueRule& rule) {
  rule.validate();
  const GaussRule gauss = gauss_legendre(rule.policy.order);
  const Complex result = pv_integrate([&](double z) { return Complex(F(z)) * std::polar(1.0, s * z); }, rule, s, gauss);
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
    throw EvaluationError("vp_integral_1d: non-finite integrand");
  return result;
}

}  // namespace uhwave
