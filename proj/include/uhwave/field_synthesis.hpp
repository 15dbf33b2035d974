#pragma once

// Evaluation of u = u^f + u^a at arbitrary spacetime points.
//
//   u^a(x,t) = (2pi)^{-d-n} int_{R^d x S^{n-1}} e^{i(<x,xi> - <t,sigma> R)} A(xi,sigma) dxi dS
//   u^f(x,t) = (2pi)^{-d-n} v.p. int e^{i(<x,xi> - <t,sigma> rho R)} F(xi,sigma,rho) / (1 - rho)
//   F        = R^{n-2} f^(xi, rho sigma R) rho^{n-1} / (1 + rho),      R = sqrt(xi^2 + m^2)
//
// The xi-grid and sphere rule are sized per evaluation point from the
// oscillation rate |x| + |t|; the rho integral is innermost, per (xi, sigma).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "uhwave/core_model.hpp"
#include "uhwave/density_library.hpp"
#include "uhwave/quadrature.hpp"

namespace uhwave {

struct QuadratureScheme {
  int panel_order = 16;
  double phase_budget = 8.0;       // radians of oscillation per Gauss panel
  double resolution_scale = 1.0;   // multiplies every panel and sphere count
  double truncation_tol = 1e-10;   // |integrand| / peak below which frequency space is cut
  double quad_tol = 1e-8;          // declared quadrature tolerance
  double rho_window = 0.5;         // pairing half-width about rho = 1
  double rho_outer_cap = 40.0;     // hard upper limit of the rho integral
  int sphere_resolution = 16;      // minimum sphere resolution for n >= 2
  double shape_panels = 1.5;       // base panel width in units of the envelope width
  bool deterministic = true;       // serial accumulation inside a single evaluation
  int workers = 0;                 // 0: UHWAVE_THREADS or hardware concurrency

  PanelPolicy policy() const { return PanelPolicy{panel_order, phase_budget, resolution_scale}; }

  void validate() const {
    if (panel_order < 2 || panel_order > 64) throw ConfigurationError("scheme: panel_order must be in [2, 64]");
    if (!(phase_budget > 0.0)) throw ConfigurationError("scheme: phase_budget must be positive");
    if (!(resolution_scale > 0.0)) throw ConfigurationError("scheme: resolution_scale must be positive");
    if (!(truncation_tol > 0.0 && truncation_tol < 1.0)) throw ConfigurationError("scheme: truncation_tol must be in (0, 1)");
    if (!(quad_tol > 0.0)) throw ConfigurationError("scheme: quad_tol must be positive");
    if (!(rho_window > 0.0 && rho_window < 1.0)) throw ConfigurationError("scheme: rho_window must be in (0, 1)");
    if (!(rho_outer_cap > 1.0 + rho_window)) throw ConfigurationError("scheme: rho_outer_cap must exceed 1 + rho_window");
    if (sphere_resolution < 4) throw ConfigurationError("scheme: sphere_resolution must be >= 4");
    if (!(shape_panels > 0.0)) throw ConfigurationError("scheme: shape_panels must be positive");
  }

  bool operator==(const QuadratureScheme&) const = default;
};

inline int default_worker_count() {
  if (const char* env = std::getenv("UHWAVE_THREADS")) {
    const int requested = std::atoi(env);
    if (requested > 0) return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Region of frequency space outside which a density or source is negligible.
struct FrequencyExtent {
  double half_width = 1.0;   // xi-grid covers [-L, L]^d
  RealVector ball_center;    // nodes farther than ball_radius from here are skipped
  double ball_radius = 1.0;
  double base_width = 1.0;   // panel width resolving the profile itself
  double max_shell_radius = 1.0;  // max sqrt(xi^2 + m^2) over the retained nodes
  double tau_radius = 0.0;   // sources only: |tau| beyond which f^ is negligible
  double tau_scale = 1.0;    // sources only: variation length of f^ in tau
};

namespace detail {

inline FrequencyExtent envelope_extent(const GaussianEnvelope& env, const ProblemSignature& sig, double tol,
                                       double shape_panels) {
  const double r = env.radius(tol);
  double max_center = 0.0;
  for (double c : env.xi_center) max_center = std::max(max_center, std::abs(c));
  FrequencyExtent ext;
  ext.half_width = std::min(max_center + r, 12.0 * sig.m);
  ext.ball_center = env.xi_center;
  ext.ball_radius = r;
  ext.base_width = shape_panels * env.width;
  const double reach = std::min(std::sqrt(static_cast<double>(sig.d)) * ext.half_width, norm(env.xi_center) + r);
  ext.max_shell_radius = std::sqrt(reach * reach + sig.m * sig.m);
  if (!env.tau_center.empty()) {
    ext.tau_radius = norm(env.tau_center) + r;
    ext.tau_scale = env.width;
  }
  return ext;
}

// Sampled fallback for densities without an analytic envelope: scans a coarse
// grid of [-12m, 12m]^d and keeps the smallest cube holding every sample
// above tol * peak.
inline FrequencyExtent sampled_extent(const MassShellDensity& density, const ProblemSignature& sig, double tol) {
  const double cap = 12.0 * sig.m;
  const int per_axis = sig.d == 3 ? 49 : 97;
  const double step = 2.0 * cap / (per_axis - 1);
  const SphereRule sphere = sphere_rule(sig.n, 8);
  std::vector<double> magnitudes;
  std::vector<double> inf_norms, two_norms;
  const int total = static_cast<int>(std::pow(per_axis, sig.d));
  double xi[3] = {0.0, 0.0, 0.0};
  const std::span<const double> view(xi, static_cast<std::size_t>(sig.d));
  double peak = 0.0;
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    double inf_norm = 0.0;
    for (int k = sig.d - 1; k >= 0; --k) {
      xi[k] = -cap + step * (rest % per_axis);
      rest /= per_axis;
      inf_norm = std::max(inf_norm, std::abs(xi[k]));
    }
    double mag = 0.0;
    for (std::size_t j = 0; j < sphere.size(); ++j) mag = std::max(mag, std::abs(density.eval_chart(view, sphere.node(j))));
    if (!std::isfinite(mag)) throw EvaluationError("density: non-finite chart value while sizing the grid");
    peak = std::max(peak, mag);
    magnitudes.push_back(mag);
    inf_norms.push_back(inf_norm);
    two_norms.push_back(norm(view));
  }
  double reach_inf = 0.0, reach_two = 0.0;
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (magnitudes[i] >= tol * peak) {
      reach_inf = std::max(reach_inf, inf_norms[i]);
      reach_two = std::max(reach_two, two_norms[i]);
    }
  }
  FrequencyExtent ext;
  ext.half_width = std::min(cap, reach_inf + step);
  ext.ball_center.assign(static_cast<std::size_t>(sig.d), 0.0);
  ext.ball_radius = reach_two + step * std::sqrt(static_cast<double>(sig.d));
  ext.base_width = std::max(ext.half_width / 6.0, step);
  const double reach = std::min(std::sqrt(static_cast<double>(sig.d)) * ext.half_width, ext.ball_radius);
  ext.max_shell_radius = std::sqrt(reach * reach + sig.m * sig.m);
  return ext;
}

}  // namespace detail

class SolutionField {
 public:
  SolutionField(ProblemSignature sig, std::optional<SchwartzSource> source, std::optional<MassShellDensity> density,
                QuadratureScheme scheme = {})
      : sig_(sig), source_(std::move(source)), density_(std::move(density)), scheme_(scheme) {
    scheme_.validate();
    if (!source_ && !density_) throw ConfigurationError("solution field: needs a source or a density");
    if (!sig_.quadrature_supported()) throw ConfigurationError("solution field: synthesis supports d, n <= 3");
    if (source_ && !(source_->sig == sig_)) throw ConfigurationError("solution field: source signature mismatch");
    if (density_ && !(density_->sig == sig_)) throw ConfigurationError("solution field: density signature mismatch");
    gauss_ = gauss_legendre(scheme_.panel_order);
    if (density_) {
      density_extent_ = density_->envelope
                            ? detail::envelope_extent(*density_->envelope, sig_, scheme_.truncation_tol, scheme_.shape_panels)
                            : detail::sampled_extent(*density_, sig_, scheme_.truncation_tol);
    }
    if (source_) {
      source_extent_ = detail::envelope_extent(source_->envelope, sig_, scheme_.truncation_tol, scheme_.shape_panels);
    }
  }

  const ProblemSignature& signature() const { return sig_; }
  const std::optional<SchwartzSource>& source() const { return source_; }
  const std::optional<MassShellDensity>& density() const { return density_; }
  const QuadratureScheme& scheme() const { return scheme_; }
  const GaussRule& gauss() const { return gauss_; }
  const FrequencyExtent& density_extent() const { return density_extent_; }
  const FrequencyExtent& source_extent() const { return source_extent_; }

  SolutionField with_scheme(const QuadratureScheme& scheme) const {
    return SolutionField(sig_, source_, density_, scheme);
  }

 private:
  ProblemSignature sig_;
  std::optional<SchwartzSource> source_;
  std::optional<MassShellDensity> density_;
  QuadratureScheme scheme_;
  GaussRule gauss_;
  FrequencyExtent density_extent_;
  FrequencyExtent source_extent_;
};

namespace detail {

inline double oscillation_rate(const SpacetimePoint& p) { return norm(p.x) + norm(p.t); }

inline void check_point(const SolutionField& field, const SpacetimePoint& p) {
  const auto& sig = field.signature();
  if (static_cast<int>(p.x.size()) != sig.d || static_cast<int>(p.t.size()) != sig.n)
    throw DomainError("evaluate: point dimension mismatch");
}

// Per-axis factors exp(i x_k xi) over the grid nodes.
inline std::vector<std::vector<Complex>> axis_phases(const FrequencyGrid& grid, std::span<const double> x) {
  std::vector<std::vector<Complex>> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k].resize(grid.nodes_per_axis());
    for (std::size_t i = 0; i < grid.nodes_per_axis(); ++i) out[k][i] = std::polar(1.0, x[k] * grid.axis_nodes[i]);
  }
  return out;
}

// Visits grid nodes whose first-axis index lies in [first, last), skipping
// nodes outside the extent ball. Callback gets (xi, weight, exp(i<x,xi>)).
template <typename Fn>
Complex sweep_grid(const FrequencyGrid& grid, const FrequencyExtent& ext,
                   const std::vector<std::vector<Complex>>& phases, std::size_t first, std::size_t last, Fn&& visit) {
  const int d = grid.d;
  const std::size_t count = grid.nodes_per_axis();
  const double r2 = ext.ball_radius * ext.ball_radius;
  double xi[3] = {0.0, 0.0, 0.0};
  const std::span<const double> view(xi, static_cast<std::size_t>(d));
  Complex sum = 0.0;
  std::size_t idx[3] = {0, 0, 0};
  const std::size_t inner = d == 1 ? 1 : (d == 2 ? count : count * count);
  for (std::size_t i = first; i < last; ++i) {
    idx[0] = i;
    for (std::size_t rest = 0; rest < inner; ++rest) {
      if (d == 2) idx[1] = rest;
      if (d == 3) {
        idx[1] = rest / count;
        idx[2] = rest % count;
      }
      double dist2 = 0.0;
      double weight = 1.0;
      Complex phase = 1.0;
      for (int k = 0; k < d; ++k) {
        xi[k] = grid.axis_nodes[idx[k]];
        const double off = xi[k] - ext.ball_center[static_cast<std::size_t>(k)];
        dist2 += off * off;
        weight *= grid.axis_weights[idx[k]];
        phase *= phases[static_cast<std::size_t>(k)][idx[k]];
      }
      if (dist2 > r2) continue;
      sum += visit(view, weight, phase);
    }
  }
  return sum;
}

// Splits the first grid axis across workers unless the scheme is deterministic.
template <typename Fn>
Complex sweep_maybe_parallel(const SolutionField& field, const FrequencyGrid& grid, const FrequencyExtent& ext,
                             const std::vector<std::vector<Complex>>& phases, Fn&& visit) {
  const std::size_t count = grid.nodes_per_axis();
  const int workers = field.scheme().workers > 0 ? field.scheme().workers : default_worker_count();
  if (field.scheme().deterministic || workers <= 1 || count < 64) return sweep_grid(grid, ext, phases, 0, count, visit);
  const std::size_t chunks = static_cast<std::size_t>(workers);
  std::vector<Complex> partial(chunks, Complex(0.0));
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t first = count * c / chunks;
    const std::size_t last = count * (c + 1) / chunks;
    pool.emplace_back([&, c, first, last] { partial[c] = sweep_grid(grid, ext, phases, first, last, visit); });
  }
  for (auto& t : pool) t.join();
  Complex sum = 0.0;
  for (const Complex& p : partial) sum += p;
  return sum;
}

inline void check_finite(const Complex& v, const char* what) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw EvaluationError(std::string(what) + ": non-finite result");
}

}  // namespace detail

inline Complex evaluate_ua(const SolutionField& field, const SpacetimePoint& p) {
  if (!field.density()) throw ConfigurationError("evaluate_ua: field has no density");
  detail::check_point(field, p);
  const auto& sig = field.signature();
  const auto& scheme = field.scheme();
  const auto& ext = field.density_extent();
  const MassShellDensity& density = *field.density();

  const PanelPolicy policy = scheme.policy();
  const int panels = policy.panels(2.0 * ext.half_width, detail::oscillation_rate(p), ext.base_width);
  const FrequencyGrid grid = make_frequency_grid(sig.d, ext.half_width, panels, field.gauss());
  const SphereRule sphere =
      sphere_rule(sig.n, sphere_resolution_for(sig.n, norm(p.t) * ext.max_shell_radius, scheme.sphere_resolution,
                                               scheme.resolution_scale));
  const auto phases = detail::axis_phases(grid, p.x);
  std::vector<double> t_dot_sigma(sphere.size());
  for (std::size_t j = 0; j < sphere.size(); ++j) t_dot_sigma[j] = dot(p.t, sphere.node(j));
  const double m = sig.m;

  const Complex sum = detail::sweep_maybe_parallel(
      field, grid, ext, phases, [&](std::span<const double> xi, double weight, const Complex& phase) {
        const double r = shell_radius(xi, m);
        Complex acc = 0.0;
        for (std::size_t j = 0; j < sphere.size(); ++j)
          acc += sphere.weights[j] * std::polar(1.0, -t_dot_sigma[j] * r) * density.eval_chart(xi, sphere.node(j));
        return (weight * phase) * acc;
      });
  const Complex result = sum * std::pow(kTwoPi, -(sig.d + sig.n));
  detail::check_finite(result, "evaluate_ua");
  return result;
}

inline Complex evaluate_uf(const SolutionField& field, const SpacetimePoint& p) {
  if (!field.source()) throw ConfigurationError("evaluate_uf: field has no source");
  detail::check_point(field, p);
  const auto& sig = field.signature();
  const auto& scheme = field.scheme();
  const auto& ext = field.source_extent();
  const SchwartzSource& source = *field.source();

  const PanelPolicy policy = scheme.policy();
  const int panels = policy.panels(2.0 * ext.half_width, detail::oscillation_rate(p), ext.base_width);
  const FrequencyGrid grid = make_frequency_grid(sig.d, ext.half_width, panels, field.gauss());
  const SphereRule sphere = sphere_rule(
      sig.n, sphere_resolution_for(sig.n, norm(p.t) * ext.tau_radius, scheme.sphere_resolution, scheme.resolution_scale));
  const auto phases = detail::axis_phases(grid, p.x);
  std::vector<double> t_dot_sigma(sphere.size());
  for (std::size_t j = 0; j < sphere.size(); ++j) t_dot_sigma[j] = dot(p.t, sphere.node(j));

  const int n = sig.n;
  const double m = sig.m;
  const double window = scheme.rho_window;
  const GaussRule& gauss = field.gauss();

  const Complex sum = detail::sweep_maybe_parallel(
      field, grid, ext, phases, [&](std::span<const double> xi, double weight, const Complex& phase) {
        const double r = shell_radius(xi, m);
        const double prefactor = std::pow(r, n - 2.0);
        const double rho_cap = std::min(scheme.rho_outer_cap, ext.tau_radius / r);
        const double rho_base = std::min(0.5, scheme.shape_panels * ext.tau_scale / r);
        double tau[3] = {0.0, 0.0, 0.0};
        Complex acc = 0.0;
        for (std::size_t j = 0; j < sphere.size(); ++j) {
          const std::span<const double> sigma = sphere.node(j);
          const double kappa = -t_dot_sigma[j] * r;
          auto g = [&](double rho) {
            for (int k = 0; k < n; ++k) tau[k] = rho * sigma[static_cast<std::size_t>(k)] * r;
            const double radial = std::pow(rho, n - 1) / (1.0 + rho);
            return prefactor * radial * source.eval_freq(xi, std::span<const double>(tau, static_cast<std::size_t>(n))) *
                   std::polar(1.0, kappa * rho);
          };
          Complex inner;
          if (rho_cap <= 1.0 - window) {
            // f^ is negligible near the shell for this xi: plain integral.
            inner = integrate_panels(0.0, rho_cap, policy.panels(rho_cap, kappa, rho_base), gauss,
                                     [&](double rho) { return g(rho) / (1.0 - rho); });
          } else {
            PrincipalValueRule rule{1.0, window, 0.0, std::max(rho_cap, 1.0 + window), rho_base, policy};
            // 1 / (1 - rho) = -1 / (rho - 1)
            inner = -pv_integrate(g, rule, kappa, gauss);
          }
          acc += sphere.weights[j] * inner;
        }
        return (weight * phase) * acc;
      });
  const Complex result = sum * std::pow(kTwoPi, -(sig.d + sig.n));
  detail::check_finite(result, "evaluate_uf");
  return result;
}

inline Complex evaluate_u(const SolutionField& field, const SpacetimePoint& p) {
  Complex u = 0.0;
  if (field.source()) u += evaluate_uf(field, p);
  if (field.density()) u += evaluate_ua(field, p);
  return u;
}

// Pointwise evaluate_u in input order. Points are distributed over workers;
// every point is accumulated serially, so results do not depend on the worker count.
inline std::vector<Complex> evaluate_batch(const SolutionField& field, const std::vector<SpacetimePoint>& points) {
  std::vector<Complex> out(points.size());
  if (points.empty()) return out;
  QuadratureScheme serial = field.scheme();
  const int workers = std::min<int>(serial.workers > 0 ? serial.workers : default_worker_count(),
                                    static_cast<int>(points.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate_u(field, points[i]);
    return out;
  }
  serial.deterministic = true;
  const SolutionField inner = field.with_scheme(serial);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < points.size(); i += static_cast<std::size_t>(workers))
          out[i] = evaluate_u(inner, points[i]);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct RefinementReport {
  double max_change = 0.0;
  double max_magnitude = 0.0;
  bool passed = true;
};

// Compares evaluations at the scheme's resolution and at twice that resolution.
inline RefinementReport check_refinement(const SolutionField& field, const std::vector<SpacetimePoint>& probes) {
  QuadratureScheme fine = field.scheme();
  fine.resolution_scale *= 2.0;
  const auto coarse_values = evaluate_batch(field, probes);
  const auto fine_values = evaluate_batch(field.with_scheme(fine), probes);
  RefinementReport report;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    report.max_change = std::max(report.max_change, std::abs(coarse_values[i] - fine_values[i]));
    report.max_magnitude = std::max(report.max_magnitude, std::abs(fine_values[i]));
  }
  report.passed = report.max_change <= field.scheme().quad_tol * std::max(report.max_magnitude, 1e-300);
  return report;
}

}  // namespace uhwave
