// Synthesizes a d = n = 1 field from a one-sided Gaussian shell density and
// prints |u| along a timelike ray next to the leading-order prediction.

#include <cstdio>

#include "uhwave/asymptotics.hpp"
#include "uhwave/field_synthesis.hpp"

int main() {
  using namespace uhwave;
  const auto sig = ProblemSignature::make(1, 1, 1.0);
  // wgt(sigma) = (1 + sigma) / 2: only the sigma = +1 sheet is populated.
  const SectorPolynomial sector{{SectorTerm{0.5, {0}}, SectorTerm{0.5, {1}}}};
  const auto density = gaussian_shell_density(sig, {0.0}, 0.7, sector);
  const SolutionField field(sig, std::nullopt, density);
  const auto amps = amplitude_from_data(density, std::nullopt, sig);
  const auto ray = TimelikeRay::make({0.3}, {1.0});

  std::printf("U+ = %+.6e %+.6ei   U- = %+.6e %+.6ei\n", amps.plus(ray.theta, ray.omega).real(),
              amps.plus(ray.theta, ray.omega).imag(), amps.minus(ray.theta, ray.omega).real(),
              amps.minus(ray.theta, ray.omega).imag());
  std::printf("%8s %14s %14s %10s\n", "s", "|u|", "|leading|", "rel.err");
  for (double s : {10.0, 20.0, 40.0, 80.0}) {
    const double u = std::abs(evaluate_u(field, ray_point(ray, s)));
    const double lead = std::abs(predict_leading(amps, ray, s, sig));
    std::printf("%8.1f %14.6e %14.6e %10.2e\n", s, u, lead, std::abs(u - lead) / lead);
  }
}
