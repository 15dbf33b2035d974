#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "uhwave/quadrature.hpp"

using namespace uhwave;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto rule = gauss_legendre(8);
  double sum_w = 0.0, moment = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    sum_w += rule.weights[j];
    moment += rule.weights[j] * std::pow(rule.nodes[j], 14);
  }
  EXPECT_NEAR(sum_w, 2.0, 1e-15);
  EXPECT_NEAR(moment, 2.0 / 15.0, 1e-15);
}

TEST(SphereRule, CircleOfDimensionZero) {
  const auto s = sphere_rule(1, 0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.node(0)[0], 1.0);
  EXPECT_EQ(s.node(1)[0], -1.0);
  EXPECT_EQ(s.weights[0] + s.weights[1], 2.0);
}

TEST(SphereRule, CircleMeasure) {
  const auto s = sphere_rule(2, 16);
  double total = 0.0;
  for (double w : s.weights) total += w;
  EXPECT_NEAR(total, 2.0 * M_PI, 1e-14);
}

TEST(SphereRule, TwoSphereMoments) {
  const auto s = sphere_rule(3, 12);
  double total = 0.0, z2 = 0.0, x4 = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto v = s.node(j);
    EXPECT_NEAR(norm(v), 1.0, 1e-14);
    total += s.weights[j];
    z2 += s.weights[j] * v[2] * v[2];
    x4 += s.weights[j] * std::pow(v[0], 4);
  }
  EXPECT_NEAR(total, 4.0 * M_PI, 1e-12);
  EXPECT_NEAR(z2, 4.0 * M_PI / 3.0, 1e-10);
  EXPECT_NEAR(x4, 4.0 * M_PI / 5.0, 1e-10);
}

TEST(SphereRule, RejectsUnsupported) {
  EXPECT_THROW(sphere_rule(4, 8), DomainError);
  EXPECT_THROW(sphere_rule(2, 3), DomainError);
}

TEST(SphereRule, OscillatoryResolution) {
  // int_{S^1} e^{i z sigma_1} dS = 2 pi J0(z)
  const double z = 30.0;
  const auto s = sphere_rule(2, sphere_resolution_for(2, z, 16));
  Complex sum = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) sum += s.weights[j] * std::polar(1.0, z * s.node(j)[0]);
  EXPECT_NEAR(sum.real(), 2.0 * M_PI * std::cyl_bessel_j(0.0, z), 1e-11);
  EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
  // on S^2: 4 pi sin(z)/z
  const auto s3 = sphere_rule(3, sphere_resolution_for(3, z, 16));
  Complex sum3 = 0.0;
  for (std::size_t j = 0; j < s3.size(); ++j) sum3 += s3.weights[j] * std::polar(1.0, z * s3.node(j)[2]);
  EXPECT_NEAR(sum3.real(), 4.0 * M_PI * std::sin(z) / z, 1e-12);
}

TEST(TensorIntegrate, GaussianLine) {
  const auto rule = gauss_legendre(16);
  const auto grid = make_frequency_grid(1, 8.0, 8, rule);
  const Complex v = tensor_integrate([](std::span<const double> xi) { return std::exp(-xi[0] * xi[0]); }, grid);
  EXPECT_NEAR(v.real(), std::sqrt(M_PI), 1e-12);
}

TEST(TensorIntegrate, Zero) {
  const auto grid = make_frequency_grid(3, 2.0, 2, gauss_legendre(8));
  EXPECT_EQ(tensor_integrate([](std::span<const double>) { return 0.0; }, grid), Complex(0.0));
}

TEST(TensorIntegrate, SeparableProduct) {
  const auto rule = gauss_legendre(16);
  const auto g1 = make_frequency_grid(1, 6.0, 6, rule);
  const auto g2 = make_frequency_grid(2, 6.0, 6, rule);
  auto f = [](double x) { return std::exp(-0.5 * x * x) * std::cos(x); };
  const Complex one = tensor_integrate([&](std::span<const double> xi) { return f(xi[0]); }, g1);
  const Complex two = tensor_integrate([&](std::span<const double> xi) { return f(xi[0]) * f(xi[1]); }, g2);
  EXPECT_NEAR(std::abs(two - one * one), 0.0, 1e-13);
}

TEST(TensorIntegrate, NonFiniteRaises) {
  const auto grid = make_frequency_grid(1, 1.0, 1, gauss_legendre(4));
  EXPECT_THROW(tensor_integrate([](std::span<const double>) { return std::nan(""); }, grid), EvaluationError);
}

TEST(TensorIntegrate, Deterministic) {
  const auto grid = make_frequency_grid(2, 5.0, 7, gauss_legendre(16));
  auto f = [](std::span<const double> xi) { return std::polar(std::exp(-norm_squared(xi)), 3.0 * xi[0] - xi[1]); };
  const Complex a = tensor_integrate(f, grid), b = tensor_integrate(f, grid);
  EXPECT_EQ(a.real(), b.real());
  EXPECT_EQ(a.imag(), b.imag());
}

namespace {
PrincipalValueRule standard_rule() { return PrincipalValueRule{0.0, 1.0, -12.0, 12.0, 0.25, PanelPolicy{}}; }
double gaussian(double z) { return std::exp(-z * z); }
}  // namespace

TEST(PrincipalValue, EvenFunctionAtZeroFrequency) {
  EXPECT_LT(std::abs(vp_integral_1d(gaussian, 0.0, standard_rule())), 1e-15);
}

TEST(PrincipalValue, ErfIdentity) {
  for (double s : {0.0, 1.0, 2.0, 4.0, 8.0})
    EXPECT_LT(std::abs(vp_integral_1d(gaussian, s, standard_rule()) - oracle::gaussian_vp(s)), 1e-8) << "s=" << s;
  EXPECT_NEAR(vp_integral_1d(gaussian, 2.0, standard_rule()).imag(), M_PI * std::erf(1.0), 1e-8);
}

TEST(PrincipalValue, IdentityConfirmedByExcisedRiemannSum) {
  const Complex riemann = oracle::riemann_vp(gaussian, 2.0);
  EXPECT_LT(std::abs(riemann - oracle::gaussian_vp(2.0)), 1e-5);
}

TEST(PrincipalValue, LargeFrequencyLimit) {
  EXPECT_LT(std::abs(vp_integral_1d(gaussian, 40.0, standard_rule()) - Complex(0.0, M_PI)), 1e-10);
}

TEST(PrincipalValue, RemainderDecay) {
  for (double s : {2.0, 4.0, 6.0, 8.0}) {
    const double dev = std::abs(vp_integral_1d(gaussian, s, standard_rule()) - Complex(0.0, M_PI));
    EXPECT_LE(dev, 10.0 * std::exp(-s * s / 4.0)) << "s=" << s;
  }
}

TEST(PrincipalValue, OddNumeratorGivesPlainIntegral) {
  // F odd about 0 => F/z is smooth, v.p. = ordinary integral; F = z e^{-z^2}: int e^{-z^2} = sqrt(pi)
  auto F = [](double z) { return z * std::exp(-z * z); };
  EXPECT_NEAR(vp_integral_1d(F, 0.0, standard_rule()).real(), std::sqrt(M_PI), 1e-12);
}

TEST(PrincipalValue, OffCenterSingularity) {
  // v.p. int e^{-(z-c)^2} / (z - c) dz = 0 at s = 0 for any center
  PrincipalValueRule rule{1.5, 0.5, -10.0, 13.0, 0.25, PanelPolicy{}};
  auto F = [](double z) { return std::exp(-(z - 1.5) * (z - 1.5)); };
  EXPECT_LT(std::abs(vp_integral_1d(F, 0.0, rule)), 1e-14);
}

TEST(PrincipalValue, WindowMustContainSingularity) {
  PrincipalValueRule bad{0.0, 1.0, -0.5, 12.0, 0.25, PanelPolicy{}};
  EXPECT_THROW(vp_integral_1d(gaussian, 1.0, bad), DomainError);
}

TEST(PrincipalValue, NonFiniteRaises) {
  auto F = [](double z) { return z > 3.0 ? std::nan("") : 0.0; };
  EXPECT_THROW(vp_integral_1d(F, 1.0, standard_rule()), EvaluationError);
}

TEST(PanelPolicy, ScalesWithFrequencyAndResolution) {
  PanelPolicy p;
  EXPECT_EQ(p.panels(10.0, 0.0, 1.0), 10);
  EXPECT_EQ(p.panels(10.0, 16.0, 1.0), 20);
  p.resolution_scale = 2.0;
  EXPECT_EQ(p.panels(10.0, 16.0, 1.0), 40);
}
