#include <gtest/gtest.h>

#include <random>

#include "fraclab/spectral_core.hpp"

using namespace fraclab;

namespace {

// int_{-1}^{1} exp(1 - 1/(1-u^2)) du and the same for the square, 30-digit quadrature.
constexpr double kMollifierMass = 1.20690032243787617;
constexpr double kMollifierMass2 = 0.98338081291272646;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return x;
}

FrequencySignal gaussian_hat() {
  return FrequencySignal::sample(FrequencyGrid(-12.0, 12.0, 2400),
                                 [](double xi) { return std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi); });
}

}  // namespace

TEST(FrequencyGrid, MidpointNodesAvoidZero) {
  FrequencyGrid g(-1.0, 1.0, 4);
  EXPECT_DOUBLE_EQ(g.delta(), 0.5);
  EXPECT_DOUBLE_EQ(g.node(0), -0.75);
  EXPECT_DOUBLE_EQ(g.node(3), 0.75);
  for (double xi : FrequencyGrid(-3.0, 3.0, 600).nodes()) EXPECT_NE(xi, 0.0);
}

TEST(FrequencyGrid, RejectsBadBounds) {
  EXPECT_THROW(FrequencyGrid(1.0, -1.0, 8), ValidationError);
  EXPECT_THROW(FrequencyGrid(0.0, 1.0, 1), ValidationError);
}

TEST(ForwardTransform, GaussianClosedForm) {
  const auto x = linspace(-12.0, 12.0, 2401);
  std::vector<cplx> f;
  for (double v : x) f.emplace_back(std::exp(-0.5 * v * v));
  const auto sig = forward_transform(x, f, FrequencyGrid(-4.0, 4.0, 161));
  double worst = 0.0;
  for (std::size_t j = 0; j < sig.values.size(); ++j) {
    const double xi = sig.grid.node(j);
    const double exact = std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi);
    worst = std::max(worst, std::abs(sig.values[j] - exact) / exact);
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ForwardTransform, ZeroAndLinearity) {
  const auto x = linspace(-6.0, 6.0, 601);
  const FrequencyGrid g(-5.0, 5.0, 101);
  std::vector<cplx> zero(x.size()), f, h, comb;
  EXPECT_TRUE(forward_transform(x, zero, g).is_zero());
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  for (double v : x) {
    f.emplace_back(std::exp(-v * v));
    h.emplace_back(std::exp(-0.5 * (v - 1) * (v - 1)) * cplx(0, 1));
    comb.push_back(a * f.back() + b * h.back());
  }
  const auto F = forward_transform(x, f, g), H = forward_transform(x, h, g), C = forward_transform(x, comb, g);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(std::abs(C.values[j] - (a * F.values[j] + b * H.values[j])), 0.0, 1e-12);
}

TEST(ForwardTransform, RejectsNonUniformGrid) {
  std::vector<double> x{0.0, 0.1, 0.3};
  std::vector<cplx> f(3, 1.0);
  EXPECT_THROW(forward_transform(x, f, FrequencyGrid(-1, 1, 8)), ValidationError);
}

TEST(ForwardTransform, AliasingFlag) {
  const auto x = linspace(-6.0, 6.0, 601);
  std::vector<cplx> f;
  for (double v : x) f.emplace_back(std::exp(-0.5 * v * v));
  EXPECT_FALSE(forward_transform(x, f, FrequencyGrid(-10.0, 10.0, 201)).aliasing_warning);
  EXPECT_TRUE(forward_transform(x, f, FrequencyGrid(-1.0, 1.0, 21)).aliasing_warning);
}

TEST(InverseTransform, RoundTrip) {
  const auto x = linspace(-10.0, 10.0, 2001);
  std::vector<cplx> f;
  for (double v : x) f.emplace_back(std::exp(-0.5 * v * v) * std::polar(1.0, 0.7 * v));
  const auto sig = forward_transform(x, f, FrequencyGrid(-10.0, 10.0, 1000));
  std::vector<double> probe{-2.0, -0.3, 0.0, 0.9, 3.1};
  const auto back = inverse_transform(sig, probe);
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const cplx exact = std::exp(-0.5 * probe[k] * probe[k]) * std::polar(1.0, 0.7 * probe[k]);
    EXPECT_LE(std::abs(back[k] - exact), 1e-8);
  }
}

TEST(SobolevNorm, PlancherelForGaussian) {
  // ||exp(-x^2/2)||_2 = pi^(1/4)
  EXPECT_NEAR(sobolev_norm(gaussian_hat()), std::pow(kPi, 0.25), 1e-8 * std::pow(kPi, 0.25));
}

TEST(SobolevNorm, MonotoneInS) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const auto sig = FrequencySignal::sample(FrequencyGrid(-20, 20, 400), [&](double) { return cplx(nd(rng), nd(rng)); });
    double prev = 0.0;
    for (double s = -1.0; s <= 1.0; s += 0.125) {
      const double n = sobolev_norm(sig, {s});
      EXPECT_GE(n, prev);
      prev = n;
    }
  }
}

TEST(SobolevNorm, HsOfGaussianAtSOne) {
  // (1/2pi) int (1+xi^2) 2pi e^{-xi^2} = sqrt(pi) (1 + 1/2)
  EXPECT_NEAR(sobolev_norm(gaussian_hat(), {1.0}), std::sqrt(1.5 * std::sqrt(kPi)), 1e-9);
}

TEST(BumpProfile, OriginShapeAndMass) {
  const auto b = BumpProfile::origin(0.1);
  EXPECT_DOUBLE_EQ(b(0.0), 1.0);
  EXPECT_EQ(b(0.1), 0.0);
  EXPECT_EQ(b(-0.2), 0.0);
  EXPECT_DOUBLE_EQ(b(0.03), b(-0.03));
  EXPECT_NEAR(b.integral(), 0.1 * kMollifierMass, 1e-12);
  EXPECT_NEAR(BumpProfile::origin(1.0).l2_squared(), kMollifierMass2, 1e-12);
}

TEST(BumpProfile, AnnularSupport) {
  const auto b = BumpProfile::annular();
  EXPECT_EQ(b(0.5), 0.0);
  EXPECT_EQ(b(0.2), 0.0);
  EXPECT_EQ(b(2.0), 0.0);
  EXPECT_EQ(b(-2.5), 0.0);
  EXPECT_DOUBLE_EQ(b(1.25), 1.0);
  EXPECT_DOUBLE_EQ(b(-1.7), b(1.7));
  EXPECT_NEAR(b.l2_squared(), 1.5 * kMollifierMass2, 1e-12);
}

TEST(BumpProfile, FiniteDifferenceDerivativeBounded) {
  const auto b = BumpProfile::origin(1.0);
  const double h = 1e-4;
  double worst = 0.0;
  for (double u = -0.999; u < 0.999; u += 1e-3) worst = std::max(worst, std::abs(b(u + h) - b(u - h)) / (2 * h));
  EXPECT_LT(worst, 3.0);
}

TEST(BumpProfile, RejectsNonPositiveRadius) { EXPECT_THROW(BumpProfile::origin(0.0), ValidationError); }

TEST(FrequencySignal, RejectsNonFinite) {
  FrequencyGrid g(-1, 1, 2);
  EXPECT_THROW(FrequencySignal(g, {cplx(1, 0), cplx(NAN, 0)}), ValidationError);
  EXPECT_THROW(FrequencySignal(g, {cplx(1, 0)}), ValidationError);
}
