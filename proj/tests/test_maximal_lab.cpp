#include <gtest/gtest.h>

#include <random>

#include "fraclab/maximal_lab.hpp"

using namespace fraclab;

namespace {

FrequencySignal gaussian_hat() {
  return FrequencySignal::sample(FrequencyGrid(-12.0, 12.0, 24000),
                                 [](double xi) { return std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi); });
}

}  // namespace

TEST(TimeGrid, NodesSortedUniqueAndRefined) {
  auto g = TimeGrid::uniform(0.0, 1.0, 5);
  g.add_geometric(1e-3, 1.0, 4);
  const auto n = g.nodes();
  EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
  EXPECT_EQ(std::adjacent_find(n.begin(), n.end()), n.end());
  EXPECT_DOUBLE_EQ(n.front(), 0.0);
  EXPECT_DOUBLE_EQ(n.back(), 1.0);
  EXPECT_NEAR(n[1], 1e-3, 1e-18);
  const auto r = g.refined(2);
  EXPECT_EQ(r.n_t(), 17u);
  EXPECT_EQ(r.refinement_level(), 2);
  EXPECT_THROW(TimeGrid::uniform(0.0, 1.5, 4), ValidationError);
  EXPECT_THROW(TimeGrid::uniform(0.5, 0.5, 4), ValidationError);
}

TEST(TimeGrid, CounterexampleDefaultCoversWindow) {
  const auto g = TimeGrid::counterexample_default(256.0);
  std::size_t inside = 0;
  for (double t : g.nodes()) inside += t > 0.0 && t <= 1.0 / 256.0;
  EXPECT_GE(inside, 256u);
}

TEST(MaximalFunction, GaussianVerticalSupremum) {
  // sup over t in [0,1] of (1+4t^2)^(-1/4) exp(-x^2 / (2(1+4t^2))):
  // x = 0 at t = 0; x = 1 at 1 + 4t^2 = 2; x = 2 at t = 1
  const auto sym = DispersionSymbol::power(2.0);
  FrostmanMeasure mu(1.0, {0.0, 1.0}, {1.0, 1.0}, "pair");
  MaximalOptions opt;
  opt.data_extent = 4.0;
  auto prof = maximal_function(gaussian_hat(), CurveFamily::vertical(), sym, TimeGrid::uniform(0.0, 1.0, 64), mu, opt);
  EXPECT_NEAR(prof.sup_values[0], 1.0, 1e-9);
  EXPECT_NEAR(prof.sup_values[1], std::pow(2.0, -0.25) * std::exp(-0.25), 1e-9);
  EXPECT_NEAR(prof.argmax_t[1], 0.5, 1e-4);
  FrostmanMeasure far(1.0, {-1.0 + 1e-9, 1.0}, {1.0, 1.0}, "pair");
  prof = maximal_function(gaussian_hat(), CurveFamily::shifted_power(1.0, 1.0), sym, TimeGrid::uniform(0.0, 1.0, 64),
                          far, opt);
  EXPECT_GT(prof.sup_values[1], prof.sup_values[0]);
}

TEST(MaximalFunction, CertifiedConverges) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto mu = build_power_measure(0.5, 256);
  MaximalOptions opt;
  opt.data_extent = 4.0;
  const auto p = certified_maximal_function(gaussian_hat(), certified(CurveFamily::power(0.5)), sym,
                                            TimeGrid::uniform(0.0, 1.0, 32), mu, opt);
  EXPECT_TRUE(p.converged);
  EXPECT_GT(p.l2_mu, 0.0);
}

TEST(MaximalRatio, ZeroSignalRejected) {
  const auto z = FrequencySignal::zero(FrequencyGrid(-1, 1, 16));
  EXPECT_THROW(maximal_ratio(z, CurveFamily::vertical(), DispersionSymbol::power(2.0), TimeGrid::uniform(0, 1, 4),
                             build_power_measure(1.0, 128), {0.0}),
               ValidationError);
}

TEST(ScalingRegression, ExactPowerLaw) {
  const auto lam = dyadic_sweep(16, 1024);
  ASSERT_EQ(lam.size(), 7u);
  std::vector<double> v;
  for (double l : lam) v.push_back(3.0 * std::pow(l, 0.375));
  const auto fit = scaling_regression(lam, v);
  EXPECT_NEAR(fit.slope, 0.375, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_LT(fit.max_residual, 1e-12);
  std::vector<double> three(lam.begin(), lam.begin() + 3), vv(v.begin(), v.begin() + 3);
  EXPECT_THROW(scaling_regression(three, vv), ValidationError);
}

TEST(Hls, LebesgueDoubleIntegral) {
  // int int_{I^2} |x-y|^(-1/2) = 2 * 2^(3/2) / ((1/2)(3/2)) = 16 sqrt(2) / 3
  // the omitted diagonal cells cost O(h^(1/2)), so the error halves per 4x
  const double exact = 16.0 * std::sqrt(2.0) / 3.0;
  std::vector<double> err;
  for (std::size_t n : {1u << 14, 1u << 16, 1u << 18}) {
    const auto mu = build_power_measure(1.0, n);
    std::vector<double> one(mu.size(), 1.0);
    const auto r = hls_check(one, one, 0.5, mu);
    EXPECT_NEAR(r.rhs, 2.0, 1e-12);
    err.push_back(exact - r.lhs);
  }
  EXPECT_GT(err[2], 0.0);
  EXPECT_LT(err[2], 0.02);
  EXPECT_NEAR(err[0] / err[1], 2.0, 0.1);
  EXPECT_NEAR(err[1] / err[2], 2.0, 0.1);
}

TEST(Hls, FftMatchesDirect) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto mu = build_power_measure(0.5, 1500);
  std::vector<double> g(mu.size()), h(mu.size());
  for (auto& v : g) v = u(rng);
  for (auto& v : h) v = u(rng);
  for (double rho : {0.1, 0.3, 0.45}) {
    const auto a = hls_check(g, h, rho, mu, HlsMethod::direct);
    const auto b = hls_check(g, h, rho, mu, HlsMethod::fft);
    EXPECT_NEAR(a.lhs, b.lhs, 1e-10 * a.lhs);
  }
}

TEST(Hls, Preconditions) {
  const auto mu = build_power_measure(0.5, 128);
  std::vector<double> one(mu.size(), 1.0), neg(mu.size(), -1.0);
  EXPECT_THROW(hls_check(one, one, 0.5, mu), ValidationError);
  EXPECT_THROW(hls_check(one, one, 0.0, mu), ValidationError);
  EXPECT_THROW(hls_check(neg, one, 0.2, mu), ValidationError);
  EXPECT_NO_THROW(hls_sum(one, one, 0.6, mu));
  FrostmanMeasure odd(1.0, {-0.5, 0.0, 0.7}, {1, 1, 1}, "x");
  std::vector<double> o3(3, 1.0);
  EXPECT_THROW(hls_check(o3, o3, 0.5, odd, HlsMethod::fft), ValidationError);
}

TEST(Hls, BoundedBelowAlphaUnderRefinement) {
  double first = 0.0, last = 0.0;
  for (std::size_t n : {4096u, 16384u, 65536u}) {
    const auto mu = build_power_measure(0.5, n);
    std::vector<double> one(n, 1.0);
    const double r = hls_check(one, one, 0.4, mu).ratio;
    if (first == 0.0) first = r;
    last = r;
  }
  EXPECT_LT(last / first, 1.05);
}

TEST(BandSignal, SupportInBand) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto f = make_band_signal(64.0, sym, 3);
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    const double a = std::abs(f.grid.node(j));
    if (a < 32.0 || a > 128.0) {
      EXPECT_EQ(f.values[j], cplx{});
    }
  }
  EXPECT_FALSE(f.is_zero());
  const auto g = make_band_signal(64.0, sym, 3);
  EXPECT_EQ(f.values, g.values);
}
