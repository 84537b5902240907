#include <gtest/gtest.h>

#include "fraclab/measures.hpp"

using namespace fraclab;

TEST(PowerMeasure, TotalMassAndBalls) {
  // mass of |x|^(a-1) on [-r, r] is 2 r^a / a
  for (double a : {0.3, 0.5, 1.0}) {
    const auto mu = build_power_measure(a, 4096);
    EXPECT_NEAR(mu.total_mass(), 2.0 / a, 1e-12);
    EXPECT_NEAR(mu.ball_mass(0.0, 0.5), 2.0 * std::pow(0.5, a) / a, 1e-12);
  }
}

TEST(PowerMeasure, FrostmanConstantIsTwoOverAlpha) {
  for (double a : {0.3, 0.5, 1.0}) {
    const auto mu = build_power_measure(a, 4096);
    EXPECT_NEAR(mu.frostman_c, 2.0 / a, 0.05 * 2.0 / a) << a;
  }
}

TEST(PowerMeasure, RefinedPartitionKeepsMass) {
  const auto b = refined_partition(1024, 0.0, 1e-3, 64);
  const auto mu = build_power_measure(0.5, b);
  EXPECT_NEAR(mu.total_mass(), 4.0, 1e-12);
  EXPECT_GE(mu.ball_mass(5e-4, 5e-4), 0.0);
  std::size_t inside = 0;
  for (double x : mu.positions()) inside += x > 0.0 && x < 1e-3;
  EXPECT_GE(inside, 64u);
  EXPECT_NEAR(mu.frostman_c, 4.0, 0.2);
}

TEST(CantorMeasure, MiddleThirds) {
  const auto mu = build_cantor_measure(1.0 / 3.0, 12);
  EXPECT_EQ(mu.size(), 4096u);
  EXPECT_NEAR(mu.alpha(), std::log(2.0) / std::log(3.0), 1e-15);
  EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(mu.frostman_c));
  EXPECT_GT(mu.frostman_c, 0.3);
  EXPECT_LT(mu.frostman_c, 4.0);
  // the first generation halves
  EXPECT_NEAR(mu.ball_mass(-2.0 / 3.0, 1.0 / 3.0 + 1e-9), 0.5, 1e-12);
}

TEST(CantorMeasure, ConstantStableInDepth) {
  const double c8 = build_cantor_measure(1.0 / 3.0, 8).frostman_c;
  const double c12 = build_cantor_measure(1.0 / 3.0, 12).frostman_c;
  EXPECT_NEAR(c8, c12, 0.1 * c12);
}

TEST(FrostmanMeasure, Validation) {
  EXPECT_THROW(FrostmanMeasure(0.5, {0.2, 0.1}, {1, 1}, "x"), ValidationError);
  EXPECT_THROW(FrostmanMeasure(0.5, {0.2, 1.5}, {1, 1}, "x"), ValidationError);
  EXPECT_THROW(FrostmanMeasure(0.5, {0.2}, {-1}, "x"), ValidationError);
  EXPECT_THROW(FrostmanMeasure(1.5, {0.2}, {1}, "x"), ValidationError);
  EXPECT_THROW(build_power_measure(0.5, std::size_t{50}), ValidationError);
  EXPECT_THROW(frostman_constant(build_power_measure(0.5, 128), 10), ValidationError);
}

TEST(FrostmanMeasure, LocalSpacing) {
  FrostmanMeasure mu(1.0, {-0.5, 0.0, 0.1, 0.9}, {1, 1, 1, 1}, "x");
  EXPECT_DOUBLE_EQ(mu.local_spacing(0.02), 0.1);
  EXPECT_DOUBLE_EQ(mu.local_spacing(-0.6), 0.5);
  EXPECT_DOUBLE_EQ(mu.atom_spacing(), 0.1);
  EXPECT_FALSE(mu.uniformly_spaced());
}

TEST(IntegrateL2Mu, WeightedNorm) {
  FrostmanMeasure mu(1.0, {-0.5, 0.5}, {0.25, 1.0}, "x");
  std::vector<double> v{2.0, 3.0};
  EXPECT_DOUBLE_EQ(integrate_l2_mu(v, mu), std::sqrt(0.25 * 4 + 9));
  std::vector<double> bad{1.0};
  EXPECT_THROW(integrate_l2_mu(bad, mu), ValidationError);
}

TEST(RestrictTo, KeepsInteriorAtoms) {
  const auto mu = build_power_measure(1.0, 200);
  const auto r = restrict_to(mu, 0.0, 0.1);
  EXPECT_EQ(r.size(), 10u);
  EXPECT_THROW(restrict_to(mu, 0.0, 1e-4), ValidationError);
}
