#include <gtest/gtest.h>

#include "fraclab/kernel_analysis.hpp"
#include "fraclab/sharpness.hpp"

using namespace fraclab;

TEST(Threshold, ClassicalCase) { EXPECT_DOUBLE_EQ(threshold(2.0, 1.0, 1.0), 0.25); }

TEST(Threshold, MatchesHalfMinusSStar) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) {
        const double m = 1.05 + 0.3 * i, kappa = 0.1 * (j + 1), alpha = 0.1 * (k + 1);
        worst = std::max(worst, std::abs(threshold(m, kappa, alpha) - (0.5 - s_star(m, alpha, kappa))));
      }
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Threshold, Branches) {
  EXPECT_DOUBLE_EQ(threshold(2.0, 1.0, 0.2), 0.4);
  EXPECT_DOUBLE_EQ(threshold(2.0, 0.1, 1.0), 0.4);
  EXPECT_THROW(threshold(1.0, 0.5, 0.5), ValidationError);
  EXPECT_THROW(threshold(2.0, 0.0, 0.5), ValidationError);
}

TEST(DimBound, ClampsAndRaw) {
  const auto d = dim_bound(0.3, 2.0, 0.1);
  EXPECT_NEAR(d.raw, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(d.value, 1.0);
  EXPECT_NEAR(dim_bound(0.4, 2.0, 1.0).value, 0.2, 1e-12);
  EXPECT_THROW(dim_bound(0.25, 2.0, 1.0), ValidationError);
}

TEST(PredictedExponent, AcceptanceCases) {
  EXPECT_DOUBLE_EQ(predicted_f1_exponent(2.0, 1.0, 1.0), 0.25);
  EXPECT_DOUBLE_EQ(predicted_f1_exponent(2.0, 0.2, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(predicted_f1_exponent(2.0, 0.5, 0.5), 0.375);
  EXPECT_NEAR(predicted_f1_exponent(1.5, 0.5, 1.0), 2.0 / 3.0 - 0.25, 1e-15);
}

TEST(CounterexampleSpec, WindowsAndValidation) {
  CounterexampleSpec s(CounterexampleSpec::Family::f1, 256.0, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(s.f1_window(), (1.0 / 16 + 1.0 / 16) / 100);
  EXPECT_DOUBLE_EQ(s.f1_time_window(), 0.01 / 256);
  EXPECT_DOUBLE_EQ(s.delta(), 0.1);
  EXPECT_THROW(CounterexampleSpec(CounterexampleSpec::Family::f1, 1.0, 2.0, 0.5), ValidationError);
  EXPECT_THROW(CounterexampleSpec(CounterexampleSpec::Family::f1, 8.0, 2.0, 0.5, BumpProfile::annular()),
               ValidationError);
  EXPECT_THROW(make_f2(s), ValidationError);
}

TEST(LowerBoundC0, Frozen) {
  // cos(1/2) * 0.1 * 1.2069003224 / (4 pi)
  EXPECT_NEAR(lower_bound_c0(BumpProfile::origin(0.1)), 0.00842848511646702, 1e-14);
}

TEST(MakeF1, ModulusAtOriginIsMassOfPsi) {
  // S_0 f1(0) = (1/2pi) int psi0(xi / lambda^(1/m)) = lambda^(1/m) int psi0 / (2 pi)
  CounterexampleSpec s(CounterexampleSpec::Family::f1, 64.0, 2.0, 1.0);
  const auto f1 = make_f1(s);
  EXPECT_NEAR(std::abs(evaluate_field(f1, {0.0, 0.0}, DispersionSymbol::power(2.0))),
              8.0 * 0.1 * 1.20690032243787617 / kTwoPi, 1e-9);
}

TEST(LowerBoundF1, PassesAtModerateLambda) {
  for (double kappa : {1.0, 0.5}) {
    CounterexampleSpec s(CounterexampleSpec::Family::f1, 64.0, 2.0, kappa);
    const auto mu = f1_measure(s, 1.0, 1024, 64);
    const auto r = verify_lower_bound_f1(s, CurveFamily::power(kappa), mu);
    EXPECT_TRUE(r.pass) << kappa;
    EXPECT_GE(r.min_normalized, r.c0);
  }
  CounterexampleSpec s(CounterexampleSpec::Family::f1, 64.0, 2.0, 1.0);
  const auto r = verify_lower_bound_f1(s, CurveFamily::power(1.0), f1_measure(s, 1.0, 1024, 64));
  EXPECT_TRUE(r.phase_ok);
}

TEST(LowerBoundF1, CurveMustMatch) {
  CounterexampleSpec s(CounterexampleSpec::Family::f1, 64.0, 2.0, 0.5);
  const auto mu = f1_measure(s, 1.0, 1024, 64);
  EXPECT_THROW(verify_lower_bound_f1(s, CurveFamily::power(1.0), mu), ValidationError);
  EXPECT_THROW(verify_lower_bound_f1(s, CurveFamily::vertical(), mu), ValidationError);
}

TEST(SolveT, Residual) {
  for (double kappa : {1.0, 0.5, 0.2}) {
    const double t = solve_t_of_x(0.005, kappa, 2.0, 16.0);
    EXPECT_NEAR(std::pow(t, kappa) + 2.0 * 256.0 * t, 0.005, 1e-13);
  }
}

TEST(LowerBoundF2, GraphValueIsMassOfPsi) {
  // along t(x) the phase nearly cancels and |S_t f2| -> int psi0 / (2 pi)
  CounterexampleSpec s(CounterexampleSpec::Family::f2, 32.0, 2.0, 1.0);
  const auto mu = build_power_measure(1.0, refined_partition(1024, 0.0, 0.01, 64));
  const auto r = verify_lower_bound_f2(s, CurveFamily::power(1.0), mu);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.t_bound_ok);
  EXPECT_NEAR(r.min_along_graph, 0.1 * 1.20690032243787617 / kTwoPi, 1e-6);
  EXPECT_LT(r.max_remainder, 0.5);
}

TEST(MakeF2, GridBudget) {
  CounterexampleSpec s(CounterexampleSpec::Family::f2, 1024.0, 2.0, 1.0);
  EXPECT_THROW(make_f2(s, 1.0), ResolutionError);
}

TEST(F1Sweep, ScalingMatchesPrediction) {
  F1SweepConfig c;
  c.m = 2.0;
  c.kappa = 1.0;
  c.alpha = 1.0;
  c.lambdas = dyadic_sweep(16, 128);
  const auto r = f1_scaling_sweep(c);
  EXPECT_NEAR(r.window_fit.slope, 0.25, 0.05);
  EXPECT_NEAR(r.hs_fits[0].slope, 0.25, 0.02);
}

TEST(F2Sweep, HsSlopes) {
  F2SweepConfig c;
  c.lambdas = dyadic_sweep(8, 64);
  const auto r = f2_sweep(c);
  EXPECT_LT(r.min_graph_variation, 2.0);
  EXPECT_NEAR(r.hs_fits[0].slope, -0.5, 0.02);
  EXPECT_NEAR(r.hs_fits[1].slope, 0.0, 0.02);
}
