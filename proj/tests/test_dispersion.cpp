#include <gtest/gtest.h>

#include "fraclab/dispersion.hpp"

using namespace fraclab;

namespace {

FrequencySignal gaussian_hat(double half = 12.0, std::size_t n = 4800) {
  return FrequencySignal::sample(FrequencyGrid(-half, half, n),
                                 [](double xi) { return std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi); });
}

std::vector<double> samples() {
  std::vector<double> xi;
  for (double a = 1.0; a <= 100.0; a *= 1.07) {
    xi.push_back(a);
    xi.push_back(-a);
  }
  return xi;
}

// |S_t f(x)| for f = exp(-x^2/2), Phi = xi^2.
double gaussian_modulus(double x, double t) {
  const double a = 1.0 + 4.0 * t * t;
  return std::pow(a, -0.25) * std::exp(-x * x / (2.0 * a));
}

}  // namespace

TEST(ValidateSymbol, PowerConstants) {
  const auto xi = samples();
  EXPECT_NEAR(validate_symbol(DispersionSymbol::power(2.0), xi).c3_est, 2.0, 1e-10);
  EXPECT_NEAR(validate_symbol(DispersionSymbol::power(1.5), xi).c3_est, 0.75, 1e-10);
  for (double m : {1.2, 2.5, 3.0}) {
    const auto chk = validate_symbol(DispersionSymbol::power(m), xi);
    EXPECT_TRUE(chk.pass);
    EXPECT_NEAR(chk.c3_est, m * (m - 1), 1e-10);
    EXPECT_NEAR(chk.c4_est, m - 1, 1e-10);
  }
}

TEST(ValidateSymbol, LinearPhaseFails) {
  const auto lin = DispersionSymbol::general(
      2.0, [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }, "linear");
  const auto chk = validate_symbol(lin, samples());
  EXPECT_FALSE(chk.pass);
  EXPECT_EQ(chk.c3_est, 0.0);
  EXPECT_THROW(certify(lin, samples()), ValidationError);
}

TEST(ValidateSymbol, MissingSecondDerivativeRejected) {
  const auto s = DispersionSymbol::general(2.0, [](double x) { return x * x; }, [](double x) { return 2 * x; });
  EXPECT_THROW(validate_symbol(s, samples()), ValidationError);
}

TEST(ValidateSymbol, NeedsLargeSamples) {
  std::vector<double> small{0.1, -0.5};
  EXPECT_THROW(validate_symbol(DispersionSymbol::power(2.0), small), ValidationError);
}

TEST(DispersionSymbol, TableMatchesPowerAndGuardsRange) {
  std::vector<double> xi, p, d, d2;
  for (double x = 1.0; x <= 3.0 + 1e-12; x += 0.01) {
    xi.push_back(x);
    p.push_back(x * x * x);
    d.push_back(3 * x * x);
    d2.push_back(6 * x);
  }
  const auto tab = DispersionSymbol::table(3.0, xi, p, d, d2);
  EXPECT_NEAR(tab.phi(2.345), std::pow(2.345, 3), 1e-9);
  EXPECT_NEAR(tab.dphi(1.5), 6.75, 1e-6);
  EXPECT_THROW(tab.phi(3.5), DomainError);
  EXPECT_TRUE(certify(tab, xi).c3.has_value());
}

TEST(DispersionSymbol, PowerRejectsOrderAtMostOne) {
  EXPECT_THROW(DispersionSymbol::power(1.0), ValidationError);
  EXPECT_THROW(DispersionSymbol::power(0.5), ValidationError);
}

TEST(PropagateGrid, IdentityNormAndGroupLaw) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto f = gaussian_hat();
  const auto f0 = propagate_grid(f, 0.0, sym);
  EXPECT_EQ(f0.values, f.values);
  EXPECT_NEAR(sobolev_norm(propagate_grid(f, 0.7, sym)), sobolev_norm(f), 1e-14);
  const auto a = propagate_grid(propagate_grid(f, 0.2, sym), 0.3, sym);
  const auto b = propagate_grid(f, 0.5, sym);
  for (std::size_t j = 0; j < f.values.size(); ++j) EXPECT_NEAR(std::abs(a.values[j] - b.values[j]), 0.0, 1e-12);
}

TEST(EvaluateField, IdentityAtTimeZero) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto f = gaussian_hat();
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.5}) {
    EXPECT_NEAR(std::abs(evaluate_field(f, {x, 0.0}, sym) - std::exp(-0.5 * x * x)), 0.0, 1e-6);
  }
}

TEST(EvaluateField, GaussianClosedForm) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto f = gaussian_hat();
  double worst = 0.0;
  for (double t : {0.1, 0.5}) {
    for (double x = -4.0; x <= 4.0 + 1e-12; x += 0.05) {
      const double exact = gaussian_modulus(x, t);
      worst = std::max(worst, std::abs(std::abs(evaluate_field(f, {x, t}, sym)) - exact) / exact);
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(EvaluateField, ZeroSignal) {
  const auto z = FrequencySignal::zero(FrequencyGrid(-4, 4, 100));
  EXPECT_EQ(evaluate_field(z, {0.3, 0.2}, DispersionSymbol::power(2.0)), cplx{});
}

TEST(EvaluateField, CoarseGridIsResolutionError) {
  const auto f = gaussian_hat(12.0, 100);
  EXPECT_THROW(evaluate_field(f, {50.0, 0.0}, DispersionSymbol::power(2.0)), ResolutionError);
}

TEST(EvaluateField, DoublingResolutionConverges) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto a = gaussian_hat(12.0, 2400), b = gaussian_hat(12.0, 4800);
  for (double x : {-1.5, 0.2, 3.0}) {
    const cplx u = evaluate_field(a, {x, 0.3}, sym), v = evaluate_field(b, {x, 0.3}, sym);
    EXPECT_LE(std::abs(u - v), 1e-6 * std::abs(v));
  }
}

TEST(FieldEvaluator, AgreesWithDirectSum) {
  const auto sym = DispersionSymbol::power(2.0);
  const auto f = gaussian_hat(12.0, 24000);
  FieldEvaluator ev(f, sym, 4.0);
  for (double t : {0.0, 0.01, 0.3, 1.0}) {
    for (double y : {-1.9, -0.4, 0.0, 0.77, 2.0}) {
      EXPECT_NEAR(std::abs(ev.eval(y, t) - evaluate_field(f, {y, t}, sym)), 0.0, 1e-10);
    }
  }
}

TEST(FieldEvaluator, ExpandedSliceAgrees) {
  const auto sym = DispersionSymbol::power(1.5);
  const auto f = gaussian_hat(12.0, 48000);
  FieldEvaluator ev(f, sym, 4.0);
  const auto sl = ev.slice(0.4, 2.0, 4096);
  for (double y : {-2.0, -1.01, 0.0, 0.333, 1.999}) {
    EXPECT_NEAR(std::abs(sl.at(y) - evaluate_field(f, {y, 0.4}, sym)), 0.0, 1e-10);
  }
}

TEST(UnitarityCheck, AllOrders) {
  for (double m : {1.2, 1.5, 2.0, 3.0}) {
    const auto r = unitarity_check(m, 4, 0);
    EXPECT_LT(r.max_norm_deviation, 1e-10);
    EXPECT_LT(r.max_group_deviation, 1e-10);
  }
}
