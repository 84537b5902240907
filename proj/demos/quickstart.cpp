// Small tour: evolve a Gaussian, take a maximal function along a curve on a
// fractal measure, and compare a counterexample sweep with its prediction.

#include <cstdio>

#include "fraclab/fraclab.hpp"

using namespace fraclab;

int main() {
  const auto sym = DispersionSymbol::power(2.0);
  const auto g = FrequencyGrid::covering(-12.0, 12.0, 0.01);
  const auto f = FrequencySignal::sample(g, [](double xi) { return std::sqrt(kTwoPi) * std::exp(-0.5 * xi * xi); });

  for (double t : {0.0, 0.1, 0.5}) {
    const double a = 1.0 + 4.0 * t * t;
    const double u = std::abs(evaluate_field(f, {1.0, t}, sym));
    std::printf("|S_t f(1)|  t=%.1f  numeric %.12f  closed form %.12f\n", t, u,
                std::pow(a, -0.25) * std::exp(-1.0 / (2.0 * a)));
  }

  const auto curve = certified(CurveFamily::power(0.5));
  const auto mu = build_power_measure(0.5, 512);
  const auto tg = TimeGrid::uniform(0.0, 1.0, 128);
  MaximalOptions opt;
  opt.data_extent = 4.0;
  const auto prof = maximal_function(f, curve, sym, tg, mu, opt);
  std::printf("maximal norm on the alpha=0.5 power measure: %.6f (frostman_c %.4f, C1 %.3f)\n", prof.l2_mu,
              mu.frostman_c, *curve.C1);

  F1SweepConfig cfg;
  cfg.m = 2.0;
  cfg.kappa = 0.5;
  cfg.alpha = 1.0;
  cfg.lambdas = dyadic_sweep(16, 256);
  const auto r = f1_scaling_sweep(cfg);
  std::printf("f1 sweep: slope %.4f, predicted %.4f, threshold %.4f\n", r.window_fit.slope, r.predicted_maximal_slope,
              threshold(cfg.m, cfg.kappa, cfg.alpha));
  return 0;
}
