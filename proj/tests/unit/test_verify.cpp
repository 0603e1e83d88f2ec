#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bstab/errors.hpp"
#include "bstab/verify.hpp"

namespace bstab {
namespace {

using std::numbers::pi;

ProblemSpec default_spec() {
  ProblemSpec spec;
  spec.lambda0 = 3.0;
  spec.horizon = 2.0;
  spec.family.c1 = Polynomial({0.0, 0.0, 1.0});
  spec.family.c2 = {TimeProfileKind::exp_decay, 1.0, 1.0};
  return spec;
}

NormTrace exponential_trace(double C, double sigma, int n, double T) {
  NormTrace trace;
  for (int i = 0; i <= n; ++i) {
    trace.times.push_back(T * i / n);
    trace.values.push_back(C * std::exp(-sigma * trace.times.back()));
  }
  return trace;
}

TEST(StabilityConstantC1, Examples) {
  EXPECT_DOUBLE_EQ(stability_constant_C1(1.0, 0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stability_constant_C1(2.0, 0.0, 0.0), 2.0);
  EXPECT_NEAR(stability_constant_C1(2.0, 1.0, 0.0), std::sqrt(8.0), 1e-14);
  for (double p : {1.0, 1.5, 2.0, 4.0}) EXPECT_GE(stability_constant_C1(p, 0.3, 2.0), 1.0);
  EXPECT_THROW((void)stability_constant_C1(kInfinity, 0.0, 0.0), InputError);
}

TEST(StabilityConstantC2, Examples) {
  const C2Constants one = stability_constant_C2(1.0, {0, 0, 0}, {0, 0}, 1.0);
  EXPECT_DOUBLE_EQ(one.gamma1, 1.0);
  EXPECT_DOUBLE_EQ(one.gamma2, 2.0);
  EXPECT_DOUBLE_EQ(one.C2, 2.0);
  const C2Constants two = stability_constant_C2(2.0, {0, 0, 0}, {0, 0}, 2.0);
  EXPECT_DOUBLE_EQ(two.gamma1, 1.0);
  EXPECT_DOUBLE_EQ(two.gamma2, 13.0);
  EXPECT_NEAR(two.C2, std::sqrt(13.0), 1e-14);
}

TEST(StabilityConstantC2, MonotoneInEveryConstant) {
  const std::array<double, 3> a{0.5, 1.0, 2.0};
  const std::array<double, 2> b{0.7, 1.3};
  for (double p : {1.0, 2.0, 3.0}) {
    const double C1 = stability_constant_C1(p, a[0], 0.4);
    const double base = stability_constant_C2(p, a, b, C1).C2;
    for (std::size_t i = 0; i < 3; ++i) {
      auto bumped = a;
      bumped[i] += 0.5;
      EXPECT_GE(stability_constant_C2(p, bumped, b, C1).C2, base);
    }
    for (std::size_t i = 0; i < 2; ++i) {
      auto bumped = b;
      bumped[i] += 0.5;
      EXPECT_GE(stability_constant_C2(p, a, bumped, C1).C2, base);
    }
    EXPECT_GE(base, 1.0);
  }
}

TEST(StabilityConstantsInf, GammaTableBranches) {
  EXPECT_DOUBLE_EQ(stability_constants_inf({0.5, 0, 0}, {0.5, 0, 0}).gamma3, 1.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({0.5, 0, 0}, {0.5, 0, 0}).C3, 4.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({2.0, 0, 0}, {0.5, 0, 0}).C3, 8.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({0.5, 0, 0}, {3.0, 0, 0}).C3, 12.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({2.0, 0, 0}, {3.0, 0, 0}).gamma3, 6.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({2.0, 0, 0}, {3.0, 0, 0}).C3, 24.0);
  EXPECT_DOUBLE_EQ(stability_constants_inf({1.0, 0, 0}, {1.0, 0, 0}).gamma3, 1.0);
  const InfConstants c = stability_constants_inf({2.0, 1.0, 0.5}, {3.0, 0.5, 1.5});
  EXPECT_DOUBLE_EQ(c.gamma4, 2.0);
  EXPECT_DOUBLE_EQ(c.C4, std::max(18.0, 24.0 + 18.0 * 4.5));
}

TEST(FitDecayRate, Examples) {
  const DecayFit exact = fit_decay_rate(exponential_trace(2.0, 1.5, 100, 2.0), 0.1);
  EXPECT_NEAR(exact.C, 2.0, 1e-12);
  EXPECT_NEAR(exact.sigma, 1.5, 1e-12);
  EXPECT_NEAR(exact.residual, 0.0, 1e-12);
  EXPECT_NEAR(fit_decay_rate(exponential_trace(1.0, 0.0, 50, 1.0), 0.0).sigma, 0.0, 1e-14);
  NormTrace zero = exponential_trace(1.0, 1.0, 20, 1.0);
  zero.values.back() = 0.0;
  EXPECT_THROW((void)fit_decay_rate(zero, 0.0), FitError);
}

TEST(FitDecayRate, TargetRunRecoversReactionRate) {
  ProblemSpec spec;
  spec.lambda0 = 3.0;
  spec.horizon = 2.0;
  const Trajectory traj = simulate_target(spec, Profile(201, 1.0), SimConfig{});
  EXPECT_NEAR(fit_decay_rate(norm_trace(traj, NormKind::lp, 2.0), 0.1).sigma, 3.0, 0.06);
}

TEST(VerifyTheoremBound, Examples) {
  NormTrace zero = exponential_trace(1.0, 1.0, 20, 1.0);
  for (double& v : zero.values) v = 0.0;
  EXPECT_TRUE(verify_theorem_bound(zero, 0.1, 1.0, 1.0, 1.0).pass);
  const NormTrace envelope = exponential_trace(3.0 * 0.5, 0.7, 40, 2.0);
  EXPECT_TRUE(verify_theorem_bound(envelope, 3.0, 0.7, 0.5, 1.0).pass);
  const BoundCheck fail = verify_theorem_bound(exponential_trace(1.0, 0.5, 40, 2.0), 1.0, 1.0, 1.0, 1.05);
  EXPECT_FALSE(fail.pass);
  EXPECT_NEAR(fail.worst_t, 2.0, 1e-12);
  EXPECT_LT(fail.margin, 0.0);
}

TEST(AlfEnvelope, DominatesTargetTraceAndTheLyapunovInequalityHolds) {
  const ProblemSpec spec = default_spec();
  const double lam = lambda_lower(spec);
  const Profile u0 = Profile::from_function(201, [](double x) { return 0.2 + std::cos(pi * x) * std::exp(-x); });
  const Trajectory target = simulate_target(spec, u0, SimConfig{});
  for (double p : {1.0, 1.5, 2.0}) {
    for (double tau : {1e-1, 1e-2, 1e-3}) {
      const NormTrace trace = norm_trace(target, NormKind::alf, p, tau);
      const std::vector<double> env = alf_envelope(spec, target, p, tau, lam);
      for (std::size_t n = 0; n < env.size(); ++n) EXPECT_LE(trace.values[n], 1.05 * env[n]);
      // Discrete d/dt alf <= -lambda p alf + (3/8) tau p int lambda rho^{p-1}, averaged over each interval.
      const auto rhs = [&](std::size_t n) {
        const Profile& u = target.fields[n];
        double acc = 0.0;
        for (int i = 0; i < u.grid_m(); ++i) {
          const double w = (i == 0 || i == u.grid_m() - 1) ? 0.5 : 1.0;
          acc += w * eval_lambda(spec, u.x(i), target.times[n]) * std::pow(rho(u[static_cast<std::size_t>(i)], tau), p - 1.0);
        }
        return -lam * p * trace.values[n] + 0.375 * tau * p * acc * u.spacing();
      };
      for (std::size_t n = 0; n + 1 < trace.values.size(); ++n) {
        const double dt = trace.times[n + 1] - trace.times[n];
        const double slope = (trace.values[n + 1] - trace.values[n]) / dt;
        const double bound = 0.5 * (rhs(n) + rhs(n + 1));
        EXPECT_LE(slope, bound + 1e-3 * std::abs(bound) + 1e-9) << "p=" << p << " tau=" << tau << " n=" << n;
      }
    }
  }
}

TEST(ContinuousDependence, ExamplesAndLinearity) {
  const ProblemSpec spec = default_spec();
  const Plant plant = prepare_plant(spec, KernelSettings{}, 101);
  const SimConfig cfg{101, 1e-4, 1.0, 50};
  const Profile w01 = Profile::from_function(101, [](double x) { return std::cos(pi * x); });
  const Profile w02 = Profile::from_function(101, [](double x) { return 0.9 * std::cos(pi * x); });
  const ContinuousDependenceReport same = continuous_dependence_experiment(plant, cfg, {2.0}, w01, w01);
  EXPECT_EQ(same.entries[0].max_difference, 0.0);
  const ContinuousDependenceReport r = continuous_dependence_experiment(plant, cfg, {1.0, 2.0, kInfinity}, w01, w02);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.linearity_error, 1e-8);

  const Trajectory a = simulate_closed_loop(spec, plant.k, w01, cfg);
  const NormTrace lp = norm_trace(a, NormKind::lp, 2.0);
  EXPECT_NEAR(r.entries[1].max_difference, 0.1 * *std::max_element(lp.values.begin(), lp.values.end()), 1e-9);
}

TEST(ContinuousDependence, ZeroSecondDatumReducesToTheoremBound) {
  const Plant plant = prepare_plant(default_spec(), KernelSettings{}, 101);
  const SimConfig cfg{101, 1e-4, 1.0, 50};
  const Profile w01 = Profile::from_function(101, [](double x) { return 1.0 + x * x * (1.0 - x); });
  const ContinuousDependenceReport r = continuous_dependence_experiment(plant, cfg, {2.0}, w01, Profile(101, 0.0));
  const Trajectory a = simulate_closed_loop(plant.spec, plant.k, w01, cfg);
  const NormTrace lp = norm_trace(a, NormKind::lp, 2.0);
  EXPECT_NEAR(r.entries[0].max_difference, *std::max_element(lp.values.begin(), lp.values.end()), 1e-12);
  EXPECT_EQ(r.entries[0].pass,
            *std::max_element(lp.values.begin(), lp.values.end()) <= 1.05 * r.entries[0].bound);
}

TEST(Scaling, DoublingInitialDataDoublesTraces) {
  const ProblemSpec spec = default_spec();
  const Plant plant = prepare_plant(spec, KernelSettings{}, 101);
  const SimConfig cfg{101, 1e-4, 1.0, 50};
  const Profile w = Profile::from_function(101, [](double x) { return std::cos(pi * x) + x; });
  Profile w2 = w;
  for (double& v : w2.values()) v *= 2.0;
  const NormTrace a = norm_trace(simulate_closed_loop(spec, plant.k, w, cfg), NormKind::lp, 2.0);
  const NormTrace b = norm_trace(simulate_closed_loop(spec, plant.k, w2, cfg), NormKind::lp, 2.0);
  for (std::size_t n = 0; n < a.values.size(); ++n) EXPECT_NEAR(b.values[n], 2.0 * a.values[n], 1e-12);
  const DecayFit fa = fit_decay_rate(a), fb = fit_decay_rate(b);
  EXPECT_NEAR(fb.sigma, fa.sigma, 1e-9);
  EXPECT_NEAR(fb.C, 2.0 * fa.C, 1e-9);
}

TEST(EnvelopeConstants, FiniteAndInfiniteP) {
  const KernelConstants kc{1.5, 1.0, 2.0, 0.5, 1.0, 0.7};
  const EnvelopeConstants e2 = envelope_constants(2.0, kc);
  EXPECT_DOUBLE_EQ(e2.lp, stability_constant_C1(2.0, 1.5, 0.5));
  EXPECT_DOUBLE_EQ(e2.w1p, stability_constant_C2(2.0, {1.5, 1.0, 2.0}, {1.0, 0.7}, e2.lp).C2);
  const EnvelopeConstants einf = envelope_constants(kInfinity, kc);
  EXPECT_DOUBLE_EQ(einf.lp, 4.0 * 1.5);
}

}  // namespace
}  // namespace bstab
