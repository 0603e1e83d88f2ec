#pragma once

#include <array>
#include <vector>

#include "bstab/coefficients.hpp"
#include "bstab/kernel.hpp"
#include "bstab/norms.hpp"
#include "bstab/simulator.hpp"

namespace bstab {

/// (4^{p-1} (1 + alpha1^p)(1 + beta1^p))^{1/p}.
[[nodiscard]] double stability_constant_C1(double p, double alpha1, double beta1);

struct C2Constants {
  double C2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

/// C2 = max{9^{(p-1)/p} gamma1^{1/p}, gamma2^{1/p}} with gamma1 = max{1, beta2^p + beta3^p},
/// gamma2 = C1^p + 9^{p-1} gamma1 (1 + alpha1^p + alpha2^p + alpha3^p).
[[nodiscard]] C2Constants stability_constant_C2(double p, const std::array<double, 3>& alphas,
                                                const std::array<double, 2>& betas, double C1);

struct InfConstants {
  double C3 = 0.0;
  double C4 = 0.0;
  double gamma3 = 0.0;
  double gamma4 = 0.0;
};

/// C3 = 4 gamma3 and C4 = max{9 gamma4, C3 + 9 gamma4 (1 + alpha1 + alpha2 + alpha3)},
/// where C3 stands in for the p -> infinity limit of C1.
[[nodiscard]] InfConstants stability_constants_inf(const std::array<double, 3>& alphas,
                                                   const std::array<double, 3>& betas);

/// Envelope constants for one p: (C1, C2) for finite p, (C3, C4) for p = infinity.
struct EnvelopeConstants {
  double p = 2.0;
  double lp = 0.0;
  double w1p = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

[[nodiscard]] EnvelopeConstants envelope_constants(double p, const KernelConstants& kc);

struct DecayFit {
  double C = 0.0;
  double sigma = 0.0;
  double residual = 0.0;
};

/// Least-squares line through log(values) on t in [skip_fraction T, T].
[[nodiscard]] DecayFit fit_decay_rate(const NormTrace& trace, double skip_fraction = 0.1);

struct BoundCheck {
  bool pass = true;
  /// Time of the largest value / envelope ratio.
  double worst_t = 0.0;
  double worst_ratio = 0.0;
  /// min over t of log(envelope / value); +inf for an identically zero trace.
  double margin = 0.0;
};

/// values(t) <= slack * C_bound * e^{-lambda_lower t} * initial_norm at every recorded t.
[[nodiscard]] BoundCheck verify_theorem_bound(const NormTrace& trace, double C_bound,
                                              double lambda_lower, double initial_norm,
                                              double slack);

/// Envelope of the smoothed functional along a target trajectory:
/// z(t) = e^{-lambda_lower p t} alf(u0) + tau int_0^t e^{-lambda_lower p (t-s)} psi1(s) ds,
/// psi1(s) = (3/8) p int_0^1 lambda(x,s) rho_tau^{p-1}(u(x,s)) dx.
[[nodiscard]] std::vector<double> alf_envelope(const ProblemSpec& spec, const Trajectory& target,
                                               double p, double tau, double lambda_lower);

struct KernelSettings {
  /// 0 picks 2 (grid_m - 1) + 1 so the kernel grid contains the simulation grid.
  int n_xi = 0;
  double tol = 1e-10;
  int max_iter = 200;
  bool richardson = true;
};

/// Everything needed to run and certify closed-loop simulations of one ProblemSpec.
struct Plant {
  ProblemSpec spec;
  KernelGrid k;
  KernelGrid l;
  KernelConstants constants;
  double lambda_lower = 0.0;
};

[[nodiscard]] Plant prepare_plant(const ProblemSpec& spec, const KernelSettings& settings,
                                  int grid_m);

struct DependenceEntry {
  double p = 2.0;
  double max_difference = 0.0;
  double bound = 0.0;
  bool pass = true;
  double max_difference_w1p = 0.0;
  double bound_w1p = 0.0;
  bool pass_w1p = true;
};

struct ContinuousDependenceReport {
  std::vector<DependenceEntry> entries;
  /// max over t of sup_x |(w1 - w2) - w_diff| with w_diff simulated from w01 - w02.
  double linearity_error = 0.0;
  bool pass = true;
};

[[nodiscard]] ContinuousDependenceReport continuous_dependence_experiment(
    const Plant& plant, const SimConfig& cfg, const std::vector<double>& p_list,
    const Profile& w01, const Profile& w02, double slack = 1.05);

}  // namespace bstab
