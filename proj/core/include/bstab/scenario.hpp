#pragma once

#include <exception>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bstab/coefficients.hpp"
#include "bstab/kernel.hpp"
#include "bstab/norms.hpp"
#include "bstab/simulator.hpp"
#include "bstab/verify.hpp"

namespace bstab {

enum class InitialFamily { constant, cosine, polynomial, bump };

/// Named initial-data family evaluated on the simulation grid.
///   constant:   amplitude
///   cosine:     amplitude * sum_k cos(k pi x) over `modes`
///   polynomial: sum_i coefficients[i] x^i
///   bump:       height * exp(-((x - center)/width)^2)
struct InitialData {
  InitialFamily family = InitialFamily::cosine;
  double amplitude = 1.0;
  std::vector<int> modes{1};
  std::vector<double> coefficients;
  double center = 0.5;
  double width = 0.1;
  double height = 1.0;
  /// Add a0 (1-x)^2/2 + a1 x^2/2 so both discrete boundary residuals vanish.
  bool compatible = false;
};

struct VerifySettings {
  std::vector<double> p_list{1.0, 2.0, kInfinity};
  std::vector<double> tau_list{1e-1, 1e-2, 1e-3};
  /// Headroom on closed-loop theorem envelopes and the smoothed-functional envelope.
  double slack = 1.05;
  /// Headroom on the target-system decay floor.
  double target_slack = 1.02;
  double skip_fraction = 0.1;
  double compat_tol = 1e-3;
  /// Relative tolerance on fitted target decay rates against lambda_lower.
  double fit_tolerance = 0.02;
};

struct OutputSettings {
  std::string dir = "out";
  /// Every n-th recorded frame goes into the (t, x, value) trajectory files.
  int field_stride = 10;
  bool write_fields = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ProblemSpec spec;
  KernelSettings kernel;
  SimConfig sim;
  InitialData initial;
  VerifySettings verify;
  OutputSettings output;
};

[[nodiscard]] ScenarioConfig parse_scenario(std::istream& in, const std::string& source = "<input>");
[[nodiscard]] ScenarioConfig load_scenario(const std::string& path);
/// Comma or whitespace separated reals; "inf" allowed.
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text);
/// Divides every spacing by `factor`: kernel n_xi, grid_m, dt (and record_stride scaled to
/// keep the recorded times).
void apply_refinement(ScenarioConfig& config, int factor);

[[nodiscard]] Profile make_initial_profile(const InitialData& data, int grid_m);
/// w0 + a0 (1-x)^2/2 + a1 x^2/2 with (a0, a1) zeroing check_compatibility's residuals.
[[nodiscard]] Profile make_compatible(const Profile& w0, const SampledKernel& k);

struct NormCheck {
  std::string name;
  std::string system;
  NormKind kind = NormKind::lp;
  double p = 2.0;
  double tau = 0.0;
  double constant = 1.0;
  double initial_norm = 0.0;
  BoundCheck bound;
  std::optional<DecayFit> fit;
  bool gating = true;
};

struct DecayReport {
  std::string scenario;
  double fitted_C = 0.0;
  double fitted_sigma = 0.0;
  double fit_residual = 0.0;
  double lambda_lower = 0.0;
  double sup_c = 0.0;
  /// min log-gap over the gating closed-loop envelope checks.
  double bound_margin = 0.0;
  KernelConstants kernel_constants;
  std::vector<EnvelopeConstants> envelopes;
  InfConstants inf_constants;
  CompatibilityReport compatibility;
  std::vector<NormCheck> checks;
  std::map<std::string, bool> pass_flags;
  std::vector<std::string> warnings;
  int recorded_times = 0;
  double record_interval = 0.0;

  [[nodiscard]] bool all_pass() const;
};

enum ExitCode : int { kExitPass = 0, kExitBoundViolation = 1, kExitConfig = 2, kExitNumeric = 3 };

/// Maps library exceptions to CLI exit codes.
[[nodiscard]] int exit_code_for(const std::exception& e);

struct ScenarioOutcome {
  DecayReport report;
  int exit_code = kExitPass;
  /// Empty when every stage completed.
  std::string failed_stage;
  std::string error;
  std::vector<std::string> artifacts;
};

/// validate -> kernels -> constants -> compatibility -> closed loop and target runs ->
/// norm traces -> fits and envelope checks. Writes CSV artifacts, report.json and MANIFEST
/// into config.output.dir. Stage failures are returned, not thrown.
[[nodiscard]] ScenarioOutcome run_scenario(const ScenarioConfig& config);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int frame_stride = 1);
void write_controls_csv(std::ostream& out, const Trajectory& traj);
void write_report_json(std::ostream& out, const DecayReport& report, const Plant* plant);

}  // namespace bstab
