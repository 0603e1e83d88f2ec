#pragma once

#include <string>
#include <vector>

#include "bstab/coefficients.hpp"
#include "bstab/kernel.hpp"
#include "bstab/profile.hpp"
#include "bstab/transforms.hpp"

namespace bstab {

enum class Scheme { crank_nicolson };

struct SimConfig {
  int grid_m = 201;
  double dt = 2.5e-5;
  double t_end = 2.0;
  int record_stride = 40;
  Scheme scheme = Scheme::crank_nicolson;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Profile> fields;
  /// U(t) at each recorded time; empty for target runs.
  std::vector<double> controls;
  std::vector<std::string> warnings;
};

struct CompatibilityReport {
  bool ok = true;
  /// w_x(0) by a one-sided difference.
  double left = 0.0;
  /// w_x(1) + k(1,1) w(1) + int_0^1 k_x(1,y) w(y) dy.
  double right = 0.0;
};

/// Boundary residuals of the compatibility conditions for w0; advisory only.
[[nodiscard]] CompatibilityReport check_compatibility(const Profile& w0, const SampledKernel& k,
                                                      double tol);
[[nodiscard]] CompatibilityReport check_compatibility(const Profile& w0, const KernelGrid& k,
                                                      double tol);

/// u_t = u_xx - lambda(x,t) u with u_x(0) = u_x(1) = 0.
[[nodiscard]] Trajectory simulate_target(const ProblemSpec& spec, const Profile& u0,
                                         const SimConfig& cfg);

/// w_t = w_xx + c w + int_0^x w f dy, w_x(0) = 0, w_x(1) = U(t) from the feedback law.
[[nodiscard]] Trajectory simulate_closed_loop(const ProblemSpec& spec, const SampledKernel& k,
                                              const Profile& w0, const SimConfig& cfg);
[[nodiscard]] Trajectory simulate_closed_loop(const ProblemSpec& spec, const KernelGrid& k,
                                              const Profile& w0, const SimConfig& cfg);

/// The plant with U forced to 0.
[[nodiscard]] Trajectory simulate_open_loop(const ProblemSpec& spec, const Profile& w0,
                                            const SimConfig& cfg);

/// int_0^{x_i} w(y) f(x_i, y) dy per node (trapezoid).
[[nodiscard]] Profile volterra_source(const Profile& w, const BivariatePolynomial& f);

}  // namespace bstab
