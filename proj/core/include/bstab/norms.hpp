#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bstab/profile.hpp"

namespace bstab {

struct Trajectory;

/// Sentinel for p = infinity.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (trapezoid int |v|^p)^{1/p}; max |v_i| for p = kInfinity.
[[nodiscard]] double lp_norm(const Profile& v, double p);
/// (||v||_p^p + ||v'||_p^p)^{1/p}; max(||v||_inf, ||v'||_inf) for p = kInfinity.
[[nodiscard]] double w1p_norm(const Profile& v, double p);
/// v' by centered differences, 2nd-order one-sided at the endpoints.
[[nodiscard]] Profile derivative(const Profile& v);

/// rho_tau(s) = |s| for |s| >= tau, -s^4/(8 tau^3) + 3 s^2/(4 tau) + 3 tau/8 otherwise.
[[nodiscard]] double rho(double s, double tau);
[[nodiscard]] double rho_prime(double s, double tau);
[[nodiscard]] double rho_second(double s, double tau);

/// trapezoid int rho_tau(v)^p for finite p >= 1.
[[nodiscard]] double alf(const Profile& v, double p, double tau);
/// alf(v) + alf(v'), the smoothed counterpart of ||v||_{1,p}^p.
[[nodiscard]] double alf_w1p(const Profile& v, double p, double tau);

/// z(t) = e^{int_0^t q} z0 + int_0^t e^{int_s^t q} h(s) ds with q, h sampled at `times`,
/// evaluated by a trapezoid recursion.
[[nodiscard]] std::vector<double> gronwall_bound(double z0, std::span<const double> q,
                                                 std::span<const double> h,
                                                 std::span<const double> times);

enum class NormKind { lp, w1p, alf };

[[nodiscard]] std::string to_string(NormKind kind);

struct NormTrace {
  std::vector<double> times;
  std::vector<double> values;
  double p = 2.0;
  NormKind kind = NormKind::lp;
  /// Smoothing parameter, used by NormKind::alf only.
  double tau = 0.0;
};

[[nodiscard]] NormTrace norm_trace(const Trajectory& traj, NormKind kind, double p, double tau = 0.0);

/// Pointwise in time |a - b| traces, e.g. for continuous-dependence experiments.
[[nodiscard]] NormTrace difference_trace(const Trajectory& a, const Trajectory& b, NormKind kind,
                                         double p);

/// "inf" or the shortest round-tripping decimal for p.
[[nodiscard]] std::string format_p(double p);
/// e.g. norm_lp_p2.csv, norm_alf_p1.5_tau0.01.csv.
[[nodiscard]] std::string norm_trace_filename(const NormTrace& trace, const std::string& prefix = "norm");
void write_norm_trace_csv(std::ostream& out, const NormTrace& trace);

}  // namespace bstab
