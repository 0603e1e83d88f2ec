#pragma once

#include <string>

#include "bstab/polynomial.hpp"

namespace bstab {

enum class TimeProfileKind { constant, exp_decay, damped_osc };

/// Time part c2 of the reaction coefficient; every kind is bounded and C^1 on t >= 0.
///   constant:   c2(t) = a
///   exp_decay:  c2(t) = a e^{-bt}, b > 0
///   damped_osc: c2(t) = a sin(bt) e^{-t}
struct TimeProfile {
  TimeProfileKind kind = TimeProfileKind::constant;
  double a = 0.0;
  double b = 0.0;

  [[nodiscard]] double operator()(double t) const noexcept;
  /// Closed-form supremum over t > 0.
  [[nodiscard]] double supremum() const;
};

struct CoefficientFamily {
  Polynomial c1;
  TimeProfile c2;
  BivariatePolynomial f;
};

struct ProblemSpec {
  CoefficientFamily family;
  double lambda0 = 0.0;
  double horizon = 1.0;
  double sup_tolerance = 1e-9;
};

[[nodiscard]] std::string to_string(TimeProfileKind kind);
[[nodiscard]] TimeProfileKind parse_time_profile_kind(const std::string& name);

/// c(x,t) = c1(x) + c2(t).
[[nodiscard]] double eval_c(const ProblemSpec& spec, double x, double t);
/// mu(x,y) = lambda0 - c1(x) + c1(y) on D = {0 <= y <= x <= 1}.
[[nodiscard]] double eval_mu(const ProblemSpec& spec, double x, double y);
/// phi(x,y) = -lambda0 - c1(x) + c1(y) on D.
[[nodiscard]] double eval_phi(const ProblemSpec& spec, double x, double y);
/// lambda(x,t) = lambda0 - c(x,t).
[[nodiscard]] double eval_lambda(const ProblemSpec& spec, double x, double t);

/// Upper estimate of sup c over (0,1) x (0,inf): analytic per family, confirmed on a
/// dense [0,1] x [0,horizon] grid.
[[nodiscard]] double sup_c(const ProblemSpec& spec);
/// lambda0 - sup_c(spec); throws ValidationError when not strictly positive.
[[nodiscard]] double lambda_lower(const ProblemSpec& spec);

struct ValidationResult {
  bool ok = true;
  std::string reason;
};

[[nodiscard]] ValidationResult validate(const ProblemSpec& spec);
/// Throws ValidationError carrying validate()'s reason.
void require_valid(const ProblemSpec& spec);

}  // namespace bstab
