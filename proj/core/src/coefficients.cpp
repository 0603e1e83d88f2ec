#include "bstab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "bstab/errors.hpp"

namespace bstab {

namespace {

constexpr int kSupSamples = 2001;

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw InputError(fmt::format("{} = {} outside [0,1]", what, x));
}

void check_triangle(double x, double y) {
  if (!(y >= 0.0 && y <= x && x <= 1.0)) {
    throw InputError(fmt::format("(x,y) = ({}, {}) outside D = {{0 <= y <= x <= 1}}", x, y));
  }
}

/// sup over t > 0 of a sin(bt) e^{-t}. The maximiser of sin(bt)e^{-t} for b > 0 sits at
/// bt = atan(b) (value b/sqrt(1+b^2) e^{-atan(b)/b}); the most negative lobe is at
/// bt = atan(b) + pi.
double damped_osc_sup(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  if (b < 0.0) {
    a = -a;
    b = -b;
  }
  const double s = b / std::sqrt(1.0 + b * b);
  if (a > 0.0) return a * s * std::exp(-std::atan(b) / b);
  return -a * s * std::exp(-(std::atan(b) + std::numbers::pi) / b);
}

}  // namespace

double TimeProfile::operator()(double t) const noexcept {
  switch (kind) {
    case TimeProfileKind::constant:
      return a;
    case TimeProfileKind::exp_decay:
      return a * std::exp(-b * t);
    case TimeProfileKind::damped_osc:
      return a * std::sin(b * t) * std::exp(-t);
  }
  return 0.0;
}

double TimeProfile::supremum() const {
  switch (kind) {
    case TimeProfileKind::constant:
      return a;
    case TimeProfileKind::exp_decay:
      if (!(b > 0.0)) throw ValidationError("exp_decay requires b > 0");
      return std::max(a, 0.0);
    case TimeProfileKind::damped_osc:
      return damped_osc_sup(a, b);
  }
  return a;
}

std::string to_string(TimeProfileKind kind) {
  switch (kind) {
    case TimeProfileKind::constant:
      return "constant";
    case TimeProfileKind::exp_decay:
      return "exp_decay";
    case TimeProfileKind::damped_osc:
      return "damped_osc";
  }
  return "unknown";
}

TimeProfileKind parse_time_profile_kind(const std::string& name) {
  if (name == "constant") return TimeProfileKind::constant;
  if (name == "exp_decay") return TimeProfileKind::exp_decay;
  if (name == "damped_osc") return TimeProfileKind::damped_osc;
  throw ConfigError(fmt::format("unknown c2 kind '{}' (expected constant, exp_decay, damped_osc)", name));
}

double eval_c(const ProblemSpec& spec, double x, double t) {
  check_unit(x, "x");
  if (!(t >= 0.0)) throw InputError(fmt::format("t = {} is negative", t));
  return spec.family.c1(x) + spec.family.c2(t);
}

double eval_mu(const ProblemSpec& spec, double x, double y) {
  check_triangle(x, y);
  return spec.lambda0 - spec.family.c1(x) + spec.family.c1(y);
}

double eval_phi(const ProblemSpec& spec, double x, double y) {
  check_triangle(x, y);
  return -spec.lambda0 - spec.family.c1(x) + spec.family.c1(y);
}

double eval_lambda(const ProblemSpec& spec, double x, double t) {
  return spec.lambda0 - eval_c(spec, x, t);
}

double sup_c(const ProblemSpec& spec) {
  const double analytic = extrema_on(spec.family.c1, 0.0, 1.0).max + spec.family.c2.supremum();

  // Dense-grid confirmation; c is separable so the grid max is max c1 + max c2.
  double c1_max = -INFINITY;
  for (int i = 0; i < kSupSamples; ++i) {
    c1_max = std::max(c1_max, spec.family.c1(static_cast<double>(i) / (kSupSamples - 1)));
  }
  double c2_max = -INFINITY;
  for (int i = 0; i < kSupSamples; ++i) {
    c2_max = std::max(c2_max, spec.family.c2(spec.horizon * i / (kSupSamples - 1)));
  }
  return std::max(analytic, c1_max + c2_max);
}

double lambda_lower(const ProblemSpec& spec) {
  const double s = sup_c(spec);
  const double lower = spec.lambda0 - s;
  if (!(lower > 0.0)) {
    throw ValidationError(fmt::format(
        "lambda0 = {} must exceed sup c = {} (spectral-shift condition lambda0 > sup c)",
        spec.lambda0, s));
  }
  return lower;
}

ValidationResult validate(const ProblemSpec& spec) {
  if (!std::isfinite(spec.lambda0)) return {false, "lambda0 is not finite"};
  if (!(spec.horizon > 0.0)) return {false, fmt::format("horizon = {} must be > 0", spec.horizon)};
  if (!(spec.sup_tolerance > 0.0)) {
    return {false, fmt::format("sup_tolerance = {} must be > 0", spec.sup_tolerance)};
  }
  const TimeProfile& c2 = spec.family.c2;
  if (!std::isfinite(c2.a) || !std::isfinite(c2.b)) return {false, "c2 parameters must be finite"};
  if (c2.kind == TimeProfileKind::exp_decay && !(c2.b > 0.0)) {
    return {false, fmt::format("c2 exp_decay requires b > 0 (got {})", c2.b)};
  }
  const double s = sup_c(spec);
  if (!(spec.lambda0 - s > 0.0)) {
    return {false, fmt::format(
                       "lambda0 = {} must exceed sup c = {} (spectral-shift condition lambda0 > sup c)",
                       spec.lambda0, s)};
  }
  return {};
}

void require_valid(const ProblemSpec& spec) {
  const auto result = validate(spec);
  if (!result.ok) throw ValidationError(result.reason);
}

}  // namespace bstab
