#include <cmath>

#include <gtest/gtest.h>

#include "bstab/coefficients.hpp"
#include "bstab/errors.hpp"

namespace bstab {
namespace {

ProblemSpec make_spec(std::vector<double> c1, TimeProfile c2, double lambda0) {
  ProblemSpec spec;
  spec.family.c1 = Polynomial(std::move(c1));
  spec.family.c2 = c2;
  spec.lambda0 = lambda0;
  spec.horizon = 2.0;
  return spec;
}

const TimeProfile kExpDecay{TimeProfileKind::exp_decay, 1.0, 1.0};

TEST(Polynomial, EvaluatesAndTrims) {
  const Polynomial p({1.0, 2.0, 3.0, 0.0});
  EXPECT_EQ(p.degree(), 2);
  EXPECT_DOUBLE_EQ(p(2.0), 1.0 + 4.0 + 12.0);
  EXPECT_DOUBLE_EQ(p.derivative()(1.0), 2.0 + 6.0);
  EXPECT_TRUE(Polynomial().is_zero());
}

TEST(Polynomial, ExtremaFindsInteriorCriticalPoint) {
  const Polynomial p({0.0, 1.0, -1.0});  // x - x^2, max 1/4 at 1/2
  const Extrema e = extrema_on(p, 0.0, 1.0);
  EXPECT_NEAR(e.max, 0.25, 1e-14);
  EXPECT_NEAR(e.argmax, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(e.min, 0.0);
}

TEST(BivariatePolynomial, Evaluates) {
  const BivariatePolynomial f({{1.0, 0.0}, {0.0, 1.0}});  // 1 + xy
  EXPECT_DOUBLE_EQ(f(0.5, 0.5), 1.25);
  EXPECT_TRUE(BivariatePolynomial().is_zero());
  EXPECT_DOUBLE_EQ(BivariatePolynomial::constant(2.0).max_abs_sampled(11), 2.0);
}

TEST(TimeProfile, SupremaInClosedForm) {
  EXPECT_DOUBLE_EQ((TimeProfile{TimeProfileKind::constant, 0.5, 0.0}).supremum(), 0.5);
  EXPECT_DOUBLE_EQ(kExpDecay.supremum(), 1.0);
  const TimeProfile osc{TimeProfileKind::damped_osc, 2.0, 3.0};
  double sampled = 0.0;
  for (int i = 0; i <= 200000; ++i) sampled = std::max(sampled, osc(i * 1e-5));
  EXPECT_NEAR(osc.supremum(), sampled, 1e-8);
  EXPECT_GE(osc.supremum(), sampled);
}

TEST(EvalC, Examples) {
  EXPECT_DOUBLE_EQ(eval_c(make_spec({}, {}, 1.0), 0.3, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(eval_c(make_spec({0, 0, 1}, kExpDecay, 3.0), 1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(eval_c(make_spec({0, 1}, {TimeProfileKind::constant, 0.5, 0.0}, 3.0), 0.25, 7.0), 0.75);
  EXPECT_THROW((void)eval_c(make_spec({}, {}, 1.0), 1.5, 0.0), InputError);
  EXPECT_THROW((void)eval_c(make_spec({}, {}, 1.0), 0.5, -1.0), InputError);
}

TEST(EvalMuPhi, Examples) {
  EXPECT_DOUBLE_EQ(eval_mu(make_spec({}, {}, 10.0), 0.7, 0.2), 10.0);
  EXPECT_DOUBLE_EQ(eval_mu(make_spec({0, 0, 2}, {}, 10.0), 1.0, 0.0), 8.0);
  EXPECT_DOUBLE_EQ(eval_phi(make_spec({}, {}, 10.0), 0.7, 0.2), -10.0);
  EXPECT_DOUBLE_EQ(eval_phi(make_spec({0, 1}, {}, 3.0), 1.0, 0.5), -3.5);
  EXPECT_THROW((void)eval_mu(make_spec({}, {}, 1.0), 0.2, 0.7), InputError);
}

TEST(EvalMuPhi, DiagonalAndSumIdentities) {
  const ProblemSpec spec = make_spec({0.3, -1.0, 2.0, 0.5}, kExpDecay, 7.0);
  for (int i = 0; i <= 20; ++i) {
    const double s = i / 20.0;
    EXPECT_DOUBLE_EQ(eval_mu(spec, s, s), 7.0);
    EXPECT_DOUBLE_EQ(eval_phi(spec, s, s), -7.0);
    for (int j = 0; j <= i; ++j) {
      const double y = j / 20.0;
      const double c1 = spec.family.c1(s) - spec.family.c1(y);
      EXPECT_NEAR(eval_mu(spec, s, y) + eval_phi(spec, s, y), -2.0 * c1, 1e-14);
    }
  }
}

TEST(EvalLambda, ExamplesAndFloor) {
  EXPECT_DOUBLE_EQ(eval_lambda(make_spec({}, {}, 4.0), 0.5, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(eval_lambda(make_spec({0, 0, 1}, {}, 3.0), 1.0, 0.4), 2.0);
  const ProblemSpec spec = make_spec({0.1, 0.0, 1.0}, {TimeProfileKind::damped_osc, 1.5, 4.0}, 3.0);
  const double floor = lambda_lower(spec);
  for (int i = 0; i <= 50; ++i) {
    for (int n = 0; n <= 200; ++n) {
      EXPECT_GE(eval_lambda(spec, i / 50.0, n * 0.01), floor - spec.sup_tolerance);
    }
  }
}

TEST(SupC, Examples) {
  EXPECT_DOUBLE_EQ(sup_c(make_spec({}, {}, 1.0)), 0.0);
  EXPECT_NEAR(sup_c(make_spec({0, 0, 1}, kExpDecay, 3.0)), 2.0, 1e-12);
  EXPECT_NEAR(sup_c(make_spec({0, 1}, {TimeProfileKind::constant, 0.5, 0.0}, 2.0)), 1.5, 1e-12);
}

TEST(LambdaLower, Examples) {
  EXPECT_DOUBLE_EQ(lambda_lower(make_spec({}, {}, 4.0)), 4.0);
  EXPECT_NEAR(lambda_lower(make_spec({0, 0, 1}, kExpDecay, 3.0)), 1.0, 1e-12);
  EXPECT_NEAR(lambda_lower(make_spec({0, 1}, {TimeProfileKind::constant, 0.5, 0.0}, 2.0)), 0.5, 1e-12);
  EXPECT_THROW((void)lambda_lower(make_spec({0, 0, 1}, kExpDecay, 2.0)), ValidationError);
}

TEST(Validate, Examples) {
  EXPECT_TRUE(validate(make_spec({}, {}, 1.0)).ok);
  const ValidationResult bad = validate(make_spec({0, 0, 1}, kExpDecay, 2.0));
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.reason.find("lambda0 > sup c"), std::string::npos) << bad.reason;
  EXPECT_TRUE(validate(make_spec({0, 0, 1}, kExpDecay, 3.0)).ok);
  EXPECT_THROW(require_valid(make_spec({0, 0, 1}, kExpDecay, 2.0)), ValidationError);
}

TEST(Validate, RejectsBadFamilyParameters) {
  EXPECT_FALSE(validate(make_spec({}, {TimeProfileKind::exp_decay, 1.0, 0.0}, 3.0)).ok);
  ProblemSpec spec = make_spec({}, {}, 1.0);
  spec.horizon = 0.0;
  EXPECT_FALSE(validate(spec).ok);
}

TEST(TimeProfileKind, ParsesNames) {
  EXPECT_EQ(parse_time_profile_kind("damped_osc"), TimeProfileKind::damped_osc);
  EXPECT_EQ(to_string(TimeProfileKind::exp_decay), "exp_decay");
  EXPECT_THROW((void)parse_time_profile_kind("sine"), ConfigError);
}

}  // namespace
}  // namespace bstab
