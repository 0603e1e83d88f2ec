#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bstab/errors.hpp"
#include "bstab/kernel.hpp"
#include "support/oracles.hpp"

namespace bstab {
namespace {

GoursatProblem quadratic_problem(double lambda0, double r, Orientation o = Orientation::direct) {
  GoursatProblem problem;
  problem.orientation = o;
  problem.lambda0 = lambda0;
  problem.c1 = Polynomial({0.0, 0.0, r});
  return problem;
}

GoursatProblem with_f(GoursatProblem problem, BivariatePolynomial f) {
  problem.f = std::move(f);
  return problem;
}

double sup_error_vs_series(const KernelGrid& k, double lambda0, double r, Orientation o) {
  const SeriesCoefficients coeffs = series_coefficients(25, r);
  const ChartLattice& lat = k.values_xieta.lattice;
  double err = 0.0;
  for (int j = 0; j < lat.rows(); ++j) {
    for (int i = lat.row_first(j); i <= lat.row_last(j); ++i) {
      err = std::max(err, std::abs(k.values_xieta(i, j) - series_oracle(coeffs, lambda0, lat.xi(i), lat.eta(j), 25, o)));
    }
  }
  return err;
}

TEST(GInitial, Examples) {
  EXPECT_NEAR(g_initial(quadratic_problem(10.0, 0.0), 1.0, 0.5), 3.75, 1e-14);
  EXPECT_DOUBLE_EQ(g_initial(with_f(quadratic_problem(3.0, 1.0), BivariatePolynomial({{1.0, 2.0}, {3.0}})), 0.0, 0.0),
                   0.0);
  EXPECT_NEAR(g_initial(with_f(quadratic_problem(0.0, 0.0), BivariatePolynomial::constant(1.0)), 1.0, 0.5), 0.125,
              1e-12);
  EXPECT_THROW((void)g_initial(quadratic_problem(1.0, 0.0), 0.2, 0.5), InputError);
}

TEST(GInitial, LatticeAgreesWithPointwiseQuadrature) {
  const GoursatProblem problem = with_f(quadratic_problem(2.0, 1.0), BivariatePolynomial({{1.0, 0.0}, {0.0, 1.0}}));
  const ChartGrid g = g_initial_grid(problem, ChartLattice(81));
  const auto& lat = g.lattice;
  for (int j = 0; j < lat.rows(); j += 7) {
    for (int i = lat.row_first(j); i <= lat.row_last(j); i += 5) {
      EXPECT_NEAR(g(i, j), g_initial(problem, lat.xi(i), lat.eta(j), 1024), 1e-4);
    }
  }
}

TEST(PhiOperator, ZeroAndConstantInputs) {
  const GoursatProblem problem = quadratic_problem(4.0, 0.0);
  const ChartLattice lat(41);
  const ChartGrid zero = phi_operator(problem, ChartGrid(lat, 0.0));
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
  const ChartGrid one = phi_operator(problem, ChartGrid(lat, 1.0));
  // (xi, eta) = (1, 0.5) is node (20, 10) at h = 1/20.
  EXPECT_NEAR(one(20, 10), 0.5, 1e-13);
  for (int j = 0; j < lat.rows(); ++j) {
    for (int i = lat.row_first(j); i <= lat.row_last(j); ++i) {
      EXPECT_NEAR(one(i, j), lat.xi(i) * lat.eta(j), 1e-13);
    }
  }
}

TEST(PhiOperator, IsLinear) {
  const GoursatProblem problem = with_f(quadratic_problem(3.0, 1.5), BivariatePolynomial({{1.0, -1.0}, {0.5}}));
  const ChartLattice lat(41);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ChartGrid g1(lat), g2(lat), mix(lat);
  for (std::size_t n = 0; n < lat.size(); ++n) {
    g1.values[n] = dist(rng);
    g2.values[n] = dist(rng);
    mix.values[n] = 2.5 * g1.values[n] - 0.75 * g2.values[n];
  }
  const ChartGrid p1 = phi_operator(problem, g1);
  const ChartGrid p2 = phi_operator(problem, g2);
  const ChartGrid pm = phi_operator(problem, mix);
  for (std::size_t n = 0; n < lat.size(); ++n) {
    EXPECT_NEAR(pm.values[n], 2.5 * p1.values[n] - 0.75 * p2.values[n], 1e-12);
  }
}

TEST(PicardSolve, NullProblemGivesZeroKernel) {
  const KernelGrid k = picard_solve(quadratic_problem(0.0, 0.0), 41);
  for (double v : k.values_xy) EXPECT_EQ(v, 0.0);
  const KernelGrid l = picard_solve(quadratic_problem(0.0, 0.0, Orientation::inverse), 41);
  for (double v : l.values_xy) EXPECT_EQ(v, 0.0);
}

TEST(PicardSolve, BoundaryRowAndDiagonalAreExact) {
  for (Orientation o : {Orientation::direct, Orientation::inverse}) {
    const GoursatProblem problem = with_f(quadratic_problem(5.0, 2.0, o), BivariatePolynomial({{1.0, 0.0}, {0.0, 1.0}}));
    const KernelGrid k = picard_solve(problem, 81);
    const ChartLattice& lat = k.values_xieta.lattice;
    for (int i = 0; i <= lat.row_last(0); ++i) EXPECT_NEAR(k.values_xieta(i, 0), 1.25 * lat.xi(i), 1e-13);
    for (std::size_t a = 0; a < k.trace_diag.size(); ++a) {
      EXPECT_NEAR(k.trace_diag[a], 2.5 * a * k.xy_spacing(), 1e-13);
    }
  }
}

TEST(PicardSolve, MatchesSeriesAtReferencePoint) {
  const KernelGrid k = picard_solve(quadratic_problem(10.0, 2.0), 201);
  EXPECT_NEAR(k.values_xieta.interpolate(1.2, 0.4), series_oracle(10.0, 2.0, 1.2, 0.4, 25), 1e-6);
  EXPECT_LT(sup_error_vs_series(k, 10.0, 2.0, Orientation::direct), 1e-6);
}

TEST(PicardSolve, PlainTrapezoidConvergesAtSecondOrder) {
  PicardOptions plain;
  plain.richardson = false;
  const double e1 = sup_error_vs_series(picard_solve(quadratic_problem(10.0, 2.0), 51, 1e-10, 200, plain), 10, 2,
                                        Orientation::direct);
  const double e2 = sup_error_vs_series(picard_solve(quadratic_problem(10.0, 2.0), 101, 1e-10, 200, plain), 10, 2,
                                        Orientation::direct);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(PicardSolve, MatchesBesselClosedFormWhenReactionIsConstant) {
  const KernelGrid k = picard_solve(quadratic_problem(10.0, 0.0), 201);
  const ChartLattice& lat = k.values_xieta.lattice;
  double err = 0.0;
  for (int j = 0; j < lat.rows(); ++j) {
    for (int i = lat.row_first(j); i <= lat.row_last(j); ++i) {
      err = std::max(err, std::abs(k.values_xieta(i, j) - testing::bessel_kernel_chart(10.0, lat.xi(i), lat.eta(j))));
    }
  }
  EXPECT_LT(err, 1e-6);
}

TEST(PicardSolve, InverseKernelMatchesItsSeries) {
  const KernelGrid l = picard_solve(quadratic_problem(10.0, 2.0, Orientation::inverse), 201);
  EXPECT_LT(sup_error_vs_series(l, 10.0, 2.0, Orientation::inverse), 1e-6);
  // c = 0: l(x,y) = lambda0 x J1(z)/z with z = sqrt(lambda0 (x^2 - y^2)).
  const KernelGrid l0 = picard_solve(quadratic_problem(4.0, 0.0, Orientation::inverse), 101);
  const double x = 0.8, y = 0.3;
  const double z = std::sqrt(4.0 * (x * x - y * y));
  EXPECT_NEAR(l0.at(x, y), 4.0 * x * std::cyl_bessel_j(1.0, z) / z, 1e-6);
}

TEST(PicardSolve, IncrementsRespectTailBound) {
  const GoursatProblem problem = quadratic_problem(10.0, 2.0);
  const double M = bound_constant_M(problem);
  const KernelGrid k = picard_solve(problem, 201);
  ASSERT_FALSE(k.increment_history.empty());
  for (std::size_t n = 0; n < k.increment_history.size(); ++n) {
    EXPECT_LE(k.increment_history[n], 1.1 * tail_bound(static_cast<int>(n), M, 2.0, 0.0)) << n;
    EXPECT_EQ(k.bound_excess_history[n], 0.0);
  }
}

TEST(PicardSolve, PerturbedStartConvergesToSameFixedPoint) {
  const GoursatProblem problem = with_f(quadratic_problem(6.0, 1.0), BivariatePolynomial({{1.0, 0.0}, {0.0, 1.0}}));
  const double tol = 1e-10;
  PicardOptions opt;
  opt.richardson = false;
  const KernelGrid base = picard_solve(problem, 81, tol, 200, opt);
  opt.initial_perturbation = [](double xi, double eta) {
    return std::exp(-20.0 * ((xi - 1.0) * (xi - 1.0) + (eta - 0.3) * (eta - 0.3)));
  };
  const KernelGrid perturbed = picard_solve(problem, 81, tol, 200, opt);
  double diff = 0.0;
  for (std::size_t n = 0; n < base.values_xieta.values.size(); ++n) {
    diff = std::max(diff, std::abs(base.values_xieta.values[n] - perturbed.values_xieta.values[n]));
  }
  EXPECT_LE(diff, 10.0 * tol);
}

TEST(PicardSolve, ReportsNonConvergence) {
  try {
    (void)picard_solve(quadratic_problem(10.0, 2.0), 41, 1e-12, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_increment(), 1e-12);
    EXPECT_EQ(e.iterations(), 2);
  }
  EXPECT_THROW((void)picard_solve(quadratic_problem(1.0, 0.0), 32), InputError);
  EXPECT_THROW((void)picard_solve(quadratic_problem(1.0, 0.0), 31), InputError);
}

TEST(TailBound, Examples) {
  EXPECT_DOUBLE_EQ(tail_bound(0, 5.0, 1.5, 0.5), 50.0);
  EXPECT_EQ(tail_bound(3, 0.0, 1.0, 1.0), 0.0);
  double sum = 0.0;
  for (int n = 0; n < 200; ++n) sum += tail_bound(n, 3.0, 1.2, 0.4);
  EXPECT_LE(sum, 3.0 * std::exp(3.0 * 1.6));
}

TEST(BoundConstantM, Examples) {
  ProblemSpec spec;
  spec.lambda0 = 10.0;
  EXPECT_DOUBLE_EQ(bound_constant_M(spec), 5.0);
  spec.lambda0 = 0.0;
  spec.family.f = BivariatePolynomial::constant(2.0);
  EXPECT_DOUBLE_EQ(bound_constant_M(spec), 1.0);
  spec.family.f = BivariatePolynomial();
  EXPECT_DOUBLE_EQ(bound_constant_M(spec), 0.0);
}

TEST(SeriesCoefficients, Examples) {
  const SeriesCoefficients c = series_coefficients(10, 3.0);
  EXPECT_DOUBLE_EQ(c.A[1][1], 0.5);
  EXPECT_DOUBLE_EQ(c.A[1][0], -0.5);
  double prod_all = 1.0, prod_even = 1.0;
  for (int n = 1; n <= 10; ++n) {
    prod_all /= n * (n + 1.0);
    prod_even /= 2.0 * n * (2.0 * n + 1.0);
    EXPECT_NEAR(c.A[n][n], prod_all, 1e-15 * prod_all);
    EXPECT_NEAR(c.A[n][0], std::pow(-3.0, n) * prod_even, 1e-14 * std::abs(std::pow(-3.0, n) * prod_even));
  }
  const SeriesCoefficients z = series_coefficients(8, 0.0);
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(z.A[n][0], 0.0);
}

TEST(SeriesOracle, BoundaryRowAndFirstTerm) {
  EXPECT_DOUBLE_EQ(series_oracle(10.0, 2.0, 1.7, 0.0, 25), 10.0 * 1.7 / 4.0);
  const double xi = 1.2, eta = 0.4, l = 10.0, r = 2.0;
  const double one_term = l / 4.0 * (xi + eta) +
                          l / 16.0 * (l / 2.0 * (xi * xi * eta + xi * eta * eta) -
                                      r / 6.0 * (std::pow(xi, 3) * eta * eta + xi * xi * std::pow(eta, 3)));
  EXPECT_NEAR(series_oracle(l, r, xi, eta, 1), one_term, 1e-14);
}

TEST(SeriesOracle, BesselClosedFormForZeroR) {
  EXPECT_NEAR(series_oracle(10.0, 0.0, 1.2, 0.2, 30), 4.660410695486, 1e-11);
  EXPECT_NEAR(series_oracle(10.0, 0.0, 1.2, 0.2, 30), testing::bessel_kernel_chart(10.0, 1.2, 0.2), 1e-11);
}

TEST(SeriesOracle, TruncationTailIsBounded) {
  for (double eta : {0.1, 0.4, 0.8}) {
    const double xi = 1.9 - eta;
    const double gap = std::abs(series_oracle(10.0, 2.0, xi, eta, 60) - series_oracle(10.0, 2.0, xi, eta, 5));
    EXPECT_LE(gap, series_tail_bound(10.0, 2.0, xi, eta, 5));
  }
}

TEST(KernelDerivative, ZeroKernel) {
  const KernelGrid k = KernelGrid::zero(41);
  for (double v : kernel_derivative_x(k)) EXPECT_EQ(v, 0.0);
}

TEST(KernelDerivative, ChainRuleAtCorner) {
  const KernelGrid k = picard_solve(quadratic_problem(10.0, 0.0), 201);
  const double h = k.xy_spacing();
  const int n = k.xy_points() - 1;
  // d/dx k(x,x) = lambda0/2, so k_x(1,1) = lambda0/2 - k_y(1,1).
  const double ky = (3.0 * k.at_node(n, n) - 4.0 * k.at_node(n, n - 1) + k.at_node(n, n - 2)) / (2.0 * h);
  EXPECT_NEAR(k.trace_kx1.back(), 5.0 - ky, 5e-3);
  EXPECT_NEAR(k.trace_kx1.back(), testing::bessel_kernel_dx(10.0, 1.0, 1.0), 5e-3);
}

TEST(KernelDerivative, SecondOrderUnderRefinement) {
  std::vector<std::vector<double>> traces;
  for (int n_xi : {81, 161, 321}) traces.push_back(picard_solve(quadratic_problem(10.0, 2.0), n_xi).trace_kx1);
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t b = 0; b < traces[0].size(); ++b) {
    d1 = std::max(d1, std::abs(traces[0][b] - traces[1][2 * b]));
    d2 = std::max(d2, std::abs(traces[1][2 * b] - traces[2][4 * b]));
  }
  EXPECT_GT(d1 / d2, 3.0);
  EXPECT_LT(d1 / d2, 5.0);
}

TEST(KernelConstants, ZeroAndOrdering) {
  const KernelConstants zero = kernel_constants(KernelGrid::zero(41), KernelGrid::zero(41, Orientation::inverse));
  EXPECT_EQ(zero.alpha1 + zero.alpha2 + zero.alpha3 + zero.beta1 + zero.beta2 + zero.beta3, 0.0);
  const KernelGrid k = picard_solve(quadratic_problem(10.0, 2.0), 101);
  const KernelGrid l = picard_solve(quadratic_problem(10.0, 2.0, Orientation::inverse), 101);
  const KernelConstants kc = kernel_constants(k, l);
  EXPECT_GE(kc.alpha2, 5.0 - 1e-12);
  EXPECT_GE(kc.alpha1, kc.alpha2);
  EXPECT_GE(kc.beta2, 5.0 - 1e-12);
  EXPECT_GE(kc.beta1, kc.beta2);
}

TEST(Residual, ZeroForNullProblem) {
  const ResidualReport r = residual(KernelGrid::zero(41), quadratic_problem(0.0, 0.0), 1.0 / 20.0);
  EXPECT_EQ(r.interior, 0.0);
  EXPECT_EQ(r.diagonal, 0.0);
  EXPECT_EQ(r.neumann, 0.0);
  EXPECT_EQ(r.corner, 0.0);
}

TEST(Residual, InteriorIsSecondOrderAndBoundaryExact) {
  for (const GoursatProblem& problem :
       {quadratic_problem(10.0, 2.0), with_f(quadratic_problem(10.0, 2.0), BivariatePolynomial({{1.0, 0.0}, {0.0, 1.0}})),
        quadratic_problem(10.0, 2.0, Orientation::inverse)}) {
    const KernelGrid k = picard_solve(problem, 201);
    const double h = k.xy_spacing();
    const ResidualOptions common{8.0 * h};
    const ResidualReport coarse = residual(k, problem, 8.0 * h, common);
    const ResidualReport fine = residual(k, problem, 4.0 * h, common);
    const double ratio = coarse.interior / fine.interior;
    EXPECT_GE(ratio, 3.0);
    EXPECT_LE(ratio, 5.0);
    EXPECT_LE(fine.diagonal, 1e-8);
    EXPECT_LE(fine.neumann, 1e-8);
    EXPECT_LE(fine.corner, 1e-8);
  }
}

TEST(KernelGrid, InterpolationIsNodalOnGridAndSmoothOffGrid) {
  const KernelGrid k = picard_solve(quadratic_problem(10.0, 0.0), 101);
  EXPECT_DOUBLE_EQ(k.at(0.5, 0.2), k.at_node(25, 10));
  EXPECT_NEAR(k.at(0.503, 0.211), testing::bessel_kernel(10.0, 0.503, 0.211), 1e-6);
  // One-sided second-order differences at h = 0.01.
  EXPECT_NEAR(k.kx1_at(0.333), testing::bessel_kernel_dx(10.0, 1.0, 0.333), 0.06);
}

}  // namespace
}  // namespace bstab
