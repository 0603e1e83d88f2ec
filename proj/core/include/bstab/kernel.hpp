#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bstab/chart.hpp"
#include "bstab/coefficients.hpp"
#include "bstab/polynomial.hpp"

namespace bstab {

enum class Orientation { direct, inverse };

[[nodiscard]] std::string to_string(Orientation o);

/// Kernel equation on D. Direct:  k_xx - k_yy = mu k + f + int_y^x k(x,z) f(z,y) dz.
/// Inverse: l_xx - l_yy = phi l + f - int_y^x f(x,z) l(z,y) dz.
/// Both with 2 d/dx k(x,x) = lambda0, k_y(x,0) = 0, k(0,0) = 0.
struct GoursatProblem {
  Orientation orientation = Orientation::direct;
  Polynomial c1;
  BivariatePolynomial f;
  double lambda0 = 0.0;

  [[nodiscard]] static GoursatProblem from_spec(const ProblemSpec& spec, Orientation o);

  /// mu (direct) or phi (inverse); no domain check, callers pass points of D.
  [[nodiscard]] double reaction(double x, double y) const noexcept {
    const double base = orientation == Orientation::direct ? lambda0 : -lambda0;
    return base - c1(x) + c1(y);
  }
  [[nodiscard]] double convolution_sign() const noexcept {
    return orientation == Orientation::direct ? 1.0 : -1.0;
  }
};

enum class StopReason { increment, tail_bound };

[[nodiscard]] std::string to_string(StopReason r);

struct PicardOptions {
  /// Second solve on the 2x refined lattice and (4 G_{h/2} - G_h)/3 on the base lattice.
  bool richardson = true;
  /// Added to G_0 to form the first iterate (uniqueness diagnostics). Disables the
  /// tail-bound stopping rule, which presumes the iteration starts at G_0.
  std::function<double(double xi, double eta)> initial_perturbation;
};

/// Converged kernel on the chart lattice and on the (x,y) triangle grid of spacing h.
struct KernelGrid {
  Orientation orientation = Orientation::direct;
  double lambda0 = 0.0;
  int n_xi = 0;
  ChartGrid values_xieta;
  /// Lower triangle, row-major: entry (a,b), b <= a, at a(a+1)/2 + b; x = a h, y = b h.
  std::vector<double> values_xy;
  std::vector<double> trace_diag;
  std::vector<double> trace_kx1;

  int iterations_used = 0;
  double final_increment = 0.0;
  std::vector<double> increment_history;
  /// max over nodes of |G_{n+1} - G_n| - tail_bound(n, M, xi, eta), clipped at 0.
  std::vector<double> bound_excess_history;
  double bound_M = 0.0;
  StopReason stop_reason = StopReason::increment;
  bool extrapolated = false;
  /// sup |G_{h/2} - G_h| on the base lattice when extrapolated.
  double richardson_correction = 0.0;

  /// Builds values_xy, trace_diag and trace_kx1 from chart values.
  [[nodiscard]] static KernelGrid from_chart(Orientation o, double lambda0, ChartGrid chart);
  /// k = 0 on a lattice of the given resolution.
  [[nodiscard]] static KernelGrid zero(int n_xi, Orientation o = Orientation::direct);

  [[nodiscard]] int xy_points() const noexcept { return values_xieta.lattice.half() + 1; }
  [[nodiscard]] double xy_spacing() const noexcept { return values_xieta.lattice.spacing(); }
  [[nodiscard]] double at_node(int a, int b) const noexcept {
    return values_xy[static_cast<std::size_t>(a) * (a + 1) / 2 + b];
  }
  /// k(x,y) for (x,y) in D: nodal value when (x,y) is a grid node, cubic otherwise.
  [[nodiscard]] double at(double x, double y) const;
  /// k_x(1,y) by cubic interpolation of trace_kx1.
  [[nodiscard]] double kx1_at(double y) const;
};

/// G_0(xi,eta) = (lambda0/4)(xi+eta) + (1/4) int_eta^xi int_0^eta f~ + (1/2) int_0^eta int_0^tau f~,
/// f~(tau,s) = f((tau+s)/2, (tau-s)/2), by nested trapezoid with `panels` per axis.
[[nodiscard]] double g_initial(const GoursatProblem& problem, double xi, double eta, int panels = 256);
/// G_0 on every lattice node (lattice quadrature).
[[nodiscard]] ChartGrid g_initial_grid(const GoursatProblem& problem, const ChartLattice& lattice);

/// Phi_G on the lattice of G: the reaction and nonlocal terms pushed through the nested
/// double-integral operator.
[[nodiscard]] ChartGrid phi_operator(const GoursatProblem& problem, const ChartGrid& G);

/// Successive approximation G_{n+1} = G_0 + Phi(G_n). Throws ConvergenceError when
/// max_iter is reached with the increment still >= tol.
[[nodiscard]] KernelGrid picard_solve(const GoursatProblem& problem, int n_xi, double tol = 1e-10,
                                      int max_iter = 200, const PicardOptions& options = {});

[[nodiscard]] KernelGrid solve_kernel(const ProblemSpec& spec, int n_xi, double tol = 1e-10,
                                      int max_iter = 200, const PicardOptions& options = {});
[[nodiscard]] KernelGrid solve_inverse_kernel(const ProblemSpec& spec, int n_xi, double tol = 1e-10,
                                              int max_iter = 200,
                                              const PicardOptions& options = {});

/// M^{n+2} (xi+eta)^{n+1} / (n+1)!.
[[nodiscard]] double tail_bound(int n, double M, double xi, double eta);

/// (lambda1 + fbar)/2 with lambda1 = max{|lambda0|, max_D |reaction|}, fbar = max |f|.
[[nodiscard]] double bound_constant_M(const ProblemSpec& spec);
[[nodiscard]] double bound_constant_M(const GoursatProblem& problem);

/// Coefficients of the closed-form kernel for f = 0, c1 = r x^2.
struct SeriesCoefficients {
  double r = 0.0;
  int n_max = 0;
  /// A[n][i], 0 <= i <= n; A[0][0] = 1.
  std::vector<std::vector<double>> A;
};

[[nodiscard]] SeriesCoefficients series_coefficients(int n_max, double r);

/// Partial sum through n_trunc of
///   G = (lambda0/4)(xi+eta) + (lambda0/4) sum_n (1/4)^n sum_i rho^i A[n][i] T_{2n-i},
///   T_k = xi^{k+1} eta^k + xi^k eta^{k+1},
/// with rho = lambda0 (direct) or -lambda0 (inverse kernel of the same family).
[[nodiscard]] double series_oracle(double lambda0, double r, double xi, double eta, int n_trunc,
                                   Orientation o = Orientation::direct);
[[nodiscard]] double series_oracle(const SeriesCoefficients& coeffs, double lambda0, double xi,
                                   double eta, int n_trunc, Orientation o = Orientation::direct);

/// sum_{n > n_trunc} M1^{n+1}/(n+1)! (xi^{n+1} eta^n + xi^n eta^{n+1}), M1 = r + |lambda0|.
[[nodiscard]] double series_tail_bound(double lambda0, double r, double xi, double eta, int n_trunc);

/// k_x(1, y_b) on the (x,y) grid by one-sided 2nd-order differences.
[[nodiscard]] std::vector<double> kernel_derivative_x(const KernelGrid& k);
/// k_x at every (x,y) grid node, packed like values_xy.
[[nodiscard]] std::vector<double> kernel_derivative_x_all(const KernelGrid& k);

struct KernelConstants {
  double alpha1 = 0.0;  ///< max_D |k|
  double alpha2 = 0.0;  ///< max_x |k(x,x)|
  double alpha3 = 0.0;  ///< max_D |k_x|
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
};

[[nodiscard]] KernelConstants kernel_constants(const KernelGrid& k, const KernelGrid& l);

struct ResidualOptions {
  /// Points closer than this to the boundary of D are skipped; defaults to the stencil
  /// spacing. Use a common margin to compare residuals across spacings.
  double margin = 0.0;
};

struct ResidualReport {
  double spacing = 0.0;
  /// sup |k_xx - k_yy - reaction k - f -/+ convolution| over interior nodes.
  double interior = 0.0;
  /// sup |2 d/dx k(x,x) - lambda0| along the diagonal.
  double diagonal = 0.0;
  /// sup |k_y(x,0)| from the differentiated integral representation.
  double neumann = 0.0;
  /// sup |k_y(x,0)| by one-sided finite differences (O(h^2)).
  double neumann_fd = 0.0;
  /// |k(0,0)|.
  double corner = 0.0;
};

/// PDE residual at stencil spacing h (an integer multiple of the kernel's grid spacing).
[[nodiscard]] ResidualReport residual(const KernelGrid& k, const GoursatProblem& problem, double h,
                                      const ResidualOptions& options = {});

/// CSV (x,y,k,l) over the triangle grid, row-major in x then y.
void write_kernel_csv(std::ostream& out, const KernelGrid& k, const KernelGrid& l);

}  // namespace bstab
