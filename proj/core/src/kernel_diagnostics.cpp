#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "bstab/kernel.hpp"
#include "lattice_ops.hpp"

namespace bstab {

namespace {

/// Second-order difference of k along the grid direction (da, db) at node (a, b):
/// centered when both neighbours lie in D, otherwise one-sided. Returns false when
/// neither stencil fits.
bool directional_derivative(const KernelGrid& k, int a, int b, int da, int db, double h,
                            double& out) {
  const int n = k.xy_points() - 1;
  const auto inside = [n](int x, int y) { return y >= 0 && y <= x && x <= n; };
  const auto v = [&k](int x, int y) { return k.at_node(x, y); };
  if (inside(a + da, b + db) && inside(a - da, b - db)) {
    out = (v(a + da, b + db) - v(a - da, b - db)) / (2.0 * h);
    return true;
  }
  if (inside(a + da, b + db) && inside(a + 2 * da, b + 2 * db)) {
    out = (-3.0 * v(a, b) + 4.0 * v(a + da, b + db) - v(a + 2 * da, b + 2 * db)) / (2.0 * h);
    return true;
  }
  if (inside(a - da, b - db) && inside(a - 2 * da, b - 2 * db)) {
    out = (3.0 * v(a, b) - 4.0 * v(a - da, b - db) + v(a - 2 * da, b - 2 * db)) / (2.0 * h);
    return true;
  }
  return false;
}

/// k_x at node (a,b); where no x-stencil fits (next to the corner (1,1)) uses
/// k_x = (k_x + k_y) - k_y with the diagonal and y directional derivatives.
double kx_at_node(const KernelGrid& k, int a, int b) {
  const double h = k.xy_spacing();
  double value = 0.0;
  if (directional_derivative(k, a, b, 1, 0, h, value)) return value;
  double diag = 0.0;
  double ky = 0.0;
  if (!directional_derivative(k, a, b, 1, 1, h, diag) ||
      !directional_derivative(k, a, b, 0, 1, h, ky)) {
    throw InputError("kernel grid too coarse for k_x stencils");
  }
  return diag - ky;
}

void require_resolution(const KernelGrid& k) {
  if (k.n_xi < 33) {
    throw InputError(fmt::format("kernel derivative needs n_xi >= 33 (got {})", k.n_xi));
  }
}

}  // namespace

std::vector<double> kernel_derivative_x(const KernelGrid& k) {
  require_resolution(k);
  const int n = k.xy_points() - 1;
  std::vector<double> trace(static_cast<std::size_t>(n) + 1);
  for (int b = 0; b <= n; ++b) trace[static_cast<std::size_t>(b)] = kx_at_node(k, n, b);
  return trace;
}

std::vector<double> kernel_derivative_x_all(const KernelGrid& k) {
  require_resolution(k);
  const int n = k.xy_points() - 1;
  std::vector<double> out(k.values_xy.size());
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= a; ++b) {
      out[static_cast<std::size_t>(a) * (a + 1) / 2 + b] = kx_at_node(k, a, b);
    }
  }
  return out;
}

KernelConstants kernel_constants(const KernelGrid& k, const KernelGrid& l) {
  const auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  KernelConstants c;
  c.alpha1 = max_abs(k.values_xy);
  c.alpha2 = max_abs(k.trace_diag);
  c.alpha3 = max_abs(kernel_derivative_x_all(k));
  c.beta1 = max_abs(l.values_xy);
  c.beta2 = max_abs(l.trace_diag);
  c.beta3 = max_abs(kernel_derivative_x_all(l));
  return c;
}

ResidualReport residual(const KernelGrid& k, const GoursatProblem& problem, double h,
                        const ResidualOptions& options) {
  const int n = k.xy_points() - 1;
  const double hk = k.xy_spacing();
  const int stride = static_cast<int>(std::lround(h / hk));
  if (stride < 1 || std::abs(stride * hk - h) > 1e-9 * std::max(1.0, h)) {
    throw InputError(fmt::format("residual: spacing {} is not a multiple of the kernel spacing {}",
                                 h, hk));
  }
  const double margin = options.margin > 0.0 ? options.margin : h;
  const int mi = std::max(stride, static_cast<int>(std::ceil(margin / hk - 1e-9)));

  ResidualReport report;
  report.spacing = h;
  const auto v = [&k](int a, int b) { return k.at_node(a, b); };
  const bool has_f = !problem.f.is_zero();
  const double sign = problem.convolution_sign();
  const double hv2 = (stride * hk) * (stride * hk);

  for (int a = 0; a <= n - mi; ++a) {
    for (int b = mi; a - b >= mi; ++b) {
      const double x = a * hk;
      const double y = b * hk;
      const double lap =
          (v(a + stride, b) + v(a - stride, b) - v(a, b + stride) - v(a, b - stride)) / hv2;
      double rhs = problem.reaction(x, y) * v(a, b);
      if (has_f) {
        rhs += problem.f(x, y);
        double conv = 0.0;
        for (int c = b; c <= a; ++c) {
          const double w = (c == b || c == a) ? 0.5 : 1.0;
          const double z = c * hk;
          const double term = problem.orientation == Orientation::direct
                                  ? v(a, c) * problem.f(z, y)
                                  : problem.f(x, z) * v(c, b);
          conv += w * term;
        }
        rhs += sign * hk * conv;
      }
      report.interior = std::max(report.interior, std::abs(lap - rhs));
    }
  }

  for (int a = 0; a <= n; ++a) {
    double slope;
    if (a == 0) {
      slope = (-3.0 * k.trace_diag[0] + 4.0 * k.trace_diag[1] - k.trace_diag[2]) / (2.0 * hk);
    } else if (a == n) {
      slope = (3.0 * k.trace_diag[static_cast<std::size_t>(n)] -
               4.0 * k.trace_diag[static_cast<std::size_t>(n - 1)] +
               k.trace_diag[static_cast<std::size_t>(n - 2)]) /
              (2.0 * hk);
    } else {
      slope = (k.trace_diag[static_cast<std::size_t>(a + 1)] -
               k.trace_diag[static_cast<std::size_t>(a - 1)]) /
              (2.0 * hk);
    }
    report.diagonal = std::max(report.diagonal, std::abs(2.0 * slope - k.lambda0));
  }
  report.corner = std::abs(v(0, 0));

  for (int a = 2; a <= n; ++a) {
    const double ky = (-3.0 * v(a, 0) + 4.0 * v(a, 1) - v(a, 2)) / (2.0 * hk);
    report.neumann_fd = std::max(report.neumann_fd, std::abs(ky));
  }

  // k_y = G_xi - G_eta on y = 0 (xi = eta), with the chart gradient taken from the
  // differentiated representation
  //   G_xi  = lambda0/4 + (1/4) int_0^eta S(xi, s) ds
  //   G_eta = lambda0/4 + (1/4) int_0^eta S(eta, s) ds + (1/4) int_eta^xi S(tau, eta) dtau
  const ChartGrid& G = k.values_xieta;
  const ChartLattice& lattice = G.lattice;
  const detail::LatticeOps ops(problem, lattice);
  std::vector<double> S(lattice.size());
  ops.reaction_and_nonlocal(G.values, S);
  for (std::size_t idx = 0; idx < S.size(); ++idx) S[idx] += ops.forcing()[idx];
  std::vector<double> P(lattice.size());
  ops.inner_integral(S, P);
  const auto row_integral = [&](int i, int j) {
    double acc = 0.0;
    for (int t = j + 1; t <= i; ++t) {
      acc += 0.5 * lattice.spacing() * (S[lattice.index(t - 1, j)] + S[lattice.index(t, j)]);
    }
    return acc;
  };
  for (int j = 0; j <= lattice.half(); ++j) {
    const int i = j;  // y = 0
    const double g_xi = 0.25 * k.lambda0 + 0.25 * P[lattice.index(i, j)];
    const double g_eta =
        0.25 * k.lambda0 + 0.25 * P[lattice.index(j, j)] + 0.25 * row_integral(i, j);
    report.neumann = std::max(report.neumann, std::abs(g_xi - g_eta));
  }
  return report;
}

void write_kernel_csv(std::ostream& out, const KernelGrid& k, const KernelGrid& l) {
  if (k.xy_points() != l.xy_points()) {
    throw InputError("write_kernel_csv: k and l live on different grids");
  }
  const int n = k.xy_points() - 1;
  const double h = k.xy_spacing();
  out << "x,y,k,l\n";
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= a; ++b) {
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", a * h, b * h, k.at_node(a, b),
                         l.at_node(a, b));
    }
  }
}

}  // namespace bstab
