#include "bstab/kernel.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "interp.hpp"
#include "lattice_ops.hpp"

namespace bstab {

namespace detail {

LatticeOps::LatticeOps(const GoursatProblem& problem, const ChartLattice& lattice)
    : lattice_(lattice), orientation_(problem.orientation) {
  const int n = lattice_.half();
  const double h = lattice_.spacing();
  reaction_.resize(lattice_.size());
  forcing_.assign(lattice_.size(), 0.0);
  for (int j = 0; j <= n; ++j) {
    for (int i = j; i <= 2 * n - j; ++i) {
      const double x = 0.5 * (i + j) * h;
      const double y = 0.5 * (i - j) * h;
      reaction_[lattice_.index(i, j)] = problem.reaction(x, y);
      if (!problem.f.is_zero()) forcing_[lattice_.index(i, j)] = problem.f(x, y);
    }
  }
  if (!problem.f.is_zero()) {
    const int width = 2 * n + 1;
    f_half_.resize(static_cast<std::size_t>(width) * width);
    for (int p = 0; p < width; ++p) {
      for (int q = 0; q < width; ++q) {
        f_half_[static_cast<std::size_t>(p) * width + q] = problem.f(0.5 * p * h, 0.5 * q * h);
      }
    }
  }
}

void LatticeOps::reaction_and_nonlocal(std::span<const double> G, std::span<double> S) const {
  const int n = lattice_.half();
  const double h = lattice_.spacing();
  for (std::size_t idx = 0; idx < S.size(); ++idx) S[idx] = reaction_[idx] * G[idx];
  if (f_half_.empty()) return;

  const bool direct = orientation_ == Orientation::direct;
  const double sign = direct ? 1.0 : -1.0;
  for (int j = 1; j <= n; ++j) {
    for (int i = j; i <= 2 * n - j; ++i) {
      // Trapezoid over z in [y, x] with step h; s counts steps away from the diagonal
      // end of the integration segment.
      double acc = 0.0;
      for (int s = 0; s <= j; ++s) {
        const double w = (s == 0 || s == j) ? 0.5 : 1.0;
        double term;
        if (direct) {
          // k(x, x - s h) f(x - s h, y)
          term = G[lattice_.index(i + j - s, s)] * f_half(i + j - 2 * s, i - j);
        } else {
          // f(x, y + s h) l(y + s h, y)
          term = G[lattice_.index(i - j + s, s)] * f_half(i + j, i - j + 2 * s);
        }
        acc += w * term;
      }
      S[lattice_.index(i, j)] += sign * h * acc;
    }
  }
}

void LatticeOps::inner_integral(std::span<const double> S, std::span<double> P) const {
  const int n = lattice_.half();
  const double half_h = 0.5 * lattice_.spacing();
  for (int i = 0; i <= 2 * n; ++i) {
    const int top = std::min(i, 2 * n - i);
    double acc = 0.0;
    P[lattice_.index(i, 0)] = 0.0;
    for (int j = 1; j <= top; ++j) {
      acc += half_h * (S[lattice_.index(i, j - 1)] + S[lattice_.index(i, j)]);
      P[lattice_.index(i, j)] = acc;
    }
  }
}

void LatticeOps::integrate(std::span<const double> S, std::span<double> out,
                           std::vector<double>& P) const {
  const int n = lattice_.half();
  const double half_h = 0.5 * lattice_.spacing();
  P.resize(lattice_.size());
  inner_integral(S, P);

  double diag_acc = 0.0;  // int_0^eta P(tau, tau) dtau
  double prev_q = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double q = P[lattice_.index(j, j)];
    if (j > 0) diag_acc += half_h * (prev_q + q);
    prev_q = q;

    double acc = 0.0;
    out[lattice_.index(j, j)] = 0.5 * diag_acc;
    for (int i = j + 1; i <= 2 * n - j; ++i) {
      acc += half_h * (P[lattice_.index(i - 1, j)] + P[lattice_.index(i, j)]);
      out[lattice_.index(i, j)] = 0.25 * acc + 0.5 * diag_acc;
    }
  }
}

}  // namespace detail

namespace {

using detail::LatticeOps;

void add_boundary_term(const ChartLattice& lattice, double lambda0, std::span<double> out) {
  const int n = lattice.half();
  for (int j = 0; j <= n; ++j) {
    for (int i = j; i <= 2 * n - j; ++i) {
      out[lattice.index(i, j)] += 0.25 * lambda0 * (lattice.xi(i) + lattice.eta(j));
    }
  }
}

ChartGrid initial_grid(const LatticeOps& ops, double lambda0) {
  ChartGrid g0(ops.lattice());
  std::vector<double> work;
  ops.integrate(ops.forcing(), g0.values, work);
  add_boundary_term(ops.lattice(), lambda0, g0.values);
  return g0;
}

struct SolveResult {
  ChartGrid values;
  int iterations = 0;
  double final_increment = 0.0;
  std::vector<double> increments;
  std::vector<double> bound_excess;
  StopReason reason = StopReason::increment;
};

SolveResult iterate(const GoursatProblem& problem, const ChartLattice& lattice, double tol,
                    int max_iter, double M, const PicardOptions& options) {
  const LatticeOps ops(problem, lattice);
  const ChartGrid g0 = initial_grid(ops, problem.lambda0);

  SolveResult result;
  ChartGrid G = g0;
  const bool perturbed = static_cast<bool>(options.initial_perturbation);
  if (perturbed) {
    const int n = lattice.half();
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= 2 * n - j; ++i) {
        G(i, j) += options.initial_perturbation(lattice.xi(i), lattice.eta(j));
      }
    }
  }

  std::vector<double> S(lattice.size());
  std::vector<double> next(lattice.size());
  std::vector<double> work;
  const int n = lattice.half();
  for (int it = 0; it < max_iter; ++it) {
    ops.reaction_and_nonlocal(G.values, S);
    ops.integrate(S, next, work);
    double inc = 0.0;
    double excess = 0.0;
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= 2 * n - j; ++i) {
        const std::size_t idx = lattice.index(i, j);
        next[idx] += g0.values[idx];
        const double d = std::abs(next[idx] - G.values[idx]);
        inc = std::max(inc, d);
        excess = std::max(excess, d - tail_bound(it, M, lattice.xi(i), lattice.eta(j)));
      }
    }
    G.values.swap(next);
    result.increments.push_back(inc);
    result.bound_excess.push_back(std::max(excess, 0.0));
    result.iterations = it + 1;
    result.final_increment = inc;
    if (inc < tol) {
      result.reason = StopReason::increment;
      result.values = std::move(G);
      return result;
    }
    if (!perturbed && tail_bound(it, M, 2.0, 0.0) < tol) {
      result.reason = StopReason::tail_bound;
      result.values = std::move(G);
      return result;
    }
  }
  throw ConvergenceError(
      fmt::format("Picard iteration ({} kernel, n_xi = {}) did not reach tol = {} in {} iterations; "
                  "last increment {}",
                  to_string(problem.orientation), lattice.n_xi(), tol, max_iter,
                  result.final_increment),
      result.final_increment, max_iter);
}

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::direct ? "direct" : "inverse"; }

std::string to_string(StopReason r) {
  return r == StopReason::increment ? "increment" : "tail_bound";
}

GoursatProblem GoursatProblem::from_spec(const ProblemSpec& spec, Orientation o) {
  return GoursatProblem{o, spec.family.c1, spec.family.f, spec.lambda0};
}

double g_initial(const GoursatProblem& problem, double xi, double eta, int panels) {
  constexpr double slack = 1e-12;
  if (!(eta >= -slack && eta <= 1.0 + slack && xi >= eta - slack && xi <= 2.0 - eta + slack)) {
    throw InputError(fmt::format("g_initial: (xi, eta) = ({}, {}) outside the chart region", xi, eta));
  }
  if (panels < 1) throw InputError("g_initial: panels must be >= 1");
  double value = 0.25 * problem.lambda0 * (xi + eta);
  if (problem.f.is_zero() || eta <= 0.0) return value;

  const auto ftilde = [&](double tau, double s) {
    return problem.f(0.5 * (tau + s), 0.5 * (tau - s));
  };
  // inner(tau, top) = int_0^top f~(tau, s) ds
  const auto inner = [&](double tau, double top) {
    if (top <= 0.0) return 0.0;
    const double ds = top / panels;
    double acc = 0.5 * (ftilde(tau, 0.0) + ftilde(tau, top));
    for (int k = 1; k < panels; ++k) acc += ftilde(tau, k * ds);
    return acc * ds;
  };
  const auto outer = [&](double lo, double hi, auto&& g) {
    if (hi <= lo) return 0.0;
    const double dt = (hi - lo) / panels;
    double acc = 0.5 * (g(lo) + g(hi));
    for (int k = 1; k < panels; ++k) acc += g(lo + k * dt);
    return acc * dt;
  };
  value += 0.25 * outer(eta, xi, [&](double tau) { return inner(tau, eta); });
  value += 0.5 * outer(0.0, eta, [&](double tau) { return inner(tau, tau); });
  return value;
}

ChartGrid g_initial_grid(const GoursatProblem& problem, const ChartLattice& lattice) {
  return initial_grid(LatticeOps(problem, lattice), problem.lambda0);
}

ChartGrid phi_operator(const GoursatProblem& problem, const ChartGrid& G) {
  const LatticeOps ops(problem, G.lattice);
  std::vector<double> S(G.lattice.size());
  ops.reaction_and_nonlocal(G.values, S);
  ChartGrid out(G.lattice);
  std::vector<double> work;
  ops.integrate(S, out.values, work);
  return out;
}

double tail_bound(int n, double M, double xi, double eta) {
  if (n < 0) throw InputError("tail_bound: n must be >= 0");
  if (M < 0.0) throw InputError("tail_bound: M must be >= 0");
  const double s = xi + eta;
  if (M == 0.0 || s <= 0.0) return 0.0;
  return std::exp((n + 2) * std::log(M) + (n + 1) * std::log(s) - std::lgamma(n + 2.0));
}

double bound_constant_M(const GoursatProblem& problem) {
  const Extrema e = extrema_on(problem.c1, 0.0, 1.0);
  const double base = problem.orientation == Orientation::direct ? problem.lambda0 : -problem.lambda0;
  // reaction = base - c1(x) + c1(y) ranges over [base - (max - min), base + (max - min)].
  const double spread = e.max - e.min;
  const double lambda1 = std::max({std::abs(problem.lambda0), std::abs(base - spread),
                                   std::abs(base + spread)});
  const double fbar = problem.f.max_abs_sampled(401);
  return 0.5 * (lambda1 + fbar);
}

double bound_constant_M(const ProblemSpec& spec) {
  return bound_constant_M(GoursatProblem::from_spec(spec, Orientation::direct));
}

KernelGrid picard_solve(const GoursatProblem& problem, int n_xi, double tol, int max_iter,
                        const PicardOptions& options) {
  if (n_xi < 33 || n_xi % 2 == 0) {
    throw InputError(fmt::format("picard_solve: n_xi must be odd and >= 33 (got {})", n_xi));
  }
  if (!(tol > 0.0)) throw InputError("picard_solve: tol must be > 0");
  if (max_iter < 1) throw InputError("picard_solve: max_iter must be >= 1");

  const double M = bound_constant_M(problem);
  const ChartLattice lattice(n_xi);
  SolveResult base = iterate(problem, lattice, tol, max_iter, M, options);

  ChartGrid values = std::move(base.values);
  double correction = 0.0;
  if (options.richardson) {
    const ChartLattice fine_lattice(2 * n_xi - 1);
    const SolveResult fine = iterate(problem, fine_lattice, tol, max_iter, M, options);
    const int n = lattice.half();
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= 2 * n - j; ++i) {
        const double coarse = values(i, j);
        const double refined = fine.values(2 * i, 2 * j);
        correction = std::max(correction, std::abs(refined - coarse));
        values(i, j) = (4.0 * refined - coarse) / 3.0;
      }
    }
  }

  KernelGrid k = KernelGrid::from_chart(problem.orientation, problem.lambda0, std::move(values));
  k.iterations_used = base.iterations;
  k.final_increment = base.final_increment;
  k.increment_history = std::move(base.increments);
  k.bound_excess_history = std::move(base.bound_excess);
  k.bound_M = M;
  k.stop_reason = base.reason;
  k.extrapolated = options.richardson;
  k.richardson_correction = correction;
  return k;
}

KernelGrid solve_kernel(const ProblemSpec& spec, int n_xi, double tol, int max_iter,
                        const PicardOptions& options) {
  return picard_solve(GoursatProblem::from_spec(spec, Orientation::direct), n_xi, tol, max_iter,
                      options);
}

KernelGrid solve_inverse_kernel(const ProblemSpec& spec, int n_xi, double tol, int max_iter,
                                const PicardOptions& options) {
  return picard_solve(GoursatProblem::from_spec(spec, Orientation::inverse), n_xi, tol, max_iter,
                      options);
}

KernelGrid KernelGrid::from_chart(Orientation o, double lambda0, ChartGrid chart) {
  KernelGrid k;
  k.orientation = o;
  k.lambda0 = lambda0;
  k.n_xi = chart.lattice.n_xi();
  k.values_xieta = std::move(chart);
  const int n = k.values_xieta.lattice.half();
  k.values_xy.resize(static_cast<std::size_t>(n + 1) * (n + 2) / 2);
  k.trace_diag.resize(static_cast<std::size_t>(n) + 1);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= a; ++b) {
      k.values_xy[static_cast<std::size_t>(a) * (a + 1) / 2 + b] = k.values_xieta(a + b, a - b);
    }
    k.trace_diag[static_cast<std::size_t>(a)] = k.values_xieta(2 * a, 0);
  }
  k.trace_kx1 = kernel_derivative_x(k);
  return k;
}

KernelGrid KernelGrid::zero(int n_xi, Orientation o) {
  const ChartLattice lattice(n_xi);
  KernelGrid k = from_chart(o, 0.0, ChartGrid(lattice));
  k.extrapolated = false;
  return k;
}

double KernelGrid::at(double x, double y) const {
  constexpr double slack = 1e-12;
  if (!(y >= -slack && y <= x + slack && x <= 1.0 + slack)) {
    throw InputError(fmt::format("kernel lookup at (x,y) = ({}, {}) outside D", x, y));
  }
  const int n = values_xieta.lattice.half();
  const double fa = x * n;
  const double fb = y * n;
  const double ra = std::round(fa);
  const double rb = std::round(fb);
  if (std::abs(fa - ra) < 1e-9 && std::abs(fb - rb) < 1e-9) {
    return at_node(static_cast<int>(ra), static_cast<int>(rb));
  }
  const double xi = std::clamp(x + y, 0.0, 2.0);
  const double eta = std::clamp(x - y, 0.0, 1.0);
  return values_xieta.interpolate(std::clamp(xi, eta, 2.0 - eta), eta);
}

double KernelGrid::kx1_at(double y) const {
  if (trace_kx1.empty()) throw StateError("kernel has no k_x(1,.) trace");
  if (!(y >= -1e-12 && y <= 1.0 + 1e-12)) throw InputError("kx1_at: y outside [0,1]");
  const int n = static_cast<int>(trace_kx1.size()) - 1;
  const double fy = std::clamp(y, 0.0, 1.0) * n;
  const double r = std::round(fy);
  if (std::abs(fy - r) < 1e-9) return trace_kx1[static_cast<std::size_t>(r)];
  const int b0 = std::clamp(static_cast<int>(std::floor(fy)) - 1, 0, n - 3);
  const auto w = detail::cubic_weights(fy - b0);
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) acc += w[static_cast<std::size_t>(c)] * trace_kx1[static_cast<std::size_t>(b0 + c)];
  return acc;
}

}  // namespace bstab
