#include "bstab/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bstab/errors.hpp"

namespace bstab {

namespace {

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Crank-Nicolson stepper for v_t = v_xx + r(x,t) v + E(v) with ghost-node Neumann
/// boundaries; E collects the explicitly treated terms (nonlocal source, boundary flux).
class CrankNicolson {
 public:
  CrankNicolson(int m, double dt) : m_(m), h_(1.0 / (m - 1)), dt_(dt) {
    lower_.resize(static_cast<std::size_t>(m));
    diag_.resize(static_cast<std::size_t>(m));
    upper_.resize(static_cast<std::size_t>(m));
    c_.resize(static_cast<std::size_t>(m));
    d_.resize(static_cast<std::size_t>(m));
  }

  /// rhs = v + (dt/2) A v with A = L + diag(r).
  void explicit_half(const std::vector<double>& v, const std::vector<double>& r,
                     std::vector<double>& rhs) const {
    const double s = 0.5 * dt_ / (h_ * h_);
    const std::size_t last = static_cast<std::size_t>(m_ - 1);
    rhs[0] = v[0] + 2.0 * s * (v[1] - v[0]) + 0.5 * dt_ * r[0] * v[0];
    for (std::size_t i = 1; i < last; ++i) {
      rhs[i] = v[i] + s * (v[i - 1] - 2.0 * v[i] + v[i + 1]) + 0.5 * dt_ * r[i] * v[i];
    }
    rhs[last] = v[last] + 2.0 * s * (v[last - 1] - v[last]) + 0.5 * dt_ * r[last] * v[last];
  }

  /// Solves (I - (dt/2) A) out = rhs.
  void implicit_half(const std::vector<double>& r, const std::vector<double>& rhs,
                     std::vector<double>& out) {
    const double s = 0.5 * dt_ / (h_ * h_);
    const std::size_t n = static_cast<std::size_t>(m_);
    for (std::size_t i = 0; i < n; ++i) {
      diag_[i] = 1.0 + 2.0 * s - 0.5 * dt_ * r[i];
      lower_[i] = -s;
      upper_[i] = -s;
    }
    upper_[0] = -2.0 * s;
    lower_[n - 1] = -2.0 * s;

    double pivot = diag_[0];
    if (std::abs(pivot) < 1e-300) throw NumericError("singular tridiagonal system in time step");
    c_[0] = upper_[0] / pivot;
    d_[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
      pivot = diag_[i] - lower_[i] * c_[i - 1];
      if (std::abs(pivot) < 1e-300) throw NumericError("singular tridiagonal system in time step");
      c_[i] = upper_[i] / pivot;
      d_[i] = (rhs[i] - lower_[i] * d_[i - 1]) / pivot;
    }
    out[n - 1] = d_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = d_[i] - c_[i] * out[i + 1];
  }

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] double h() const noexcept { return h_; }

 private:
  int m_;
  double h_;
  double dt_;
  std::vector<double> lower_, diag_, upper_, c_, d_;
};

struct Schedule {
  long steps = 0;
  double dt = 0.0;
};

Schedule make_schedule(const SimConfig& cfg, const Profile& initial, Trajectory& traj) {
  if (cfg.grid_m < 3) throw InputError("sim: grid_m must be >= 3");
  if (!(cfg.dt > 0.0)) throw InputError("sim: dt must be > 0");
  if (!(cfg.t_end > 0.0)) throw InputError("sim: t_end must be > 0");
  if (cfg.record_stride < 1) throw InputError("sim: record_stride must be >= 1");
  if (initial.grid_m() != cfg.grid_m) {
    throw InputError(fmt::format("initial profile has {} nodes but grid_m = {}", initial.grid_m(),
                                 cfg.grid_m));
  }
  Schedule s;
  s.steps = std::max(1L, static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  s.dt = cfg.t_end / static_cast<double>(s.steps);
  if (std::abs(s.dt - cfg.dt) > 1e-12 * cfg.dt) {
    traj.warnings.push_back(
        fmt::format("dt adjusted from {} to {} to land on t_end = {}", cfg.dt, s.dt, cfg.t_end));
  }
  const double h = 1.0 / (cfg.grid_m - 1);
  if (s.dt > 0.5 * h) {
    traj.warnings.push_back(
        fmt::format("dt = {} exceeds the accuracy threshold 0.5 h = {}", s.dt, 0.5 * h));
  }
  return s;
}

void check_growth(const std::vector<double>& v, double initial_sup, double t) {
  const double s = sup_abs(v);
  if (!std::isfinite(s)) throw NumericError(fmt::format("non-finite state at t = {}", t));
  if (initial_sup > 0.0 && s > 1e6 * initial_sup) {
    throw NumericError(fmt::format(
        "divergence at t = {}: sup|w| = {} exceeds 1e6 sup|w0| = {}", t, s, 1e6 * initial_sup));
  }
}

/// Shared driver for the plant: controlled when `k` is set, U = 0 otherwise.
Trajectory run_plant(const ProblemSpec& spec, const SampledKernel* k, const Profile& w0,
                     const SimConfig& cfg) {
  Trajectory traj;
  const Schedule sched = make_schedule(cfg, w0, traj);
  if (k != nullptr && k->grid_m() != cfg.grid_m) {
    throw InputError("closed loop: sampled kernel and simulation grid differ");
  }
  const int m = cfg.grid_m;
  const std::size_t n = static_cast<std::size_t>(m);
  CrankNicolson cn(m, sched.dt);
  const double h = cn.h();

  std::vector<double> c1(n);
  for (std::size_t i = 0; i < n; ++i) c1[i] = spec.family.c1(static_cast<double>(i) * h);

  const bool nonlocal = !spec.family.f.is_zero();
  std::vector<double> fmat;  // f(x_a, y_b), lower triangle
  if (nonlocal) {
    fmat.resize(n * (n + 1) / 2);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        fmat[a * (a + 1) / 2 + b] = spec.family.f(static_cast<double>(a) * h, static_cast<double>(b) * h);
      }
    }
  }

  const auto control = [&](const std::vector<double>& v) {
    return k != nullptr ? control_input(Profile(v), *k) : 0.0;
  };
  // E(v) = V[v] + (2/h) U(v) e_M
  const auto explicit_terms = [&](const std::vector<double>& v, std::vector<double>& e) {
    std::fill(e.begin(), e.end(), 0.0);
    if (nonlocal) {
      for (std::size_t a = 1; a < n; ++a) {
        const double* row = &fmat[a * (a + 1) / 2];
        double acc = 0.5 * (row[0] * v[0] + row[a] * v[a]);
        for (std::size_t b = 1; b < a; ++b) acc += row[b] * v[b];
        e[a] = h * acc;
      }
    }
    if (k != nullptr) e[n - 1] += 2.0 / h * control(v);
  };

  std::vector<double> w = w0.values();
  const double initial_sup = sup_abs(w);
  traj.times.push_back(0.0);
  traj.fields.push_back(w0);
  traj.controls.push_back(control(w));

  std::vector<double> r(n), base(n), rhs(n), e0(n), e1(n), pred(n);
  for (long step = 1; step <= sched.steps; ++step) {
    const double t_half = (static_cast<double>(step) - 0.5) * sched.dt;
    const double c2 = spec.family.c2(t_half);
    for (std::size_t i = 0; i < n; ++i) r[i] = c1[i] + c2;

    cn.explicit_half(w, r, base);
    const bool has_explicit = nonlocal || k != nullptr;
    if (has_explicit) {
      explicit_terms(w, e0);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = base[i] + sched.dt * e0[i];
      cn.implicit_half(r, rhs, pred);
      explicit_terms(pred, e1);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = base[i] + 0.5 * sched.dt * (e0[i] + e1[i]);
      cn.implicit_half(r, rhs, w);
    } else {
      cn.implicit_half(r, base, w);
    }

    const double t = static_cast<double>(step) * sched.dt;
    check_growth(w, initial_sup, t);
    if (step % cfg.record_stride == 0 || step == sched.steps) {
      traj.times.push_back(t);
      traj.fields.emplace_back(w);
      traj.controls.push_back(control(w));
    }
  }
  return traj;
}

}  // namespace

CompatibilityReport check_compatibility(const Profile& w0, const SampledKernel& k, double tol) {
  const int m = w0.grid_m();
  const double h = w0.spacing();
  const auto v = [&w0](int i) { return w0[static_cast<std::size_t>(i)]; };
  CompatibilityReport r;
  r.left = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
  const double wx1 = (3.0 * v(m - 1) - 4.0 * v(m - 2) + v(m - 3)) / (2.0 * h);
  r.right = wx1 - control_input(w0, k);
  r.ok = std::abs(r.left) < tol && std::abs(r.right) < tol;
  return r;
}

CompatibilityReport check_compatibility(const Profile& w0, const KernelGrid& k, double tol) {
  return check_compatibility(w0, SampledKernel(k, w0.grid_m()), tol);
}

Trajectory simulate_target(const ProblemSpec& spec, const Profile& u0, const SimConfig& cfg) {
  Trajectory traj;
  const Schedule sched = make_schedule(cfg, u0, traj);
  const int m = cfg.grid_m;
  const std::size_t n = static_cast<std::size_t>(m);
  CrankNicolson cn(m, sched.dt);
  const double h = cn.h();

  std::vector<double> c1(n);
  for (std::size_t i = 0; i < n; ++i) c1[i] = spec.family.c1(static_cast<double>(i) * h);

  std::vector<double> u = u0.values();
  const double initial_sup = sup_abs(u);
  traj.times.push_back(0.0);
  traj.fields.push_back(u0);

  std::vector<double> r(n), rhs(n);
  for (long step = 1; step <= sched.steps; ++step) {
    const double t_half = (static_cast<double>(step) - 0.5) * sched.dt;
    const double c2 = spec.family.c2(t_half);
    for (std::size_t i = 0; i < n; ++i) r[i] = -(spec.lambda0 - c1[i] - c2);
    cn.explicit_half(u, r, rhs);
    cn.implicit_half(r, rhs, u);

    const double t = static_cast<double>(step) * sched.dt;
    check_growth(u, initial_sup, t);
    if (step % cfg.record_stride == 0 || step == sched.steps) {
      traj.times.push_back(t);
      traj.fields.emplace_back(u);
    }
  }
  return traj;
}

Trajectory simulate_closed_loop(const ProblemSpec& spec, const SampledKernel& k, const Profile& w0,
                                const SimConfig& cfg) {
  return run_plant(spec, &k, w0, cfg);
}

Trajectory simulate_closed_loop(const ProblemSpec& spec, const KernelGrid& k, const Profile& w0,
                                const SimConfig& cfg) {
  const SampledKernel sampled(k, cfg.grid_m);
  return run_plant(spec, &sampled, w0, cfg);
}

Trajectory simulate_open_loop(const ProblemSpec& spec, const Profile& w0, const SimConfig& cfg) {
  return run_plant(spec, nullptr, w0, cfg);
}

Profile volterra_source(const Profile& w, const BivariatePolynomial& f) {
  const int m = w.grid_m();
  const double h = w.spacing();
  Profile out(m, 0.0);
  if (f.is_zero()) return out;
  for (int a = 1; a < m; ++a) {
    const double x = a * h;
    double acc = 0.5 * (f(x, 0.0) * w[0] + f(x, x) * w[static_cast<std::size_t>(a)]);
    for (int b = 1; b < a; ++b) acc += f(x, b * h) * w[static_cast<std::size_t>(b)];
    out[static_cast<std::size_t>(a)] = h * acc;
  }
  return out;
}

}  // namespace bstab
