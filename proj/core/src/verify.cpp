#include "bstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "bstab/transforms.hpp"

namespace bstab {

namespace {

void check_finite_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw InputError(fmt::format("p = {} must be finite and >= 1", p));
}

void check_nonnegative(std::initializer_list<double> values) {
  for (double v : values) {
    if (!(v >= 0.0)) throw InputError("kernel constants must be nonnegative");
  }
}

}  // namespace

double stability_constant_C1(double p, double alpha1, double beta1) {
  check_finite_p(p);
  check_nonnegative({alpha1, beta1});
  return std::pow(std::pow(4.0, p - 1.0) * (1.0 + std::pow(alpha1, p)) * (1.0 + std::pow(beta1, p)),
                  1.0 / p);
}

C2Constants stability_constant_C2(double p, const std::array<double, 3>& alphas,
                                  const std::array<double, 2>& betas, double C1) {
  check_finite_p(p);
  check_nonnegative({alphas[0], alphas[1], alphas[2], betas[0], betas[1], C1});
  C2Constants c;
  c.gamma1 = std::max(1.0, std::pow(betas[0], p) + std::pow(betas[1], p));
  c.gamma2 = std::pow(C1, p) + std::pow(9.0, p - 1.0) * c.gamma1 *
                                   (1.0 + std::pow(alphas[0], p) + std::pow(alphas[1], p) +
                                    std::pow(alphas[2], p));
  c.C2 = std::max(std::pow(9.0, (p - 1.0) / p) * std::pow(c.gamma1, 1.0 / p),
                  std::pow(c.gamma2, 1.0 / p));
  return c;
}

InfConstants stability_constants_inf(const std::array<double, 3>& alphas,
                                     const std::array<double, 3>& betas) {
  check_nonnegative({alphas[0], alphas[1], alphas[2], betas[0], betas[1], betas[2]});
  const double a1 = alphas[0];
  const double b1 = betas[0];
  InfConstants c;
  if (a1 <= 1.0 && b1 <= 1.0) {
    c.gamma3 = 1.0;
  } else if (a1 <= 1.0) {
    c.gamma3 = b1;
  } else if (b1 <= 1.0) {
    c.gamma3 = a1;
  } else {
    c.gamma3 = a1 * b1;
  }
  c.C3 = 4.0 * c.gamma3;
  c.gamma4 = std::max(1.0, betas[1] + betas[2]);
  c.C4 = std::max(9.0 * c.gamma4, c.C3 + 9.0 * c.gamma4 * (1.0 + a1 + alphas[1] + alphas[2]));
  return c;
}

EnvelopeConstants envelope_constants(double p, const KernelConstants& kc) {
  EnvelopeConstants e;
  e.p = p;
  if (std::isinf(p)) {
    const InfConstants c = stability_constants_inf({kc.alpha1, kc.alpha2, kc.alpha3},
                                                   {kc.beta1, kc.beta2, kc.beta3});
    e.lp = c.C3;
    e.w1p = c.C4;
    return e;
  }
  e.lp = stability_constant_C1(p, kc.alpha1, kc.beta1);
  const C2Constants c2 =
      stability_constant_C2(p, {kc.alpha1, kc.alpha2, kc.alpha3}, {kc.beta2, kc.beta3}, e.lp);
  e.w1p = c2.C2;
  e.gamma1 = c2.gamma1;
  e.gamma2 = c2.gamma2;
  return e;
}

DecayFit fit_decay_rate(const NormTrace& trace, double skip_fraction) {
  if (!(skip_fraction >= 0.0 && skip_fraction < 1.0)) {
    throw InputError("fit_decay_rate: skip_fraction must lie in [0,1)");
  }
  if (trace.times.size() != trace.values.size() || trace.times.empty()) {
    throw InputError("fit_decay_rate: malformed trace");
  }
  const double t0 = skip_fraction * trace.times.back();
  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.times[i] < t0) continue;
    if (!(trace.values[i] > 0.0)) {
      throw FitError(fmt::format(
          "fit_decay_rate: non-positive value {} at t = {} (decay reached the floating-point floor)",
          trace.values[i], trace.times[i]));
    }
    ts.push_back(trace.times[i]);
    ys.push_back(std::log(trace.values[i]));
  }
  if (ts.size() < 2) throw FitError("fit_decay_rate: fewer than two samples in the fit window");

  const double n = static_cast<double>(ts.size());
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
  }
  const double slope = sty / stt;
  const double intercept = my - slope * mt;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  return {std::exp(intercept), -slope, std::sqrt(ss / n)};
}

BoundCheck verify_theorem_bound(const NormTrace& trace, double C_bound, double lambda_lower,
                                double initial_norm, double slack) {
  if (!(slack >= 1.0)) throw InputError("verify_theorem_bound: slack must be >= 1");
  BoundCheck check;
  check.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double v = trace.values[i];
    if (v <= 0.0) continue;
    const double envelope = slack * C_bound * std::exp(-lambda_lower * trace.times[i]) * initial_norm;
    const double ratio = v / envelope;
    if (ratio > check.worst_ratio) {
      check.worst_ratio = ratio;
      check.worst_t = trace.times[i];
    }
    check.margin = std::min(check.margin, std::log(envelope) - std::log(v));
  }
  check.pass = check.margin >= 0.0;
  return check;
}

std::vector<double> alf_envelope(const ProblemSpec& spec, const Trajectory& target, double p,
                                 double tau, double lambda_lower) {
  if (target.fields.empty()) throw InputError("alf_envelope: empty trajectory");
  std::vector<double> q(target.times.size(), -lambda_lower * p);
  std::vector<double> h(target.times.size());
  for (std::size_t n = 0; n < target.fields.size(); ++n) {
    const Profile& u = target.fields[n];
    const int m = u.grid_m();
    const double t = target.times[n];
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      const double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
      acc += w * eval_lambda(spec, u.x(i), t) * std::pow(rho(u[static_cast<std::size_t>(i)], tau), p - 1.0);
    }
    h[n] = tau * 0.375 * p * acc * u.spacing();
  }
  return gronwall_bound(alf(target.fields.front(), p, tau), q, h, target.times);
}

Plant prepare_plant(const ProblemSpec& spec, const KernelSettings& settings, int grid_m) {
  Plant plant;
  plant.spec = spec;
  plant.lambda_lower = lambda_lower(spec);
  const int n_xi = settings.n_xi > 0 ? settings.n_xi : 2 * (grid_m - 1) + 1;
  PicardOptions options;
  options.richardson = settings.richardson;
  plant.k = solve_kernel(spec, n_xi, settings.tol, settings.max_iter, options);
  plant.l = solve_inverse_kernel(spec, n_xi, settings.tol, settings.max_iter, options);
  plant.constants = kernel_constants(plant.k, plant.l);
  return plant;
}

ContinuousDependenceReport continuous_dependence_experiment(const Plant& plant, const SimConfig& cfg,
                                                            const std::vector<double>& p_list,
                                                            const Profile& w01, const Profile& w02,
                                                            double slack) {
  if (w01.grid_m() != w02.grid_m()) {
    throw InputError("continuous_dependence_experiment: initial data on different grids");
  }
  const SampledKernel k(plant.k, cfg.grid_m);
  const Trajectory a = simulate_closed_loop(plant.spec, k, w01, cfg);
  const Trajectory b = simulate_closed_loop(plant.spec, k, w02, cfg);
  std::vector<double> d0 = w01.values();
  for (std::size_t i = 0; i < d0.size(); ++i) d0[i] -= w02[i];
  const Profile diff0(d0);
  const Trajectory d = simulate_closed_loop(plant.spec, k, diff0, cfg);

  ContinuousDependenceReport report;
  for (std::size_t n = 0; n < a.fields.size(); ++n) {
    for (std::size_t i = 0; i < d0.size(); ++i) {
      const double direct = a.fields[n][i] - b.fields[n][i];
      report.linearity_error = std::max(report.linearity_error, std::abs(direct - d.fields[n][i]));
    }
  }
  for (double p : p_list) {
    const EnvelopeConstants c = envelope_constants(p, plant.constants);
    DependenceEntry e;
    e.p = p;
    const NormTrace lp = difference_trace(a, b, NormKind::lp, p);
    const NormTrace w1p = difference_trace(a, b, NormKind::w1p, p);
    e.max_difference = *std::max_element(lp.values.begin(), lp.values.end());
    e.max_difference_w1p = *std::max_element(w1p.values.begin(), w1p.values.end());
    e.bound = c.lp * lp_norm(diff0, p);
    e.bound_w1p = c.w1p * w1p_norm(diff0, p);
    e.pass = e.max_difference <= slack * e.bound;
    e.pass_w1p = e.max_difference_w1p <= slack * e.bound_w1p;
    report.pass = report.pass && e.pass && e.pass_w1p;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace bstab
