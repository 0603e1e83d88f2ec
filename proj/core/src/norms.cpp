#include "bstab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "bstab/errors.hpp"
#include "bstab/simulator.hpp"

namespace bstab {

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw InputError(fmt::format("norm exponent p = {} must be >= 1", p));
}

void check_tau(double tau) {
  if (!(tau > 0.0)) throw InputError(fmt::format("smoothing parameter tau = {} must be > 0", tau));
}

template <class F>
double trapezoid(const Profile& v, F&& g) {
  const int m = v.grid_m();
  double acc = 0.5 * (g(v[0]) + g(v[static_cast<std::size_t>(m - 1)]));
  for (int i = 1; i < m - 1; ++i) acc += g(v[static_cast<std::size_t>(i)]);
  return acc * v.spacing();
}

}  // namespace

double lp_norm(const Profile& v, double p) {
  check_p(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v.values()) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 1.0) return trapezoid(v, [](double s) { return std::abs(s); });
  if (p == 2.0) return std::sqrt(trapezoid(v, [](double s) { return s * s; }));
  return std::pow(trapezoid(v, [p](double s) { return std::pow(std::abs(s), p); }), 1.0 / p);
}

Profile derivative(const Profile& v) {
  const int m = v.grid_m();
  const double h = v.spacing();
  const auto at = [&v](int i) { return v[static_cast<std::size_t>(i)]; };
  Profile d(m, 0.0);
  d[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  for (int i = 1; i < m - 1; ++i) d[static_cast<std::size_t>(i)] = (at(i + 1) - at(i - 1)) / (2.0 * h);
  d[static_cast<std::size_t>(m - 1)] = (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) / (2.0 * h);
  return d;
}

double w1p_norm(const Profile& v, double p) {
  check_p(p);
  const Profile d = derivative(v);
  if (std::isinf(p)) return std::max(lp_norm(v, p), lp_norm(d, p));
  return std::pow(std::pow(lp_norm(v, p), p) + std::pow(lp_norm(d, p), p), 1.0 / p);
}

double rho(double s, double tau) {
  check_tau(tau);
  const double a = std::abs(s);
  if (a >= tau) return a;
  const double r = s / tau;
  return tau * (-r * r * r * r / 8.0 + 0.75 * r * r + 0.375);
}

double rho_prime(double s, double tau) {
  check_tau(tau);
  if (std::abs(s) >= tau) return s > 0.0 ? 1.0 : -1.0;
  const double r = s / tau;
  return -0.5 * r * r * r + 1.5 * r;
}

double rho_second(double s, double tau) {
  check_tau(tau);
  if (std::abs(s) >= tau) return 0.0;
  const double r = s / tau;
  return 1.5 / tau * (1.0 - r * r);
}

double alf(const Profile& v, double p, double tau) {
  check_p(p);
  check_tau(tau);
  if (std::isinf(p)) throw InputError("alf requires a finite p");
  return trapezoid(v, [p, tau](double s) { return std::pow(rho(s, tau), p); });
}

double alf_w1p(const Profile& v, double p, double tau) {
  return alf(v, p, tau) + alf(derivative(v), p, tau);
}

std::vector<double> gronwall_bound(double z0, std::span<const double> q, std::span<const double> h,
                                   std::span<const double> times) {
  if (q.size() != times.size() || h.size() != times.size()) {
    throw InputError("gronwall_bound: q, h and times must have the same length");
  }
  if (!(z0 >= 0.0)) throw InputError("gronwall_bound: z0 must be >= 0");
  std::vector<double> out(times.size());
  if (times.empty()) return out;
  // z_{i+1} = e^{Q_{i+1}-Q_i} z_i + (dt/2)(e^{Q_{i+1}-Q_i} h_i + h_{i+1})
  out[0] = z0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    if (!(dt > 0.0)) throw InputError("gronwall_bound: times must be strictly increasing");
    const double growth = std::exp(0.5 * dt * (q[i] + q[i + 1]));
    out[i + 1] = growth * out[i] + 0.5 * dt * (growth * h[i] + h[i + 1]);
  }
  return out;
}

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::lp:
      return "lp";
    case NormKind::w1p:
      return "w1p";
    case NormKind::alf:
      return "alf";
  }
  return "unknown";
}

namespace {

double evaluate(const Profile& v, NormKind kind, double p, double tau) {
  switch (kind) {
    case NormKind::lp:
      return lp_norm(v, p);
    case NormKind::w1p:
      return w1p_norm(v, p);
    case NormKind::alf:
      return alf(v, p, tau);
  }
  return 0.0;
}

}  // namespace

NormTrace norm_trace(const Trajectory& traj, NormKind kind, double p, double tau) {
  check_p(p);
  if (kind == NormKind::alf) check_tau(tau);
  NormTrace trace{traj.times, {}, p, kind, kind == NormKind::alf ? tau : 0.0};
  trace.values.reserve(traj.fields.size());
  for (const auto& f : traj.fields) trace.values.push_back(evaluate(f, kind, p, tau));
  return trace;
}

NormTrace difference_trace(const Trajectory& a, const Trajectory& b, NormKind kind, double p) {
  if (a.times.size() != b.times.size()) {
    throw InputError("difference_trace: trajectories have different lengths");
  }
  NormTrace trace{a.times, {}, p, kind, 0.0};
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    std::vector<double> d = a.fields[i].values();
    const auto& other = b.fields[i].values();
    if (other.size() != d.size()) throw InputError("difference_trace: grids differ");
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= other[j];
    trace.values.push_back(evaluate(Profile(std::move(d)), kind, p, 0.0));
  }
  return trace;
}

std::string format_p(double p) { return std::isinf(p) ? "inf" : fmt::format("{}", p); }

std::string norm_trace_filename(const NormTrace& trace, const std::string& prefix) {
  std::string name = fmt::format("{}_{}_p{}", prefix, to_string(trace.kind), format_p(trace.p));
  if (trace.kind == NormKind::alf) name += fmt::format("_tau{}", trace.tau);
  return name + ".csv";
}

void write_norm_trace_csv(std::ostream& out, const NormTrace& trace) {
  out << "t,value\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g}\n", trace.times[i], trace.values[i]);
  }
}

}  // namespace bstab
