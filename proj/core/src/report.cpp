#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "bstab/scenario.hpp"

namespace bstab {

namespace {

using nlohmann::json;

/// JSON has no infinities; they are written as the strings "inf" / "-inf".
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json to_json(const KernelConstants& kc) {
  return {{"alpha1", number(kc.alpha1)}, {"alpha2", number(kc.alpha2)}, {"alpha3", number(kc.alpha3)},
          {"beta1", number(kc.beta1)},   {"beta2", number(kc.beta2)},   {"beta3", number(kc.beta3)}};
}

json to_json(const KernelGrid& k) {
  return {{"orientation", to_string(k.orientation)},
          {"n_xi", k.n_xi},
          {"iterations", k.iterations_used},
          {"final_increment", number(k.final_increment)},
          {"stop_reason", to_string(k.stop_reason)},
          {"bound_M", number(k.bound_M)},
          {"extrapolated", k.extrapolated},
          {"richardson_correction", number(k.richardson_correction)}};
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int frame_stride) {
  const std::size_t stride = frame_stride < 1 ? 1 : static_cast<std::size_t>(frame_stride);
  out << "t,x,value\n";
  for (std::size_t n = 0; n < traj.times.size(); n += stride) {
    const Profile& f = traj.fields[n];
    for (int i = 0; i < f.grid_m(); ++i) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", traj.times[n], f.x(i), f[static_cast<std::size_t>(i)]);
    }
  }
}

void write_controls_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,U\n";
  for (std::size_t n = 0; n < traj.controls.size(); ++n) {
    out << fmt::format("{:.17g},{:.17g}\n", traj.times[n], traj.controls[n]);
  }
}

void write_report_json(std::ostream& out, const DecayReport& report, const Plant* plant) {
  json j;
  j["scenario"] = report.scenario;
  j["pass"] = report.all_pass();
  j["lambda_lower"] = number(report.lambda_lower);
  j["sup_c"] = number(report.sup_c);
  j["fitted_C"] = number(report.fitted_C);
  j["fitted_sigma"] = number(report.fitted_sigma);
  j["fit_residual"] = number(report.fit_residual);
  j["bound_margin"] = number(report.bound_margin);
  j["recorded_times"] = report.recorded_times;
  j["record_interval"] = number(report.record_interval);
  j["kernel_constants"] = to_json(report.kernel_constants);

  json env = json::array();
  for (const auto& e : report.envelopes) {
    env.push_back({{"p", number(e.p)},
                   {"lp", number(e.lp)},
                   {"w1p", number(e.w1p)},
                   {"gamma1", number(e.gamma1)},
                   {"gamma2", number(e.gamma2)}});
  }
  j["envelope_constants"] = env;
  j["inf_constants"] = {{"C3", number(report.inf_constants.C3)},
                        {"C4", number(report.inf_constants.C4)},
                        {"gamma3", number(report.inf_constants.gamma3)},
                        {"gamma4", number(report.inf_constants.gamma4)}};
  j["compatibility"] = {{"ok", report.compatibility.ok},
                        {"left", number(report.compatibility.left)},
                        {"right", number(report.compatibility.right)}};

  json checks = json::array();
  for (const auto& c : report.checks) {
    json entry = {{"name", c.name},
                  {"system", c.system},
                  {"kind", to_string(c.kind)},
                  {"p", number(c.p)},
                  {"constant", number(c.constant)},
                  {"initial_norm", number(c.initial_norm)},
                  {"gating", c.gating},
                  {"pass", c.bound.pass},
                  {"worst_t", number(c.bound.worst_t)},
                  {"worst_ratio", number(c.bound.worst_ratio)},
                  {"margin", number(c.bound.margin)}};
    if (c.fit) {
      entry["fit"] = {{"C", number(c.fit->C)}, {"sigma", number(c.fit->sigma)}, {"residual", number(c.fit->residual)}};
    }
    checks.push_back(std::move(entry));
  }
  j["checks"] = checks;
  j["pass_flags"] = report.pass_flags;
  j["warnings"] = report.warnings;
  if (plant != nullptr) {
    j["kernel"] = to_json(plant->k);
    j["inverse_kernel"] = to_json(plant->l);
  }
  out << j.dump(2) << "\n";
}

}  // namespace bstab
