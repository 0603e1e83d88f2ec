#include "bstab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "bstab/artifacts.hpp"
#include "bstab/errors.hpp"
#include "bstab/transforms.hpp"

namespace bstab {

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

double parse_real(const std::string& token) {
  const std::string t = trim(token);
  if (t == "inf" || t == "+inf" || t == "infinity") return kInfinity;
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ConfigError(fmt::format("'{}' is not a number", token));
  }
  return value;
}

long parse_integer(const std::string& token) {
  const std::string t = trim(token);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(fmt::format("'{}' is not an integer", token));
  }
  return value;
}

bool parse_bool(const std::string& token) {
  const std::string t = trim(token);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", token));
}

/// Reads one section, rejecting keys the caller did not consume.
class Section {
 public:
  Section(const ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  [[nodiscard]] std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (tree_ == nullptr) return std::nullopt;
    const auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    std::string value = child->data();
    const auto hash = value.find('#');
    if (hash != std::string::npos) value.erase(hash);
    return trim(value);
  }

  template <class T, class Parse>
  void read(const std::string& key, T& target, Parse&& parse) {
    const auto value = raw(key);
    if (!value) return;
    try {
      target = parse(*value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("[{}] {}: {}", name_, key, e.what()));
    }
  }

  void real(const std::string& key, double& target) { read(key, target, parse_real); }
  void integer(const std::string& key, int& target) {
    read(key, target, [](const std::string& s) { return static_cast<int>(parse_integer(s)); });
  }
  void boolean(const std::string& key, bool& target) { read(key, target, parse_bool); }
  void text(const std::string& key, std::string& target) {
    read(key, target, [](const std::string& s) { return s; });
  }

  void reject_unknown() const {
    if (tree_ == nullptr) return;
    for (const auto& kv : *tree_) {
      if (!used_.count(kv.first)) {
        throw ConfigError(fmt::format("unknown key '{}' in section [{}]", kv.first, name_));
      }
    }
  }

 private:
  const ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

std::vector<std::vector<double>> parse_bivariate(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> coeffs;
    for (const auto& t : split_tokens(row)) coeffs.push_back(parse_real(t));
    rows.push_back(std::move(coeffs));
  }
  return rows;
}

InitialFamily parse_initial_family(const std::string& name) {
  if (name == "constant") return InitialFamily::constant;
  if (name == "cosine") return InitialFamily::cosine;
  if (name == "polynomial") return InitialFamily::polynomial;
  if (name == "bump") return InitialFamily::bump;
  throw ConfigError(fmt::format("unknown initial family '{}' (expected constant, cosine, polynomial, bump)", name));
}

std::string stringify(double p) { return format_p(p); }

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : split_tokens(text)) out.push_back(parse_real(t));
  return out;
}

ScenarioConfig parse_scenario(std::istream& in, const std::string& source) {
  ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  static const std::set<std::string> known{"scenario", "problem", "kernel", "sim",
                                           "initial",  "verify",  "output"};
  for (const auto& kv : tree) {
    if (!known.count(kv.first)) {
      throw ConfigError(fmt::format("{}: unknown section or top-level key '{}'", source, kv.first));
    }
  }
  const auto section = [&tree](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  ScenarioConfig cfg;
  {
    Section s = section("scenario");
    s.text("name", cfg.name);
    s.reject_unknown();
  }
  {
    Section s = section("problem");
    s.real("lambda0", cfg.spec.lambda0);
    s.real("horizon", cfg.spec.horizon);
    s.real("sup_tolerance", cfg.spec.sup_tolerance);
    s.read("c1", cfg.spec.family.c1, [](const std::string& v) { return Polynomial(parse_real_list(v)); });
    s.read("c2_kind", cfg.spec.family.c2.kind, parse_time_profile_kind);
    s.real("c2_a", cfg.spec.family.c2.a);
    s.real("c2_b", cfg.spec.family.c2.b);
    s.read("f", cfg.spec.family.f,
           [](const std::string& v) { return BivariatePolynomial(parse_bivariate(v)); });
    s.reject_unknown();
  }
  {
    Section s = section("kernel");
    s.integer("n_xi", cfg.kernel.n_xi);
    s.real("tol", cfg.kernel.tol);
    s.integer("max_iter", cfg.kernel.max_iter);
    s.boolean("richardson", cfg.kernel.richardson);
    s.reject_unknown();
  }
  {
    Section s = section("sim");
    s.integer("grid_m", cfg.sim.grid_m);
    s.real("dt", cfg.sim.dt);
    cfg.sim.t_end = cfg.spec.horizon;
    s.real("t_end", cfg.sim.t_end);
    s.integer("record_stride", cfg.sim.record_stride);
    std::string scheme = "crank_nicolson";
    s.text("scheme", scheme);
    if (scheme != "crank_nicolson") {
      throw ConfigError(fmt::format("[sim] scheme: unsupported '{}' (only crank_nicolson)", scheme));
    }
    s.reject_unknown();
  }
  {
    Section s = section("initial");
    s.read("family", cfg.initial.family, parse_initial_family);
    s.real("amplitude", cfg.initial.amplitude);
    s.read("modes", cfg.initial.modes, [](const std::string& v) {
      std::vector<int> modes;
      for (const auto& t : split_tokens(v)) modes.push_back(static_cast<int>(parse_integer(t)));
      return modes;
    });
    s.read("coefficients", cfg.initial.coefficients, parse_real_list);
    s.real("center", cfg.initial.center);
    s.real("width", cfg.initial.width);
    s.real("height", cfg.initial.height);
    s.boolean("compatible", cfg.initial.compatible);
    s.reject_unknown();
  }
  {
    Section s = section("verify");
    s.read("p", cfg.verify.p_list, parse_real_list);
    s.read("tau", cfg.verify.tau_list, parse_real_list);
    s.real("slack", cfg.verify.slack);
    s.real("target_slack", cfg.verify.target_slack);
    s.real("skip_fraction", cfg.verify.skip_fraction);
    s.real("compat_tol", cfg.verify.compat_tol);
    s.real("fit_tolerance", cfg.verify.fit_tolerance);
    s.reject_unknown();
  }
  {
    Section s = section("output");
    s.text("dir", cfg.output.dir);
    s.integer("field_stride", cfg.output.field_stride);
    s.boolean("write_fields", cfg.output.write_fields);
    s.reject_unknown();
  }
  // Cross-field checks.
  if (cfg.verify.p_list.empty()) throw ConfigError("[verify] p: list must not be empty");
  for (double p : cfg.verify.p_list) {
    if (!(p >= 1.0)) throw ConfigError(fmt::format("[verify] p: {} is below 1", p));
  }
  for (double tau : cfg.verify.tau_list) {
    if (!(tau > 0.0)) throw ConfigError(fmt::format("[verify] tau: {} must be > 0", tau));
  }
  if (!(cfg.verify.slack >= 1.0) || !(cfg.verify.target_slack >= 1.0)) {
    throw ConfigError("[verify] slack values must be >= 1");
  }
  if (!(cfg.verify.skip_fraction >= 0.0 && cfg.verify.skip_fraction < 1.0)) {
    throw ConfigError("[verify] skip_fraction must lie in [0,1)");
  }
  if (cfg.sim.grid_m < 3) throw ConfigError("[sim] grid_m must be >= 3");
  if (!(cfg.sim.dt > 0.0) || !(cfg.sim.t_end > 0.0)) throw ConfigError("[sim] dt and t_end must be > 0");
  if (cfg.sim.record_stride < 1) throw ConfigError("[sim] record_stride must be >= 1");
  if (cfg.kernel.n_xi != 0 && (cfg.kernel.n_xi < 33 || cfg.kernel.n_xi % 2 == 0)) {
    throw ConfigError("[kernel] n_xi must be 0 (automatic) or odd and >= 33");
  }
  if (!(cfg.kernel.tol > 0.0) || cfg.kernel.max_iter < 1) {
    throw ConfigError("[kernel] tol must be > 0 and max_iter >= 1");
  }
  if (cfg.output.field_stride < 1) throw ConfigError("[output] field_stride must be >= 1");
  if (cfg.initial.family == InitialFamily::bump && !(cfg.initial.width > 0.0)) {
    throw ConfigError("[initial] width must be > 0");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  return parse_scenario(in, path);
}

void apply_refinement(ScenarioConfig& config, int factor) {
  if (factor < 1) throw ConfigError("refinement factor must be >= 1");
  if (factor == 1) return;
  config.sim.grid_m = (config.sim.grid_m - 1) * factor + 1;
  config.sim.dt /= factor;
  config.sim.record_stride *= factor;
  if (config.kernel.n_xi > 0) config.kernel.n_xi = (config.kernel.n_xi - 1) * factor + 1;
}

Profile make_initial_profile(const InitialData& data, int grid_m) {
  switch (data.family) {
    case InitialFamily::constant:
      return Profile(grid_m, data.amplitude);
    case InitialFamily::cosine:
      return Profile::from_function(grid_m, [&](double x) {
        double v = 0.0;
        for (int k : data.modes) v += std::cos(k * std::numbers::pi * x);
        return data.amplitude * v;
      });
    case InitialFamily::polynomial: {
      const Polynomial poly(data.coefficients);
      return Profile::from_function(grid_m, [&](double x) { return poly(x); });
    }
    case InitialFamily::bump:
      return Profile::from_function(grid_m, [&](double x) {
        const double z = (x - data.center) / data.width;
        return data.height * std::exp(-z * z);
      });
  }
  throw ConfigError("unknown initial family");
}

Profile make_compatible(const Profile& w0, const SampledKernel& k) {
  const int m = w0.grid_m();
  const Profile psi0 = Profile::from_function(m, [](double x) { return 0.5 * (1.0 - x) * (1.0 - x); });
  const Profile psi1 = Profile::from_function(m, [](double x) { return 0.5 * x * x; });
  const auto r = check_compatibility(w0, k, 0.0);
  const auto r0 = check_compatibility(psi0, k, 0.0);
  const auto r1 = check_compatibility(psi1, k, 0.0);
  const double det = r0.left * r1.right - r1.left * r0.right;
  if (std::abs(det) < 1e-12) throw NumericError("make_compatible: correction system is singular");
  const double a0 = (-r.left * r1.right + r1.left * r.right) / det;
  const double a1 = (-r0.left * r.right + r.left * r0.right) / det;
  Profile out = w0;
  for (int i = 0; i < m; ++i) {
    const auto s = static_cast<std::size_t>(i);
    out[s] += a0 * psi0[s] + a1 * psi1[s];
  }
  return out;
}

bool DecayReport::all_pass() const {
  return std::all_of(pass_flags.begin(), pass_flags.end(), [](const auto& kv) { return kv.second; });
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const InputError*>(&e)) {
    return kExitConfig;
  }
  return kExitNumeric;
}

namespace {

std::optional<DecayFit> try_fit(const NormTrace& trace, double skip, std::vector<std::string>& warnings,
                                const std::string& label) {
  const bool all_zero =
      std::all_of(trace.values.begin(), trace.values.end(), [](double v) { return v == 0.0; });
  if (all_zero) return std::nullopt;
  try {
    return fit_decay_rate(trace, skip);
  } catch (const FitError& e) {
    warnings.push_back(fmt::format("{}: {}", label, e.what()));
    return std::nullopt;
  }
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  ScenarioOutcome outcome;
  DecayReport& report = outcome.report;
  report.scenario = config.name;
  std::optional<ArtifactWriter> writer;
  std::optional<Plant> plant;
  std::string stage = "output";

  const auto write_manifest = [&](bool complete) {
    if (writer) writer->write_manifest(config.name, complete, outcome.failed_stage, outcome.error);
  };

  try {
    writer.emplace(config.output.dir);

    stage = "validate";
    require_valid(config.spec);
    report.sup_c = sup_c(config.spec);
    report.lambda_lower = lambda_lower(config.spec);

    stage = "kernel";
    plant = prepare_plant(config.spec, config.kernel, config.sim.grid_m);
    report.kernel_constants = plant->constants;
    for (double p : config.verify.p_list) report.envelopes.push_back(envelope_constants(p, plant->constants));
    const KernelConstants& kc = plant->constants;
    report.inf_constants =
        stability_constants_inf({kc.alpha1, kc.alpha2, kc.alpha3}, {kc.beta1, kc.beta2, kc.beta3});
    writer->write("kernel.csv", [&](std::ostream& o) { write_kernel_csv(o, plant->k, plant->l); });

    stage = "initial_data";
    const SampledKernel k(plant->k, config.sim.grid_m);
    Profile w0 = make_initial_profile(config.initial, config.sim.grid_m);
    if (config.initial.compatible) w0 = make_compatible(w0, k);
    report.compatibility = check_compatibility(w0, k, config.verify.compat_tol);
    if (!report.compatibility.ok) {
      report.warnings.push_back(fmt::format(
          "initial data violates the compatibility conditions: w_x(0) residual {:.3e}, "
          "w_x(1) residual {:.3e} (tol {:.1e})",
          report.compatibility.left, report.compatibility.right, config.verify.compat_tol));
    }

    stage = "closed_loop";
    const Trajectory closed = simulate_closed_loop(config.spec, k, w0, config.sim);
    for (const auto& w : closed.warnings) report.warnings.push_back("closed loop: " + w);
    if (config.output.write_fields) {
      writer->write("closed_loop_field.csv",
                    [&](std::ostream& o) { write_trajectory_csv(o, closed, config.output.field_stride); });
    }
    writer->write("closed_loop_controls.csv", [&](std::ostream& o) { write_controls_csv(o, closed); });
    report.recorded_times = static_cast<int>(closed.times.size());
    report.record_interval = closed.times.size() > 1 ? closed.times[1] - closed.times[0] : 0.0;

    stage = "target";
    const Profile u0 = forward_transform(w0, k);
    const Trajectory target = simulate_target(config.spec, u0, config.sim);
    if (config.output.write_fields) {
      writer->write("target_field.csv",
                    [&](std::ostream& o) { write_trajectory_csv(o, target, config.output.field_stride); });
    }

    stage = "norms";
    const double lam = report.lambda_lower;
    const auto add_check = [&](NormCheck c, const NormTrace& trace, double slack) {
      c.bound = verify_theorem_bound(trace, c.constant, lam, c.initial_norm, slack);
      c.fit = try_fit(trace, config.verify.skip_fraction, report.warnings, c.name);
      report.checks.push_back(std::move(c));
      writer->write(norm_trace_filename(trace, report.checks.back().system),
                    [&](std::ostream& o) { write_norm_trace_csv(o, trace); });
    };
    for (std::size_t pi = 0; pi < config.verify.p_list.size(); ++pi) {
      const double p = config.verify.p_list[pi];
      const EnvelopeConstants& env = report.envelopes[pi];
      const std::string ps = stringify(p);
      const auto check = [&](std::string name, std::string system, NormKind kind, double constant,
                             double initial_norm) {
        NormCheck c;
        c.name = std::move(name);
        c.system = std::move(system);
        c.kind = kind;
        c.p = p;
        c.constant = constant;
        c.initial_norm = initial_norm;
        return c;
      };
      add_check(check("closed_loop_lp_p" + ps, "closed_loop", NormKind::lp, env.lp, lp_norm(w0, p)),
                norm_trace(closed, NormKind::lp, p), config.verify.slack);
      add_check(check("closed_loop_w1p_p" + ps, "closed_loop", NormKind::w1p, env.w1p, w1p_norm(w0, p)),
                norm_trace(closed, NormKind::w1p, p), config.verify.slack);
      add_check(check("target_lp_p" + ps, "target", NormKind::lp, 1.0, lp_norm(u0, p)),
                norm_trace(target, NormKind::lp, p), config.verify.target_slack);
      NormCheck w1p_target = check("target_w1p_p" + ps, "target", NormKind::w1p, 1.0, w1p_norm(u0, p));
      w1p_target.gating = false;
      add_check(std::move(w1p_target), norm_trace(target, NormKind::w1p, p), config.verify.target_slack);
    }

    stage = "verify";
    for (double p : config.verify.p_list) {
      if (std::isinf(p)) continue;
      for (double tau : config.verify.tau_list) {
        const NormTrace trace = norm_trace(target, NormKind::alf, p, tau);
        const std::vector<double> envelope = alf_envelope(config.spec, target, p, tau, lam);
        bool ok = true;
        for (std::size_t i = 0; i < trace.values.size(); ++i) {
          ok = ok && trace.values[i] <= config.verify.slack * envelope[i];
        }
        report.pass_flags[fmt::format("target_alf_envelope_p{}_tau{}", stringify(p), tau)] = ok;
        writer->write(norm_trace_filename(trace, "target"),
                      [&](std::ostream& o) { write_norm_trace_csv(o, trace); });
      }
    }

    report.bound_margin = kInfinity;
    bool headline = false;
    for (const auto& c : report.checks) {
      if (c.gating) report.pass_flags[c.name] = c.bound.pass;
      if (c.system == "closed_loop" && c.gating) {
        report.bound_margin = std::min(report.bound_margin, c.bound.margin);
        if (!headline && c.kind == NormKind::lp && c.fit) {
          report.fitted_C = c.fit->C;
          report.fitted_sigma = c.fit->sigma;
          report.fit_residual = c.fit->residual;
          headline = true;
        }
      }
      if (c.system == "target" && c.kind == NormKind::lp && c.fit) {
        report.pass_flags["target_rate_p" + stringify(c.p)] =
            c.fit->sigma >= lam * (1.0 - config.verify.fit_tolerance);
      }
    }

    stage = "report";
    writer->write("report.json", [&](std::ostream& o) { write_report_json(o, report, &*plant); });
    outcome.exit_code = report.all_pass() ? kExitPass : kExitBoundViolation;
    outcome.artifacts = writer->files();
    write_manifest(true);
  } catch (const std::exception& e) {
    outcome.failed_stage = stage;
    outcome.error = e.what();
    outcome.exit_code = exit_code_for(e);
    if (writer) {
      try {
        writer->write("report.json",
                      [&](std::ostream& o) { write_report_json(o, report, plant ? &*plant : nullptr); });
      } catch (const std::exception&) {
        // The manifest below still records the failure.
      }
      outcome.artifacts = writer->files();
    }
    write_manifest(false);
  }
  return outcome;
}

}  // namespace bstab
