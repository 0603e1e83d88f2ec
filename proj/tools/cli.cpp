#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "bstab/artifacts.hpp"
#include "bstab/errors.hpp"
#include "bstab/scenario.hpp"

namespace bstab::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::string p_list;
  int refine = 1;
  std::string system = "closed";
  double oracle_tolerance = 1e-6;
  int oracle_terms = 25;
};

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

/// Loads the scenario (or defaults) and applies the command-line overrides.
ScenarioConfig load(const Options& opt) {
  ScenarioConfig cfg = opt.config.empty() ? ScenarioConfig{} : load_scenario(opt.config);
  apply_refinement(cfg, opt.refine);
  if (!opt.p_list.empty()) {
    cfg.verify.p_list = parse_real_list(opt.p_list);
    if (cfg.verify.p_list.empty()) throw ConfigError("--p: empty list");
    for (double p : cfg.verify.p_list) {
      if (!(p >= 1.0)) throw ConfigError(fmt::format("--p: {} is below 1", p));
    }
  }
  if (!opt.out.empty()) cfg.output.dir = opt.out;
  return cfg;
}

int kernel_n_xi(const ScenarioConfig& cfg) {
  return cfg.kernel.n_xi > 0 ? cfg.kernel.n_xi : 2 * (cfg.sim.grid_m - 1) + 1;
}

/// Runs `body` with stage tracking; failures are reported with the stage and the run
/// parameters, flushed to a MANIFEST, and mapped to an exit code.
template <class Body>
int guarded(const std::string& label, const std::string& out_dir, const std::string& params, Body&& body) {
  std::optional<ArtifactWriter> writer;
  std::string stage = "output";
  try {
    writer.emplace(out_dir);
    const int code = body(*writer, stage);
    writer->write_manifest(label, true);
    return code;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("bstab {}: stage '{}' failed ({}): {}\n", label, stage, params, e.what());
    if (writer) writer->write_manifest(label, false, stage, e.what());
    return exit_code_for(e);
  }
}

json residual_json(const ResidualReport& r) {
  return {{"spacing", number(r.spacing)},       {"interior", number(r.interior)},
          {"diagonal", number(r.diagonal)},     {"neumann", number(r.neumann)},
          {"neumann_fd", number(r.neumann_fd)}, {"corner", number(r.corner)}};
}

json kernel_json(const KernelGrid& k, const GoursatProblem& problem) {
  const double h = k.xy_spacing();
  const ResidualOptions common{4.0 * h};
  double max_excess = 0.0;
  for (double e : k.bound_excess_history) max_excess = std::max(max_excess, e);
  return {{"orientation", to_string(k.orientation)},
          {"n_xi", k.n_xi},
          {"iterations", k.iterations_used},
          {"final_increment", number(k.final_increment)},
          {"stop_reason", to_string(k.stop_reason)},
          {"bound_M", number(k.bound_M)},
          {"max_bound_excess", number(max_excess)},
          {"extrapolated", k.extrapolated},
          {"richardson_correction", number(k.richardson_correction)},
          {"residual", residual_json(residual(k, problem, 2.0 * h, common))},
          {"residual_coarse", residual_json(residual(k, problem, 4.0 * h, common))}};
}

int cmd_kernel(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  const int n_xi = kernel_n_xi(cfg);
  const auto params = fmt::format("n_xi={}, tol={}, max_iter={}, richardson={}", n_xi, cfg.kernel.tol,
                                  cfg.kernel.max_iter, cfg.kernel.richardson);
  return guarded("kernel", cfg.output.dir, params, [&](ArtifactWriter& out, std::string& stage) {
    stage = "validate";
    require_valid(cfg.spec);
    PicardOptions popt;
    popt.richardson = cfg.kernel.richardson;
    stage = "kernel";
    const KernelGrid k = solve_kernel(cfg.spec, n_xi, cfg.kernel.tol, cfg.kernel.max_iter, popt);
    stage = "inverse_kernel";
    const KernelGrid l = solve_inverse_kernel(cfg.spec, n_xi, cfg.kernel.tol, cfg.kernel.max_iter, popt);
    stage = "write";
    out.write("kernel.csv", [&](std::ostream& o) { write_kernel_csv(o, k, l); });
    out.write("kernel_convergence.csv", [&](std::ostream& o) {
      o << "orientation,iteration,increment,bound_excess\n";
      for (const KernelGrid* g : {&k, &l}) {
        for (std::size_t n = 0; n < g->increment_history.size(); ++n) {
          const double excess = n < g->bound_excess_history.size() ? g->bound_excess_history[n] : 0.0;
          o << fmt::format("{},{},{:.17g},{:.17g}\n", to_string(g->orientation), n, g->increment_history[n],
                           excess);
        }
      }
    });
    stage = "diagnostics";
    const json jk = kernel_json(k, GoursatProblem::from_spec(cfg.spec, Orientation::direct));
    const json jl = kernel_json(l, GoursatProblem::from_spec(cfg.spec, Orientation::inverse));
    const KernelConstants kc = kernel_constants(k, l);
    json report = {{"scenario", cfg.name},
                   {"kernel", jk},
                   {"inverse_kernel", jl},
                   {"constants",
                    {{"alpha1", kc.alpha1},
                     {"alpha2", kc.alpha2},
                     {"alpha3", kc.alpha3},
                     {"beta1", kc.beta1},
                     {"beta2", kc.beta2},
                     {"beta3", kc.beta3}}}};
    const bool certified = jk["max_bound_excess"] == 0.0 && jl["max_bound_excess"] == 0.0;
    report["pass"] = certified;
    out.write("report.json", [&](std::ostream& o) { o << report.dump(2) << "\n"; });
    std::cout << fmt::format("kernel: n_xi={} iterations={}/{} residual={:.3e} certified={}\n", n_xi,
                             k.iterations_used, l.iterations_used,
                             jk["residual"]["interior"].get<double>(), certified);
    return certified ? kExitPass : kExitBoundViolation;
  });
}

int cmd_simulate(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  if (opt.system != "closed" && opt.system != "target" && opt.system != "open") {
    std::cerr << "bstab simulate: --system must be closed, target or open\n";
    return kExitConfig;
  }
  const auto params = fmt::format("system={}, grid_m={}, dt={}, t_end={}", opt.system, cfg.sim.grid_m,
                                  cfg.sim.dt, cfg.sim.t_end);
  return guarded("simulate", cfg.output.dir, params, [&](ArtifactWriter& out, std::string& stage) {
    stage = "validate";
    require_valid(cfg.spec);
    Profile w0 = make_initial_profile(cfg.initial, cfg.sim.grid_m);
    json report = {{"scenario", cfg.name}, {"system", opt.system}};
    Trajectory traj;
    if (opt.system == "closed") {
      stage = "kernel";
      const Plant plant = prepare_plant(cfg.spec, cfg.kernel, cfg.sim.grid_m);
      const SampledKernel k(plant.k, cfg.sim.grid_m);
      if (cfg.initial.compatible) w0 = make_compatible(w0, k);
      const CompatibilityReport compat = check_compatibility(w0, k, cfg.verify.compat_tol);
      report["compatibility"] = {
          {"ok", compat.ok}, {"left", number(compat.left)}, {"right", number(compat.right)}};
      stage = "simulate";
      traj = simulate_closed_loop(cfg.spec, k, w0, cfg.sim);
    } else if (opt.system == "target") {
      stage = "simulate";
      traj = simulate_target(cfg.spec, w0, cfg.sim);
    } else {
      stage = "simulate";
      traj = simulate_open_loop(cfg.spec, w0, cfg.sim);
    }
    stage = "write";
    const std::string prefix = opt.system == "closed" ? "closed_loop" : opt.system == "target" ? "target"
                                                                                             : "open_loop";
    out.write(prefix + "_field.csv",
              [&](std::ostream& o) { write_trajectory_csv(o, traj, cfg.output.field_stride); });
    if (!traj.controls.empty()) {
      out.write(prefix + "_controls.csv", [&](std::ostream& o) { write_controls_csv(o, traj); });
    }
    stage = "norms";
    json norms = json::array();
    for (double p : cfg.verify.p_list) {
      for (NormKind kind : {NormKind::lp, NormKind::w1p}) {
        const NormTrace trace = norm_trace(traj, kind, p);
        out.write(norm_trace_filename(trace, prefix), [&](std::ostream& o) { write_norm_trace_csv(o, trace); });
        json entry = {{"kind", to_string(kind)},
                      {"p", number(p)},
                      {"initial", number(trace.values.front())},
                      {"final", number(trace.values.back())}};
        try {
          const DecayFit fit = fit_decay_rate(trace, cfg.verify.skip_fraction);
          entry["fit"] = {{"C", number(fit.C)}, {"sigma", number(fit.sigma)}, {"residual", number(fit.residual)}};
        } catch (const FitError& e) {
          entry["fit_error"] = e.what();
        }
        norms.push_back(std::move(entry));
      }
    }
    report["norms"] = norms;
    report["warnings"] = traj.warnings;
    report["recorded_times"] = traj.times.size();
    out.write("report.json", [&](std::ostream& o) { o << report.dump(2) << "\n"; });
    for (const auto& w : traj.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << fmt::format("simulate: system={} frames={} written to {}\n", opt.system, traj.times.size(),
                             cfg.output.dir);
    return kExitPass;
  });
}

int cmd_verify(const Options& opt) {
  const ScenarioConfig cfg = load(opt);
  const ScenarioOutcome outcome = run_scenario(cfg);
  if (!outcome.failed_stage.empty()) {
    std::cerr << fmt::format("bstab verify: stage '{}' failed (grid_m={}, dt={}, n_xi={}): {}\n",
                             outcome.failed_stage, cfg.sim.grid_m, cfg.sim.dt, kernel_n_xi(cfg), outcome.error);
    return outcome.exit_code;
  }
  const DecayReport& r = outcome.report;
  for (const auto& [name, pass] : r.pass_flags) std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << fmt::format("verify: lambda_lower={:.6g} fitted_sigma={:.6g} bound_margin={:.4g} -> {}\n",
                           r.lambda_lower, r.fitted_sigma, r.bound_margin, r.all_pass() ? "pass" : "FAIL");
  return outcome.exit_code;
}

/// Series-vs-Picard table for f = 0, c1 = r x^2.
int cmd_oracle(const Options& opt) {
  ScenarioConfig cfg;
  if (opt.config.empty()) {
    cfg.spec.lambda0 = 10.0;
    cfg.spec.family.c1 = Polynomial({0.0, 0.0, 2.0});
    cfg.kernel.n_xi = 201;
    cfg.output.dir = "out/oracle";
  } else {
    cfg = load_scenario(opt.config);
  }
  apply_refinement(cfg, opt.refine);
  if (!opt.out.empty()) cfg.output.dir = opt.out;
  const auto c = cfg.spec.family.c1.coefficients();
  const double r = c.size() > 2 ? c[2] : 0.0;
  if (!cfg.spec.family.f.is_zero() || cfg.spec.family.c1.degree() > 2 || (c.size() > 1 && c[1] != 0.0)) {
    std::cerr << "bstab oracle: the series oracle needs f = 0 and c1 = c0 + r x^2\n";
    return kExitConfig;
  }
  const int n_xi = kernel_n_xi(cfg);
  if ((n_xi - 1) % 4 != 0) {
    std::cerr << "bstab oracle: n_xi - 1 must be divisible by 4 to build the coarser levels\n";
    return kExitConfig;
  }
  const auto params = fmt::format("lambda0={}, r={}, n_xi={}, terms={}", cfg.spec.lambda0, r, n_xi, opt.oracle_terms);
  return guarded("oracle", cfg.output.dir, params, [&](ArtifactWriter& out, std::string& stage) {
    GoursatProblem problem;
    problem.c1 = Polynomial({0.0, 0.0, r});
    problem.lambda0 = cfg.spec.lambda0;
    const SeriesCoefficients coeffs = series_coefficients(opt.oracle_terms, r);
    struct Row {
      int n_xi;
      bool richardson;
      int iterations;
      double error;
      double seconds;
    };
    std::vector<Row> rows;
    for (bool richardson : {false, true}) {
      for (int level : {(n_xi - 1) / 4 + 1, (n_xi - 1) / 2 + 1, n_xi}) {
        if (level < 33) continue;
        stage = fmt::format("picard n_xi={} richardson={}", level, richardson);
        PicardOptions popt;
        popt.richardson = richardson;
        const auto t0 = std::chrono::steady_clock::now();
        const KernelGrid k = picard_solve(problem, level, cfg.kernel.tol, cfg.kernel.max_iter, popt);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const ChartLattice& lat = k.values_xieta.lattice;
        double err = 0.0;
        for (int j = 0; j < lat.rows(); ++j) {
          for (int i = lat.row_first(j); i <= lat.row_last(j); ++i) {
            const double exact = series_oracle(coeffs, problem.lambda0, lat.xi(i), lat.eta(j), opt.oracle_terms);
            err = std::max(err, std::abs(k.values_xieta(i, j) - exact));
          }
        }
        rows.push_back({level, richardson, k.iterations_used, err, seconds});
      }
    }
    stage = "write";
    out.write("oracle.csv", [&](std::ostream& o) {
      o << "n_xi,richardson,iterations,sup_error,ratio,seconds\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool has_prev = i > 0 && rows[i - 1].richardson == rows[i].richardson;
        const double ratio = has_prev ? rows[i - 1].error / rows[i].error : std::nan("");
        o << fmt::format("{},{},{},{:.6e},{:.4f},{:.3f}\n", rows[i].n_xi, rows[i].richardson ? 1 : 0,
                         rows[i].iterations, rows[i].error, ratio, rows[i].seconds);
      }
    });
    const double tail = series_tail_bound(problem.lambda0, r, 2.0, 0.0, opt.oracle_terms);
    const bool pass = rows.back().error <= opt.oracle_tolerance;
    json report = {{"lambda0", problem.lambda0},
                   {"r", r},
                   {"terms", opt.oracle_terms},
                   {"series_tail_bound", number(tail)},
                   {"tolerance", opt.oracle_tolerance},
                   {"finest_error", number(rows.back().error)},
                   {"pass", pass}};
    out.write("report.json", [&](std::ostream& o) { o << report.dump(2) << "\n"; });
    std::cout << "n_xi  richardson  iterations  sup_error     seconds\n";
    for (const auto& row : rows) {
      std::cout << fmt::format("{:<5} {:<11} {:<11} {:<13.4e} {:.3f}\n", row.n_xi, row.richardson ? "yes" : "no",
                               row.iterations, row.error, row.seconds);
    }
    return pass ? kExitPass : kExitBoundViolation;
  });
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Boundary stabilization of reaction-diffusion PDEs: kernels, simulation, certified decay"};
  app.require_subcommand(1);
  Options opt;
  const auto common = [&opt](CLI::App* sub, bool config_required) {
    auto* config = sub->add_option("--config", opt.config, "Scenario INI file");
    if (config_required) config->required();
    config->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    sub->add_option("--refine", opt.refine, "Divide grid spacings and time step by this factor")
        ->check(CLI::PositiveNumber);
  };
  auto* kernel = app.add_subcommand("kernel", "Solve the direct and inverse kernels, dump them with residuals");
  common(kernel, true);
  auto* simulate = app.add_subcommand("simulate", "Simulate one system and dump its trajectory");
  common(simulate, true);
  simulate->add_option("--system", opt.system, "closed, target or open")
      ->check(CLI::IsMember({"closed", "target", "open"}));
  simulate->add_option("--p", opt.p_list, "Norm exponents, e.g. 1,2,inf");
  auto* verify = app.add_subcommand("verify", "Run the full scenario pipeline and check the decay bounds");
  common(verify, true);
  verify->add_option("--p", opt.p_list, "Norm exponents, e.g. 1,2,inf");
  auto* oracle = app.add_subcommand("oracle", "Compare Picard kernels with the closed-form series");
  common(oracle, false);
  oracle->add_option("--tolerance", opt.oracle_tolerance, "Pass threshold on the finest sup error");
  oracle->add_option("--terms", opt.oracle_terms, "Series truncation order")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  try {
    if (kernel->parsed()) return cmd_kernel(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (verify->parsed()) return cmd_verify(opt);
    return cmd_oracle(opt);
  } catch (const std::exception& e) {
    std::cerr << "bstab: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace bstab::cli
