// Copyright 2026 The bolzacert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 1 a check failed,
// 2 bad input (parse, validation, domain), 3 solver did not converge.

#ifndef BOLZACERT_CLI_HPP_
#define BOLZACERT_CLI_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bolzacert/catalog.hpp"
#include "bolzacert/cq.hpp"
#include "bolzacert/io.hpp"
#include "bolzacert/optimality.hpp"
#include "bolzacert/solver.hpp"

namespace bolzacert::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNotConverged = 3 };

namespace detail {

namespace fs = std::filesystem;

struct SolverFlags {
  std::optional<std::string> config;
  std::optional<int> grid;
  std::optional<double> rho;
  std::optional<double> growth;
  std::optional<int> outer;
  std::optional<double> inner_tol;
  std::optional<int> inner_max;
  std::optional<double> feas_tol;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "solver configuration JSON");
    cmd->add_option("--grid", grid, "number of grid intervals");
    cmd->add_option("--rho", rho, "initial penalty");
    cmd->add_option("--growth", growth, "penalty growth factor");
    cmd->add_option("--outer", outer, "outer iteration cap");
    cmd->add_option("--inner-tol", inner_tol, "inner stationarity tolerance");
    cmd->add_option("--inner-max", inner_max, "inner step cap");
    cmd->add_option("--feas-tol", feas_tol, "feasibility tolerance");
    cmd->add_option("--seed", seed, "recorded seed");
  }

  SolverConfig resolve() const {
    SolverConfig cfg;
    if (config) cfg = io::config_from_json(io::load_json(*config), cfg, *config);
    if (grid) cfg.grid_N = *grid;
    if (rho) cfg.penalty_rho = *rho;
    if (growth) cfg.penalty_growth = *growth;
    if (outer) cfg.outer_iters = *outer;
    if (inner_tol) cfg.inner_tol = *inner_tol;
    if (inner_max) cfg.inner_max_steps = *inner_max;
    if (feas_tol) cfg.feas_tol = *feas_tol;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

inline ProblemSpec load_problem(const std::string& path) { return io::problem_from_json(io::load_json(path), path); }
inline Trajectory load_trajectory(const std::string& path) {
  return io::trajectory_from_json(io::load_json(path), path);
}

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline std::string fmt(double v) { return bolzacert::detail::fmt_double(v); }

/// Writes JSON to `path` when given; prints it when `print` is set.
inline void emit_json(const io::ordered_json& j, const std::optional<std::string>& path, bool print,
                      std::ostream& out) {
  if (path) io::write_atomic(*path, io::dump(j) + "\n");
  if (print) out << io::dump(j) << "\n";
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string spec;
  SolverFlags solver;
  std::optional<std::string> warm;
  std::string out_dir = ".";
  std::optional<std::string> prefix;
};

inline int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const ProblemSpec P = load_problem(a.spec);
  const SolverConfig cfg = a.solver.resolve();
  std::optional<Trajectory> warm;
  if (a.warm) warm = load_trajectory(*a.warm);

  SolveResult r = [&] {
    try {
      return solve(P, cfg, warm);
    } catch (const IterateDomainError& e) {
      throw ConvergenceError(e.what(), kInf);
    }
  }();

  const fs::path dir(a.out_dir);
  const std::string stem = a.prefix.value_or(fs::path(a.spec).stem().string());
  io::write_atomic(dir / (stem + ".traj.json"), io::dump(io::trajectory_to_json(r.x)) + "\n");
  io::write_atomic(dir / (stem + ".mu.json"), io::dump(io::multipliers_to_json(r.mu, r.s1, r.s2)) + "\n");
  io::write_atomic(dir / (stem + ".history.csv"), io::history_csv(r.history));

  const double vel = r.history.empty() ? 0.0 : r.history.back().velocity_defect;
  const double end = r.history.empty() ? 0.0 : r.history.back().endpoint_defect;
  std::ostringstream line;
  line << (r.converged ? "converged" : "not converged") << " (first-order point): objective " << fmt(r.objective)
       << ", outer " << r.outer_iterations << ", inner " << r.inner_steps << ", stationarity " << fmt(r.stationarity)
       << ", defects " << fmt(vel) << "/" << fmt(end) << ", N " << cfg.grid_N;
  (r.converged ? out : err) << line.str() << "\n";
  return r.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string spec;
  std::string traj;
  std::optional<std::string> mu;
  std::optional<std::vector<double>> s1;
  std::optional<std::vector<double>> s2;
  std::optional<double> kappa;
  int probe_samples = 0;
  double probe_delta = 0.1;
  std::uint64_t probe_seed = 0;
  std::optional<double> tol;
  std::optional<double> el_tol;
  std::optional<double> wp_tol;
  std::optional<double> tr_tol;
  std::optional<double> nc_tol;
  std::optional<double> ep_tol;
  std::optional<double> feas_tol;
  std::optional<std::string> report;
  bool json = false;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream&) {
  const ProblemSpec P = load_problem(a.spec);
  const Trajectory x = load_trajectory(a.traj);
  P.check(x);

  std::optional<io::Multipliers> m;
  if (a.mu) m = io::multipliers_from_json(io::load_json(*a.mu), *a.mu);
  const CellPath mu = m ? m->mu : CellPath::zero(x.grid(), P.n());
  std::optional<Vector> s1 = a.s1 ? std::optional<Vector>(to_vector(*a.s1)) : (m ? m->s1 : std::nullopt);
  std::optional<Vector> s2 = a.s2 ? std::optional<Vector>(to_vector(*a.s2)) : (m ? m->s2 : std::nullopt);

  Tolerances tol = a.tol ? Tolerances::uniform(*a.tol) : Tolerances{};
  if (a.el_tol) tol.el = *a.el_tol;
  if (a.wp_tol) tol.wp = *a.wp_tol;
  if (a.tr_tol) tol.tr = *a.tr_tol;
  if (a.nc_tol) tol.nc = *a.nc_tol;
  if (a.ep_tol) tol.ep = *a.ep_tol;
  if (a.feas_tol) tol.feas = *a.feas_tol;

  std::optional<KappaInput> kappa;
  std::optional<CqProbeResult> probe;
  if (a.kappa) {
    kappa = KappaInput{*a.kappa, "supplied"};
  } else if (a.probe_samples > 0) {
    SolverConfig cfg;
    cfg.feas_tol = tol.feas;
    probe = probe_kappa(P, x, a.probe_samples, a.probe_delta, a.probe_seed, cfg);
    if (probe->kappa_hat) kappa = KappaInput{*probe->kappa_hat, "probed"};
  }

  const CertificateReport rep = certify(P, x, mu, s1, s2, kappa, tol);
  io::ordered_json j = io::report_to_json(rep);
  if (probe) j["probe"] = io::probe_to_json(*probe);
  if (a.json) {
    emit_json(j, a.report, true, out);
  } else {
    emit_json(j, a.report, false, out);
    if (probe) out << "kappa probe: " << probe->summary() << "\n";
    out << render_text(rep);
  }
  return rep.passed() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// probe-cq

struct ProbeArgs {
  std::string spec;
  std::string traj;
  int samples = 50;
  double delta = 0.1;
  std::uint64_t seed = 0;
  SolverFlags solver;
  std::optional<std::string> output;
  bool json = false;
};

inline int cmd_probe(const ProbeArgs& a, std::ostream& out, std::ostream&) {
  const ProblemSpec P = load_problem(a.spec);
  const Trajectory x = load_trajectory(a.traj);
  const CqProbeResult r = probe_kappa(P, x, a.samples, a.delta, a.seed, a.solver.resolve());
  emit_json(io::probe_to_json(r), a.output, a.json, out);
  if (!a.json) {
    out << "kappa_hat: " << r.summary() << "; admitted " << r.samples << ", excluded " << r.excluded << ", dropped "
        << r.dropped << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// check-derivatives

struct DerivArgs {
  std::string spec;
  std::string traj;
  int directions = 20;
  double eps = 1e-5;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::optional<std::string> output;
  bool json = false;
};

inline int cmd_check_derivatives(const DerivArgs& a, std::ostream& out, std::ostream&) {
  const ProblemSpec P = load_problem(a.spec);
  const Trajectory x = load_trajectory(a.traj);
  const DerivativeCheck r = check_derivatives(P, x, a.directions, a.eps, a.seed);
  const bool ok = r.cost_max_rel <= a.tol && r.constraint_max_rel <= a.tol;
  io::ordered_json j;
  j["directions"] = r.directions;
  j["eps"] = r.eps;
  j["seed"] = a.seed;
  j["cost_max_rel_error"] = r.cost_max_rel;
  j["constraint_max_rel_error"] = r.constraint_max_rel;
  j["max_rel_error"] = std::max(r.cost_max_rel, r.constraint_max_rel);
  j["tolerance"] = a.tol;
  j["ok"] = ok;
  emit_json(j, a.output, a.json, out);
  if (!a.json) {
    out << "max relative error " << fmt(std::max(r.cost_max_rel, r.constraint_max_rel)) << " (cost "
        << fmt(r.cost_max_rel) << ", constraint " << fmt(r.constraint_max_rel) << ") over " << r.directions
        << " directions, eps " << fmt(r.eps) << ": " << (ok ? "ok" : "exceeds ") << (ok ? "" : fmt(a.tol)) << "\n";
  }
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// norms

struct NormsArgs {
  std::string traj;
  std::optional<std::string> output;
  bool json = false;
};

inline int cmd_norms(const NormsArgs& a, std::ostream& out, std::ostream&) {
  const Trajectory x = load_trajectory(a.traj);
  const NormEquivalence r = check_norm_equivalence(x);
  io::ordered_json j;
  j["T"] = x.grid().T;
  j["N"] = x.grid().N;
  j["ac"] = r.ac;
  j["one_one"] = r.one_one;
  j["sup"] = r.sup;
  j["lower_bound"] = r.lower_bound;
  j["upper_bound"] = r.upper_bound;
  j["sup_bound"] = r.sup_bound;
  j["trapezoid_slack"] = r.slack;
  j["equivalence_holds"] = r.lower_holds && r.upper_holds;
  j["sup_bound_holds"] = r.sup_holds;
  emit_json(j, a.output, a.json, out);
  if (!a.json) {
    out << "ac = " << fmt(r.ac) << "\none_one = " << fmt(r.one_one) << "\nsup = " << fmt(r.sup) << "\n";
    out << "norm equivalence: one_one/(1+T) = " << fmt(r.lower_bound) << " <= ac = " << fmt(r.ac)
        << " <= (2T+1)/T * one_one = " << fmt(r.upper_bound) << ": "
        << (r.lower_holds && r.upper_holds ? "holds" : "violated") << "\n";
    out << "sup bound: sup = " << fmt(r.sup) << " <= (2+2T)/T * one_one = " << fmt(r.sup_bound) << ": "
        << (r.sup_holds ? "holds" : "violated") << "\n";
  }
  return r.holds() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// catalog

struct CatalogArgs {
  std::optional<std::string> id;
  std::optional<std::string> spec_out;
  std::optional<std::string> traj_out;
  std::optional<std::string> mu_out;
  int grid = 200;
};

inline int cmd_catalog(const CatalogArgs& a, std::ostream& out, std::ostream&) {
  if (!a.id) {
    for (const BenchmarkCase& c : catalog()) out << c.id << "  " << c.title << "  " << c.note << "\n";
    return kOk;
  }
  const BenchmarkCase c = find_case(*a.id);
  if (a.spec_out) io::write_atomic(*a.spec_out, io::dump(io::problem_to_json(c.problem)) + "\n");
  if ((a.traj_out || a.mu_out) && !c.analytic) throw ValidationError("case " + c.id + " has no analytic data");
  const Grid g = c.problem.grid(a.grid);
  if (a.traj_out) io::write_atomic(*a.traj_out, io::dump(io::trajectory_to_json(c.analytic->trajectory(g))) + "\n");
  if (a.mu_out) {
    io::write_atomic(*a.mu_out,
                     io::dump(io::multipliers_to_json(c.analytic->multiplier(g), c.analytic->s1, c.analytic->s2)) + "\n");
  }
  if (!a.spec_out && !a.traj_out && !a.mu_out) out << io::dump(io::problem_to_json(c.problem)) << "\n";
  return kOk;
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Direct-transcription solver and first-order optimality certifier for Bolza problems", "bolzacert"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem spec; writes trajectory, multiplier and history files");
  solve_cmd->add_option("spec", solve_args.spec, "problem spec JSON")->required();
  solve_args.solver.attach(solve_cmd);
  solve_cmd->add_option("--warm", solve_args.warm, "warm-start trajectory JSON");
  solve_cmd->add_option("--out-dir", solve_args.out_dir, "output directory");
  solve_cmd->add_option("--prefix", solve_args.prefix, "output file prefix (default: spec file stem)");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "certify a candidate trajectory");
  verify_cmd->add_option("spec", verify_args.spec, "problem spec JSON")->required();
  verify_cmd->add_option("traj", verify_args.traj, "trajectory JSON")->required();
  verify_cmd->add_option("--mu", verify_args.mu, "multiplier JSON (cell values, optional s1/s2)");
  verify_cmd->add_option("--s1", verify_args.s1, "initial endpoint multiplier")->delimiter(',');
  verify_cmd->add_option("--s2", verify_args.s2, "terminal endpoint multiplier")->delimiter(',');
  verify_cmd->add_option("--kappa", verify_args.kappa, "supplied subregularity modulus");
  verify_cmd->add_option("--probe-samples", verify_args.probe_samples, "estimate kappa by probing when not supplied");
  verify_cmd->add_option("--probe-delta", verify_args.probe_delta, "probe radius");
  verify_cmd->add_option("--probe-seed", verify_args.probe_seed, "probe seed");
  verify_cmd->add_option("--tol", verify_args.tol, "tolerance for every residual condition");
  verify_cmd->add_option("--el-tol", verify_args.el_tol);
  verify_cmd->add_option("--wp-tol", verify_args.wp_tol);
  verify_cmd->add_option("--tr-tol", verify_args.tr_tol);
  verify_cmd->add_option("--nc-tol", verify_args.nc_tol);
  verify_cmd->add_option("--ep-tol", verify_args.ep_tol);
  verify_cmd->add_option("--feas-tol", verify_args.feas_tol);
  verify_cmd->add_option("--report", verify_args.report, "write the JSON report here");
  verify_cmd->add_flag("--json", verify_args.json, "print the JSON report instead of text");

  ProbeArgs probe_args;
  auto* probe_cmd = app.add_subcommand("probe-cq", "sampled lower estimate of the qualification modulus");
  probe_cmd->add_option("spec", probe_args.spec, "problem spec JSON")->required();
  probe_cmd->add_option("traj", probe_args.traj, "feasible base trajectory JSON")->required();
  probe_cmd->add_option("--samples", probe_args.samples);
  probe_cmd->add_option("--delta", probe_args.delta, "perturbation radius in the ac norm");
  probe_cmd->add_option("--seed", probe_args.seed);
  probe_cmd->add_option("--feas-tol", probe_args.solver.feas_tol);
  probe_cmd->add_option("--output", probe_args.output, "write the JSON result here");
  probe_cmd->add_flag("--json", probe_args.json);

  DerivArgs deriv_args;
  auto* deriv_cmd = app.add_subcommand("check-derivatives", "compare analytic derivatives with central differences");
  deriv_cmd->add_option("spec", deriv_args.spec, "problem spec JSON")->required();
  deriv_cmd->add_option("traj", deriv_args.traj, "base trajectory JSON")->required();
  deriv_cmd->add_option("--directions", deriv_args.directions);
  deriv_cmd->add_option("--eps", deriv_args.eps);
  deriv_cmd->add_option("--seed", deriv_args.seed);
  deriv_cmd->add_option("--tol", deriv_args.tol, "relative error limit");
  deriv_cmd->add_option("--output", deriv_args.output, "write the JSON result here");
  deriv_cmd->add_flag("--json", deriv_args.json);

  NormsArgs norms_args;
  auto* norms_cmd = app.add_subcommand("norms", "ac, (1,1) and sup norms with their equivalence checks");
  norms_cmd->add_option("traj", norms_args.traj, "trajectory JSON")->required();
  norms_cmd->add_option("--output", norms_args.output, "write the JSON result here");
  norms_cmd->add_flag("--json", norms_args.json);

  CatalogArgs catalog_args;
  auto* catalog_cmd = app.add_subcommand("catalog", "list or export the built-in benchmark cases");
  catalog_cmd->add_option("id", catalog_args.id, "case id (P1..P4)");
  catalog_cmd->add_option("--spec", catalog_args.spec_out, "write the problem spec JSON here");
  catalog_cmd->add_option("--traj", catalog_args.traj_out, "write the analytic trajectory here");
  catalog_cmd->add_option("--mu", catalog_args.mu_out, "write the analytic multipliers here");
  catalog_cmd->add_option("--grid", catalog_args.grid, "grid intervals for exported arcs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_args, out, err);
    if (*verify_cmd) return cmd_verify(verify_args, out, err);
    if (*probe_cmd) return cmd_probe(probe_args, out, err);
    if (*deriv_cmd) return cmd_check_derivatives(deriv_args, out, err);
    if (*norms_cmd) return cmd_norms(norms_args, out, err);
    if (*catalog_cmd) return cmd_catalog(catalog_args, out, err);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const UnboundedError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace bolzacert::cli

#endif  // BOLZACERT_CLI_HPP_
