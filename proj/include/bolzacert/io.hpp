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

// JSON and CSV encodings of problems, sets, arcs, reports and probe results,
// plus atomic file output.

#ifndef BOLZACERT_IO_HPP_
#define BOLZACERT_IO_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bolzacert/convex.hpp"
#include "bolzacert/cq.hpp"
#include "bolzacert/errors.hpp"
#include "bolzacert/funspace.hpp"
#include "bolzacert/optimality.hpp"
#include "bolzacert/problem.hpp"
#include "bolzacert/solver.hpp"

namespace bolzacert::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError(path.string() + ": cannot write file");
    out << content;
    out.flush();
    if (!out) throw ValidationError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError(path.string() + ": cannot rename into place: " + ec.message());
  }
}

/// Parses a JSON document; syntax errors carry the source name and offset.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed JSON: " + e.what(), e.byte);
  }
}

inline json load_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

// ---------------------------------------------------------------------------
// Output formatting

/// Two-space indented JSON that keeps arrays of scalars (vectors, matrix rows)
/// on one line.
inline std::string dump(const ordered_json& j, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object() && !j.empty()) {
    std::string out = "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + ordered_json(key).dump() + ": " + dump(value, depth + 1);
    }
    return out + "\n" + close + "}";
  }
  if (j.is_array() && !j.empty()) {
    const bool flat = std::none_of(j.begin(), j.end(), [](const ordered_json& e) { return e.is_structured(); });
    if (flat) {
      std::string out = "[";
      for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
      return out + "]";
    }
    std::string out = "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ",\n" : "") + pad + dump(j[i], depth + 1);
    return out + "\n" + close + "]";
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Scalars and arrays

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(where + ": unknown field \"" + key + "\"");
  }
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace detail

inline ordered_json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError(where + ": expected a number or \"inf\"/\"-inf\"");
}

inline ordered_json vector_to_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_to_json(v(i)));
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number_from_json(j[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

inline ordered_json matrix_to_json(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

inline Matrix matrix_from_json(const json& j, const std::string& where, std::optional<Eigen::Index> cols = {}) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index width = cols.value_or(rows > 0 && j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0);
  Matrix out(rows, width);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string at = where + "[" + std::to_string(r) + "]";
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], at);
    if (row.size() != width) {
      throw ValidationError(at + ": expected " + std::to_string(width) + " entries, got " + std::to_string(row.size()));
    }
    out.row(r) = row.transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sets

inline ordered_json set_to_json(const ConvexSet& S) {
  ordered_json out;
  out["type"] = S.type_name();
  if (const auto* r = S.get_if<ConvexSet::Reals>()) {
    out["dim"] = r->dim;
    return out;
  }
  if (const auto* b = S.get_if<ConvexSet::Box>()) {
    out["lower"] = vector_to_json(b->lower);
    out["upper"] = vector_to_json(b->upper);
  } else if (const auto* c = S.get_if<ConvexSet::Ball>()) {
    out["center"] = vector_to_json(c->center);
    out["radius"] = c->radius;
  } else if (const auto* p = S.polyhedron_data()) {
    out["A"] = matrix_to_json(p->A);
    out["b"] = vector_to_json(p->b);
  } else if (const auto* s = S.get_if<ConvexSet::Singleton>()) {
    out["point"] = vector_to_json(s->point);
  } else {
    ordered_json factors = ordered_json::array();
    for (const ConvexSet& f : S.get_if<ConvexSet::Product>()->factors) factors.push_back(set_to_json(f));
    out["factors"] = factors;
  }
  return out;
}

inline ConvexSet set_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a set object");
  const json& type = detail::field(j, "type", where);
  if (!type.is_string()) throw ValidationError(where + ": \"type\" must be a string");
  const std::string t = type.get<std::string>();
  if (t == "reals") {
    detail::reject_unknown(j, {"type", "dim"}, where);
    const json& d = detail::field(j, "dim", where);
    if (!d.is_number_integer()) throw ValidationError(where + ": \"dim\" must be an integer");
    return ConvexSet::reals(d.get<int>());
  }
  if (t == "box") {
    detail::reject_unknown(j, {"type", "lower", "upper"}, where);
    return ConvexSet::box(vector_from_json(detail::field(j, "lower", where), where + ".lower"),
                          vector_from_json(detail::field(j, "upper", where), where + ".upper"));
  }
  if (t == "ball") {
    detail::reject_unknown(j, {"type", "center", "radius"}, where);
    return ConvexSet::ball(vector_from_json(detail::field(j, "center", where), where + ".center"),
                           number_from_json(detail::field(j, "radius", where), where + ".radius"));
  }
  if (t == "polyhedron") {
    detail::reject_unknown(j, {"type", "A", "b"}, where);
    return ConvexSet::polyhedron(matrix_from_json(detail::field(j, "A", where), where + ".A"),
                                 vector_from_json(detail::field(j, "b", where), where + ".b"));
  }
  if (t == "singleton") {
    detail::reject_unknown(j, {"type", "point"}, where);
    return ConvexSet::singleton(vector_from_json(detail::field(j, "point", where), where + ".point"));
  }
  if (t == "product") {
    detail::reject_unknown(j, {"type", "factors"}, where);
    const json& fs = detail::field(j, "factors", where);
    if (!fs.is_array()) throw ValidationError(where + ".factors: expected an array");
    std::vector<ConvexSet> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      factors.push_back(set_from_json(fs[i], where + ".factors[" + std::to_string(i) + "]"));
    }
    return ConvexSet::product(std::move(factors));
  }
  throw ValidationError(where + ": unknown set type \"" + t + "\"");
}

// ---------------------------------------------------------------------------
// Problems

inline ordered_json problem_to_json(const ProblemSpec& P) {
  ordered_json out;
  out["version"] = 1;
  out["n"] = P.n();
  out["T"] = P.T();
  out["terminal_cost"] = to_string(P.phi());
  out["running_cost"] = to_string(P.theta());
  ordered_json drift = ordered_json::array();
  for (const Expr& g : P.g()) drift.push_back(to_string(g));
  out["drift"] = drift;
  out["omega1"] = set_to_json(P.omega1());
  out["omega2"] = set_to_json(P.omega2());
  if (P.lipschitz_ell()) out["lipschitz_ell"] = *P.lipschitz_ell();
  return out;
}

inline ProblemSpec problem_from_json(const json& j, const std::string& where = "problem") {
  detail::reject_unknown(
      j, {"version", "n", "T", "terminal_cost", "running_cost", "drift", "omega1", "omega2", "lipschitz_ell"}, where);
  const json& version = detail::field(j, "version", where);
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ValidationError(where + ": unsupported \"version\" (expected 1)");
  }
  const json& n = detail::field(j, "n", where);
  if (!n.is_number_integer()) throw ValidationError(where + ": \"n\" must be an integer");
  auto text = [&](const char* key) {
    const json& v = detail::field(j, key, where);
    if (!v.is_string()) throw ValidationError(where + ": \"" + key + "\" must be an expression string");
    return v.get<std::string>();
  };
  const json& drift = detail::field(j, "drift", where);
  if (!drift.is_array()) throw ValidationError(where + ": \"drift\" must be an array of expression strings");
  std::vector<std::string> g;
  for (const json& d : drift) {
    if (!d.is_string()) throw ValidationError(where + ": \"drift\" entries must be expression strings");
    g.push_back(d.get<std::string>());
  }
  std::optional<double> ell;
  if (j.contains("lipschitz_ell")) ell = number_from_json(j["lipschitz_ell"], where + ".lipschitz_ell");
  return ProblemSpec::parse(n.get<int>(), number_from_json(detail::field(j, "T", where), where + ".T"),
                            text("terminal_cost"), text("running_cost"), g,
                            set_from_json(detail::field(j, "omega1", where), where + ".omega1"),
                            set_from_json(detail::field(j, "omega2", where), where + ".omega2"), ell);
}

// ---------------------------------------------------------------------------
// Arcs

inline ordered_json trajectory_to_json(const Trajectory& x) {
  ordered_json out;
  out["T"] = x.grid().T;
  out["n"] = x.n();
  out["values"] = matrix_to_json(x.values());
  return out;
}

inline Trajectory trajectory_from_json(const json& j, const std::string& where = "trajectory") {
  detail::reject_unknown(j, {"T", "n", "values"}, where);
  const double T = number_from_json(detail::field(j, "T", where), where + ".T");
  const json& n = detail::field(j, "n", where);
  if (!n.is_number_integer() || n.get<int>() <= 0) throw ValidationError(where + ": \"n\" must be a positive integer");
  Matrix values = matrix_from_json(detail::field(j, "values", where), where + ".values", n.get<int>());
  if (values.rows() < 2) throw ValidationError(where + ": need at least two node rows");
  const Grid grid(T, static_cast<int>(values.rows()) - 1);
  return Trajectory(grid, std::move(values));
}

/// Multiplier file: cell values of mu plus optional endpoint multipliers.
struct Multipliers {
  CellPath mu;
  std::optional<Vector> s1;
  std::optional<Vector> s2;
};

inline ordered_json multipliers_to_json(const CellPath& mu, const Vector& s1, const Vector& s2) {
  ordered_json out;
  out["T"] = mu.grid().T;
  out["n"] = mu.n();
  out["values"] = matrix_to_json(mu.values());
  out["s1"] = vector_to_json(s1);
  out["s2"] = vector_to_json(s2);
  return out;
}

inline ordered_json cellpath_to_json(const CellPath& c) {
  ordered_json out;
  out["T"] = c.grid().T;
  out["n"] = c.n();
  out["values"] = matrix_to_json(c.values());
  return out;
}

inline Multipliers multipliers_from_json(const json& j, const std::string& where = "multipliers") {
  detail::reject_unknown(j, {"T", "n", "values", "s1", "s2"}, where);
  const double T = number_from_json(detail::field(j, "T", where), where + ".T");
  const json& n = detail::field(j, "n", where);
  if (!n.is_number_integer() || n.get<int>() <= 0) throw ValidationError(where + ": \"n\" must be a positive integer");
  Matrix values = matrix_from_json(detail::field(j, "values", where), where + ".values", n.get<int>());
  if (values.rows() < 1) throw ValidationError(where + ": need at least one cell row");
  const Grid grid(T, static_cast<int>(values.rows()));
  Multipliers out{CellPath(grid, std::move(values)), {}, {}};
  if (j.contains("s1")) out.s1 = vector_from_json(j["s1"], where + ".s1");
  if (j.contains("s2")) out.s2 = vector_from_json(j["s2"], where + ".s2");
  return out;
}

// ---------------------------------------------------------------------------
// Solver configuration and results

inline SolverConfig config_from_json(const json& j, SolverConfig cfg = {}, const std::string& where = "config") {
  detail::reject_unknown(j,
                         {"grid_N", "penalty_rho", "penalty_growth", "outer_iters", "inner_tol", "inner_max_steps",
                          "feas_tol", "seed"},
                         where);
  auto integer = [&](const char* key, auto& slot) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ValidationError(where + ": \"" + key + "\" must be an integer");
    slot = j[key].get<std::decay_t<decltype(slot)>>();
  };
  auto real = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = number_from_json(j[key], where + "." + key);
  };
  integer("grid_N", cfg.grid_N);
  real("penalty_rho", cfg.penalty_rho);
  real("penalty_growth", cfg.penalty_growth);
  integer("outer_iters", cfg.outer_iters);
  real("inner_tol", cfg.inner_tol);
  integer("inner_max_steps", cfg.inner_max_steps);
  real("feas_tol", cfg.feas_tol);
  integer("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

inline std::string history_csv(const std::vector<OuterRecord>& history) {
  std::ostringstream os;
  os.precision(17);
  os << "outer_iter,objective,velocity_defect,endpoint_defect,rho\n";
  for (const OuterRecord& r : history) {
    os << r.outer_iter << "," << r.objective << "," << r.velocity_defect << "," << r.endpoint_defect << "," << r.rho
       << "\n";
  }
  return os.str();
}

inline ordered_json solve_summary_to_json(const SolveResult& r) {
  ordered_json out;
  out["converged"] = r.converged;
  out["label"] = "first-order point";
  out["objective"] = r.objective;
  out["outer_iterations"] = r.outer_iterations;
  out["inner_steps"] = r.inner_steps;
  out["stationarity"] = r.stationarity;
  if (!r.history.empty()) {
    out["velocity_defect"] = r.history.back().velocity_defect;
    out["endpoint_defect"] = r.history.back().endpoint_defect;
    out["rho"] = r.history.back().rho;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline ordered_json report_to_json(const CertificateReport& rep) {
  auto num = [](double v) { return number_to_json(v); };
  ordered_json out;
  out["verdict"] = rep.passed() ? "pass" : "fail";
  out["el_residual_l1"] = num(rep.el_residual_l1);
  out["wp_gap_max"] = num(rep.wp_gap_max);
  out["wp_gap_l1"] = num(rep.wp_gap_l1);
  out["wp_worst_cell"] = rep.wp_worst_cell;
  out["transversality_residual"] = num(rep.transversality_residual);
  out["mu_membership_max"] = num(rep.mu_membership_max);
  out["endpoint_defect"] = rep.endpoint_defect ? num(*rep.endpoint_defect) : ordered_json(nullptr);
  ordered_json lam;
  lam["lambda_norm"] = num(rep.lambda_norm);
  lam["mu_sup"] = num(rep.mu_sup);
  lam["s_norm"] = num(rep.s_norm);
  lam["s_source"] = rep.s_supplied ? "supplied" : "derived";
  lam["s1"] = vector_to_json(rep.s1);
  lam["s2"] = vector_to_json(rep.s2);
  lam["kappa"] = rep.kappa ? num(*rep.kappa) : ordered_json(nullptr);
  lam["kappa_source"] = rep.kappa ? ordered_json(rep.kappa_source) : ordered_json(nullptr);
  lam["ell"] = rep.kappa ? num(rep.ell) : ordered_json(nullptr);
  lam["ell_source"] = rep.kappa ? ordered_json(rep.ell_source) : ordered_json(nullptr);
  lam["kappa_ell_bound"] = rep.kappa_ell_bound ? num(*rep.kappa_ell_bound) : ordered_json(nullptr);
  lam["bound_satisfied"] = rep.bound_satisfied ? ordered_json(*rep.bound_satisfied) : ordered_json(nullptr);
  out["multipliers"] = lam;
  ordered_json feas;
  feas["velocity_defect"] = num(rep.feasibility.velocity_defect);
  feas["endpoint_defect"] = num(rep.feasibility.endpoint_defect);
  out["feasibility"] = feas;
  ordered_json tol;
  tol["el"] = num(rep.el_tolerance);
  tol["wp"] = num(rep.tolerances.wp);
  tol["tr"] = num(rep.tolerances.tr);
  tol["nc"] = num(rep.tolerances.nc);
  tol["ep"] = num(rep.tolerances.ep);
  tol["feas"] = num(rep.tolerances.feas);
  out["tolerances"] = tol;
  ordered_json conds = ordered_json::array();
  for (const ConditionResult& c : rep.conditions) {
    ordered_json e;
    e["tag"] = c.tag;
    e["name"] = c.name;
    e["residual"] = num(c.residual);
    e["tolerance"] = num(c.tolerance);
    e["verdict"] = to_string(c.verdict);
    e["detail"] = c.detail;
    conds.push_back(e);
  }
  out["conditions"] = conds;
  if (rep.closing) {
    ordered_json cl;
    cl["value"] = vector_to_json(rep.closing->value);
    cl["xi1"] = vector_to_json(rep.closing->xi1);
    cl["xi2"] = vector_to_json(rep.closing->xi2);
    cl["residual"] = num(rep.closing->residual);
    cl["text"] = rep.closing->text;
    out["closing_condition"] = cl;
  }
  return out;
}

inline ordered_json probe_to_json(const CqProbeResult& r) {
  ordered_json out;
  out["kappa_hat"] = r.kappa_hat ? ordered_json(*r.kappa_hat) : ordered_json(nullptr);
  out["caveat"] = CqProbeResult::kCaveat;
  out["summary"] = r.summary();
  out["samples"] = r.samples;
  out["excluded"] = r.excluded;
  out["dropped"] = r.dropped;
  out["delta"] = r.delta;
  out["seed"] = r.seed;
  ordered_json recs = ordered_json::array();
  for (const CqSample& s : r.records) {
    ordered_json e;
    e["perturbation_norm"] = s.perturbation_norm;
    e["lhs"] = s.lhs;
    e["rhs"] = s.rhs;
    e["ratio"] = s.ratio;
    e["status"] = s.status == CqSample::Status::admitted   ? "admitted"
                  : s.status == CqSample::Status::excluded ? "excluded"
                                                           : "dropped";
    recs.push_back(e);
  }
  out["records"] = recs;
  return out;
}

}  // namespace bolzacert::io

#endif  // BOLZACERT_IO_HPP_
