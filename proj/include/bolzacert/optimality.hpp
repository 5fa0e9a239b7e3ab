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

#ifndef BOLZACERT_OPTIMALITY_HPP_
#define BOLZACERT_OPTIMALITY_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bolzacert/convex.hpp"
#include "bolzacert/errors.hpp"
#include "bolzacert/funspace.hpp"
#include "bolzacert/problem.hpp"

namespace bolzacert {

/// Discrete adjoint arc: node values p_k and the cell representatives pbar_k
/// that enter the pointwise conditions.
struct AdjointArc {
  Trajectory p;
  CellPath bar;

  /// Node values given; cell representatives are adjacent-node averages.
  static AdjointArc from_nodes(Trajectory p) {
    const Grid& grid = p.grid();
    Matrix bar(grid.N, p.n());
    for (int k = 0; k < grid.N; ++k) bar.row(k) = 0.5 * (p.values().row(k) + p.values().row(k + 1));
    CellPath cells(grid, std::move(bar));
    return {std::move(p), std::move(cells)};
  }

  /// Cell values given; nodes are endpoint-preserving adjacent-cell averages.
  static AdjointArc from_cells(CellPath d) {
    const Grid& grid = d.grid();
    const Matrix& c = d.values();
    Matrix nodes(grid.N + 1, d.n());
    nodes.row(0) = c.row(0);
    nodes.row(grid.N) = c.row(grid.N - 1);
    for (int k = 1; k < grid.N; ++k) nodes.row(k) = 0.5 * (c.row(k - 1) + c.row(k));
    return {Trajectory(grid, std::move(nodes)), std::move(d)};
  }
};

namespace detail {

inline void check_arc(const ProblemSpec& P, const Trajectory& x, const AdjointArc& arc) {
  P.check(x);
  P.check(arc.p, "adjoint arc");
  check_same_grid(x.grid(), arc.p.grid(), "adjoint arc");
  check_same_grid(x.grid(), arc.bar.grid(), "adjoint arc");
}

inline void check_mu(const ProblemSpec& P, const Trajectory& x, const CellPath& mu) {
  P.check(x);
  check_same_grid(x.grid(), mu.grid(), "multiplier");
  if (mu.n() != P.n()) {
    throw ValidationError("multiplier has dimension " + std::to_string(mu.n()) + ", expected " +
                          std::to_string(P.n()));
  }
}

inline ProblemSpec::Running running_at(const ProblemSpec& P, const Trajectory& x, int k) {
  return at_cell(k, [&] { return P.running(x.grid().node(k), x.node(k), x.velocity(k)); });
}

}  // namespace detail

/// p as the AC representative of grad_v theta + mu: d_k = grad_v theta_k + mu_k
/// on cells, averaged to nodes.
inline AdjointArc reconstruct_adjoint(const ProblemSpec& P, const Trajectory& x, const CellPath& mu) {
  detail::check_mu(P, x, mu);
  Matrix d(x.grid().N, P.n());
  for (int k = 0; k < x.grid().N; ++k) d.row(k) = (detail::running_at(P, x, k).grad_v + mu.cell(k)).transpose();
  return AdjointArc::from_cells(CellPath(x.grid(), std::move(d)));
}

/// sum_k h ||(p_{k+1} - p_k)/h - Dg^T pbar_k - grad_x theta_k + Dg^T grad_v theta_k||.
inline double el_residual(const ProblemSpec& P, const Trajectory& x, const AdjointArc& arc) {
  detail::check_arc(P, x, arc);
  const Grid& grid = x.grid();
  const double h = grid.h();
  double total = 0.0;
  for (int k = 0; k < grid.N; ++k) {
    const auto r = detail::running_at(P, x, k);
    Vector res = (arc.p.node(k + 1) - arc.p.node(k)) / h - r.grad_x;
    if (!P.drift_free()) {
      const Matrix DgT = detail::at_cell(k, [&] { return P.drift(grid.node(k), x.node(k)); }).jacobian.transpose();
      res += DgT * (r.grad_v - arc.bar.cell(k));
    }
    total += h * res.norm();
  }
  return total;
}

inline constexpr double kRecessionTol = 1e-8;

struct WeierstrassGap {
  double max = 0.0;
  double l1 = 0.0;
  std::vector<double> per_cell;
  int worst_cell = -1;  // first cell attaining max, -1 on empty grids
};

/// Per cell, sigma_omega1(c_k) - <c_k, w_k> with c_k = pbar_k - grad_v theta_k.
/// w_k is projected onto omega1 first so that feasibility roundoff cannot
/// make a gap negative. An unbounded support gives +inf.
inline WeierstrassGap weierstrass_gap(const ProblemSpec& P, const Trajectory& x, const AdjointArc& arc) {
  detail::check_arc(P, x, arc);
  const ReducedImage f = apply_constraint(P, x);
  const double h = x.grid().h();
  WeierstrassGap out;
  out.per_cell.reserve(static_cast<std::size_t>(x.grid().N));
  for (int k = 0; k < x.grid().N; ++k) {
    const Vector c = arc.bar.cell(k) - detail::running_at(P, x, k).grad_v;
    const double sigma = support(P.omega1(), c, kRecessionTol);
    const double gap = std::isinf(sigma) ? kInf : sigma - c.dot(project(P.omega1(), f.velocity_part.cell(k)));
    out.per_cell.push_back(gap);
    if (out.worst_cell < 0 || gap > out.max) {
      out.max = gap;
      out.worst_cell = k;
    }
    out.l1 += h * gap;
  }
  return out;
}

/// Endpoint multipliers implied by p: s1 = p_0 - grad_x0 phi, s2 = -p_N - grad_xT phi.
inline std::pair<Vector, Vector> transversality_multipliers(const ProblemSpec& P, const Trajectory& x,
                                                            const AdjointArc& arc) {
  detail::check_arc(P, x, arc);
  const auto term = detail::at_endpoints([&] { return P.terminal(x.front(), x.back()); });
  return {arc.p.front() - term.grad_x0, Vector(-arc.p.back() - term.grad_xT)};
}

/// normal_cone_residual(omega2, (x_0, x_N), (p_0, -p_N) - grad phi). Throws
/// InfeasiblePointError when the endpoints are outside omega2.
inline double transversality_residual(const ProblemSpec& P, const Trajectory& x, const AdjointArc& arc,
                                      double feas_tol = kFeasibilityTol) {
  const auto [s1, s2] = transversality_multipliers(P, x, arc);
  return normal_cone_residual(P.omega2(), stack(x.front(), x.back()), stack(s1, s2), feas_tol);
}

/// max_k normal_cone_residual(omega1, P(w_k), mu_k).
inline double mu_membership(const ProblemSpec& P, const Trajectory& x, const CellPath& mu) {
  detail::check_mu(P, x, mu);
  const ReducedImage f = apply_constraint(P, x);
  double out = 0.0;
  for (int k = 0; k < x.grid().N; ++k) {
    const Vector y = project(P.omega1(), f.velocity_part.cell(k));
    out = std::max(out, normal_cone_residual(P.omega1(), y, mu.cell(k), kInf));
  }
  return out;
}

/// max(||p_0 - s1 - grad_x0 phi||, ||p_N + s2 + grad_xT phi||).
inline double endpoint_consistency(const ProblemSpec& P, const Trajectory& x, const AdjointArc& arc,
                                   const Vector& s1, const Vector& s2) {
  const auto [t1, t2] = transversality_multipliers(P, x, arc);
  if (s1.size() != P.n() || s2.size() != P.n()) throw ValidationError("endpoint multipliers must have dimension n");
  return std::max((t1 - s1).norm(), (t2 - s2).norm());
}

struct Tolerances {
  std::optional<double> el;  // default 1e-3 (1 + scale of grad theta)
  double wp = 1e-4;
  double tr = 1e-5;
  double nc = 1e-5;
  double ep = 1e-5;
  double feas = kFeasibilityTol;

  /// Same tolerance for every residual condition; feasibility keeps its own.
  static Tolerances uniform(double tol) {
    Tolerances t;
    t.el = tol;
    t.wp = t.tr = t.nc = t.ep = tol;
    return t;
  }
};

enum class Verdict { pass, fail, skipped };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "skipped";
  }
}

struct ConditionResult {
  std::string tag;  // EL, WP, TR, NC, EP, BOUND, FEAS
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::skipped;
  std::string detail;
};

/// The integrated transversality relation of the classical case (no drift,
/// omega1 the whole space, mu = 0): the telescoped Euler-Lagrange equation
/// gives int grad_x theta + grad_x0 phi + grad_xT phi = -(xi1 + xi2) with
/// (xi1, xi2) normal to omega2 at the endpoints.
struct ClosingCondition {
  Vector value;
  Vector xi1;
  Vector xi2;
  double residual = 0.0;
  std::string text;
};

struct CertificateReport {
  double el_residual_l1 = 0.0;
  double el_tolerance = 0.0;
  double wp_gap_max = 0.0;
  double wp_gap_l1 = 0.0;
  int wp_worst_cell = -1;
  double transversality_residual = 0.0;
  double mu_membership_max = 0.0;
  std::optional<double> endpoint_defect;
  double mu_sup = 0.0;
  double s_norm = 0.0;
  double lambda_norm = 0.0;
  bool s_supplied = false;
  std::optional<double> kappa;
  std::string kappa_source;  // supplied / probed
  double ell = 0.0;
  std::string ell_source;  // declared / estimated
  std::optional<double> kappa_ell_bound;
  std::optional<bool> bound_satisfied;
  FeasibilityResidual feasibility;
  Tolerances tolerances;
  std::vector<ConditionResult> conditions;
  std::optional<ClosingCondition> closing;
  Vector s1;
  Vector s2;

  bool passed() const {
    return std::none_of(conditions.begin(), conditions.end(),
                        [](const ConditionResult& c) { return c.verdict == Verdict::fail; });
  }
  std::set<std::string> failed() const {
    std::set<std::string> out;
    for (const ConditionResult& c : conditions) {
      if (c.verdict == Verdict::fail) out.insert(c.tag);
    }
    return out;
  }
  const ConditionResult& condition(const std::string& tag) const {
    for (const ConditionResult& c : conditions) {
      if (c.tag == tag) return c;
    }
    throw ValidationError("no condition tagged " + tag);
  }
};

struct KappaInput {
  double value = 0.0;
  std::string source = "supplied";
};

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Interval description of -N_S(x) along coordinate i for sets that split by
/// coordinate; nullopt otherwise.
inline std::optional<std::string> negative_normal_interval(const ConvexSet& S, const Vector& x, Eigen::Index i,
                                                           double tol) {
  if (S.get_if<ConvexSet::Reals>()) return "{0}";
  if (S.get_if<ConvexSet::Singleton>()) return "(-inf,inf)";
  if (const auto* box = S.get_if<ConvexSet::Box>()) {
    const bool at_lower = std::isfinite(box->lower(i)) && x(i) - box->lower(i) <= tol;
    const bool at_upper = std::isfinite(box->upper(i)) && box->upper(i) - x(i) <= tol;
    if (at_lower && at_upper) return "(-inf,inf)";
    if (at_lower) return "[0,inf)";
    if (at_upper) return "(-inf,0]";
    return "{0}";
  }
  if (const auto* prod = S.get_if<ConvexSet::Product>()) {
    Eigen::Index offset = 0;
    for (const ConvexSet& f : prod->factors) {
      if (i < offset + f.dim()) return negative_normal_interval(f, x.segment(offset, f.dim()), i - offset, tol);
      offset += f.dim();
    }
  }
  return std::nullopt;
}

inline std::optional<ClosingCondition> closing_condition(const ProblemSpec& P, const Trajectory& x,
                                                         const AdjointArc& arc, const CellPath& mu,
                                                         double tr_residual, double tol) {
  if (!P.drift_free() || !P.omega1().get_if<ConvexSet::Reals>() || !mu.values().isZero(0.0)) return std::nullopt;
  const int n = P.n();
  const double h = x.grid().h();
  ClosingCondition out;
  out.value = Vector::Zero(n);
  for (int k = 0; k < x.grid().N; ++k) out.value += h * running_at(P, x, k).grad_x;
  const auto term = at_endpoints([&] { return P.terminal(x.front(), x.back()); });
  out.value += term.grad_x0 + term.grad_xT;
  std::tie(out.xi1, out.xi2) = transversality_multipliers(P, x, arc);
  out.residual = (out.value + out.xi1 + out.xi2).norm() + tr_residual;
  const Vector e = stack(x.front(), x.back());
  std::ostringstream os;
  os << "int grad_x theta dt + grad phi = (";
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << fmt_double(out.value(i));
  os << ") in -N(x(0)) - N(x(T)) =";
  for (int i = 0; i < n; ++i) {
    const auto a = negative_normal_interval(P.omega2(), e, i, tol);
    const auto b = negative_normal_interval(P.omega2(), e, n + i, tol);
    os << (i ? ";" : "") << " " << a.value_or("-N1") << " + " << b.value_or("-N2");
  }
  os << " (residual " << fmt_double(out.residual) << ")";
  out.text = os.str();
  return out;
}

}  // namespace detail

/// Runs every residual check on a candidate (x, mu, s1, s2). Missing endpoint
/// multipliers are derived from p and the EP check is skipped; a missing kappa
/// skips the multiplier bound.
inline CertificateReport certify(const ProblemSpec& P, const Trajectory& x, const CellPath& mu,
                                 const std::optional<Vector>& s1 = std::nullopt,
                                 const std::optional<Vector>& s2 = std::nullopt,
                                 const std::optional<KappaInput>& kappa = std::nullopt,
                                 const Tolerances& tol = {}) {
  detail::check_mu(P, x, mu);
  if (s1.has_value() != s2.has_value()) throw ValidationError("supply both endpoint multipliers or neither");
  CertificateReport rep;
  rep.tolerances = tol;
  auto add = [&rep](std::string tag, std::string name, double residual, double tolerance, std::string detail = {}) {
    const Verdict v = residual <= tolerance ? Verdict::pass : Verdict::fail;
    rep.conditions.push_back({std::move(tag), std::move(name), residual, tolerance, v, std::move(detail)});
  };

  rep.feasibility = feasibility_residual(P, x);
  add("FEAS", "feasibility", std::max(rep.feasibility.velocity_defect, rep.feasibility.endpoint_defect), tol.feas,
      "velocity " + detail::fmt_double(rep.feasibility.velocity_defect) + ", endpoints " +
          detail::fmt_double(rep.feasibility.endpoint_defect));

  const AdjointArc arc = reconstruct_adjoint(P, x, mu);

  double scale = 0.0;
  for (int k = 0; k < x.grid().N; ++k) {
    const auto r = detail::running_at(P, x, k);
    scale = std::max(scale, r.grad_x.norm() + r.grad_v.norm());
  }
  rep.el_tolerance = tol.el.value_or(1e-3 * (1.0 + scale));
  rep.el_residual_l1 = el_residual(P, x, arc);
  add("EL", "Euler-Lagrange", rep.el_residual_l1, rep.el_tolerance);

  const WeierstrassGap wp = weierstrass_gap(P, x, arc);
  rep.wp_gap_max = wp.max;
  rep.wp_gap_l1 = wp.l1;
  rep.wp_worst_cell = wp.worst_cell;
  add("WP", "Weierstrass-Pontryagin", wp.max, tol.wp,
      "l1 " + detail::fmt_double(wp.l1) +
          (wp.worst_cell >= 0 ? ", worst cell " + std::to_string(wp.worst_cell) : std::string()) +
          (std::isinf(wp.max) ? ", unbounded support" : ""));

  try {
    rep.transversality_residual = transversality_residual(P, x, arc, tol.feas);
    add("TR", "transversality", rep.transversality_residual, tol.tr);
  } catch (const InfeasiblePointError& e) {
    rep.transversality_residual = kInf;
    add("TR", "transversality", kInf, tol.tr, e.what());
  }

  rep.mu_membership_max = mu_membership(P, x, mu);
  add("NC", "normal cone membership", rep.mu_membership_max, tol.nc);

  if (s1) {
    rep.s_supplied = true;
    rep.s1 = *s1;
    rep.s2 = *s2;
    rep.endpoint_defect = endpoint_consistency(P, x, arc, *s1, *s2);
    add("EP", "endpoint multipliers", *rep.endpoint_defect, tol.ep);
  } else {
    std::tie(rep.s1, rep.s2) = transversality_multipliers(P, x, arc);
    rep.conditions.push_back({"EP", "endpoint multipliers", 0.0, tol.ep, Verdict::skipped, "s1, s2 not supplied"});
  }

  for (int k = 0; k < x.grid().N; ++k) rep.mu_sup = std::max(rep.mu_sup, mu.cell(k).norm());
  rep.s_norm = stack(rep.s1, rep.s2).norm();
  rep.lambda_norm = std::max(rep.mu_sup, rep.s_norm);
  if (kappa) {
    const LipschitzEstimate ell = lipschitz_modulus(P, x);
    rep.ell = ell.value;
    rep.ell_source = ell.declared ? "declared" : "estimated";
    rep.kappa = kappa->value;
    rep.kappa_source = kappa->source;
    rep.kappa_ell_bound = kappa->value * ell.value;
    rep.bound_satisfied = rep.lambda_norm <= *rep.kappa_ell_bound;
    rep.conditions.push_back({"BOUND", "multiplier bound", rep.lambda_norm, *rep.kappa_ell_bound,
                              *rep.bound_satisfied ? Verdict::pass : Verdict::fail,
                              "kappa " + detail::fmt_double(kappa->value) + " (" + kappa->source + "), ell " +
                                  detail::fmt_double(ell.value) + " (" + rep.ell_source + ")"});
  } else {
    rep.conditions.push_back({"BOUND", "multiplier bound", rep.lambda_norm, 0.0, Verdict::skipped, "no kappa"});
  }

  rep.closing =
      detail::closing_condition(P, x, arc, mu, std::isfinite(rep.transversality_residual) ? rep.transversality_residual
                                                                                          : 0.0,
                                tol.feas);
  return rep;
}

/// Human-readable report: one line per condition, then the multiplier norms.
inline std::string render_text(const CertificateReport& rep) {
  std::ostringstream os;
  for (const ConditionResult& c : rep.conditions) {
    os << c.tag << " " << c.name << ": " << to_string(c.verdict);
    if (c.verdict != Verdict::skipped || c.tag == "BOUND") {
      os << " (" << (c.tag == "BOUND" ? "lambda " : "residual ") << detail::fmt_double(c.residual);
      if (c.verdict != Verdict::skipped) os << (c.tag == "BOUND" ? " <= kappa*ell " : " <= ") << detail::fmt_double(c.tolerance);
      os << ")";
    }
    if (!c.detail.empty()) os << " [" << c.detail << "]";
    os << "\n";
  }
  os << "lambda norm " << detail::fmt_double(rep.lambda_norm) << " = max(sup |mu| " << detail::fmt_double(rep.mu_sup)
     << ", |(s1, s2)| " << detail::fmt_double(rep.s_norm) << (rep.s_supplied ? ")" : ", derived from p)") << "\n";
  if (rep.closing) os << "closing condition: " << rep.closing->text << "\n";
  os << "verdict: " << (rep.passed() ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace bolzacert

#endif  // BOLZACERT_OPTIMALITY_HPP_
