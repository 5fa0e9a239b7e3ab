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

#ifndef BOLZACERT_PROBLEM_HPP_
#define BOLZACERT_PROBLEM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bolzacert/convex.hpp"
#include "bolzacert/errors.hpp"
#include "bolzacert/expr.hpp"
#include "bolzacert/funspace.hpp"

namespace bolzacert {

namespace detail {

inline void check_expr(const Expr& e, int n, Profile profile, const std::string& what) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return;
    case Expr::Kind::Var: {
      const Variable& v = e.var();
      if (!allowed_in(v.kind, profile)) {
        throw ValidationError(what + ": variable " + v.name() + " is not allowed here");
      }
      if (v.kind != Variable::Kind::Time && (v.index < 0 || v.index >= n)) {
        throw ValidationError(what + ": variable " + v.name() + " exceeds dimension " + std::to_string(n));
      }
      return;
    }
    case Expr::Kind::Unary:
      check_expr(e.arg(), n, profile, what);
      return;
    case Expr::Kind::Binary:
      check_expr(e.lhs(), n, profile, what);
      check_expr(e.rhs(), n, profile, what);
      return;
  }
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

/// The problem data: minimize phi(x(0), x(T)) + int theta(t, x, x') dt subject
/// to x' + g(t, x) in omega1 a.e. and (x(0), x(T)) in omega2.
class ProblemSpec {
 public:
  ProblemSpec(int n, double T, Expr phi, Expr theta, std::vector<Expr> g, ConvexSet omega1,
              ConvexSet omega2, std::optional<double> lipschitz_ell = std::nullopt)
      : n_(n),
        T_(T),
        phi_(std::move(phi)),
        theta_(std::move(theta)),
        g_(std::move(g)),
        omega1_(std::move(omega1)),
        omega2_(std::move(omega2)),
        ell_(lipschitz_ell) {
    if (n_ <= 0) throw ValidationError("problem: n must be positive");
    if (!(T_ > 0.0) || !std::isfinite(T_)) throw ValidationError("problem: T must be positive and finite");
    if (static_cast<int>(g_.size()) != n_) {
      throw ValidationError("problem: drift needs " + std::to_string(n_) + " components, got " +
                            std::to_string(g_.size()));
    }
    if (omega1_.dim() != n_) throw ValidationError("problem: omega1 must have dimension n");
    if (omega2_.dim() != 2 * n_) throw ValidationError("problem: omega2 must have dimension 2n");
    if (ell_ && !(*ell_ > 0.0 && std::isfinite(*ell_))) {
      throw ValidationError("problem: lipschitz_ell must be positive");
    }
    detail::check_expr(phi_, n_, Profile::TerminalCost, "terminal_cost");
    detail::check_expr(theta_, n_, Profile::RunningCost, "running_cost");
    for (int i = 0; i < n_; ++i) detail::check_expr(g_[i], n_, Profile::Drift, "drift[" + std::to_string(i) + "]");

    for (int i = 0; i < n_; ++i) {
      dtheta_dx_.push_back(diff(theta_, Variable::state(i)));
      dtheta_dv_.push_back(diff(theta_, Variable::velocity(i)));
      dphi_dx0_.push_back(diff(phi_, Variable::initial(i)));
      dphi_dxT_.push_back(diff(phi_, Variable::terminal(i)));
    }
    dg_dx_.resize(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) dg_dx_[static_cast<std::size_t>(i * n_ + j)] = diff(g_[i], Variable::state(j));
    }
    drift_free_ = std::all_of(g_.begin(), g_.end(), [](const Expr& e) { return e.is_constant(0.0); });
  }

  /// Builds a problem from expression text.
  static ProblemSpec parse(int n, double T, std::string_view phi, std::string_view theta,
                           const std::vector<std::string>& g, ConvexSet omega1, ConvexSet omega2,
                           std::optional<double> lipschitz_ell = std::nullopt) {
    std::vector<Expr> drift;
    for (const std::string& gi : g) drift.push_back(bolzacert::parse(gi, n, Profile::Drift));
    return ProblemSpec(n, T, bolzacert::parse(phi, n, Profile::TerminalCost),
                       bolzacert::parse(theta, n, Profile::RunningCost), std::move(drift), std::move(omega1),
                       std::move(omega2), lipschitz_ell);
  }

  int n() const { return n_; }
  double T() const { return T_; }
  const Expr& phi() const { return phi_; }
  const Expr& theta() const { return theta_; }
  const std::vector<Expr>& g() const { return g_; }
  const ConvexSet& omega1() const { return omega1_; }
  const ConvexSet& omega2() const { return omega2_; }
  const std::optional<double>& lipschitz_ell() const { return ell_; }
  bool drift_free() const { return drift_free_; }

  Grid grid(int N) const { return Grid(T_, N); }

  /// Throws ValidationError unless x lives on a grid over [0, T] in R^n.
  void check(const Trajectory& x, const char* what = "trajectory") const {
    if (x.n() != n_) {
      throw ValidationError(std::string(what) + ": dimension " + std::to_string(x.n()) + " does not match n = " +
                            std::to_string(n_));
    }
    if (std::abs(x.grid().T - T_) > 1e-12 * std::max(1.0, T_)) {
      throw ValidationError(std::string(what) + ": horizon " + std::to_string(x.grid().T) +
                            " does not match T = " + std::to_string(T_));
    }
  }

  // Pointwise data -----------------------------------------------------------

  struct Running {
    double value = 0.0;
    Vector grad_x;
    Vector grad_v;
  };
  struct Drift {
    Vector value;
    Matrix jacobian;  // d g_i / d x_j
  };
  struct Terminal {
    double value = 0.0;
    Vector grad_x0;
    Vector grad_xT;
  };

  Running running(double t, const Vector& x, const Vector& v) const {
    Env env{.t = t, .x = detail::as_span(x), .v = detail::as_span(v)};
    Running out{eval(theta_, env), Vector(n_), Vector(n_)};
    for (int i = 0; i < n_; ++i) {
      out.grad_x(i) = eval(dtheta_dx_[i], env);
      out.grad_v(i) = eval(dtheta_dv_[i], env);
    }
    return out;
  }

  Drift drift(double t, const Vector& x) const {
    Drift out{Vector::Zero(n_), Matrix::Zero(n_, n_)};
    if (drift_free_) return out;
    Env env{.t = t, .x = detail::as_span(x)};
    for (int i = 0; i < n_; ++i) {
      out.value(i) = eval(g_[i], env);
      for (int j = 0; j < n_; ++j) out.jacobian(i, j) = eval(dg_dx_[static_cast<std::size_t>(i * n_ + j)], env);
    }
    return out;
  }

  Vector drift_value(double t, const Vector& x) const {
    Vector out = Vector::Zero(n_);
    if (drift_free_) return out;
    Env env{.t = t, .x = detail::as_span(x)};
    for (int i = 0; i < n_; ++i) out(i) = eval(g_[i], env);
    return out;
  }

  double running_value(double t, const Vector& x, const Vector& v) const {
    return eval(theta_, Env{.t = t, .x = detail::as_span(x), .v = detail::as_span(v)});
  }

  double terminal_value(const Vector& x0, const Vector& xT) const {
    return eval(phi_, Env{.x0 = detail::as_span(x0), .xT = detail::as_span(xT)});
  }

  Terminal terminal(const Vector& x0, const Vector& xT) const {
    Env env{.x0 = detail::as_span(x0), .xT = detail::as_span(xT)};
    Terminal out{eval(phi_, env), Vector(n_), Vector(n_)};
    for (int i = 0; i < n_; ++i) {
      out.grad_x0(i) = eval(dphi_dx0_[i], env);
      out.grad_xT(i) = eval(dphi_dxT_[i], env);
    }
    return out;
  }

 private:
  int n_;
  double T_;
  Expr phi_;
  Expr theta_;
  std::vector<Expr> g_;
  ConvexSet omega1_;
  ConvexSet omega2_;
  std::optional<double> ell_;
  bool drift_free_ = false;
  std::vector<Expr> dtheta_dx_, dtheta_dv_, dphi_dx0_, dphi_dxT_, dg_dx_;
};

namespace detail {

/// Runs f(k) and prefixes any DomainError with the cell index.
template <typename F>
auto at_cell(int k, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError("cell " + std::to_string(k) + ": " + e.what());
  }
}

template <typename F>
auto at_endpoints(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(std::string("endpoints: ") + e.what());
  }
}

}  // namespace detail

/// J(x) = phi(x_0, x_N) + sum_k h theta(t_k, x_k, v_k).
inline double evaluate_cost(const ProblemSpec& P, const Trajectory& x) {
  P.check(x);
  const Grid& grid = x.grid();
  const double h = grid.h();
  double total = detail::at_endpoints([&] { return P.terminal_value(x.front(), x.back()); });
  for (int k = 0; k < grid.N; ++k) {
    total += h * detail::at_cell(k, [&] { return P.running_value(grid.node(k), x.node(k), x.velocity(k)); });
  }
  return total;
}

/// Directional derivative of J at x along u.
inline double gateaux_J(const ProblemSpec& P, const Trajectory& x, const Trajectory& u) {
  P.check(x);
  P.check(u, "direction");
  detail::check_same_grid(x.grid(), u.grid(), "gateaux_J");
  const Grid& grid = x.grid();
  const double h = grid.h();
  const auto term = detail::at_endpoints([&] { return P.terminal(x.front(), x.back()); });
  double total = term.grad_x0.dot(u.front()) + term.grad_xT.dot(u.back());
  for (int k = 0; k < grid.N; ++k) {
    const auto r = detail::at_cell(k, [&] { return P.running(grid.node(k), x.node(k), x.velocity(k)); });
    total += h * (r.grad_x.dot(u.node(k)) + r.grad_v.dot(u.velocity(k)));
  }
  return total;
}

/// Derivative of J in (x(0), x') coordinates: dJ(x)(u) = <initial, u(0)> +
/// sum_k h <velocity_k, u'_k>. Its dual norm with respect to ac_norm is
/// max(||initial||, max_k ||velocity_k||).
struct CostGradient {
  Vector initial;
  Matrix velocity;  // N x n

  double dual_norm() const {
    double out = initial.norm();
    for (Eigen::Index k = 0; k < velocity.rows(); ++k) out = std::max(out, velocity.row(k).norm());
    return out;
  }
};

inline CostGradient cost_gradient(const ProblemSpec& P, const Trajectory& x) {
  P.check(x);
  const Grid& grid = x.grid();
  const double h = grid.h();
  const int n = P.n();
  const auto term = detail::at_endpoints([&] { return P.terminal(x.front(), x.back()); });
  CostGradient out{term.grad_x0 + term.grad_xT, Matrix(grid.N, n)};
  Vector tail = term.grad_xT;  // grad_xT phi + sum_{k > j} h grad_x theta_k
  for (int j = grid.N - 1; j >= 0; --j) {
    const auto r = detail::at_cell(j, [&] { return P.running(grid.node(j), x.node(j), x.velocity(j)); });
    out.velocity.row(j) = (tail + r.grad_v).transpose();
    tail += h * r.grad_x;
    out.initial += h * r.grad_x;
  }
  return out;
}

/// f(x) = (x' + g(., x), (x(0), x(T))).
struct ReducedImage {
  CellPath velocity_part;
  Vector endpoints;  // (x(0), x(T)) stacked
};

/// ||(w, e)||_Y = sum_k h ||w_k|| + ||e||.
inline double y_norm(const ReducedImage& y) {
  const double h = y.velocity_part.grid().h();
  double total = y.endpoints.norm();
  for (Eigen::Index k = 0; k < y.velocity_part.values().rows(); ++k) total += h * y.velocity_part.values().row(k).norm();
  return total;
}

inline ReducedImage operator-(const ReducedImage& a, const ReducedImage& b) {
  detail::check_same_grid(a.velocity_part.grid(), b.velocity_part.grid(), "reduced image -");
  return {CellPath(a.velocity_part.grid(), a.velocity_part.values() - b.velocity_part.values()),
          a.endpoints - b.endpoints};
}

inline Vector stack(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

inline ReducedImage apply_constraint(const ProblemSpec& P, const Trajectory& x) {
  P.check(x);
  const Grid& grid = x.grid();
  Matrix w(grid.N, P.n());
  for (int k = 0; k < grid.N; ++k) {
    const Vector gk = detail::at_cell(k, [&] { return P.drift_value(grid.node(k), x.node(k)); });
    w.row(k) = (x.velocity(k) + gk).transpose();
  }
  return {CellPath(grid, std::move(w)), stack(x.front(), x.back())};
}

inline ReducedImage apply_constraint_derivative(const ProblemSpec& P, const Trajectory& x, const Trajectory& u) {
  P.check(x);
  P.check(u, "direction");
  detail::check_same_grid(x.grid(), u.grid(), "apply_constraint_derivative");
  const Grid& grid = x.grid();
  Matrix w(grid.N, P.n());
  for (int k = 0; k < grid.N; ++k) {
    const auto d = detail::at_cell(k, [&] { return P.drift(grid.node(k), x.node(k)); });
    w.row(k) = (u.velocity(k) + d.jacobian * u.node(k)).transpose();
  }
  return {CellPath(grid, std::move(w)), stack(u.front(), u.back())};
}

struct FeasibilityResidual {
  double velocity_defect = 0.0;  // sum_k h dist(w_k, omega1)
  double endpoint_defect = 0.0;  // dist((x_0, x_N), omega2)

  double total() const { return velocity_defect + endpoint_defect; }
};

inline FeasibilityResidual feasibility_residual(const ProblemSpec& P, const Trajectory& x) {
  const ReducedImage f = apply_constraint(P, x);
  const double h = x.grid().h();
  FeasibilityResidual out;
  for (int k = 0; k < x.grid().N; ++k) out.velocity_defect += h * distance(P.omega1(), f.velocity_part.cell(k));
  out.endpoint_defect = distance(P.omega2(), f.endpoints);
  return out;
}

/// Whether every cell and the endpoint pair are within `tol` of their sets.
inline bool is_feasible(const ProblemSpec& P, const Trajectory& x, double tol = kFeasibilityTol) {
  const ReducedImage f = apply_constraint(P, x);
  for (int k = 0; k < x.grid().N; ++k) {
    if (distance(P.omega1(), f.velocity_part.cell(k)) > tol) return false;
  }
  return distance(P.omega2(), f.endpoints) <= tol;
}

/// Radius of the neighborhood used for the local hypotheses around xbar.
inline double default_radius(const Trajectory& xbar) { return 0.1 * (1.0 + ac_norm(xbar)); }

struct LipschitzEstimate {
  double value = 0.0;          // the ell used downstream
  bool declared = false;       // taken from the problem rather than estimated
  double sampled_ratio = 0.0;  // max |J(x1) - J(x2)| / ||x1 - x2||_ac over the sample
  double gradient_norm = 0.0;  // dual norm of dJ(xbar)
  int samples = 0;
  double radius = 0.0;
};

/// Empirical Lipschitz modulus of J around xbar: 1.5 times the larger of the
/// sampled difference quotient and the dual norm of dJ(xbar).
inline LipschitzEstimate estimate_lipschitz(const ProblemSpec& P, const Trajectory& xbar, int samples = 200,
                                            std::optional<double> radius = std::nullopt,
                                            std::uint64_t seed = 0x5eed) {
  P.check(xbar);
  LipschitzEstimate out;
  out.radius = radius.value_or(default_radius(xbar));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    const Trajectory x1 = xbar + random_perturbation(rng, xbar.grid(), P.n(), out.radius * unit(rng));
    const Trajectory x2 = xbar + random_perturbation(rng, xbar.grid(), P.n(), out.radius * unit(rng));
    const double gap = ac_norm(x1 - x2);
    if (gap <= 0.0) continue;
    try {
      out.sampled_ratio = std::max(out.sampled_ratio, std::abs(evaluate_cost(P, x1) - evaluate_cost(P, x2)) / gap);
      ++out.samples;
    } catch (const DomainError&) {
      // Perturbation left the domain of the data; skip it.
    }
  }
  out.gradient_norm = cost_gradient(P, xbar).dual_norm();
  out.value = 1.5 * std::max(out.sampled_ratio, out.gradient_norm);
  return out;
}

/// Declared ell when the problem carries one, otherwise estimate_lipschitz.
inline LipschitzEstimate lipschitz_modulus(const ProblemSpec& P, const Trajectory& xbar) {
  if (P.lipschitz_ell()) {
    LipschitzEstimate out;
    out.value = *P.lipschitz_ell();
    out.declared = true;
    out.radius = default_radius(xbar);
    return out;
  }
  return estimate_lipschitz(P, xbar);
}

// ---------------------------------------------------------------------------
// Finite-difference checks

struct DerivativeCheck {
  int directions = 0;
  double eps = 0.0;
  double cost_max_rel = 0.0;        // max |dJ(x)u - fd| / max(1, |dJ(x)u|)
  double constraint_max_rel = 0.0;  // max ||f'(x)u - fd||_Y / max(1, ||f'(x)u||_Y)
};

/// Compares the analytic derivatives of J and f with central differences of
/// step eps along random unit-ac directions.
inline DerivativeCheck check_derivatives(const ProblemSpec& P, const Trajectory& x, int directions, double eps,
                                         std::uint64_t seed) {
  P.check(x);
  if (directions <= 0) throw ValidationError("check_derivatives: directions must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("check_derivatives: eps must be positive");
  DerivativeCheck out;
  out.directions = directions;
  out.eps = eps;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < directions; ++i) {
    const Trajectory u = random_perturbation(rng, x.grid(), P.n(), 1.0);
    const Trajectory plus = x + eps * u;
    const Trajectory minus = x - eps * u;

    const double dj = gateaux_J(P, x, u);
    const double fd = (evaluate_cost(P, plus) - evaluate_cost(P, minus)) / (2 * eps);
    out.cost_max_rel = std::max(out.cost_max_rel, std::abs(dj - fd) / std::max(1.0, std::abs(dj)));

    const ReducedImage df = apply_constraint_derivative(P, x, u);
    const ReducedImage diff = apply_constraint(P, plus) - apply_constraint(P, minus);
    const ReducedImage central{CellPath(x.grid(), diff.velocity_part.values() / (2 * eps)), diff.endpoints / (2 * eps)};
    out.constraint_max_rel = std::max(out.constraint_max_rel, y_norm(central - df) / std::max(1.0, y_norm(df)));
  }
  return out;
}

}  // namespace bolzacert

#endif  // BOLZACERT_PROBLEM_HPP_
