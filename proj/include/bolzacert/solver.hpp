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

#ifndef BOLZACERT_SOLVER_HPP_
#define BOLZACERT_SOLVER_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bolzacert/convex.hpp"
#include "bolzacert/errors.hpp"
#include "bolzacert/funspace.hpp"
#include "bolzacert/problem.hpp"

namespace bolzacert {

struct SolverConfig {
  int grid_N = 200;
  double penalty_rho = 10.0;
  double penalty_growth = 4.0;
  int outer_iters = 50;
  double inner_tol = 1e-7;
  int inner_max_steps = 20000;
  double feas_tol = 1e-7;
  std::uint64_t seed = 0;  // the method is deterministic; kept for reproducible records

  void validate() const {
    if (grid_N <= 0) throw ValidationError("solver: grid_N must be positive");
    if (!(penalty_rho > 0.0)) throw ValidationError("solver: penalty_rho must be positive");
    if (!(penalty_growth >= 1.0)) throw ValidationError("solver: penalty_growth must be >= 1");
    if (outer_iters <= 0) throw ValidationError("solver: outer_iters must be positive");
    if (!(inner_tol > 0.0)) throw ValidationError("solver: inner_tol must be positive");
    if (inner_max_steps <= 0) throw ValidationError("solver: inner_max_steps must be positive");
    if (!(feas_tol >= 1e-12)) throw ValidationError("solver: feas_tol must be >= 1e-12");
  }
};

struct OuterRecord {
  int outer_iter = 0;
  double objective = 0.0;
  double velocity_defect = 0.0;
  double endpoint_defect = 0.0;
  double rho = 0.0;
};

struct SolveResult {
  Trajectory x;
  CellPath mu;  // multiplier density, paired with w by sum_k h <mu_k, w_k>
  Vector s1;
  Vector s2;
  bool converged = false;
  int outer_iterations = 0;
  int inner_steps = 0;
  double stationarity = 0.0;  // metric norm of the last inner gradient
  double objective = 0.0;
  std::vector<OuterRecord> history;
};

/// DomainError raised while iterating, with the iterate that triggered it.
class IterateDomainError : public DomainError {
 public:
  IterateDomainError(const std::string& what, Trajectory snapshot)
      : DomainError(what), snapshot_(std::move(snapshot)) {}
  const Trajectory& snapshot() const { return snapshot_; }

 private:
  Trajectory snapshot_;
};

/// Value of a smooth objective F(x) together with its partials with respect
/// to the node states x_k (rows of `node`) and the cell velocities v_k (rows
/// of `cell`), treating them as independent.
struct Partials {
  Matrix node;  // (N+1) x n
  Matrix cell;  // N x n
};
using SmoothObjective = std::function<double(const Trajectory&, Partials*)>;

/// The discretized cost J as a SmoothObjective.
inline SmoothObjective cost_objective(const ProblemSpec& P) {
  return [&P](const Trajectory& x, Partials* out) {
    const Grid& grid = x.grid();
    const double h = grid.h();
    if (out == nullptr) return evaluate_cost(P, x);
    out->node = Matrix::Zero(grid.N + 1, P.n());
    out->cell = Matrix::Zero(grid.N, P.n());
    const auto term = detail::at_endpoints([&] { return P.terminal(x.front(), x.back()); });
    double total = term.value;
    out->node.row(0) += term.grad_x0.transpose();
    out->node.row(grid.N) += term.grad_xT.transpose();
    for (int k = 0; k < grid.N; ++k) {
      const auto r = detail::at_cell(k, [&] { return P.running(grid.node(k), x.node(k), x.velocity(k)); });
      total += h * r.value;
      out->node.row(k) += h * r.grad_x.transpose();
      out->cell.row(k) += h * r.grad_v.transpose();
    }
    return total;
  };
}

namespace detail {

/// Converts partials to the gradient in (x(0), velocity) coordinates under
/// the metric ||d x0||^2 + sum_k h ||d v_k||^2.
struct MetricGradient {
  Vector initial;
  Matrix velocity;  // N x n

  double norm(double h) const { return std::sqrt(initial.squaredNorm() + h * velocity.squaredNorm()); }
};

inline MetricGradient to_metric(const Partials& d, double h) {
  const Eigen::Index N = d.cell.rows();
  MetricGradient g{d.node.colwise().sum().transpose(), Matrix(N, d.cell.cols())};
  Vector tail = d.node.row(N).transpose();  // sum_{k > j} node partials
  for (Eigen::Index j = N - 1; j >= 0; --j) {
    g.velocity.row(j) = d.cell.row(j) / h + tail.transpose();
    tail += d.node.row(j).transpose();
  }
  return g;
}

/// x - alpha * (initial + h * cumulative velocity) at every node.
inline Trajectory step(const Trajectory& x, const MetricGradient& g, double alpha) {
  const Grid& grid = x.grid();
  Matrix values = x.values();
  Vector shift = g.initial;
  values.row(0) -= alpha * shift.transpose();
  for (int k = 0; k < grid.N; ++k) {
    shift += grid.h() * g.velocity.row(k).transpose();
    values.row(k + 1) -= alpha * shift.transpose();
  }
  return Trajectory(grid, std::move(values));
}

/// Augmented Lagrangian with the slacks eliminated:
///   F(x) + rho/2 sum_k h dist^2(w_k + mu_k/rho, omega1) + rho/2 dist^2(e + s/rho, omega2).
class Augmented {
 public:
  Augmented(const ProblemSpec& P, const SmoothObjective& F) : P_(P), F_(F) {}

  Matrix mu;
  Vector s;
  double rho = 1.0;

  double value(const Trajectory& x, MetricGradient* grad) const {
    const Grid& grid = x.grid();
    const double h = grid.h();
    const int n = P_.n();
    Partials d;
    double total = F_(x, grad ? &d : nullptr);
    for (int k = 0; k < grid.N; ++k) {
      const Vector xk = x.node(k);
      Vector w = x.velocity(k);
      ProblemSpec::Drift drift;
      if (grad) {
        drift = at_cell(k, [&] { return P_.drift(grid.node(k), xk); });
        w += drift.value;
      } else {
        w += at_cell(k, [&] { return P_.drift_value(grid.node(k), xk); });
      }
      const Vector z = w + mu.row(k).transpose() / rho;
      const Vector r = z - project(P_.omega1(), z);
      total += 0.5 * rho * h * r.squaredNorm();
      if (grad) {
        d.cell.row(k) += rho * h * r.transpose();
        if (!P_.drift_free()) d.node.row(k) += rho * h * (drift.jacobian.transpose() * r).transpose();
      }
    }
    const Vector z = stack(x.front(), x.back()) + s / rho;
    const Vector r = z - project(P_.omega2(), z);
    total += 0.5 * rho * r.squaredNorm();
    if (grad) {
      d.node.row(0) += rho * r.head(n).transpose();
      d.node.row(grid.N) += rho * r.tail(n).transpose();
      *grad = to_metric(d, h);
    }
    return total;
  }

  /// Multipliers after the first-order update at x.
  void update_multipliers(const Trajectory& x) {
    const ReducedImage f = apply_constraint(P_, x);
    mu = dual_update(f, mu, rho);
    s = endpoint_update(f, s, rho);
  }

  Matrix dual_update(const ReducedImage& f, const Matrix& m, double r) const {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
      const Vector z = f.velocity_part.cell(static_cast<int>(k)) + m.row(k).transpose() / r;
      out.row(k) = r * (z - project(P_.omega1(), z)).transpose();
    }
    return out;
  }
  Vector endpoint_update(const ReducedImage& f, const Vector& sv, double r) const {
    const Vector z = f.endpoints + sv / r;
    return r * (z - project(P_.omega2(), z));
  }

 private:
  const ProblemSpec& P_;
  const SmoothObjective& F_;
};

/// Least-squares multiplier estimate from the stationarity of the Lagrangian
/// F + sum_k h <mu_k, w_k> + <s, e> at x, made consistent with the sets by
/// one dual update.
inline void initial_multipliers(const ProblemSpec& P, const SmoothObjective& F, const Trajectory& x,
                                Augmented& aug) {
  const Grid& grid = x.grid();
  const double h = grid.h();
  const int n = P.n();
  const int N = grid.N;
  Partials d;
  F(x, &d);
  std::vector<Matrix> gx(static_cast<std::size_t>(N));  // h * Dg_k^T
  for (int k = 0; k < N; ++k) {
    gx[static_cast<std::size_t>(k)] =
        h * at_cell(k, [&] { return P.drift(grid.node(k), x.node(k)); }).jacobian.transpose();
  }
  // mu_j = a_j + B_j s2 from the velocity equations, solved backwards.
  auto recurse = [&](Matrix& a, std::vector<Matrix>& B) {
    a = Matrix(N, n);
    B.assign(static_cast<std::size_t>(N), Matrix());
    Vector tail_a = d.node.row(N).transpose();
    Matrix tail_B = Matrix::Identity(n, n);
    for (int j = N - 1; j >= 0; --j) {
      const Vector aj = -d.cell.row(j).transpose() / h - tail_a;
      const Matrix Bj = -tail_B;
      a.row(j) = aj.transpose();
      B[static_cast<std::size_t>(j)] = Bj;
      tail_a += d.node.row(j).transpose() + gx[static_cast<std::size_t>(j)] * aj;
      tail_B += gx[static_cast<std::size_t>(j)] * Bj;
    }
  };
  Matrix a;
  std::vector<Matrix> B;
  recurse(a, B);
  Matrix normal = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  for (int j = 0; j < N; ++j) {
    const Matrix& Bj = B[static_cast<std::size_t>(j)];
    normal += h * Bj.transpose() * Bj;
    rhs -= h * Bj.transpose() * a.row(j).transpose();
  }
  const ReducedImage f = apply_constraint(P, x);
  auto mu_for = [&](const Vector& s2) {
    Matrix mu(N, n);
    for (int j = 0; j < N; ++j) mu.row(j) = (a.row(j).transpose() + B[static_cast<std::size_t>(j)] * s2).transpose();
    return mu;
  };
  auto s1_for = [&](const Matrix& mu, const Vector& s2) {
    Vector total = d.node.colwise().sum().transpose() + s2;
    for (int k = 0; k < N; ++k) total += gx[static_cast<std::size_t>(k)] * mu.row(k).transpose();
    return Vector(-total);
  };
  Vector s2 = normal.completeOrthogonalDecomposition().solve(rhs);
  Matrix mu = mu_for(s2);
  Vector s = aug.endpoint_update(f, stack(s1_for(mu, s2), s2), aug.rho);
  mu = aug.dual_update(f, mu_for(s.tail(n)), aug.rho);
  s = aug.endpoint_update(f, stack(s1_for(mu, s.tail(n)), s.tail(n)), aug.rho);
  if (mu.allFinite() && s.allFinite()) {
    aug.mu = std::move(mu);
    aug.s = std::move(s);
  }
}

inline constexpr double kUnboundedThreshold = -1e12;
inline constexpr double kArmijo = 1e-4;

inline double inner(const MetricGradient& a, const MetricGradient& b, double h) {
  return a.initial.dot(b.initial) + h * (a.velocity.array() * b.velocity.array()).sum();
}

/// Minimizes F over {x : f(x) in omega1 x omega2} from x by the augmented
/// Lagrangian method with Armijo gradient descent on the inner problems.
inline SolveResult run_alm(const ProblemSpec& P, const SolverConfig& cfg, Trajectory x, const SmoothObjective& F) {
  const Grid grid = x.grid();
  const double h = grid.h();
  const int n = P.n();
  Augmented aug(P, F);
  aug.rho = cfg.penalty_rho;
  aug.mu = Matrix::Zero(grid.N, n);
  aug.s = Vector::Zero(2 * n);

  auto guarded = [&](const Trajectory& at, auto&& fn) {
    try {
      return fn();
    } catch (const IterateDomainError&) {
      throw;
    } catch (const DomainError& e) {
      throw IterateDomainError(std::string("solver iterate left the domain of the data: ") + e.what(), at);
    }
  };

  guarded(x, [&] {
    initial_multipliers(P, F, x, aug);
    return 0;
  });

  SolveResult out{x, CellPath::zero(grid, n), Vector::Zero(n), Vector::Zero(n)};
  double alpha = 1.0;
  double previous_gap = kInf;
  for (int outer = 1; outer <= cfg.outer_iters; ++outer) {
    MetricGradient grad;
    double value = guarded(x, [&] { return aug.value(x, &grad); });
    double gnorm = grad.norm(h);
    int steps = 0;
    while (gnorm > cfg.inner_tol && steps < cfg.inner_max_steps) {
      const double decrease = gnorm * gnorm;
      const double noise = 1e-12 * (1.0 + std::abs(value));
      double trial_alpha = std::min(2.0 * alpha, 1e12);
      bool accepted = false;
      MetricGradient trial_grad;
      for (int backtrack = 0; backtrack < 80 && !accepted; ++backtrack, trial_alpha *= 0.5) {
        Trajectory trial = step(x, grad, trial_alpha);
        double trial_value;
        try {
          trial_value = aug.value(trial, &trial_grad);
        } catch (const DomainError&) {
          continue;  // outside the domain of the data: shorten the step
        }
        if (!std::isfinite(trial_value)) continue;
        bool ok = trial_value <= value - kArmijo * trial_alpha * decrease;
        if (!ok && trial_value <= value + noise) {
          // Values agree to roundoff; use the slope form of the same condition,
          // which is exact for quadratics.
          ok = inner(trial_grad, grad, h) >= (1.0 - 2.0 * kArmijo) * decrease;
        }
        if (ok) {
          x = std::move(trial);
          value = trial_value;
          grad = std::move(trial_grad);
          alpha = trial_alpha;
          accepted = true;
        }
      }
      if (!accepted) break;  // no progress possible at floating-point resolution
      ++steps;
      gnorm = grad.norm(h);
      if (value < kUnboundedThreshold) {
        throw UnboundedError("unbounded below at this discretization (objective " + std::to_string(value) + ")");
      }
    }
    out.inner_steps += steps;
    // The gradient at the old multipliers is the Lagrangian gradient at the
    // updated ones, so gnorm is the KKT stationarity.
    out.stationarity = gnorm;

    // Slack gap sum_k h ||w_k - y_k|| + ||e - z||, with the slacks y, z the
    // projections; it bounds the distance to the sets and the complementarity.
    const Matrix mu_old = aug.mu;
    const Vector s_old = aug.s;
    const double rho = aug.rho;
    guarded(x, [&] {
      aug.update_multipliers(x);
      return 0;
    });
    double slack_gap = (aug.s - s_old).norm() / rho;
    for (Eigen::Index k = 0; k < mu_old.rows(); ++k) slack_gap += h * (aug.mu.row(k) - mu_old.row(k)).norm() / rho;

    const FeasibilityResidual defect = feasibility_residual(P, x);
    const double objective = guarded(x, [&] { return F(x, nullptr); });
    if (objective < kUnboundedThreshold) {
      throw UnboundedError("unbounded below at this discretization (objective " + std::to_string(objective) + ")");
    }
    out.history.push_back({outer, objective, defect.velocity_defect, defect.endpoint_defect, aug.rho});
    out.outer_iterations = outer;
    out.objective = objective;
    if (slack_gap <= cfg.feas_tol && defect.velocity_defect <= cfg.feas_tol && defect.endpoint_defect <= cfg.feas_tol &&
        gnorm <= cfg.inner_tol) {
      out.converged = true;
      break;
    }
    if (slack_gap > cfg.feas_tol && slack_gap > 0.5 * previous_gap) aug.rho *= cfg.penalty_growth;
    previous_gap = slack_gap;
  }
  out.x = std::move(x);
  out.mu = CellPath(grid, aug.mu);
  out.s1 = aug.s.head(n);
  out.s2 = aug.s.tail(n);
  return out;
}

}  // namespace detail

/// Straight line between the two halves of project(omega2, 0).
inline Trajectory default_initial_guess(const ProblemSpec& P, Grid grid) {
  const Vector z = project(P.omega2(), Vector::Zero(2 * P.n()));
  const Vector a = z.head(P.n());
  const Vector b = z.tail(P.n());
  return Trajectory::sample(grid, P.n(), [&](double t) { return Vector(a + (t / grid.T) * (b - a)); });
}

/// Solves the discretized problem on a grid with cfg.grid_N intervals.
inline SolveResult solve(const ProblemSpec& P, const SolverConfig& cfg,
                         const std::optional<Trajectory>& warm_start = std::nullopt) {
  cfg.validate();
  const Grid grid = P.grid(cfg.grid_N);
  Trajectory x = default_initial_guess(P, grid);
  if (warm_start) {
    P.check(*warm_start, "warm start");
    detail::check_same_grid(grid, warm_start->grid(), "warm start");
    x = *warm_start;
  }
  return detail::run_alm(P, cfg, std::move(x), cost_objective(P));
}

struct RestoreResult {
  Trajectory y;
  double ac_gap = 0.0;  // ac_norm(y - x), an upper bound on dist(x; S)
  bool converged = false;
};

/// Nearby feasible curve: minimizes 1/2 ||y(0) - x(0)||^2 + 1/2 sum_k h ||v_k(y) - v_k(x)||^2
/// over the feasible set. Nonconverged results are flagged, not thrown.
inline RestoreResult restore_feasibility(const ProblemSpec& P, const Trajectory& x, const SolverConfig& cfg) {
  cfg.validate();
  P.check(x);
  if (is_feasible(P, x, cfg.feas_tol)) return {x, 0.0, true};
  const Grid& grid = x.grid();
  const double h = grid.h();
  SmoothObjective F = [&x, h](const Trajectory& y, Partials* out) {
    const Vector d0 = y.front() - x.front();
    double total = 0.5 * d0.squaredNorm();
    if (out) {
      out->node = Matrix::Zero(y.grid().N + 1, y.n());
      out->cell = Matrix(y.grid().N, y.n());
      out->node.row(0) = d0.transpose();
    }
    for (int k = 0; k < y.grid().N; ++k) {
      const Vector dv = y.velocity(k) - x.velocity(k);
      total += 0.5 * h * dv.squaredNorm();
      if (out) out->cell.row(k) = h * dv.transpose();
    }
    return total;
  };
  SolveResult r = detail::run_alm(P, cfg, x, F);
  const double gap = ac_norm(r.x - x);
  return {std::move(r.x), gap, r.converged};
}

}  // namespace bolzacert

#endif  // BOLZACERT_SOLVER_HPP_
