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

#ifndef BOLZACERT_FUNSPACE_HPP_
#define BOLZACERT_FUNSPACE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>

#include "bolzacert/convex.hpp"
#include "bolzacert/errors.hpp"

namespace bolzacert {

/// Uniform grid t_k = k T / N, k = 0..N, on [0, T].
struct Grid {
  double T = 1.0;
  int N = 1;

  Grid() = default;
  Grid(double horizon, int intervals) : T(horizon), N(intervals) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("grid: horizon T must be positive");
    if (N <= 0) throw ValidationError("grid: number of intervals must be positive");
  }

  double h() const { return T / N; }
  double node(int k) const { return k == N ? T : k * (T / N); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

namespace detail {
inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ValidationError(std::string(what) + ": grid mismatch (T=" + std::to_string(a.T) +
                          ", N=" + std::to_string(a.N) + " vs T=" + std::to_string(b.T) +
                          ", N=" + std::to_string(b.N) + ")");
  }
}
}  // namespace detail

/// Piecewise-linear curve: node states x_k (rows of an (N+1) x n matrix) with
/// constant velocity v_k = (x_{k+1} - x_k) / h on interval k.
class Trajectory {
 public:
  Trajectory(Grid grid, Matrix values) : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid_.N + 1) {
      throw ValidationError("trajectory: expected " + std::to_string(grid_.N + 1) + " node rows, got " +
                            std::to_string(values_.rows()));
    }
    if (values_.cols() <= 0) throw ValidationError("trajectory: state dimension must be positive");
    if (!values_.allFinite()) throw ValidationError("trajectory: values must be finite");
  }

  static Trajectory zero(Grid grid, int n) { return Trajectory(grid, Matrix::Zero(grid.N + 1, n)); }

  template <typename F>
  static Trajectory sample(Grid grid, int n, F&& f) {
    Matrix values(grid.N + 1, n);
    for (int k = 0; k <= grid.N; ++k) values.row(k) = Vector(f(grid.node(k))).transpose();
    return Trajectory(grid, std::move(values));
  }

  const Grid& grid() const { return grid_; }
  int n() const { return static_cast<int>(values_.cols()); }
  int intervals() const { return grid_.N; }
  const Matrix& values() const { return values_; }

  Vector node(int k) const { return values_.row(k).transpose(); }
  Vector velocity(int k) const { return (values_.row(k + 1) - values_.row(k)).transpose() / grid_.h(); }
  Vector front() const { return node(0); }
  Vector back() const { return node(grid_.N); }

  Trajectory& operator+=(const Trajectory& o) {
    detail::check_same_grid(grid_, o.grid_, "trajectory +");
    values_ += o.values_;
    return *this;
  }
  Trajectory& operator-=(const Trajectory& o) {
    detail::check_same_grid(grid_, o.grid_, "trajectory -");
    values_ -= o.values_;
    return *this;
  }
  Trajectory& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
  friend Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
  friend Trajectory operator*(double s, Trajectory a) { return a *= s; }

 private:
  Grid grid_;
  Matrix values_;
};

/// Piecewise-constant function: one value per interval (N x n).
class CellPath {
 public:
  CellPath(Grid grid, Matrix values) : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid_.N) {
      throw ValidationError("cell path: expected " + std::to_string(grid_.N) + " cell rows, got " +
                            std::to_string(values_.rows()));
    }
    if (values_.cols() <= 0) throw ValidationError("cell path: dimension must be positive");
    if (!values_.allFinite()) throw ValidationError("cell path: values must be finite");
  }

  static CellPath zero(Grid grid, int n) { return CellPath(grid, Matrix::Zero(grid.N, n)); }
  static CellPath constant(Grid grid, const Vector& c) {
    return CellPath(grid, c.transpose().replicate(grid.N, 1));
  }

  const Grid& grid() const { return grid_; }
  int n() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  Matrix& mutable_values() { return values_; }
  Vector cell(int k) const { return values_.row(k).transpose(); }

 private:
  Grid grid_;
  Matrix values_;
};

// ---------------------------------------------------------------------------
// Norms

/// ||x(0)|| + integral ||x'||, exact for piecewise-linear curves.
inline double ac_norm(const Trajectory& x) {
  double total = x.values().row(0).norm();
  for (int k = 0; k < x.intervals(); ++k) {
    total += (x.values().row(k + 1) - x.values().row(k)).norm();
  }
  return total;
}

/// integral ||x|| (trapezoid) + integral ||x'|| (exact).
inline double one_one_norm(const Trajectory& x) {
  const double h = x.grid().h();
  double state = 0.0;
  double speed = 0.0;
  for (int k = 0; k < x.intervals(); ++k) {
    state += 0.5 * h * (x.values().row(k).norm() + x.values().row(k + 1).norm());
    speed += (x.values().row(k + 1) - x.values().row(k)).norm();
  }
  return state + speed;
}

/// max over nodes and components of |x_{k,i}|; exact for piecewise-linear curves.
inline double sup_norm(const Trajectory& x) { return x.values().cwiseAbs().maxCoeff(); }

/// Upper bound on how much the trapezoid state term of one_one_norm can exceed
/// the exact integral: h^2/4 * sum_k ||v_k|| (||x(t)|| is convex and
/// ||v_k||-Lipschitz on each cell).
inline double one_one_trapezoid_slack(const Trajectory& x) {
  const double h = x.grid().h();
  double total = 0.0;
  for (int k = 0; k < x.intervals(); ++k) total += x.velocity(k).norm();
  return 0.25 * h * h * total;
}

/// The three norms of one curve and the equivalence inequalities between them:
///   one_one / (1 + T) <= ac <= (2T + 1) / T * one_one,  sup <= (2 + 2T) / T * one_one.
/// The lower comparison is allowed the trapezoid slack; all get 1e-9 absolute.
struct NormEquivalence {
  double ac = 0.0;
  double one_one = 0.0;
  double sup = 0.0;
  double lower_bound = 0.0;  // one_one / (1 + T)
  double upper_bound = 0.0;  // (2T + 1) / T * one_one
  double sup_bound = 0.0;    // (2 + 2T) / T * one_one
  double slack = 0.0;
  bool lower_holds = false;
  bool upper_holds = false;
  bool sup_holds = false;

  bool holds() const { return lower_holds && upper_holds && sup_holds; }
};

inline NormEquivalence check_norm_equivalence(const Trajectory& x) {
  constexpr double kAbs = 1e-9;
  const double T = x.grid().T;
  NormEquivalence r;
  r.ac = ac_norm(x);
  r.one_one = one_one_norm(x);
  r.sup = sup_norm(x);
  r.slack = one_one_trapezoid_slack(x);
  r.lower_bound = r.one_one / (1 + T);
  r.upper_bound = (2 * T + 1) / T * r.one_one;
  r.sup_bound = (2 + 2 * T) / T * r.one_one;
  r.lower_holds = r.lower_bound <= r.ac + kAbs + r.slack / (1 + T);
  r.upper_holds = r.ac <= r.upper_bound + kAbs;
  r.sup_holds = r.sup <= r.sup_bound + kAbs;
  return r;
}

/// Node-wise standard Gaussian perturbation rescaled to ac_norm == radius.
inline Trajectory random_perturbation(std::mt19937_64& rng, Grid grid, int n, double radius) {
  std::normal_distribution<double> gauss;
  Matrix values(grid.N + 1, n);
  for (int k = 0; k <= grid.N; ++k) {
    for (int i = 0; i < n; ++i) values(k, i) = gauss(rng);
  }
  Trajectory u(grid, std::move(values));
  const double size = ac_norm(u);
  if (size > 0.0) u *= radius / size;
  return u;
}

// ---------------------------------------------------------------------------
// Fundamental lemma

struct FundamentalLemmaResult {
  Trajectory arc;       // node values L_k + a, so arc(0) = a
  double r_T = 0.0;     // ||arc(T) + b||
  double r_match = 0.0; // sum_k h ||arc(cell midpoint) - q_k||
  double r_ode = 0.0;   // max_k ||(arc_{k+1} - arc_k)/h - l_k||
};

/// Absolutely continuous representative of the cell function q whose weak
/// derivative is l, anchored at arc(0) = a. The residuals measure how far
/// (q, l, a, b) are from satisfying the weak identity exactly.
inline FundamentalLemmaResult reconstruct_ac(const CellPath& q, const CellPath& l, const Vector& a,
                                             const Vector& b) {
  detail::check_same_grid(q.grid(), l.grid(), "reconstruct_ac");
  const int n = q.n();
  if (l.n() != n || a.size() != n || b.size() != n) {
    throw ValidationError("reconstruct_ac: dimension mismatch");
  }
  const Grid& grid = q.grid();
  const double h = grid.h();
  Matrix nodes(grid.N + 1, n);
  nodes.row(0) = a.transpose();
  Vector running = Vector::Zero(n);
  for (int k = 0; k < grid.N; ++k) {
    running += h * l.cell(k);
    nodes.row(k + 1) = (running + a).transpose();
  }
  FundamentalLemmaResult out{Trajectory(grid, std::move(nodes))};
  const Matrix& v = out.arc.values();
  out.r_T = (out.arc.back() + b).norm();
  for (int k = 0; k < grid.N; ++k) {
    const Vector mid = 0.5 * (v.row(k) + v.row(k + 1)).transpose();
    out.r_match += h * (mid - q.cell(k)).norm();
    out.r_ode = std::max(out.r_ode, (out.arc.velocity(k) - l.cell(k)).norm());
  }
  return out;
}

/// Max |defect| of  int <l,h> + int <qbar,h'> + <h(0),a> + <h(T),b>  over the
/// test directions h(t) = t^j e_i, j = 0..degree, i = 1..n (trapezoid rule).
inline double test_flemma_identity(const Trajectory& qbar, const CellPath& l, const Vector& a,
                                     const Vector& b, int degree) {
  detail::check_same_grid(qbar.grid(), l.grid(), "test_flemma_identity");
  const int n = qbar.n();
  if (l.n() != n || a.size() != n || b.size() != n) {
    throw ValidationError("test_flemma_identity: dimension mismatch");
  }
  if (degree < 0) throw ValidationError("test_flemma_identity: degree must be nonnegative");
  const Grid& grid = qbar.grid();
  const double h = grid.h();
  auto test = [](double t, int j) { return j == 0 ? 1.0 : std::pow(t, j); };
  auto test_dot = [](double t, int j) { return j == 0 ? 0.0 : j * (j == 1 ? 1.0 : std::pow(t, j - 1)); };

  double worst = 0.0;
  for (int j = 0; j <= degree; ++j) {
    for (int i = 0; i < n; ++i) {
      double total = test(0.0, j) * a(i) + test(grid.T, j) * b(i);
      for (int k = 0; k < grid.N; ++k) {
        const double t0 = grid.node(k);
        const double t1 = grid.node(k + 1);
        total += h * l.values()(k, i) * 0.5 * (test(t0, j) + test(t1, j));
        total += 0.5 * h * (qbar.values()(k, i) * test_dot(t0, j) + qbar.values()(k + 1, i) * test_dot(t1, j));
      }
      worst = std::max(worst, std::abs(total));
    }
  }
  return worst;
}

}  // namespace bolzacert

#endif  // BOLZACERT_FUNSPACE_HPP_
