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

#include "bolzacert/problem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bolzacert/catalog.hpp"

namespace bolzacert {
namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }
Trajectory line(Grid g, double shift = 0.0) {
  return Trajectory::sample(g, 1, [&](double t) { return scalar(t + shift); });
}

TEST(ProblemSpec, Validation) {
  auto omega2 = ConvexSet::reals(2);
  EXPECT_THROW(ProblemSpec::parse(1, 1.0, "0", "v1", {"0", "0"}, ConvexSet::reals(1), omega2), ValidationError);
  EXPECT_THROW(ProblemSpec::parse(1, -1.0, "0", "v1", {"0"}, ConvexSet::reals(1), omega2), ValidationError);
  EXPECT_THROW(ProblemSpec::parse(1, 1.0, "0", "v1", {"0"}, ConvexSet::reals(2), omega2), ValidationError);
  EXPECT_THROW(ProblemSpec::parse(1, 1.0, "0", "v1", {"0"}, ConvexSet::reals(1), ConvexSet::reals(1)),
               ValidationError);
  EXPECT_THROW(ProblemSpec::parse(1, 1.0, "0", "v1", {"v1"}, ConvexSet::reals(1), omega2), ParseError);
  EXPECT_THROW(ProblemSpec::parse(1, 1.0, "0", "v1", {"0"}, ConvexSet::reals(1), omega2, -2.0), ValidationError);
  // Hand-built trees are checked against the profile too.
  EXPECT_THROW(ProblemSpec(1, 1.0, Expr::variable(Variable::state(0)), Expr::constant(0), {Expr::constant(0)},
                           ConvexSet::reals(1), omega2),
               ValidationError);
  ProblemSpec P = case_line().problem;
  EXPECT_THROW(evaluate_cost(P, Trajectory::zero(Grid(2.0, 4), 1)), ValidationError);
  EXPECT_THROW(evaluate_cost(P, Trajectory::zero(Grid(1.0, 4), 2)), ValidationError);
}

TEST(EvaluateCost, Examples) {
  ProblemSpec P = case_line().problem;
  for (int N : {1, 10, 200}) {
    EXPECT_NEAR(evaluate_cost(P, line(Grid(1.0, N))), 0.5, 1e-14);
    EXPECT_EQ(evaluate_cost(P, Trajectory::zero(Grid(1.0, N), 1)), 0.0);
  }
  ProblemSpec Q = ProblemSpec::parse(1, 1.0, "x0_1", "0", {"0"}, ConvexSet::reals(1), ConvexSet::reals(2));
  EXPECT_EQ(evaluate_cost(Q, line(Grid(1.0, 5), 3.0)), 3.0);
}

TEST(EvaluateCost, DomainErrorCarriesCell) {
  ProblemSpec P = ProblemSpec::parse(1, 1.0, "0", "log(x1)", {"0"}, ConvexSet::reals(1), ConvexSet::reals(2));
  Trajectory x = Trajectory::sample(Grid(1.0, 4), 1, [](double t) { return scalar(t - 0.3); });
  try {
    evaluate_cost(P, x);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos) << e.what();
  }
}

TEST(GateauxJ, Examples) {
  ProblemSpec P = case_line().problem;
  Grid g(1.0, 50);
  EXPECT_NEAR(gateaux_J(P, line(g), line(g)), 1.0, 1e-13);
  EXPECT_EQ(gateaux_J(P, line(g), Trajectory::zero(g, 1)), 0.0);
}

// Smooth random problems in dimension 2 with nontrivial phi, theta, g.
ProblemSpec smooth_problem(int variant) {
  const char* thetas[] = {"v1^2/2 + sin(x1)*v2 + t*x2^2", "exp(0.3*x1)*v1^2 + cos(x2)*v2 + x1*x2",
                          "(v1-x2)^2 + sqrt(1 + x1^2)*v2^2/2", "log(2 + x1^2)*v1 + v2^3/3 - t*x1"};
  const char* phis[] = {"x0_1^2 + xT_2", "sin(xT_1)*x0_2", "exp(x0_1 - xT_2)", "xT_1^2*xT_2/2"};
  const char* g1[] = {"x1^2", "sin(x2)", "t*x1*x2", "x2^2 - x1"};
  const char* g2[] = {"x1*x2", "cos(x1)+t", "x1^2/2", "exp(0.2*x2)"};
  const int i = variant % 4;
  return ProblemSpec::parse(2, 1.0 + 0.5 * (variant % 3), phis[i], thetas[i], {g1[i], g2[(i + 1) % 4]},
                            ConvexSet::reals(2), ConvexSet::reals(4));
}

Trajectory smooth_random(std::mt19937_64& rng, Grid g) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double a0 = c(rng), a1 = c(rng), a2 = c(rng), b0 = c(rng), b1 = c(rng), b2 = c(rng);
  return Trajectory::sample(g, 2, [&](double t) {
    Vector v(2);
    v << a0 + a1 * t + a2 * std::sin(3 * t), b0 + b1 * t * t + b2 * std::cos(2 * t);
    return v;
  });
}

TEST(GateauxJ, MatchesCentralDifference) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    ProblemSpec P = smooth_problem(i);
    Grid g(P.T(), 40);
    Trajectory x = smooth_random(rng, g);
    Trajectory u = smooth_random(rng, g);
    const double eps = 1e-5;
    const double dj = gateaux_J(P, x, u);
    const double fd = (evaluate_cost(P, x + eps * u) - evaluate_cost(P, x - eps * u)) / (2 * eps);
    EXPECT_LE(std::abs(dj - fd), 1e-6 * (1 + std::abs(dj))) << i;
  }
}

TEST(GateauxJ, LinearInDirection) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    ProblemSpec P = smooth_problem(i);
    Grid g(P.T(), 30);
    Trajectory x = smooth_random(rng, g);
    Trajectory u1 = smooth_random(rng, g);
    Trajectory u2 = smooth_random(rng, g);
    const double a = -1.7;
    const double lhs = gateaux_J(P, x, a * u1 + u2);
    const double rhs = a * gateaux_J(P, x, u1) + gateaux_J(P, x, u2);
    const double scale = 1 + std::abs(gateaux_J(P, x, u1)) + std::abs(gateaux_J(P, x, u2));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * scale);
  }
}

TEST(GateauxJ, CostGradientAgrees) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    ProblemSpec P = smooth_problem(i);
    Grid g(P.T(), 25);
    Trajectory x = smooth_random(rng, g);
    Trajectory u = smooth_random(rng, g);
    CostGradient G = cost_gradient(P, x);
    double via = G.initial.dot(u.front());
    for (int k = 0; k < g.N; ++k) via += g.h() * G.velocity.row(k).dot(u.velocity(k).transpose());
    EXPECT_NEAR(via, gateaux_J(P, x, u), 1e-10 * (1 + std::abs(via)));
  }
}

TEST(GateauxJ, BoundedByEmpiricalLipschitz) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    ProblemSpec P = smooth_problem(i);
    Grid g(P.T(), 20);
    Trajectory x = smooth_random(rng, g);
    LipschitzEstimate ell = estimate_lipschitz(P, x, 100);
    EXPECT_GT(ell.samples, 0);
    for (int j = 0; j < 10; ++j) {
      Trajectory u = smooth_random(rng, g);
      EXPECT_LE(std::abs(gateaux_J(P, x, u)), ell.value * ac_norm(u) * (1 + 1e-12));
    }
  }
}

TEST(ApplyConstraint, Examples) {
  ProblemSpec P1 = case_line().problem;
  Grid g(1.0, 10);
  ReducedImage f = apply_constraint(P1, line(g));
  EXPECT_TRUE(f.velocity_part.values().isApproxToConstant(1.0, 1e-12));
  EXPECT_EQ(f.endpoints(0), 0.0);
  EXPECT_EQ(f.endpoints(1), 1.0);

  ProblemSpec P4 = case_drift().problem;
  Trajectory c = Trajectory::sample(g, 1, [](double) { return scalar(0.7); });
  ReducedImage fc = apply_constraint(P4, c);
  EXPECT_TRUE(fc.velocity_part.values().isApproxToConstant(0.7, 1e-15));
  EXPECT_EQ(fc.endpoints, Vector::Constant(2, 0.7));

  // x(t) = t on two cells: v = 1 on both, g = x at the left nodes 0 and 1/2.
  ReducedImage f2 = apply_constraint(P4, line(Grid(1.0, 2)));
  EXPECT_DOUBLE_EQ(f2.velocity_part.values()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f2.velocity_part.values()(1, 0), 1.5);
}

TEST(ApplyConstraintDerivative, Examples) {
  ProblemSpec P1 = case_line().problem;
  Grid g(1.0, 8);
  Trajectory u = Trajectory::sample(g, 1, [](double t) { return scalar(t * t); });
  ReducedImage d = apply_constraint_derivative(P1, line(g), u);
  for (int k = 0; k < g.N; ++k) EXPECT_DOUBLE_EQ(d.velocity_part.values()(k, 0), u.velocity(k)(0));
  EXPECT_EQ(d.endpoints(1), 1.0);

  ProblemSpec Q = ProblemSpec::parse(1, 1.0, "0", "0", {"x1^2"}, ConvexSet::reals(1), ConvexSet::reals(2));
  Trajectory one = Trajectory::sample(g, 1, [](double) { return scalar(1); });
  ReducedImage dq = apply_constraint_derivative(Q, one, one);
  EXPECT_TRUE(dq.velocity_part.values().isApproxToConstant(2.0, 1e-15));
}

TEST(ApplyConstraintDerivative, TaylorSlope) {
  ProblemSpec P = ProblemSpec::parse(2, 1.0, "0", "0", {"x1^2 + x2*x1", "3*x2^2 - t*x1"}, ConvexSet::reals(2),
                                     ConvexSet::reals(4));
  std::mt19937_64 rng(1);
  Grid g(1.0, 50);
  for (int trial = 0; trial < 10; ++trial) {
    Trajectory x = smooth_random(rng, g);
    Trajectory dir = smooth_random(rng, g);
    dir *= 1.0 / ac_norm(dir);
    std::vector<double> logs, logd;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
      Trajectory u = r * dir;
      ReducedImage defect = apply_constraint(P, x + u) - apply_constraint(P, x) - apply_constraint_derivative(P, x, u);
      logs.push_back(std::log(r));
      logd.push_back(std::log(y_norm(defect) / ac_norm(u)));
    }
    // Least-squares slope of log(defect/||u||) against log ||u||, plus one.
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      mx += logs[i] / logs.size();
      my += logd[i] / logs.size();
    }
    double num = 0, den = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      num += (logs[i] - mx) * (logd[i] - my);
      den += (logs[i] - mx) * (logs[i] - mx);
    }
    EXPECT_GE(1.0 + num / den, 1.9);
  }
}

TEST(ApplyConstraintDerivative, MatchesForwardDifference) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    ProblemSpec P = smooth_problem(i);
    Grid g(P.T(), 30);
    Trajectory x = smooth_random(rng, g);
    Trajectory u = smooth_random(rng, g);
    ReducedImage lin = apply_constraint_derivative(P, x, u);
    double prev = kInf;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      ReducedImage fd = apply_constraint(P, x + eps * u) - apply_constraint(P, x);
      fd.velocity_part.mutable_values() /= eps;
      fd.endpoints /= eps;
      const double err = y_norm(fd - lin);
      EXPECT_LE(err, 50 * eps * (1 + ac_norm(u)) * (1 + ac_norm(u)));
      EXPECT_LT(err, prev);
      prev = err;
    }
  }
}

TEST(FeasibilityResidual, Examples) {
  Grid g(1.0, 20);
  ProblemSpec P2 = case_capped_speed().problem;
  FeasibilityResidual r = feasibility_residual(P2, line(g));
  EXPECT_NEAR(r.velocity_defect, 0.0, 1e-14);
  EXPECT_EQ(r.endpoint_defect, 0.0);
  Trajectory fast = Trajectory::sample(g, 1, [](double t) { return scalar(2 * t); });
  r = feasibility_residual(P2, fast);
  EXPECT_NEAR(r.velocity_defect, 1.0, 1e-12);
  EXPECT_EQ(r.endpoint_defect, 0.0);
  ProblemSpec P1 = case_line().problem;
  r = feasibility_residual(P1, line(g, 0.1));
  EXPECT_NEAR(r.endpoint_defect, 0.1 * std::sqrt(2.0), 1e-12);
}

TEST(FeasibilityResidual, ZeroIffPointwiseFeasible) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  ProblemSpec P = case_drift().problem;
  Grid g(1.0, 10);
  int feasible = 0, infeasible = 0;
  for (int i = 0; i < 400; ++i) {
    Matrix vals(11, 1);
    vals(0, 0) = i % 2 == 0 ? 1.0 : 1.0 + 0.1 * gauss(rng);
    // Velocities chosen so that x' + x stays in [-1, 1] for most samples.
    for (int k = 0; k < 10; ++k) {
      const double target = std::clamp(0.6 * gauss(rng), -1.3, 1.3);
      vals(k + 1, 0) = vals(k, 0) + g.h() * (target - vals(k, 0));
    }
    Trajectory x(g, vals);
    FeasibilityResidual r = feasibility_residual(P, x);
    const bool zero = r.velocity_defect <= kFeasibilityTol * g.T && r.endpoint_defect <= kFeasibilityTol;
    const bool pointwise = is_feasible(P, x);
    if (pointwise) {
      EXPECT_TRUE(zero);
      ++feasible;
    } else {
      EXPECT_GT(r.total(), 0.0);
      ++infeasible;
    }
    EXPECT_EQ(r.total() == 0.0, pointwise) << i;
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}

TEST(Lipschitz, DeclaredAndEstimated) {
  BenchmarkCase c = case_capped_speed();
  Trajectory x = c.analytic->trajectory(Grid(1.0, 200));
  LipschitzEstimate e = lipschitz_modulus(c.problem, x);
  EXPECT_FALSE(e.declared);
  EXPECT_NEAR(e.gradient_norm, 1.0, 1e-12);
  EXPECT_GE(e.value, 1.5);
  EXPECT_EQ(e.samples, 200);
  EXPECT_EQ(estimate_lipschitz(c.problem, x).value, e.value);  // deterministic
  ProblemSpec declared = ProblemSpec::parse(1, 1.0, "0", "v1", {"0"}, ConvexSet::reals(1), ConvexSet::reals(2), 3.0);
  EXPECT_TRUE(lipschitz_modulus(declared, x).declared);
  EXPECT_EQ(lipschitz_modulus(declared, x).value, 3.0);
}

TEST(CheckDerivatives, SmoothProblemsAgreeWithCentralDifferences) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 8; ++i) {
    ProblemSpec P = smooth_problem(i);
    const DerivativeCheck r = check_derivatives(P, smooth_random(rng, Grid(P.T(), 30)), 5, 1e-5, i);
    EXPECT_EQ(r.directions, 5);
    EXPECT_LE(r.cost_max_rel, 1e-6) << i;
    EXPECT_LE(r.constraint_max_rel, 1e-6) << i;
  }
  ProblemSpec P = smooth_problem(0);
  const Trajectory x = Trajectory::zero(Grid(P.T(), 10), 2);
  EXPECT_THROW(check_derivatives(P, x, 0, 1e-5, 0), ValidationError);
  EXPECT_THROW(check_derivatives(P, x, 3, 0.0, 0), ValidationError);
}

}  // namespace
}  // namespace bolzacert
