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

#ifndef BOLZACERT_CATALOG_HPP_
#define BOLZACERT_CATALOG_HPP_

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bolzacert/problem.hpp"

namespace bolzacert {

/// Known solution of a catalog problem: minimizer, multiplier density,
/// adjoint arc and endpoint multipliers.
struct AnalyticSolution {
  std::function<Vector(double)> x;
  std::function<Vector(double)> mu;
  std::function<Vector(double)> p;
  Vector s1;
  Vector s2;
  double J = 0.0;

  Trajectory trajectory(Grid grid) const { return Trajectory::sample(grid, static_cast<int>(s1.size()), x); }
  CellPath multiplier(Grid grid) const {
    Matrix m(grid.N, s1.size());
    for (int k = 0; k < grid.N; ++k) m.row(k) = mu(grid.node(k) + 0.5 * grid.h()).transpose();
    return CellPath(grid, std::move(m));
  }
};

struct BenchmarkCase {
  std::string id;
  std::string title;
  ProblemSpec problem;
  std::optional<AnalyticSolution> analytic;
  std::string note;
};

/// A deliberately wrong candidate together with the conditions it must fail.
struct NegativeControl {
  std::string case_id;
  std::string name;
  std::function<Vector(double)> x;
  std::function<Vector(double)> mu;
  std::optional<Vector> s1;
  std::optional<Vector> s2;
  std::set<std::string> expected_failures;  // condition tags
};

namespace detail {
inline Vector v1(double a) { return Vector::Constant(1, a); }
inline Vector v2(double a, double b) {
  Vector out(2);
  out << a, b;
  return out;
}
}  // namespace detail

/// P1 "line": min int v^2/2 with x(0) = 0, x(1) = 1.
inline BenchmarkCase case_line() {
  using detail::v1;
  ProblemSpec P = ProblemSpec::parse(1, 1.0, "0", "v1^2/2", {"0"}, ConvexSet::reals(1),
                                     ConvexSet::singleton(detail::v2(0, 1)));
  AnalyticSolution a{[](double t) { return v1(t); }, [](double) { return v1(0); }, [](double) { return v1(1); },
                     v1(1), v1(-1), 0.5};
  return {"P1", "line", std::move(P), std::move(a), "x(t) = t, p = 1, mu = 0, (s1, s2) = (1, -1)"};
}

/// P2 "capped-speed": min int (v - 2)^2/2 with v <= 1, x(0) = 0, x(1) free.
inline BenchmarkCase case_capped_speed() {
  using detail::v1;
  ProblemSpec P = ProblemSpec::parse(
      1, 1.0, "0", "(v1-2)^2/2", {"0"}, ConvexSet::box(v1(-kInf), v1(1)),
      ConvexSet::product({ConvexSet::singleton(v1(0)), ConvexSet::reals(1)}));
  AnalyticSolution a{[](double t) { return v1(t); }, [](double) { return v1(1); }, [](double) { return v1(0); },
                     v1(0), v1(0), 0.5};
  return {"P2", "capped-speed", std::move(P), std::move(a), "x(t) = t, mu = 1, p = 0, (s1, s2) = (0, 0)"};
}

/// P3: min int x^2/2 with (x(0), x(1)) in [0,1]^2 and no velocity constraint.
inline BenchmarkCase case_box_endpoints() {
  using detail::v1;
  ProblemSpec P = ProblemSpec::parse(1, 1.0, "0", "x1^2/2", {"0"}, ConvexSet::reals(1),
                                     ConvexSet::box(detail::v2(0, 0), detail::v2(1, 1)));
  AnalyticSolution a{[](double) { return v1(0); }, [](double) { return v1(0); }, [](double) { return v1(0); },
                     v1(0), v1(0), 0.0};
  return {"P3", "box-endpoints", std::move(P), std::move(a),
          "x = 0, p = 0, mu = 0; closing condition 0 in [0,inf) + [0,inf)"};
}

/// P4 "drift": min int v^2/2 with |x' + x| <= 1, x(0) = 1, x(1) free.
inline BenchmarkCase case_drift() {
  using detail::v1;
  ProblemSpec P = ProblemSpec::parse(
      1, 1.0, "0", "v1^2/2", {"x1"}, ConvexSet::box(v1(-1), v1(1)),
      ConvexSet::product({ConvexSet::singleton(v1(1)), ConvexSet::reals(1)}));
  AnalyticSolution a{[](double) { return v1(1); }, [](double) { return v1(0); }, [](double) { return v1(0); },
                     v1(0), v1(0), 0.0};
  return {"P4", "drift", std::move(P), std::move(a), "x = 1 (x' + x = 1 on the boundary), p = 0, mu = 0"};
}

inline std::vector<BenchmarkCase> catalog() {
  std::vector<BenchmarkCase> out;
  out.push_back(case_line());
  out.push_back(case_capped_speed());
  out.push_back(case_box_endpoints());
  out.push_back(case_drift());
  return out;
}

inline BenchmarkCase find_case(const std::string& id) {
  for (BenchmarkCase& c : catalog()) {
    if (c.id == id) return std::move(c);
  }
  throw ValidationError("unknown catalog case `" + id + "`");
}

/// Three corrupted candidates per catalog case. Grids should have an even
/// number of intervals so that t = 1/2 is a node.
inline std::vector<NegativeControl> negative_controls() {
  using detail::v1;
  auto zero = [](double) { return v1(0); };
  auto one = [](double) { return v1(1); };
  auto line = [](double t) { return v1(t); };
  std::vector<NegativeControl> out;

  out.push_back({"P1", "curved path x = t^2", [](double t) { return v1(t * t); }, zero, {}, {}, {"EL"}});
  out.push_back({"P1", "spurious multiplier mu = 0.3", line, [](double) { return v1(0.3); }, {}, {}, {"WP", "NC"}});
  out.push_back({"P1", "wrong initial multiplier s1 = 0.5", line, zero, v1(0.5), v1(-1), {"EP"}});

  out.push_back({"P2", "slow start then capped",
                 [](double t) { return v1(t <= 0.5 ? t * t : t - 0.25); },
                 [](double t) { return v1(t < 0.5 ? 0.0 : 1.0); }, {}, {}, {"EL"}});
  out.push_back({"P2", "doubled multiplier mu = 2", line, [](double) { return v1(2); }, {}, {}, {"TR"}});
  out.push_back({"P2", "wrong initial multiplier s1 = 0.3", line, one, v1(0.3), v1(0), {"EP"}});

  out.push_back({"P3", "constant x = 0.5", [](double) { return v1(0.5); }, zero, {}, {}, {"EL"}});
  out.push_back({"P3", "ramp x = t/2", [](double t) { return v1(0.5 * t); }, zero, {}, {}, {"EL"}});
  out.push_back({"P3", "wrong initial multiplier s1 = -0.2", zero, zero, v1(-0.2), v1(0), {"EP"}});

  out.push_back({"P4", "decaying x = 1 - t/2", [](double t) { return v1(1 - 0.5 * t); }, zero, {}, {}, {"TR"}});
  out.push_back({"P4", "parabolic dip then constant",
                 [](double t) {
                   const double s = std::min(t, 0.5);
                   return v1(1 + ((s - 0.5) * (s - 0.5) - 0.25) / 2);
                 },
                 zero, {}, {}, {"EL"}});
  out.push_back({"P4", "wrong initial multiplier s1 = 0.4", [](double) { return v1(1); }, zero, v1(0.4), v1(0),
                 {"EP"}});
  return out;
}

}  // namespace bolzacert

#endif  // BOLZACERT_CATALOG_HPP_
