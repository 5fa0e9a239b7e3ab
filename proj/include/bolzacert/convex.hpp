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

#ifndef BOLZACERT_CONVEX_HPP_
#define BOLZACERT_CONVEX_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bolzacert/errors.hpp"

namespace bolzacert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute Euclidean tolerance for "y lies in S".
inline constexpr double kFeasibilityTol = 1e-7;

struct DykstraOptions {
  double tolerance = 1e-10;  // per-sweep iterate displacement
  int max_sweeps = 100000;
};

// Vertex/ray enumeration is exhaustive over row subsets; keep it at desk scale.
inline constexpr int kMaxEnumerationDim = 6;
inline constexpr int kMaxEnumerationFacets = 32;

/// Closed convex subset of R^d. Immutable; copies share polyhedral data.
class ConvexSet {
 public:
  struct Reals {
    int dim = 0;
  };
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Ball {
    Vector center;
    double radius = 0.0;
  };
  struct Polyhedron {
    Matrix A;  // {y : A y <= b}
    Vector b;
    // Vertices and extreme rays of the pointed part, plus a basis of the
    // lineality space. `enumerable` is false when the set exceeds the limits.
    bool enumerable = false;
    std::vector<Vector> vertices;
    std::vector<Vector> rays;
    Matrix lineality;  // d x k, orthonormal columns
  };
  struct Singleton {
    Vector point;
  };
  struct Product {
    std::vector<ConvexSet> factors;
  };

  using Variant = std::variant<Reals, Box, Ball, std::shared_ptr<const Polyhedron>, Singleton, Product>;

  static ConvexSet reals(int dim);
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet polyhedron(Matrix A, Vector b);
  static ConvexSet singleton(Vector point);
  static ConvexSet product(std::vector<ConvexSet> factors);

  int dim() const { return dim_; }
  const Variant& variant() const { return data_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&data_);
  }
  const Polyhedron* polyhedron_data() const {
    auto p = std::get_if<std::shared_ptr<const Polyhedron>>(&data_);
    return p ? p->get() : nullptr;
  }

  std::string type_name() const {
    switch (data_.index()) {
      case 0:
        return "reals";
      case 1:
        return "box";
      case 2:
        return "ball";
      case 3:
        return "polyhedron";
      case 4:
        return "singleton";
      default:
        return "product";
    }
  }

 private:
  ConvexSet(Variant data, int dim) : data_(std::move(data)), dim_(dim) {}

  Variant data_;
  int dim_ = 0;
};

namespace detail {

inline void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw ValidationError(std::string(what) + " must be finite");
}

// Dykstra's alternating projections onto the halfspaces a_i . y <= b_i.
inline Vector dykstra(const Matrix& A, const Vector& b, const Vector& y, const DykstraOptions& opts) {
  const Eigen::Index m = A.rows();
  const Eigen::Index d = A.cols();
  Vector x = y;
  Matrix increments = Matrix::Zero(m, d);
  Vector row_norm2(m);
  for (Eigen::Index i = 0; i < m; ++i) row_norm2(i) = A.row(i).squaredNorm();
  Vector z(d);
  double displacement = 0.0;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double disp2 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (row_norm2(i) == 0.0) continue;
      z = x + increments.row(i).transpose();
      const double violation = A.row(i).dot(z) - b(i);
      if (violation > 0.0) {
        const double s = violation / row_norm2(i);
        increments.row(i) = s * A.row(i);
        disp2 += (z - s * A.row(i).transpose() - x).squaredNorm();
        x = z - s * A.row(i).transpose();
      } else {
        disp2 += (z - x).squaredNorm();
        increments.row(i).setZero();
        x = z;
      }
    }
    displacement = std::sqrt(disp2);
    if (displacement <= opts.tolerance) return x;
  }
  throw ConvergenceError("Dykstra projection did not converge within " +
                             std::to_string(opts.max_sweeps) + " sweeps",
                         displacement);
}

// Calls f(indices) for every k-subset of {0..m-1}, in lexicographic order.
template <typename F>
void for_each_subset(int m, int k, F&& f) {
  if (k < 0 || k > m) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline void push_unique(std::vector<Vector>& list, const Vector& v, double tol) {
  for (const Vector& w : list) {
    if ((w - v).norm() <= tol * (1.0 + v.norm())) return;
  }
  list.push_back(v);
}

// Splits R^d into the lineality space of {A y <= b} and its complement, then
// enumerates vertices (r-subsets of active rows) and extreme rays ((r-1)-subsets)
// of the pointed polyhedron in the complement.
inline void enumerate(ConvexSet::Polyhedron& P) {
  const int m = static_cast<int>(P.A.rows());
  const int d = static_cast<int>(P.A.cols());
  if (d > kMaxEnumerationDim || m > kMaxEnumerationFacets) {
    P.enumerable = false;
    return;
  }
  P.enumerable = true;

  int r = 0;
  Matrix V = Matrix::Identity(d, d);
  if (m > 0) {
    Eigen::JacobiSVD<Matrix> svd(P.A, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++r;
    }
    V = svd.matrixV();
  }
  const Matrix Q = V.leftCols(r);
  P.lineality = V.rightCols(d - r);
  const Matrix M = P.A * Q;  // constraints in row-space coordinates

  auto feasible = [&](const Vector& z, double slack) {
    for (int i = 0; i < m; ++i) {
      const double scale = 1.0 + std::abs(P.b(i)) + M.row(i).norm() * z.norm();
      if (M.row(i).dot(z) - P.b(i) > slack * scale) return false;
    }
    return true;
  };

  for_each_subset(m, r, [&](const std::vector<int>& rows) {
    Matrix Ms(r, r);
    Vector bs(r);
    for (int i = 0; i < r; ++i) {
      Ms.row(i) = M.row(rows[static_cast<std::size_t>(i)]);
      bs(i) = P.b(rows[static_cast<std::size_t>(i)]);
    }
    Vector z = Vector::Zero(r);
    if (r > 0) {
      Eigen::FullPivLU<Matrix> lu(Ms);
      lu.setThreshold(1e-12);
      if (lu.rank() < r) return;
      z = lu.solve(bs);
    }
    if (feasible(z, 1e-9)) push_unique(P.vertices, Q * z, 1e-9);
  });

  if (r >= 1) {
    for_each_subset(m, r - 1, [&](const std::vector<int>& rows) {
      Matrix Ms(std::max(r - 1, 0), r);
      for (int i = 0; i < r - 1; ++i) Ms.row(i) = M.row(rows[static_cast<std::size_t>(i)]);
      Vector dir;
      if (r - 1 == 0) {
        dir = Vector::Ones(1);
      } else {
        Eigen::FullPivLU<Matrix> lu(Ms);
        lu.setThreshold(1e-12);
        if (lu.rank() != r - 1) return;
        dir = lu.kernel().col(0);
      }
      dir.normalize();
      for (double sign : {1.0, -1.0}) {
        const Vector cand = sign * dir;
        if (((M * cand).array() <= 1e-10).all()) push_unique(P.rays, Q * cand, 1e-9);
      }
    });
  }
}

}  // namespace detail

inline ConvexSet ConvexSet::reals(int dim) {
  if (dim <= 0) throw ValidationError("reals: dimension must be positive");
  return ConvexSet(Reals{dim}, dim);
}

inline ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ValidationError("box: lower and upper must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower(i)) || std::isnan(upper(i))) throw ValidationError("box: NaN bound");
    if (lower(i) == kInf || upper(i) == -kInf) throw ValidationError("box: bound at the wrong infinity");
    if (lower(i) > upper(i)) {
      throw ValidationError("box: lower > upper in component " + std::to_string(i + 1));
    }
  }
  const int d = static_cast<int>(lower.size());
  return ConvexSet(Box{std::move(lower), std::move(upper)}, d);
}

inline ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw ValidationError("ball: empty center");
  detail::check_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball: radius must be positive");
  const int d = static_cast<int>(center.size());
  return ConvexSet(Ball{std::move(center), radius}, d);
}

inline ConvexSet ConvexSet::polyhedron(Matrix A, Vector b) {
  if (A.cols() == 0) throw ValidationError("polyhedron: A must have at least one column");
  if (A.rows() != b.size()) throw ValidationError("polyhedron: A has " + std::to_string(A.rows()) +
                                                  " rows but b has " + std::to_string(b.size()));
  if (!A.allFinite() || !b.allFinite()) throw ValidationError("polyhedron: entries must be finite");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A.row(i).squaredNorm() == 0.0 && b(i) < 0.0) {
      throw ValidationError("polyhedron is empty (row " + std::to_string(i + 1) + " reads 0 <= " +
                            std::to_string(b(i)) + ")");
    }
  }
  // Nonemptiness: Dykstra from the origin either lands in the set or stalls
  // with a persistent violation.
  {
    DykstraOptions opts;
    opts.max_sweeps = 20000;
    Vector y;
    try {
      y = detail::dykstra(A, b, Vector::Zero(A.cols()), opts);
    } catch (const ConvergenceError&) {
      throw ValidationError("polyhedron is empty (Dykstra iterates diverge)");
    }
    const double violation = (A * y - b).maxCoeff();
    if (violation > kFeasibilityTol) {
      throw ValidationError("polyhedron is empty (residual violation " + std::to_string(violation) + ")");
    }
  }
  auto data = std::make_shared<Polyhedron>();
  data->A = std::move(A);
  data->b = std::move(b);
  detail::enumerate(*data);
  const int d = static_cast<int>(data->A.cols());
  return ConvexSet(std::shared_ptr<const Polyhedron>(std::move(data)), d);
}

inline ConvexSet ConvexSet::singleton(Vector point) {
  if (point.size() == 0) throw ValidationError("singleton: empty point");
  detail::check_finite(point, "singleton point");
  const int d = static_cast<int>(point.size());
  return ConvexSet(Singleton{std::move(point)}, d);
}

inline ConvexSet ConvexSet::product(std::vector<ConvexSet> factors) {
  if (factors.empty()) throw ValidationError("product: needs at least one factor");
  int d = 0;
  for (const ConvexSet& f : factors) d += f.dim();
  return ConvexSet(Product{std::move(factors)}, d);
}

// ---------------------------------------------------------------------------
// Oracles

namespace detail {
inline void check_dim(const ConvexSet& S, Eigen::Index n, const char* op) {
  if (n != S.dim()) {
    throw ValidationError(std::string(op) + ": vector has dimension " + std::to_string(n) +
                          " but the set has dimension " + std::to_string(S.dim()));
  }
}
}  // namespace detail

/// Euclidean projection of `y` onto `S`.
inline Vector project(const ConvexSet& S, const Vector& y, const DykstraOptions& opts = {}) {
  detail::check_dim(S, y.size(), "project");
  if (S.get_if<ConvexSet::Reals>()) return y;
  if (const auto* box = S.get_if<ConvexSet::Box>()) return y.cwiseMax(box->lower).cwiseMin(box->upper);
  if (const auto* ball = S.get_if<ConvexSet::Ball>()) {
    const Vector diff = y - ball->center;
    const double dist = diff.norm();
    if (dist <= ball->radius) return y;
    return ball->center + diff * (ball->radius / dist);
  }
  if (const auto* poly = S.polyhedron_data()) {
    if (((poly->A * y - poly->b).array() <= 0.0).all()) return y;
    return detail::dykstra(poly->A, poly->b, y, opts);
  }
  if (const auto* single = S.get_if<ConvexSet::Singleton>()) return single->point;
  const auto& prod = *S.get_if<ConvexSet::Product>();
  Vector out(y.size());
  Eigen::Index offset = 0;
  for (const ConvexSet& f : prod.factors) {
    out.segment(offset, f.dim()) = project(f, y.segment(offset, f.dim()), opts);
    offset += f.dim();
  }
  return out;
}

inline double distance(const ConvexSet& S, const Vector& y, const DykstraOptions& opts = {}) {
  if (S.get_if<ConvexSet::Reals>()) {
    detail::check_dim(S, y.size(), "distance");
    return 0.0;
  }
  return (y - project(S, y, opts)).norm();
}

inline bool contains(const ConvexSet& S, const Vector& y, double tol = kFeasibilityTol) {
  return distance(S, y) <= tol;
}

/// Support function sup{<xi, w> : w in S}, possibly +inf.
///
/// `recession_tol` treats components of `xi` along unbounded directions of S as
/// zero when their magnitude is at most the tolerance; 0 gives exact semantics.
inline double support(const ConvexSet& S, const Vector& xi, double recession_tol = 0.0) {
  detail::check_dim(S, xi.size(), "support");
  if (S.get_if<ConvexSet::Reals>()) {
    return xi.lpNorm<Eigen::Infinity>() <= recession_tol ? 0.0 : kInf;
  }
  if (const auto* box = S.get_if<ConvexSet::Box>()) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      const double c = xi(i);
      if (c > 0.0) {
        if (std::isfinite(box->upper(i))) {
          total += c * box->upper(i);
        } else if (c > recession_tol) {
          return kInf;
        }
      } else if (c < 0.0) {
        if (std::isfinite(box->lower(i))) {
          total += c * box->lower(i);
        } else if (-c > recession_tol) {
          return kInf;
        }
      }
    }
    return total;
  }
  if (const auto* ball = S.get_if<ConvexSet::Ball>()) {
    return ball->center.dot(xi) + ball->radius * xi.norm();
  }
  if (const auto* poly = S.polyhedron_data()) {
    if (!poly->enumerable) {
      throw EnumerationLimitError("support: enumeration scale exceeded (dimension " +
                                  std::to_string(poly->A.cols()) + ", " +
                                  std::to_string(poly->A.rows()) + " facets; limits " +
                                  std::to_string(kMaxEnumerationDim) + " and " +
                                  std::to_string(kMaxEnumerationFacets) + ")");
    }
    if (poly->lineality.cols() > 0 && (poly->lineality.transpose() * xi).norm() > recession_tol) {
      return kInf;
    }
    for (const Vector& ray : poly->rays) {
      if (ray.dot(xi) > recession_tol) return kInf;
    }
    double best = -kInf;
    for (const Vector& v : poly->vertices) best = std::max(best, v.dot(xi));
    return best;
  }
  if (const auto* single = S.get_if<ConvexSet::Singleton>()) return single->point.dot(xi);
  const auto& prod = *S.get_if<ConvexSet::Product>();
  double total = 0.0;
  Eigen::Index offset = 0;
  for (const ConvexSet& f : prod.factors) {
    total += support(f, xi.segment(offset, f.dim()), recession_tol);
    offset += f.dim();
  }
  return total;
}

/// A point of S attaining the support value, when one exists.
inline std::optional<Vector> support_maximizer(const ConvexSet& S, const Vector& xi) {
  detail::check_dim(S, xi.size(), "support_maximizer");
  if (S.get_if<ConvexSet::Reals>()) {
    if (xi.isZero(0.0)) return Vector::Zero(xi.size());
    return std::nullopt;
  }
  if (const auto* box = S.get_if<ConvexSet::Box>()) {
    Vector w(xi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      const double pick = xi(i) > 0.0 ? box->upper(i) : box->lower(i);
      if (std::isfinite(pick)) {
        w(i) = pick;
      } else if (xi(i) == 0.0) {
        w(i) = std::isfinite(box->upper(i)) ? box->upper(i) : 0.0;
      } else {
        return std::nullopt;
      }
    }
    return w;
  }
  if (const auto* ball = S.get_if<ConvexSet::Ball>()) {
    const double nrm = xi.norm();
    if (nrm == 0.0) return ball->center;
    return Vector(ball->center + xi * (ball->radius / nrm));
  }
  if (const auto* poly = S.polyhedron_data()) {
    if (!std::isfinite(support(S, xi))) return std::nullopt;
    const Vector* best = nullptr;
    for (const Vector& v : poly->vertices) {
      if (best == nullptr || v.dot(xi) > best->dot(xi)) best = &v;
    }
    if (best == nullptr) return std::nullopt;
    return *best;
  }
  if (const auto* single = S.get_if<ConvexSet::Singleton>()) return single->point;
  const auto& prod = *S.get_if<ConvexSet::Product>();
  Vector w(xi.size());
  Eigen::Index offset = 0;
  for (const ConvexSet& f : prod.factors) {
    auto part = support_maximizer(f, xi.segment(offset, f.dim()));
    if (!part) return std::nullopt;
    w.segment(offset, f.dim()) = *part;
    offset += f.dim();
  }
  return w;
}

/// ||P_S(x + xi) - x||, which vanishes exactly when xi is a normal to S at x.
/// Throws InfeasiblePointError when x is farther than `feasibility_tol` from S.
inline double normal_cone_residual(const ConvexSet& S, const Vector& x, const Vector& xi,
                                   double feasibility_tol = kFeasibilityTol) {
  detail::check_dim(S, xi.size(), "normal_cone_residual");
  const double gap = distance(S, x);
  if (gap > feasibility_tol) {
    throw InfeasiblePointError("normal cone is empty: point lies at distance " + std::to_string(gap) +
                               " from the " + S.type_name());
  }
  return (project(S, x + xi) - x).norm();
}

}  // namespace bolzacert

#endif  // BOLZACERT_CONVEX_HPP_
