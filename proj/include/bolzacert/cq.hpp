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

#ifndef BOLZACERT_CQ_HPP_
#define BOLZACERT_CQ_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bolzacert/funspace.hpp"
#include "bolzacert/problem.hpp"
#include "bolzacert/solver.hpp"

namespace bolzacert {

// Samples whose constraint defect is at or below this are not counted: the
// ratio is 0/0 at feasibility.
inline constexpr double kCqRhsFloor = 1e-10;

struct CqSample {
  double perturbation_norm = 0.0;  // ac_norm(u)
  double lhs = 0.0;                // ac distance to the restored curve, >= dist(x; S)
  double rhs = 0.0;                // sum_k h dist(w_k, omega1) + dist(endpoints, omega2)
  double ratio = 0.0;
  enum class Status { admitted, excluded, dropped } status = Status::admitted;
};

/// Sampled lower estimate of the subregularity modulus kappa around xbar.
/// It never shows that the qualification holds: only that no violation was
/// witnessed and that any valid kappa is at least kappa_hat.
struct CqProbeResult {
  std::optional<double> kappa_hat;  // empty when no sample was admitted
  int samples = 0;                  // admitted
  int excluded = 0;                 // rhs below the floor
  int dropped = 0;                  // restoration did not converge
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<CqSample> records;

  static constexpr const char* kCaveat = "lower bound only";
  std::string summary() const {
    if (!kappa_hat) return "no active samples";
    std::ostringstream os;
    os.precision(10);
    os << "no violation witnessed; kappa >= " << *kappa_hat << " (" << kCaveat << ")";
    return os.str();
  }
};

inline CqProbeResult probe_kappa(const ProblemSpec& P, const Trajectory& xbar, int samples, double delta,
                                 std::uint64_t seed, const SolverConfig& cfg = {}) {
  P.check(xbar);
  if (samples <= 0) throw ValidationError("probe: samples must be positive");
  if (!(delta > 0.0)) throw ValidationError("probe: delta must be positive");
  if (!is_feasible(P, xbar, std::max(cfg.feas_tol, 1e-6))) {
    throw ValidationError("probe: base trajectory is not feasible");
  }
  CqProbeResult out;
  out.delta = delta;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Trajectory u = random_perturbation(rng, xbar.grid(), P.n(), delta);
    const Trajectory x = xbar + u;
    CqSample rec;
    rec.perturbation_norm = ac_norm(u);
    rec.rhs = feasibility_residual(P, x).total();
    if (rec.rhs <= kCqRhsFloor) {
      rec.status = CqSample::Status::excluded;
      ++out.excluded;
      out.records.push_back(rec);
      continue;
    }
    std::optional<RestoreResult> r;
    try {
      r = restore_feasibility(P, x, cfg);
    } catch (const DomainError&) {
      // counted as a failed restoration
    }
    if (!r || !r->converged) {
      rec.status = CqSample::Status::dropped;
      ++out.dropped;
      out.records.push_back(rec);
      continue;
    }
    rec.lhs = r->ac_gap;
    rec.ratio = rec.lhs / rec.rhs;
    ++out.samples;
    out.kappa_hat = std::max(out.kappa_hat.value_or(0.0), rec.ratio);
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace bolzacert

#endif  // BOLZACERT_CQ_HPP_
