// Copyright 2026 The linfsolve Authors
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

// Damped Newton minimisation of the normalized energy E_m with Dirichlet
// data, and continuation along an increasing schedule of exponents.
//
// The Newton system is the exact Hessian T - c g g^T. T is Jacobi-scaled and
// factorized by block Cholesky; the rank-one term is folded in with the
// Sherman-Morrison formula. A Levenberg shift lambda I on the scaled system
// is raised when the factorization or the rank-one update loses positive
// definiteness and lowered after accepted steps.

#ifndef LINF_SOLVER_H_
#define LINF_SOLVER_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "linf/elsystem.h"
#include "linf/functionals.h"
#include "linf/grid.h"
#include "linf/lagrangian.h"

namespace linf {

struct SolveConfig {
  std::vector<int> m_schedule = DoublingSchedule(1024);
  double newton_tol = 1e-10;
  // Per-node stationarity, see LocalStationarity.
  double local_tol = 1e-9;
  int max_newton_iters = 100;
  double levenberg_lambda0 = 0.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double continuation_stop = 1e-6;
  int min_stages = 4;
  std::uint64_t seed = 0;
  Exec exec = Exec::kSerial;

  // 1, 2, 4, ..., m_max (m_max itself is appended when not a power of two).
  static std::vector<int> DoublingSchedule(int m_max);
  // Throws InputError on an empty or non-increasing schedule or on
  // non-positive tolerances.
  void Validate() const;
};

enum class StageStatus {
  kConverged,
  // Gradient below tolerance; further progress is below rounding.
  kConvergedAtRounding,
  kIterationLimit,
  kLineSearchFailure,
};
const char* ToString(StageStatus status);
inline bool IsConverged(StageStatus s) {
  return s == StageStatus::kConverged || s == StageStatus::kConvergedAtRounding;
}

struct StageRecord {
  int m = 1;
  int iterations = 0;
  StageStatus status = StageStatus::kConverged;
  double gradient_norm = 0.0;    // sup norm
  double local_residual = 0.0;   // LocalStationarity
  double normalized_energy = 0.0;
  double esup = 0.0;
  // Du change from the previous stage (from the initial guess for stage 0).
  double du_change_sup = 0.0;
  std::array<double, 3> du_change_lq{};  // q = 1, 2, 4
  // Sup of the normalized expanded residual at this m (0 for m = 1).
  double residual_sup = 0.0;
  // ||u||_{W^{1,2m}} <= C (E_m^{1/2m} + max|b| + 1).
  double bound_lhs = 0.0;
  double bound_rhs = 0.0;
  GridFunction iterate;
};

struct SolveReport {
  std::vector<StageRecord> stages;
  GridFunction u_final;
  double esup_final = 0.0;
  ResidualField residual_inf;
  // (m, normalized E_m(u_final)) over the configured schedule.
  std::vector<std::pair<int, double>> monotonicity;
  bool all_converged = true;
  bool bound_ok = true;
};

// Per-node stationarity: max_i h |sum_j exp(m (ell_j - ell_loc)) d_i L_j / L_j|
// over the two cells j adjacent to node i, ell_loc the larger of their
// log-values. Zero exactly at critical points of E_m; unlike the global
// gradient it does not underflow where L_j^m is negligible against max L^m.
double LocalStationarity(const GridFunction& u, const LagrangianModel& model,
                         int m, Exec exec = Exec::kSerial);

// Throws InputError when u0 disagrees with `data` at an endpoint.
std::pair<GridFunction, StageRecord> MinimizeEm(const GridFunction& u0,
                                                const LagrangianModel& model,
                                                int m, const AffineData& data,
                                                const SolveConfig& cfg);

SolveReport ContinuationSolve(const LagrangianModel& model,
                              const AffineData& data, const Grid& grid,
                              const SolveConfig& cfg);

// C in the bound check, frozen once on the power model.
double BoundConstant(const Interval& interval);

// Smallest eigenvalue of the exact Hessian by power iteration on its inverse.
// Returns a non-positive value when the matrix is not positive definite.
double SmallestHessianEigenvalue(const EnergyHessian& hess, int iterations,
                                 std::uint64_t seed);

}  // namespace linf

#endif  // LINF_SOLVER_H_
