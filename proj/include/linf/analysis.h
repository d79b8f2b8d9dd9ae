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

// Numerical checks on a computed limit map:
//  - local minimality of E_inf on subintervals against hat-function
//    perturbations, with an optional smoothed-max descent that hunts for
//    violations;
//  - an empirical Young measure of second difference quotients and the
//    pointwise check of the limiting system on its reduced support;
//  - the set where |W| is small and its complement;
//  - semicontinuity of the stage energies against the final E_inf.

#ifndef LINF_ANALYSIS_H_
#define LINF_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/solver.h"
#include "linf/types.h"

namespace linf {

struct MinimalityTrial {
  int index = 0;
  int begin_node = 0;  // subinterval [x_begin, x_end]
  int end_node = 0;
  double amplitude = 0.0;  // sup |D phi| relative to max(|Du|_inf, 1)
  bool polished = false;
  Mat coefficients;  // nodal values of phi on the interior nodes of the span
  double esup_u = 0.0;
  double esup_perturbed = 0.0;
  double margin = 0.0;  // max(0, esup_u - esup_perturbed)
};

struct MinimalityOptions {
  int trials = 200;
  std::uint64_t seed = 0;
  bool descent_polish = true;
  std::vector<double> amplitudes = {1e-3, 1e-2, 1e-1};
  int polish_iterations = 25;  // gradient steps per smoothing level
  Exec exec = Exec::kSerial;
};

// Throws InputError when the grid has fewer than 4 cells.
std::vector<MinimalityTrial> VerifyAbsoluteMinimiser(
    const GridFunction& u, const LagrangianModel& model,
    const MinimalityOptions& options);

double WorstMargin(const std::vector<MinimalityTrial>& trials);

struct YoungCluster {
  Vec center;
  double weight = 0.0;  // fraction of all samples at the node
  int count = 0;
};

struct YoungNode {
  int node = 0;
  std::vector<double> steps;  // t = k h
  std::vector<Vec> quotients;
  std::vector<YoungCluster> clusters;
  double escaped_fraction = 0.0;
};

struct EmpiricalYoungMeasure {
  Grid grid;
  std::vector<int> ladder;
  double cap = 0.0;
  std::vector<YoungNode> nodes;  // interior nodes 1..n_cells-1
};

// 1e3 |Du|_inf / (b - a), at least 1e3 / (b - a).
double DefaultYoungCap(const GridFunction& u);

// Second difference quotients over the ladder (steps that leave the grid are
// skipped per node), retained below `cap`, single-linkage clusters with
// radius cap / 10. Throws InputError on an empty ladder or non-positive steps.
EmpiricalYoungMeasure BuildEmpiricalYoungMeasure(const GridFunction& u,
                                                 const std::vector<int>& ladder,
                                                 double cap);

struct DSolutionNode {
  int node = 0;
  double residual = 0.0;  // max over cluster centers, normalized
  bool vacuous = false;   // every sample escaped
  bool checked = true;    // false when excluded (outside the selection)
};

struct DSolutionReport {
  std::vector<DSolutionNode> nodes;
  double tol = 0.0;
  double worst = 0.0;
  int checked = 0;
  int vacuous = 0;
  int skipped_breakpoints = 0;
  bool pass = true;
};

// Evaluates the limiting operator at (x_i, u_i, centered Du_i, X) for every
// cluster center X. When `cells` is given only nodes whose two adjacent cells
// are selected are checked. Nodes at an x-breakpoint of the model (where H is
// not differentiable in x) are skipped and counted.
DSolutionReport DSolutionCheck(const GridFunction& u,
                               const LagrangianModel& model,
                               const EmpiricalYoungMeasure& eym, double tol,
                               const CellMask* cells = nullptr);

struct SingularSetReport {
  double eps = 0.0;
  CellMask singular;   // |W|^3 <= eps^3
  CellMask omega_inf;  // complement
  std::vector<int> boundary_cells;
  double singular_fraction = 0.0;
  double omega_inf_fraction = 0.0;
  double boundary_fraction = 0.0;
  // Sup of the normalized limiting residual over nodes inside omega_inf.
  double residual_sup_omega_inf = 0.0;
};

// h^{2/3} max(1, |Du|_inf).
double DefaultSingularEps(const GridFunction& u);

SingularSetReport DetectSingularSet(const GridFunction& u,
                                    const LagrangianModel& model, double eps);

struct LscRow {
  std::string set;  // "full" or "[begin,end)"
  int cells = 0;
  double esup_final = 0.0;
  double stage_min = 0.0;  // min over stages of (sum_A L^m)^{1/m}
  int argmin_m = 0;
  double margin = 0.0;     // stage_min - esup_final
};

struct LscTable {
  std::vector<LscRow> rows;
  double worst_margin = 0.0;
  bool pass = true;
};

// Compares E_inf(u_final, A) with (sum_{j in A} L_j(u^m)^m)^{1/m} over the
// recorded stages, on the full grid and `sub_masks` seeded dyadic cell ranges.
LscTable LscDiagnostic(const SolveReport& report, const LagrangianModel& model,
                       std::uint64_t seed, int sub_masks = 8,
                       double tol = 1e-8);

}  // namespace linf

#endif  // LINF_ANALYSIS_H_
