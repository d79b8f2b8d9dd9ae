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

// Supremal and power-mean energies of a grid function.
//
// The discrete Lagrangian of cell j is L_j = L(x_{j+1/2}, ubar_j, Du_j) with
// ubar_j the nodal average. E_inf(u, A) = max_{j in A} L_j and the normalized
// energy is E_m(u, A) = ((1/|A|) sum_{j in A} L_j^m)^{1/m}, evaluated with a
// max shift in the log domain. Derivatives are taken with respect to the
// interior nodal values, flattened node-major: index (i - 1) N + c.

#ifndef LINF_FUNCTIONALS_H_
#define LINF_FUNCTIONALS_H_

#include "linf/block_tridiag.h"
#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/types.h"

namespace linf {

struct EnergyBreakdown {
  int m = 1;
  Vec L;                    // per cell, every cell
  int cells = 0;            // selected cells
  double log_raw = 0.0;     // log (h sum_{j in A} L_j^m)
  double normalized = 0.0;  // ((1/|A|) sum_{j in A} L_j^m)^{1/m}
  double esup = 0.0;        // max_{j in A} L_j
};

// Throws InputError on an empty or mis-sized mask.
double EsupEnergy(const GridFunction& u, const LagrangianModel& model,
                  const CellMask& cells);

// Throws ModelEvaluationError if some L_j <= 0.
EnergyBreakdown EmEnergy(const GridFunction& u, const LagrangianModel& model,
                         int m, const CellMask& cells,
                         Exec exec = Exec::kSerial);
EnergyBreakdown EmEnergy(const GridFunction& u, const LagrangianModel& model,
                         int m, Exec exec = Exec::kSerial);

// Normalized power mean ((1/|A|) sum_{j in A} L_j^m)^{1/m} of given cell values.
double PowerMean(const Vec& L, int m, const CellMask* cells,
                 Exec exec = Exec::kSerial);

// Gradient of the normalized energy on the whole grid (N x (n_cells - 1),
// column i - 1 is interior node i).
Mat EmGradient(const GridFunction& u, const LagrangianModel& model, int m,
               Exec exec = Exec::kSerial);

// Exact Hessian of the normalized energy: T - c gbar gbar^T with T
// block-tridiagonal, gbar the gradient of log E and c = E (m - 1).
struct EnergyHessian {
  double energy = 0.0;
  Vec gradient;     // flattened
  BlockTridiag T;
  Vec gbar;         // gradient / energy
  double rank_one = 0.0;

  Vec Multiply(const Vec& x) const;
  Mat ToDense() const;
};

EnergyHessian AssembleHessian(const GridFunction& u,
                              const LagrangianModel& model, int m,
                              Exec exec = Exec::kSerial);

// Flattening helpers between interior nodal values and vectors.
Vec InteriorToVector(const GridFunction& u);
void VectorToInterior(const Vec& x, GridFunction* u);

}  // namespace linf

#endif  // LINF_FUNCTIONALS_H_
