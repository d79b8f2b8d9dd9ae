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

// Pointwise operators of the second-order systems satisfied by minimisers:
// the expanded L^m system
//
//   [A/(m-1) + H_p^2 |W|^2 I] D(W) = F + f/(m-1)
//
// and its limit m = infinity, with W = Du - V(x, u) and
// D(W) = D^2 u - V_eta Du - V_x.

#ifndef LINF_ELSYSTEM_H_
#define LINF_ELSYSTEM_H_

#include <limits>
#include <string>
#include <vector>

#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/types.h"

namespace linf {

struct ProjPair {
  Mat tangent;  // sgn(xi) sgn(xi)^T
  Mat perp;     // I - tangent
};
ProjPair ProjectionPair(const Vec& xi);

// Arguments (x, eta, P, X) and everything derived from them.
struct SystemPointState {
  double x = 0.0;
  Vec eta;
  Vec P;
  Vec X;
  Vec W;
  double p = 0.0;
  HPartials h;
  VPartials v;

  Vec DW() const { return X - v.V_eta * P - v.V_x; }
};
SystemPointState MakeState(const LagrangianModel& model, double x,
                           const Vec& eta, const Vec& P, const Vec& X);

// kDerived: the perpendicular term of F carries one factor H_p, as obtained
// by differentiating the L^m energy. kPrinted: the (H_p)^2 variant found in
// some write-ups, kept for comparison only.
enum class CoefficientConvention { kDerived, kPrinted };

struct CoeffBlocks {
  Vec F;
  Vec f;
  Mat A;
};
CoeffBlocks CoefficientBlocks(
    const SystemPointState& s,
    CoefficientConvention convention = CoefficientConvention::kDerived);

// The limiting operator assembled term by term:
//   |W|^2 H_p^2 D(W) + H_p (H_x + P . H_eta) W
//     - H_p (|W|^2 I - W W^T)(H_eta - H_p V_eta^T W).
Vec LinfOperator(const SystemPointState& s);
// The same operator as H_p^2 |W|^2 D(W) - F.
Vec LinfOperatorRearranged(
    const SystemPointState& s,
    CoefficientConvention convention = CoefficientConvention::kDerived);
// |r| / (1 + |W|^2 H_p^2).
double NormalizedMagnitude(const Vec& r, const SystemPointState& s);

inline constexpr double kMInfinity = std::numeric_limits<double>::infinity();

// Residual at the interior nodes 1..n_cells-1 (column i - 1 is node i).
struct ResidualField {
  Grid grid;
  double m = kMInfinity;
  Mat raw;
  Vec normalized;  // per node
  double sup_raw = 0.0;
  double sup_normalized = 0.0;
  double l2_raw = 0.0;  // sqrt(h sum |r_i|^2)

  double node_x(int k) const { return grid.node(k + 1); }
};

// Node-wise residual of the expanded system with P the centered gradient and
// X the three-point second difference. m >= 2 or kMInfinity.
ResidualField ExpandedResidual(const GridFunction& u,
                               const LagrangianModel& model, double m,
                               Exec exec = Exec::kSerial);

// The limiting system for H = 1 + |k - K(eta)|^2 / 2 + p assembled directly
// from K, k and V:
//   |W|^2 (D^2u - V_eta Du - V_x) - |W|^2 [W]^perp (K_eta^T (K - k) - V_eta^T W)
//     - [(K - k) . k_x - (K - k)^T K_eta Du] W.
ResidualField DaResidual(const GridFunction& u, const ObservationModel& obs,
                         const VectorField& field, Exec exec = Exec::kSerial);

// CSV `x,res_1..res_N,|res|`.
std::string ResidualToCsv(const ResidualField& r);

}  // namespace linf

#endif  // LINF_ELSYSTEM_H_
