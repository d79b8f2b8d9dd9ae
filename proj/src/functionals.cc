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

#include "linf/functionals.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "linf/kernels.h"

namespace linf {
namespace {

void CheckMask(const GridFunction& u, const CellMask& cells) {
  if (cells.size() != u.grid().n_cells()) {
    throw InputError(fmt::format("cell mask has {} cells, grid has {}",
                                 cells.size(), u.grid().n_cells()));
  }
  if (cells.Empty()) throw InputError("cell mask is empty");
}

Vec LogOf(const Vec& L) {
  Vec ell(L.size());
  for (int j = 0; j < L.size(); ++j) {
    if (!(L[j] > 0.0)) {
      throw ModelEvaluationError(fmt::format(
          "Lagrangian value {} <= 0 on cell {}; the model is not bounded below "
          "by a positive constant",
          L[j], j));
    }
    ell[j] = std::log(L[j]);
  }
  return ell;
}

// Per-cell first derivatives of L_j with respect to its left and right node.
struct CellFirst {
  Vec left;
  Vec right;
};

CellFirst CellDerivative(const RadialJet& jet, double h) {
  return {-jet.L_P / h + 0.5 * jet.L_eta, jet.L_P / h + 0.5 * jet.L_eta};
}

struct Weights {
  double energy = 0.0;
  Vec w;  // L_j^m / sum L^m
};

Weights PowerWeights(const std::vector<RadialJet>& jets, int m, Exec exec) {
  Vec L(static_cast<int>(jets.size()));
  for (int j = 0; j < L.size(); ++j) L[j] = jets[j].L;
  const Vec ell = LogOf(L);
  const ShiftedSum s = ShiftedExpSum(ell, m, nullptr, exec);
  if (!std::isfinite(s.sum) || !(s.sum >= 1.0)) {
    throw NumericalError("power-mean overflow guard tripped");
  }
  Weights out;
  out.energy = std::exp(s.shift) * std::pow(s.sum / s.count, 1.0 / m);
  out.w.resize(L.size());
  for (int j = 0; j < L.size(); ++j) {
    out.w[j] = std::exp(m * (ell[j] - s.shift)) / s.sum;
  }
  return out;
}

}  // namespace

double EsupEnergy(const GridFunction& u, const LagrangianModel& model,
                  const CellMask& cells) {
  CheckMask(u, cells);
  const Vec L = EvalCellLagrangian(u, model, Exec::kSerial);
  double best = 0.0;
  bool first = true;
  for (int j = 0; j < L.size(); ++j) {
    if (!cells[j]) continue;
    if (first || L[j] > best) best = L[j];
    first = false;
  }
  return best;
}

double PowerMean(const Vec& L, int m, const CellMask* cells, Exec exec) {
  if (m < 1) throw InputError("power mean: m must be >= 1");
  const ShiftedSum s = ShiftedExpSum(LogOf(L), m, cells, exec);
  if (s.count == 0) throw InputError("power mean: empty selection");
  return std::exp(s.shift) * std::pow(s.sum / s.count, 1.0 / m);
}

EnergyBreakdown EmEnergy(const GridFunction& u, const LagrangianModel& model,
                         int m, const CellMask& cells, Exec exec) {
  CheckMask(u, cells);
  if (m < 1) throw InputError("energy: m must be >= 1");
  EnergyBreakdown out;
  out.m = m;
  out.L = EvalCellLagrangian(u, model, exec);
  const ShiftedSum s = ShiftedExpSum(LogOf(out.L), m, &cells, exec);
  out.cells = s.count;
  out.log_raw = std::log(u.grid().h()) + m * s.shift + std::log(s.sum);
  out.normalized = std::exp(s.shift) * std::pow(s.sum / s.count, 1.0 / m);
  out.esup = 0.0;
  for (int j = 0; j < out.L.size(); ++j) {
    if (cells[j]) out.esup = std::max(out.esup, out.L[j]);
  }
  return out;
}

EnergyBreakdown EmEnergy(const GridFunction& u, const LagrangianModel& model,
                         int m, Exec exec) {
  return EmEnergy(u, model, m, CellMask::All(u.grid().n_cells()), exec);
}

Mat EmGradient(const GridFunction& u, const LagrangianModel& model, int m,
               Exec exec) {
  if (m < 1) throw InputError("gradient: m must be >= 1");
  const Grid& grid = u.grid();
  const int n = grid.n_cells();
  const double h = grid.h();
  const auto jets = EvalCellJets(u, model, JetOrder::kFirst, exec);
  const Weights wt = PowerWeights(jets, m, exec);
  Mat grad(u.dim(), n - 1);
  ForEachIndex(n - 1, exec, [&](int k) {
    const int i = k + 1;
    const CellFirst a = CellDerivative(jets[i - 1], h);
    const CellFirst b = CellDerivative(jets[i], h);
    grad.col(k) = wt.energy * (wt.w[i - 1] / jets[i - 1].L * a.right +
                               wt.w[i] / jets[i].L * b.left);
  });
  return grad;
}

Vec EnergyHessian::Multiply(const Vec& x) const {
  return T.Multiply(x) - rank_one * gbar.dot(x) * gbar;
}

Mat EnergyHessian::ToDense() const {
  return T.ToDense() - rank_one * gbar * gbar.transpose();
}

EnergyHessian AssembleHessian(const GridFunction& u,
                              const LagrangianModel& model, int m, Exec exec) {
  if (m < 1) throw InputError("hessian: m must be >= 1");
  const Grid& grid = u.grid();
  const int n = grid.n_cells();
  const int N = u.dim();
  const double h = grid.h();
  const auto jets = EvalCellJets(u, model, JetOrder::kSecond, exec);
  const Weights wt = PowerWeights(jets, m, exec);
  const double E = wt.energy;

  // Per cell: weighted blocks of E w_j [Hess L_j / L_j + (m-1) dl dl^T] and
  // the weighted log-gradient pieces.
  struct CellBlocks {
    Mat ll, lr, rr;
    Vec gl, gr;  // w_j grad ell_j
  };
  std::vector<CellBlocks> cb(n);
  ForEachIndex(n, exec, [&](int j) {
    const RadialJet& jet = jets[j];
    const double w = wt.w[j];
    const CellFirst d = CellDerivative(jet, h);
    const Vec dl = d.left / jet.L;
    const Vec dr = d.right / jet.L;
    const Mat cross = jet.L_Peta / (2.0 * h);
    const Mat quarter = 0.25 * jet.L_etaeta;
    const Mat pp = jet.L_PP / (h * h);
    // s_a s_b / h^2 L_PP + s_a/(2h) L_Peta + s_b/(2h) L_Peta^T + L_etaeta / 4
    const Mat hll = pp - cross - cross.transpose() + quarter;
    const Mat hrr = pp + cross + cross.transpose() + quarter;
    const Mat hlr = -pp - cross + cross.transpose() + quarter;
    const double s = E * w;
    cb[j].ll = s * (hll / jet.L + (m - 1.0) * dl * dl.transpose());
    cb[j].rr = s * (hrr / jet.L + (m - 1.0) * dr * dr.transpose());
    cb[j].lr = s * (hlr / jet.L + (m - 1.0) * dl * dr.transpose());
    cb[j].gl = w * dl;
    cb[j].gr = w * dr;
  });

  EnergyHessian out;
  out.energy = E;
  out.T = BlockTridiag(n - 1, N);
  out.gbar.resize((n - 1) * N);
  ForEachIndex(n - 1, exec, [&](int k) {
    const int i = k + 1;
    out.T.diag(k) = cb[i - 1].rr + cb[i].ll;
    if (k + 1 < n - 1) out.T.lower(k) = cb[i].lr.transpose();
    out.gbar.segment(k * N, N) = cb[i - 1].gr + cb[i].gl;
  });
  out.gradient = E * out.gbar;
  out.rank_one = E * (m - 1.0);
  return out;
}

Vec InteriorToVector(const GridFunction& u) {
  const int N = u.dim();
  const int k = u.grid().n_cells() - 1;
  Vec x(k * N);
  for (int i = 0; i < k; ++i) x.segment(i * N, N) = u.node(i + 1);
  return x;
}

void VectorToInterior(const Vec& x, GridFunction* u) {
  const int N = u->dim();
  const int k = u->grid().n_cells() - 1;
  for (int i = 0; i < k; ++i) u->node(i + 1) = x.segment(i * N, N);
}

}  // namespace linf
