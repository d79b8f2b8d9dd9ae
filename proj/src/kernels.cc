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

#include "linf/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace linf {

void SetThreadCount(int threads) {
#if defined(LINF_HAVE_OPENMP)
  omp_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

int MaxThreadCount() {
#if defined(LINF_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<RadialJet> EvalCellJets(const GridFunction& u,
                                    const LagrangianModel& model,
                                    JetOrder order, Exec exec) {
  if (u.dim() != model.dim()) {
    throw InputError("grid function and model dimensions differ");
  }
  const Grid& grid = u.grid();
  const double h = grid.h();
  std::vector<RadialJet> jets(grid.n_cells());
  ForEachIndex(grid.n_cells(), exec, [&](int j) {
    const Vec eta = 0.5 * (u.node(j) + u.node(j + 1));
    const Vec P = (u.node(j + 1) - u.node(j)) / h;
    jets[j] = EvalJet(model, grid.midpoint(j), eta, P, order);
  });
  return jets;
}

Vec EvalCellLagrangian(const GridFunction& u, const LagrangianModel& model,
                       Exec exec) {
  const Grid& grid = u.grid();
  const double h = grid.h();
  Vec L(grid.n_cells());
  ForEachIndex(grid.n_cells(), exec, [&](int j) {
    const Vec eta = 0.5 * (u.node(j) + u.node(j + 1));
    const Vec P = (u.node(j + 1) - u.node(j)) / h;
    L[j] = EvalL(model, grid.midpoint(j), eta, P);
  });
  return L;
}

namespace {

double MaskedMax(const Vec& ell, const CellMask* mask, int* count) {
  double best = -std::numeric_limits<double>::infinity();
  *count = 0;
  for (int j = 0; j < ell.size(); ++j) {
    if (mask && !(*mask)[j]) continue;
    best = std::max(best, ell[j]);
    ++*count;
  }
  return best;
}

}  // namespace

ShiftedSum ShiftedExpSum(const Vec& ell, double m, const CellMask* mask,
                         Exec exec) {
  ShiftedSum out;
  out.shift = MaskedMax(ell, mask, &out.count);
  if (out.count == 0) return out;
  const int n = static_cast<int>(ell.size());
  auto term = [&](int j) {
    if (mask && !(*mask)[j]) return 0.0;
    return std::exp(m * (ell[j] - out.shift));
  };
  if (exec == Exec::kSerial) {
    for (int j = 0; j < n; ++j) out.sum += term(j);
    return out;
  }
  const int blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  ForEachIndex(blocks, exec, [&](int b) {
    double s = 0.0;
    const int end = std::min(n, (b + 1) * kReductionBlock);
    for (int j = b * kReductionBlock; j < end; ++j) s += term(j);
    partial[b] = s;
  });
  for (double s : partial) out.sum += s;
  return out;
}

}  // namespace linf
