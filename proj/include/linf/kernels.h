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

// Data-parallel kernels with a serial reference path.
//
// Per-item kernels (cell jets, node residuals) run the same function per item
// on both paths, so their results are bitwise identical. The exponential sum
// is reduced in fixed blocks of kReductionBlock cells on the parallel path,
// which makes it independent of the thread count.

#ifndef LINF_KERNELS_H_
#define LINF_KERNELS_H_

#include <exception>
#include <mutex>
#include <vector>

#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/types.h"

#if defined(LINF_HAVE_OPENMP)
#include <omp.h>
#endif

namespace linf {

inline constexpr int kReductionBlock = 256;

// Sets the OpenMP team size (no-op without OpenMP).
void SetThreadCount(int threads);
int MaxThreadCount();

// Runs f(i) for i in [0, n). Exceptions thrown by f are rethrown on the
// calling thread (the one from the lowest failing index is kept).
template <typename F>
void ForEachIndex(int n, Exec exec, F&& f) {
#if defined(LINF_HAVE_OPENMP)
  if (exec == Exec::kParallel) {
    std::exception_ptr error;
    int error_index = n;
    std::mutex lock;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(lock);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  (void)exec;
  for (int i = 0; i < n; ++i) f(i);
}

// Jet of L at (x_{j+1/2}, (u_j + u_{j+1}) / 2, Du_j) for every cell j.
std::vector<RadialJet> EvalCellJets(const GridFunction& u,
                                    const LagrangianModel& model,
                                    JetOrder order, Exec exec);

// L_j for every cell.
Vec EvalCellLagrangian(const GridFunction& u, const LagrangianModel& model,
                       Exec exec);

// sum over selected cells of exp(m (ell_j - shift)), shift = max selected
// ell_j. An empty mask pointer selects every cell.
struct ShiftedSum {
  double shift = 0.0;
  double sum = 0.0;
  int count = 0;
};
ShiftedSum ShiftedExpSum(const Vec& ell, double m, const CellMask* mask,
                         Exec exec);

}  // namespace linf

#endif  // LINF_KERNELS_H_
