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


// Problem files: versioned JSON describing a model, boundary data, solver
// settings and verification settings. Schema errors name the file and the
// offending field.

#ifndef LINF_PROBLEM_H_
#define LINF_PROBLEM_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "linf/assimilation.h"
#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/solver.h"

namespace linf {

inline constexpr int kSchemaVersion = 1;

enum class ProblemKind { kBoundaryValue, kAssimilation };

struct VerifySettings {
  int trials = 200;
  std::uint64_t seed = 0;
  std::optional<double> eps_sing;  // default: DefaultSingularEps
  bool descent_polish = true;
  std::vector<int> young_ladder = {1, 2, 4, 8};
  double dsolution_tol = 1e-3;  // relative to max(1, E_inf)
};

struct SweepSettings {
  std::vector<int> n_cells;  // default: {n / 2, n}
  std::vector<int> m_max;    // default: {last entry of the schedule}
};

struct Problem {
  std::string name;
  std::string source;  // file path
  ProblemKind kind = ProblemKind::kBoundaryValue;
  Interval interval;
  int n_cells = 64;
  int dim = 1;
  std::string model_name;
  std::shared_ptr<const LagrangianModel> model;
  Vec left;
  Vec right;
  SolveConfig solver;
  VerifySettings verify;
  SweepSettings sweep;
  SampleBox box;
  int hypothesis_samples = 256;
  std::uint64_t hypothesis_seed = 0;
  // Assimilation problems only; measurements and truth are resolved at load.
  std::optional<AssimilationProblem> assimilation;
  std::optional<GridFunction> truth;

  Grid grid() const { return BuildGrid(interval, n_cells); }
  AffineData data() const { return AffineThrough(interval, left, right); }
};

// Throws InputError naming source and field on any schema violation.
Problem ParseProblem(const nlohmann::json& doc, const std::string& source);
Problem LoadProblem(const std::string& path);

// Rebuilds the derived parts (grid-dependent truth and measurements) after
// n_cells is changed.
void SetCellCount(Problem* problem, int n_cells);

}  // namespace linf

#endif  // LINF_PROBLEM_H_
