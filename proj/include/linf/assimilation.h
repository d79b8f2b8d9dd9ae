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


// Data assimilation workflow: synthesize a truth trajectory and noisy partial
// measurements, solve the classical (m = 1) and supremal problems with the
// same data, and compare their misfit profiles.

#ifndef LINF_ASSIMILATION_H_
#define LINF_ASSIMILATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linf/grid.h"
#include "linf/lagrangian.h"
#include "linf/solver.h"
#include "linf/types.h"

namespace linf {

struct Outlier {
  int sample = 0;  // index into the measurement samples
  Vec offset;      // added to the measurement
};

// Additive noise, uniform in [-amplitude, amplitude] per component and
// sample, drawn from a seeded mt19937_64.
struct NoiseSpec {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  std::vector<Outlier> outliers;
};

struct AssimilationProblem {
  Interval interval;
  int n_cells = 200;
  VectorField dynamics;
  Mat observation;  // K(eta) = C eta
  // Synthetic runs: truth starts here; measurements every sample_stride-th
  // node (the last node is always sampled).
  std::optional<Vec> initial_state;
  int sample_stride = 1;
  NoiseSpec noise;
  // Ingested runs: measurements supplied directly.
  std::optional<MeasurementSeries> measurements;
  // Endpoint data; defaults to the truth endpoints.
  std::optional<Vec> left;
  std::optional<Vec> right;
  SampleBox box;
  int hypothesis_samples = 256;
  std::uint64_t hypothesis_seed = 0;

  // Throws InputError on inconsistent dimensions or a missing data source.
  void Validate() const;
};

struct Synthesis {
  GridFunction truth;
  MeasurementSeries measurements;
};

// Classical RK4 at grid resolution. Throws NumericalError on blow-up.
GridFunction IntegrateTruth(const VectorField& dynamics, const Grid& grid,
                            const Vec& initial_state);

Synthesis Synthesize(const AssimilationProblem& problem);

struct MisfitSummary {
  double model_sup = 0.0;  // |Du - V(., u)| per cell
  double model_l2 = 0.0;
  double obs_sup = 0.0;    // |K(u) - k| per cell
  double obs_l2 = 0.0;
  std::optional<double> truth_sup;  // sup over nodes of |u - truth|
  double spike = 0.0;               // max / mean of L per cell
  double esup = 0.0;
};

struct PointwiseMisfit {
  Vec x;              // cell midpoints
  Vec model;          // |W|
  Vec observation;    // |K(u) - k|
  Vec lagrangian;     // L
};

struct ComparisonReport {
  Grid grid;
  MeasurementSeries measurements;
  std::optional<GridFunction> truth;
  HypothesisReport hypotheses;
  SolveReport classical;  // schedule {1}
  SolveReport supremal;   // full schedule
  MisfitSummary classical_misfit;
  MisfitSummary supremal_misfit;
  PointwiseMisfit classical_pointwise;
  PointwiseMisfit supremal_pointwise;
  double scale = 1.0;  // max(1, E_inf of the classical solution)
  bool esup_ordering = true;   // E_inf(u_inf) <= E_inf(u_1) + 1e-6 scale
  bool spike_ordering = true;  // spike(u_inf) <= spike(u_1)
};

PointwiseMisfit ComputePointwiseMisfit(const GridFunction& u,
                                       const LagrangianModel& model,
                                       const ObservationModel& obs);

MisfitSummary Summarize(const PointwiseMisfit& pointwise, const Grid& grid,
                        const GridFunction& u,
                        const std::optional<GridFunction>& truth);

// Throws InputError when the hypotheses fail on problem.box.
ComparisonReport Assimilate(const AssimilationProblem& problem,
                            const SolveConfig& cfg);

// x, then model/observation misfit and L for both solutions.
std::string ComparisonToCsv(const ComparisonReport& report);

// CSV "x,k_1,...,k_M" with a header row. Errors name the offending line;
// a series not covering `interval` is rejected.
MeasurementSeries LoadMeasurements(const std::string& path,
                                   const Interval& interval);

std::string MeasurementsToCsv(const MeasurementSeries& series);

}  // namespace linf

#endif  // LINF_ASSIMILATION_H_
