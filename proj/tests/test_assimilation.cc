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


#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "linf/assimilation.h"
#include "test_util.h"

namespace linf {
namespace {

using testing::Vec1;
using testing::Vec2;

std::string WriteTemp(const std::string& name, const std::string& content) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream(path) << content;
  return path;
}

AssimilationProblem RotationProblem(double noise, double outlier) {
  AssimilationProblem p;
  p.interval = {0, 2};
  p.n_cells = 200;
  p.dynamics = RotationField();
  p.observation = Mat(1, 2);
  p.observation << 1, 0;
  p.initial_state = Vec2(1, 0);
  p.sample_stride = 5;
  p.noise.amplitude = noise;
  p.noise.seed = 11;
  if (outlier != 0) p.noise.outliers.push_back({20, Vec1(outlier)});
  p.box.eta_bound = 2;
  p.hypothesis_seed = 3;
  return p;
}

TEST(Truth, RotationFollowsTheCircle) {
  const Grid g = BuildGrid({0, 3.141592653589793 / 2}, 200);
  const GridFunction u = IntegrateTruth(RotationField(), g, Vec2(1, 0));
  EXPECT_LT((u.node(200) - Vec2(0, 1)).norm(), 1e-6);
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double x = g.node(i);
    worst = std::max(worst, (u.node(i) - Vec2(std::cos(x), std::sin(x))).norm());
  }
  EXPECT_LT(worst, 1e-9);  // O(h^4) with h ~ 8e-3
}

TEST(Truth, ZeroDynamicsIsConstant) {
  AssimilationProblem p = RotationProblem(0, 0);
  p.dynamics = ZeroField(2);
  p.initial_state = Vec2(0.3, -0.7);
  const Synthesis s = Synthesize(p);
  for (int i = 0; i <= 200; ++i) EXPECT_EQ(s.truth.node(i), Vec2(0.3, -0.7));
  for (int k = 0; k < s.measurements.size(); ++k) {
    EXPECT_EQ(s.measurements.values()(0, k), 0.3);
  }
}

TEST(Truth, BlowUpIsReported) {
  VectorField fast{"fast", 1, [](double, const Vec& e) {
                     VPartials v;
                     v.V = Vec1(e[0] * e[0] * 1e200);
                     v.V_x = Vec1(0);
                     v.V_eta = Mat::Constant(1, 1, 2 * e[0] * 1e200);
                     return v;
                   }};
  EXPECT_THROW(IntegrateTruth(fast, BuildGrid({0, 1}, 10), Vec1(1.0)),
               NumericalError);
}

TEST(Synthesis, SamplesNoiseAndOutliers) {
  const Synthesis clean = Synthesize(RotationProblem(0, 0));
  ASSERT_EQ(clean.measurements.size(), 41);
  for (int k = 0; k < 41; ++k) {
    EXPECT_EQ(clean.measurements.xs()[k], clean.truth.grid().node(5 * k));
    EXPECT_EQ(clean.measurements.values()(0, k), clean.truth.node(5 * k)[0]);
  }
  const Synthesis noisy = Synthesize(RotationProblem(0.01, 1.5));
  const Synthesis again = Synthesize(RotationProblem(0.01, 1.5));
  EXPECT_EQ(noisy.measurements.values(), again.measurements.values());
  const Mat diff = noisy.measurements.values() - clean.measurements.values();
  for (int k = 0; k < 41; ++k) {
    if (k == 20) {
      EXPECT_NEAR(diff(0, k), 1.5, 0.01);
    } else {
      EXPECT_LE(std::abs(diff(0, k)), 0.01);
      EXPECT_NE(diff(0, k), 0.0);
    }
  }
}

TEST(Synthesis, StrideNotDividingTheGridStillSamplesTheEnd) {
  AssimilationProblem p = RotationProblem(0, 0);
  p.n_cells = 203;
  const Synthesis s = Synthesize(p);
  EXPECT_EQ(s.measurements.xs().back(), 2.0);
  EXPECT_EQ(s.measurements.size(), 42);
}

TEST(Problem, ValidationErrors) {
  AssimilationProblem p = RotationProblem(0, 0);
  p.observation = Mat::Identity(3, 3);
  EXPECT_THROW(p.Validate(), InputError);
  p = RotationProblem(0, 0);
  p.initial_state.reset();
  EXPECT_THROW(p.Validate(), InputError);
  p = RotationProblem(0, 0);
  p.noise.outliers.push_back({99, Vec1(1.0)});
  EXPECT_THROW(Synthesize(p), InputError);
}

TEST(Assimilate, ZeroNoiseReachesTheExactSolution) {
  const ComparisonReport r = Assimilate(RotationProblem(0, 0), {});
  const double h = r.grid.h();
  for (const MisfitSummary* s : {&r.classical_misfit, &r.supremal_misfit}) {
    EXPECT_NEAR(s->esup, 1.0, 1e-4);
    EXPECT_LT(s->model_sup, 10 * h);
    EXPECT_LT(s->obs_sup, 10 * h);
    ASSERT_TRUE(s->truth_sup.has_value());
    EXPECT_LT(*s->truth_sup, 10 * h);
  }
  EXPECT_TRUE(r.esup_ordering);
}

TEST(Assimilate, OutlierSpikeIsSuppressed) {
  const ComparisonReport r = Assimilate(RotationProblem(0.01, 1.5), {});
  EXPECT_TRUE(r.classical.all_converged);
  EXPECT_TRUE(r.supremal.all_converged);
  EXPECT_TRUE(r.spike_ordering);
  EXPECT_TRUE(r.esup_ordering);
  EXPECT_GT(r.classical_misfit.spike, r.supremal_misfit.spike);
  EXPECT_EQ(r.classical.stages.size(), 1u);
  const std::string csv = ComparisonToCsv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
}

TEST(Assimilate, IncompatibleConstantIsEquidistributed) {
  // V = 0, K = I, k = 1 with zero endpoint data: the supremal solution
  // spreads the misfit so that L is nearly constant across cells.
  AssimilationProblem p;
  p.interval = {0, 1};
  p.n_cells = 200;
  p.dynamics = ZeroField(1);
  p.observation = Mat::Identity(1, 1);
  p.measurements = MeasurementSeries({0.0, 1.0}, Mat::Ones(1, 2));
  p.left = Vec1(0);
  p.right = Vec1(0);
  p.box.eta_bound = 2;
  const ComparisonReport r = Assimilate(p, {});
  const Vec& L = r.supremal_pointwise.lagrangian;
  EXPECT_LT((L.maxCoeff() - L.minCoeff()) / L.maxCoeff(), 0.02);
  EXPECT_FALSE(r.truth.has_value());
}

TEST(Assimilate, FailingHypothesesAreRejected) {
  AssimilationProblem p = RotationProblem(0, 0);
  p.box.eta_bound = 10;
  EXPECT_THROW(Assimilate(p, {}), InputError);
}

TEST(Measurements, LoadsAWellFormedFile) {
  const std::string path =
      WriteTemp("linf_meas_ok.csv", "x,k_1,k_2\n0,1,2\n0.5,3,4\n1,5,6\n");
  const MeasurementSeries s = LoadMeasurements(path, {0, 1});
  EXPECT_EQ(s.size(), 3);
  EXPECT_EQ(s.obs_dim(), 2);
  EXPECT_EQ(s.values()(1, 2), 6.0);
  EXPECT_EQ(MeasurementsToCsv(s),
            "x,k_1,k_2\n0,1,2\n0.5,3,4\n1,5,6\n");
}

TEST(Measurements, DecreasingRowIsNamed) {
  const std::string path =
      WriteTemp("linf_meas_dec.csv", "x,k_1\n0,1\n0.6,1\n0.4,1\n1,1\n");
  try {
    LoadMeasurements(path, {0, 1});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
}

TEST(Measurements, CoverageGapIsRejected) {
  const std::string path =
      WriteTemp("linf_meas_gap.csv", "x,k_1\n0,1\n0.5,1\n0.9,1\n");
  try {
    LoadMeasurements(path, {0, 1});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("coverage"), std::string::npos);
  }
  const std::string bad = WriteTemp("linf_meas_cols.csv", "x,k_1\n0,1\n1,1,2\n");
  EXPECT_THROW(LoadMeasurements(bad, {0, 1}), InputError);
}

}  // namespace
}  // namespace linf
