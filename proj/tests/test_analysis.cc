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


#include <gtest/gtest.h>

#include "linf/analysis.h"
#include "linf/functionals.h"
#include "test_util.h"

namespace linf {
namespace {

using testing::Vec1;
using testing::Vec2;

GridFunction AffinePower(int n) {
  const Interval iv{0, 1};
  return GridFunction::Affine(BuildGrid(iv, n),
                              AffineThrough(iv, Vec2(0, 0), Vec2(2, -1)));
}

TEST(Minimality, AffinePowerSolutionHasNoViolations) {
  MinimalityOptions opt;
  opt.trials = 60;
  opt.seed = 3;
  const auto trials = VerifyAbsoluteMinimiser(AffinePower(32), BuiltinPower(2), opt);
  ASSERT_EQ(trials.size(), 60u);
  EXPECT_EQ(WorstMargin(trials), 0.0);
  for (const auto& t : trials) {
    EXPECT_GE(t.end_node - t.begin_node, 4);
    EXPECT_EQ(t.coefficients.cols(), t.end_node - t.begin_node - 1);
    EXPECT_NEAR(t.esup_u, 3.5, 1e-12);
  }
}

TEST(Minimality, SpikeIsDetected) {
  GridFunction u = AffinePower(32);
  u.node(16)[0] += 0.05;
  MinimalityOptions opt;
  opt.trials = 30;
  const auto trials = VerifyAbsoluteMinimiser(u, BuiltinPower(2), opt);
  EXPECT_GT(WorstMargin(trials), 0.1);
  // Without polishing, random perturbations alone rarely help; with it the
  // falsifier must find the improvement on any span covering the spike.
  for (const auto& t : trials) {
    if (t.begin_node < 15 && t.end_node > 17) {
      EXPECT_GT(t.margin, 0.0) << t.index;
    }
  }
}

TEST(Minimality, DeterministicAndThreadIndependent) {
  GridFunction u = AffinePower(24);
  u.node(7)[1] -= 0.02;
  MinimalityOptions opt;
  opt.trials = 20;
  opt.seed = 99;
  const auto a = VerifyAbsoluteMinimiser(u, BuiltinPower(2), opt);
  opt.exec = Exec::kParallel;
  const auto b = VerifyAbsoluteMinimiser(u, BuiltinPower(2), opt);
  ASSERT_EQ(a.size(), b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].begin_node, b[k].begin_node);
    EXPECT_EQ(a[k].margin, b[k].margin);
    EXPECT_EQ(a[k].coefficients, b[k].coefficients);
  }
}

TEST(Minimality, RejectsTinyGrids) {
  const Interval iv{0, 1};
  const GridFunction u(BuildGrid(iv, 3), 1);
  EXPECT_THROW(VerifyAbsoluteMinimiser(u, BuiltinYu(1), {}), InputError);
}

TEST(Young, QuadraticHasASingleAtomAtTheSecondDerivative) {
  const Grid g = BuildGrid({0, 1}, 40);
  GridFunction u(g, 1);
  for (int i = 0; i <= 40; ++i) u.node(i)[0] = 1.5 * g.node(i) * g.node(i);
  const EmpiricalYoungMeasure eym =
      BuildEmpiricalYoungMeasure(u, {1, 2, 4, 8}, DefaultYoungCap(u));
  ASSERT_EQ(eym.nodes.size(), 39u);
  for (const YoungNode& n : eym.nodes) {
    ASSERT_EQ(n.clusters.size(), 1u);
    EXPECT_NEAR(n.clusters[0].center[0], 3.0, 1e-8);
    EXPECT_DOUBLE_EQ(n.clusters[0].weight, 1.0);
    EXPECT_EQ(n.escaped_fraction, 0.0);
  }
  // Steps leaving the grid are skipped near the ends.
  EXPECT_EQ(eym.nodes.front().steps.size(), 1u);
  EXPECT_EQ(eym.nodes[19].steps.size(), 4u);
}

TEST(Young, KinkEscapesToInfinity) {
  // |x - 1/2| at n = 400: quotients 2 / (k h) exceed a small cap.
  const Grid g = BuildGrid({0, 1}, 400);
  GridFunction u(g, 1);
  for (int i = 0; i <= 400; ++i) u.node(i)[0] = std::abs(g.node(i) - 0.5);
  const EmpiricalYoungMeasure eym = BuildEmpiricalYoungMeasure(u, {1, 2, 4}, 50.0);
  const YoungNode& kink = eym.nodes[199];
  EXPECT_EQ(kink.node, 200);
  EXPECT_EQ(kink.escaped_fraction, 1.0);
  EXPECT_TRUE(kink.clusters.empty());
  EXPECT_THROW(BuildEmpiricalYoungMeasure(u, {}, 1.0), InputError);
  EXPECT_THROW(BuildEmpiricalYoungMeasure(u, {0}, 1.0), InputError);
}

TEST(DSolution, AffinePowerSolutionIsARoot) {
  const GridFunction u = AffinePower(32);
  const auto eym = BuildEmpiricalYoungMeasure(u, {1, 2, 4}, DefaultYoungCap(u));
  const DSolutionReport r = DSolutionCheck(u, BuiltinPower(2), eym, 1e-10);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.checked, 31);
  EXPECT_LT(r.worst, 1e-12);
  // A parabola is not a root of the power system.
  GridFunction bent = u;
  for (int i = 0; i <= 32; ++i) {
    const double x = u.grid().node(i);
    bent.node(i)[0] += x * (1 - x);
  }
  const auto eym2 = BuildEmpiricalYoungMeasure(bent, {1}, DefaultYoungCap(bent));
  EXPECT_FALSE(DSolutionCheck(bent, BuiltinPower(2), eym2, 1e-3).pass);
}

TEST(DSolution, SelectionRestrictsTheCheckedNodes) {
  const GridFunction u = AffinePower(16);
  const auto eym = BuildEmpiricalYoungMeasure(u, {1}, DefaultYoungCap(u));
  const CellMask cells = CellMask::Range(16, 4, 8);
  EXPECT_EQ(DSolutionCheck(u, BuiltinPower(2), eym, 1e-10, &cells).checked, 3);
}

TEST(SingularSet, CompatibleMotionIsSingularEverywhere) {
  const Interval iv{0, 1};
  const Grid g = BuildGrid(iv, 50);
  const GridFunction u = GridFunction::Affine(
      g, AffineThrough(iv, Vec2(0, 0), Vec2(1, -0.5)));
  const LagrangianModel model = testing::CompatibleModel();
  // Du = (1, -1/2) against V = (1/2 + x, -1/2): W = (1/2 - x, 0) vanishes
  // only at the middle, so use the exact motion instead.
  GridFunction exact(g, 2);
  for (int i = 0; i <= 50; ++i) {
    const double x = g.node(i);
    exact.node(i) = Vec2(0.5 * x + 0.5 * x * x, -0.5 * x);
  }
  const SingularSetReport s =
      DetectSingularSet(exact, model, DefaultSingularEps(exact));
  EXPECT_EQ(s.singular.Count(), 50);
  EXPECT_TRUE(s.boundary_cells.empty());
  const SingularSetReport t = DetectSingularSet(u, model, 0.05);
  EXPECT_GT(t.singular.Count(), 0);
  EXPECT_LT(t.singular.Count(), 50);
  EXPECT_EQ(t.boundary_cells.size(), 4u);
}

TEST(SingularSet, MasksAreNestedUnderEpsHalving) {
  const Grid g = BuildGrid({0, 1}, 200);
  GridFunction u(g, 1);
  for (int i = 0; i <= 200; ++i) {
    u.node(i)[0] = std::sin(6 * g.node(i)) / 6;
  }
  const LagrangianModel model = BuiltinYu(1);
  CellMask prev = DetectSingularSet(u, model, 0.8).singular;
  for (double eps = 0.4; eps > 1e-3; eps /= 2) {
    const CellMask next = DetectSingularSet(u, model, eps).singular;
    EXPECT_TRUE(next.IsSubsetOf(prev)) << eps;
    prev = next;
  }
  EXPECT_THROW(DetectSingularSet(u, model, 0.0), InputError);
}

TEST(Lsc, HoldsAlongAContinuation) {
  const Interval iv{0, 3.141592653589793};
  SolveConfig cfg;
  cfg.m_schedule = SolveConfig::DoublingSchedule(256);
  const SolveReport r = ContinuationSolve(
      BuiltinYu(1), AffineThrough(iv, Vec1(0), Vec1(1)), BuildGrid(iv, 64), cfg);
  const LscTable t = LscDiagnostic(r, BuiltinYu(1), 5);
  EXPECT_EQ(t.rows.size(), 9u);
  EXPECT_EQ(t.rows.front().set, "full");
  EXPECT_TRUE(t.pass);
  for (const LscRow& row : t.rows) {
    EXPECT_GE(row.margin, -1e-8 * r.esup_final) << row.set;
  }
  EXPECT_THROW(LscDiagnostic(SolveReport{}, BuiltinYu(1), 5), InputError);
}

}  // namespace
}  // namespace linf
