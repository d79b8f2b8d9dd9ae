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

#include "linf/elsystem.h"
#include "test_util.h"

namespace linf {
namespace {

using testing::RandomVec;
using testing::Vec2;

std::vector<LagrangianModel> Models() {
  return {BuiltinPower(2), testing::CurvedPowerModel(), BuiltinYu(1),
          BuiltinYu(3),
          BuiltinDataAssimilation(testing::RotationObservation(9, 2.0, 0.7),
                                  RotationField())};
}

double RelDiff(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

TEST(Projections, AreComplementaryIdempotents) {
  const ProjPair p = ProjectionPair(Vec2(3.0, -4.0));
  EXPECT_LT((p.tangent + p.perp - Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((p.tangent * p.tangent - p.tangent).norm(), 1e-15);
  EXPECT_LT((p.perp * Vec2(3.0, -4.0)).norm(), 1e-15);
  const ProjPair z = ProjectionPair(Vec::Zero(2));
  EXPECT_EQ(z.tangent, Mat::Zero(2, 2));
  EXPECT_EQ(z.perp, Mat::Identity(2, 2));
}

TEST(Operator, DirectAndRearrangedFormsAgree) {
  std::mt19937_64 rng(21);
  for (const LagrangianModel& model : Models()) {
    const int n = model.dim();
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
      const double x = std::uniform_real_distribution<>(0, 2)(rng);
      const SystemPointState s =
          MakeState(model, x, RandomVec(rng, n, 2), RandomVec(rng, n, 3),
                    RandomVec(rng, n, 5));
      worst = std::max(worst,
                       RelDiff(LinfOperator(s), LinfOperatorRearranged(s)));
    }
    EXPECT_LE(worst, 1e-10) << model.name();
  }
}

TEST(Operator, PrintedConventionDiffersWhenHpIsNotOne) {
  // The extra factor H_p matters once H_p != 1 and the perpendicular source
  // H_eta - H_p V_eta^T W is non-zero.
  const LagrangianModel model = testing::CurvedPowerModel();
  const SystemPointState s = MakeState(model, 0.8, Vec2(0.3, -0.2),
                                       Vec2(1.0, 2.0), Vec2(0.5, 0.1));
  ASSERT_GT(std::abs(s.h.H_p - 1.0), 0.1);
  const Vec derived = LinfOperatorRearranged(s);
  const Vec printed =
      LinfOperatorRearranged(s, CoefficientConvention::kPrinted);
  EXPECT_LT(RelDiff(derived, LinfOperator(s)), 1e-12);
  EXPECT_GT(RelDiff(printed, LinfOperator(s)), 1e-3);
}

TEST(Operator, VanishesOnCompatibleMotion) {
  // W = 0 identically along u' = V: every term carries a factor of W.
  const LagrangianModel m = testing::CompatibleModel();
  const SystemPointState s =
      MakeState(m, 0.3, Vec2(0.1, 0.2), Vec2(0.8, -0.5), Vec2(1.0, 0.0));
  EXPECT_LT(LinfOperator(s).norm(), 1e-15);
}

TEST(Residual, LimitEqualsTheOperatorAtNodeStates) {
  const LagrangianModel model = testing::CurvedPowerModel();
  const Grid g = BuildGrid({0, 1}, 20);
  std::mt19937_64 rng(22);
  const GridFunction u = testing::RandomFunction(g, 2, rng, 0.3);
  const ResidualField r = ExpandedResidual(u, model, kMInfinity);
  for (int i = 1; i < 20; ++i) {
    const SystemPointState s = MakeState(model, g.node(i), u.node(i),
                                         CenteredGradient(u, i),
                                         SecondDifference(u, i, 1));
    EXPECT_LT(RelDiff(r.raw.col(i - 1), LinfOperatorRearranged(s)), 1e-14);
    EXPECT_NEAR(r.normalized[i - 1],
                NormalizedMagnitude(r.raw.col(i - 1), s), 1e-15);
  }
}

TEST(Residual, FiniteMMatchesTheProjectedEulerLagrangeDefect) {
  // u(x) = (sin x, x^2) is not a critical point. With the scaled defect
  //   S = H / ((m - 1) L^{m-1}) (d/dx(L^{m-1} L_P) - L^{m-1} L_eta)
  // the expanded residual is T S + (m - 1) H_p |W|^2 / H (I - T) S, where T
  // projects onto W.
  const LagrangianModel model = testing::CurvedPowerModel();
  const Grid g = BuildGrid({0, 1}, 4000);
  GridFunction u(g, 2);
  for (int i = 0; i <= 4000; ++i) {
    const double x = g.node(i);
    u.node(i) = Vec2(std::sin(x), x * x);
  }
  auto jet = [&](double x) {
    return EvalJet(model, x, Vec2(std::sin(x), x * x),
                   Vec2(std::cos(x), 2 * x), JetOrder::kFirst);
  };
  for (double m : {2.0, 5.0, 40.0}) {
    const ResidualField r = ExpandedResidual(u, model, m);
    for (int i : {800, 2000, 3300}) {
      const double x = g.node(i), d = 1e-5;
      const RadialJet j0 = jet(x);
      // Flux and source relative to L(x)^{m-1} to avoid overflow.
      auto flux = [&](double y) {
        const RadialJet j = jet(y);
        return Vec(std::pow(j.L / j0.L, m - 1) * j.L_P);
      };
      const Vec defect = (flux(x + d) - flux(x - d)) / (2 * d) - j0.L_eta;
      const Vec S = j0.h.H / (m - 1) * defect;
      const ProjPair proj = ProjectionPair(j0.W);
      const Vec expected =
          proj.tangent * S + (m - 1) * j0.h.H_p * j0.W.squaredNorm() /
                                 j0.h.H * (proj.perp * S);
      EXPECT_LT(RelDiff(r.raw.col(i - 1), expected), 1e-5)
          << "m = " << m << ", x = " << x;
    }
  }
}

TEST(Residual, AffineSolutionsOfThePowerModelAreExact) {
  const Interval iv{0, 1};
  const GridFunction u = GridFunction::Affine(
      BuildGrid(iv, 32), AffineThrough(iv, Vec2(0, 0), Vec2(2, -1)));
  for (double m : {2.0, 64.0, kMInfinity}) {
    EXPECT_LT(ExpandedResidual(u, BuiltinPower(2), m).sup_raw, 1e-12);
  }
  EXPECT_THROW(ExpandedResidual(u, BuiltinPower(2), 1.0), InputError);
  const GridFunction tiny(BuildGrid(iv, 2), 2);
  EXPECT_THROW(ExpandedResidual(tiny, BuiltinPower(2), 4.0), InputError);
}

TEST(Residual, DataAssimilationFormMatchesTheGeneralOperator) {
  const ObservationModel obs = testing::RotationObservation(11, 2.0, 1.0);
  const LagrangianModel model = BuiltinDataAssimilation(obs, RotationField());
  const Grid g = BuildGrid({0, 2}, 40);
  std::mt19937_64 rng(23);
  const GridFunction u = testing::RandomFunction(g, 2, rng, 1.0);
  const ResidualField da = DaResidual(u, obs, RotationField());
  for (int i = 1; i < 40; ++i) {
    const SystemPointState s = MakeState(model, g.node(i), u.node(i),
                                         CenteredGradient(u, i),
                                         SecondDifference(u, i, 1));
    EXPECT_LT(RelDiff(da.raw.col(i - 1), LinfOperator(s)), 1e-12) << i;
  }
  EXPECT_THROW(DaResidual(u, obs, ZeroField(3)), InputError);
}

TEST(Residual, CsvHasOneRowPerInteriorNode) {
  const GridFunction u(BuildGrid({0, 1}, 5), 1);
  const std::string csv = ResidualToCsv(ExpandedResidual(u, BuiltinYu(1), 3.0));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.rfind("x,res_1,|res|\n", 0), 0u);
}

}  // namespace
}  // namespace linf
