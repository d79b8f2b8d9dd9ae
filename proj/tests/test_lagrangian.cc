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

#include "linf/lagrangian.h"
#include "test_util.h"

namespace linf {
namespace {

using testing::RandomVec;
using testing::Vec1;
using testing::Vec2;

struct NamedModel {
  std::string name;
  LagrangianModel model;
};

std::vector<NamedModel> Models() {
  std::vector<NamedModel> out;
  out.push_back({"power", BuiltinPower(2)});
  out.push_back({"curved_power", testing::CurvedPowerModel()});
  out.push_back({"yu", BuiltinYu(1)});
  out.push_back({"data_assimilation",
                 BuiltinDataAssimilation(
                     testing::RotationObservation(9, 2.0, 0.0),
                     RotationField())});
  return out;
}

// Central difference of a scalar function along coordinate `k` of a vector.
template <typename F>
double Partial(F f, Vec z, int k, double step = 1e-6) {
  const double s = step * std::max(1.0, std::abs(z[k]));
  z[k] += s;
  const double fp = f(z);
  z[k] -= 2 * s;
  const double fm = f(z);
  return (fp - fm) / (2 * s);
}

TEST(Lagrangian, JetMatchesFiniteDifferencesOfL) {
  std::mt19937_64 rng(17);
  for (const auto& [name, model] : Models()) {
    const int n = model.dim();
    for (int t = 0; t < 20; ++t) {
      const double x = 0.05 + 0.9 * std::uniform_real_distribution<>(0, 1)(rng);
      const Vec eta = RandomVec(rng, n, 1.0);
      const Vec P = RandomVec(rng, n, 2.0);
      const RadialJet jet = EvalJet(model, x, eta, P, JetOrder::kSecond);
      EXPECT_NEAR(jet.L, EvalL(model, x, eta, P), 1e-14 * jet.L);
      const double scale = 1.0 + jet.L;
      for (int k = 0; k < n; ++k) {
        auto fP = [&](const Vec& z) { return EvalL(model, x, eta, z); };
        auto fE = [&](const Vec& z) { return EvalL(model, x, z, P); };
        EXPECT_NEAR(jet.L_P[k], Partial(fP, P, k), 1e-6 * scale) << name;
        EXPECT_NEAR(jet.L_eta[k], Partial(fE, eta, k), 1e-6 * scale) << name;
        // Second derivatives from differences of the analytic first ones.
        for (int l = 0; l < n; ++l) {
          auto gPP = [&](const Vec& z) {
            return EvalJet(model, x, eta, z, JetOrder::kFirst).L_P[l];
          };
          auto gEP = [&](const Vec& z) {
            return EvalJet(model, x, z, P, JetOrder::kFirst).L_P[l];
          };
          auto gEE = [&](const Vec& z) {
            return EvalJet(model, x, z, P, JetOrder::kFirst).L_eta[l];
          };
          EXPECT_NEAR(jet.L_PP(l, k), Partial(gPP, P, k), 1e-5 * scale) << name;
          EXPECT_NEAR(jet.L_Peta(l, k), Partial(gEP, eta, k), 1e-5 * scale)
              << name;
          EXPECT_NEAR(jet.L_etaeta(l, k), Partial(gEE, eta, k), 2e-5 * scale)
              << name;
        }
      }
    }
  }
}

TEST(Lagrangian, ClosedForms) {
  // Yu: L = 1 + sin^2 x + |P|^2.
  const LagrangianModel yu = BuiltinYu(1);
  EXPECT_NEAR(EvalL(yu, 0.7, Vec1(3.0), Vec1(2.0)),
              1 + std::sin(0.7) * std::sin(0.7) + 4.0, 1e-15);
  // Power: L = 1 + |P|^2 / 2.
  EXPECT_DOUBLE_EQ(EvalL(BuiltinPower(2), 0.1, Vec2(1, 1), Vec2(2, -1)), 3.5);
  // Compatible drift V = (0.5 + x, -0.5) makes W vanish on the data.
  const LagrangianModel comp = testing::CompatibleModel();
  EXPECT_DOUBLE_EQ(EvalL(comp, 0.25, Vec2(0, 0), Vec2(0.75, -0.5)), 1.0);
}

TEST(Lagrangian, RejectsInvalidParameters) {
  PowerOptions bad;
  bad.exponent = 1.5;
  EXPECT_THROW(BuiltinPower(1, bad), InputError);
  EXPECT_THROW(BuiltinDataAssimilation(testing::RotationObservation(5, 1, 0),
                                       ZeroField(3)),
               InputError);
}

TEST(Lagrangian, NonFiniteEvaluationThrows) {
  HypothesisConstants hyp;
  LagrangianModel broken(
      "broken", 1,
      [](double, const Vec& eta, double) {
        HPartials h;
        h.H = std::log(eta[0]);
        h.H_p = 1;
        h.H_eta = Vec::Zero(1);
        h.H_peta = Vec::Zero(1);
        return h;
      },
      ZeroField(1), hyp);
  EXPECT_THROW(EvalL(broken, 0.0, Vec1(-1.0), Vec1(0.0)), ModelEvaluationError);
}

TEST(Hypotheses, BuiltinsPassOnTheirBoxes) {
  SampleBox box;
  box.eta_bound = 5;
  EXPECT_TRUE(CheckHypotheses(BuiltinPower(2), box, 128, 1).pass);
  box.x_hi = 3.14;
  EXPECT_TRUE(CheckHypotheses(BuiltinYu(1), box, 128, 1).pass);
}

TEST(Hypotheses, QuadraticPowerFailsTheHpLowerBound) {
  PowerOptions opt;
  opt.exponent = 2;
  const HypothesisReport r = CheckHypotheses(BuiltinPower(1, opt), {}, 64, 1);
  EXPECT_FALSE(r.pass);
  const HypothesisCheck* c = r.Find(kHypHpLowerBound);
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_EQ(c->p, 0.0);
}

TEST(Hypotheses, RotationGrowthDependsOnTheBox) {
  const LagrangianModel m = BuiltinDataAssimilation(
      testing::RotationObservation(11, 2.0, 1.5), RotationField());
  SampleBox box;
  box.x_hi = 2.0;
  box.eta_bound = 10.0;
  const HypothesisReport wide = CheckHypotheses(m, box, 128, 2);
  EXPECT_FALSE(wide.Find(kHypVGrowth)->pass);
  box.eta_bound = 2.0;
  EXPECT_TRUE(CheckHypotheses(m, box, 128, 2).pass);
}

TEST(Hypotheses, DerivativeAuditCatchesAWrongPartial) {
  HypothesisConstants hyp;
  LagrangianModel wrong(
      "wrong", 1,
      [](double x, const Vec&, double p) {
        HPartials h;
        h.H = 1 + p + x * x;
        h.H_p = 1;
        h.H_x = x;  // should be 2x
        h.H_eta = Vec::Zero(1);
        h.H_peta = Vec::Zero(1);
        return h;
      },
      ZeroField(1), hyp);
  EXPECT_GT(AuditDerivatives(wrong, {}, 32, 4).worst_rel_error, 0.1);
  EXPECT_LT(AuditDerivatives(testing::CurvedPowerModel(), {}, 32, 4)
                .worst_rel_error,
            1e-5);
}

TEST(Measurements, PiecewiseLinear) {
  Mat v(1, 3);
  v << 0.0, 2.0, 1.0;
  const MeasurementSeries s({0.0, 1.0, 2.0}, v);
  EXPECT_DOUBLE_EQ(s.At(0.5)[0], 1.0);
  EXPECT_DOUBLE_EQ(s.At(1.5)[0], 1.5);
  EXPECT_DOUBLE_EQ(s.SlopeAt(1.5)[0], -1.0);
  EXPECT_DOUBLE_EQ(s.At(3.0)[0], 0.0);  // linear extension of the last piece
  EXPECT_TRUE(s.Covers({0.0, 2.0}));
  EXPECT_FALSE(s.Covers({0.0, 2.5}));
  EXPECT_THROW(MeasurementSeries({0.0, 0.0}, Mat::Zero(1, 2)), InputError);
}

TEST(Observation, NonlinearHessianFallsBackToDifferences) {
  Mat v = Mat::Zero(1, 2);
  const ObservationModel obs(
      2, 1, [](const Vec& e) { return Vec1(e[0] * e[0] * e[1]); },
      [](const Vec& e) {
        Mat J(1, 2);
        J << 2 * e[0] * e[1], e[0] * e[0];
        return J;
      },
      nullptr, MeasurementSeries({0.0, 1.0}, v));
  const std::vector<Mat> hess = obs.K_etaeta(Vec2(0.5, 2.0));
  ASSERT_EQ(hess.size(), 1u);
  Mat exact(2, 2);
  exact << 4.0, 1.0, 1.0, 0.0;
  EXPECT_LT((hess[0] - exact).norm(), 1e-6);
  EXPECT_LT(AuditObservationJacobian(obs, 2.0, 16, 5), 1e-6);
}

}  // namespace
}  // namespace linf
