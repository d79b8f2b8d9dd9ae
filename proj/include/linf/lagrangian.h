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

// Radial Lagrangians L(x, eta, P) = H(x, eta, |P - V(x, eta)|^2 / 2).
//
// A model is a bundle of derivative evaluators for H and V rather than a
// symbolic expression. The finite-difference audit in CheckHypotheses is what
// catches a wrong derivative. Second derivatives in eta (H_etaeta, V_etaeta)
// are optional; when a model leaves them empty they are obtained by central
// differences of the first-order evaluators.

#ifndef LINF_LAGRANGIAN_H_
#define LINF_LAGRANGIAN_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "linf/grid.h"
#include "linf/types.h"

namespace linf {

// H and its partials at (x, eta, p).
struct HPartials {
  double H = 0.0;
  double H_p = 0.0;
  double H_pp = 0.0;
  double H_x = 0.0;
  double H_px = 0.0;
  Vec H_eta;   // N
  Vec H_peta;  // N
  Mat H_etaeta;  // N x N, optional
};

// V and its partials at (x, eta). V_eta(g, a) = dV_g / d eta_a.
struct VPartials {
  Vec V;
  Vec V_x;
  Mat V_eta;
  std::vector<Mat> V_etaeta;  // per component g: Hessian of V_g, optional
};

// Structural constants of the standing hypotheses on H and V.
// C(r) = growth_const * (1 + r)^growth_power.
struct HypothesisConstants {
  double c0 = 0.5;
  double alpha = 0.5;
  int M = 1;
  double growth_const = 1.0;
  double growth_power = 0.0;

  double C(double r) const;
};

// A vector field V(x, eta) with its derivatives, e.g. the law of motion of a
// data assimilation problem.
struct VectorField {
  using Fn = std::function<VPartials(double x, const Vec& eta)>;
  std::string name;
  int dim = 1;
  Fn eval;
};

VectorField ZeroField(int dim);
// V(eta) = (-eta_2, eta_1): counter-clockwise rotation, N = 2.
VectorField RotationField();
// V(x, eta) = A eta + c + d x.
VectorField AffineField(const Mat& A, const Vec& c, const Vec& d);

class LagrangianModel {
 public:
  using HFn = std::function<HPartials(double x, const Vec& eta, double p)>;

  LagrangianModel(std::string name, int dim, HFn h, VectorField v,
                  HypothesisConstants hypotheses,
                  std::vector<double> x_breakpoints = {});

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const HypothesisConstants& hypotheses() const { return hypotheses_; }
  const VectorField& field() const { return field_; }
  // x locations where H is only Lipschitz in x (kinks of a piecewise-linear
  // measurement series). The derivative audit avoids them.
  const std::vector<double>& x_breakpoints() const { return x_breakpoints_; }

  // Both throw ModelEvaluationError when the evaluator returns a non-finite
  // value, quoting the argument.
  HPartials EvalH(double x, const Vec& eta, double p) const;
  VPartials EvalV(double x, const Vec& eta) const;

 private:
  std::string name_;
  int dim_;
  HFn h_;
  VectorField field_;
  HypothesisConstants hypotheses_;
  std::vector<double> x_breakpoints_;
};

enum class JetOrder { kValue, kFirst, kSecond };

// Everything known about L at one argument (x, eta, P).
struct RadialJet {
  Vec W;           // P - V(x, eta)
  double p = 0.0;  // |W|^2 / 2
  HPartials h;
  VPartials v;
  double L = 0.0;
  // kFirst and above.
  Vec L_P;    // H_p W
  Vec L_eta;  // H_eta - H_p V_eta^T W
  // kSecond only. L_Peta(a, b) = d^2 L / dP_a d eta_b.
  Mat L_PP;
  Mat L_Peta;
  Mat L_etaeta;
};

RadialJet EvalJet(const LagrangianModel& model, double x, const Vec& eta,
                  const Vec& P, JetOrder order);

// L(x, eta, P) = H(x, eta, |P - V|^2 / 2).
double EvalL(const LagrangianModel& model, double x, const Vec& eta,
             const Vec& P);

// Piecewise-linear measurement series k : [x_0, x_last] -> R^M.
class MeasurementSeries {
 public:
  MeasurementSeries() = default;
  // Throws InputError unless xs is strictly increasing and values finite.
  MeasurementSeries(std::vector<double> xs, Mat values);

  int obs_dim() const { return static_cast<int>(values_.rows()); }
  int size() const { return static_cast<int>(xs_.size()); }
  const std::vector<double>& xs() const { return xs_; }
  const Mat& values() const { return values_; }

  Vec At(double x) const;
  // Slope of the segment containing x (right segment at a sample point).
  Vec SlopeAt(double x) const;
  bool Covers(const Interval& interval) const;
  double MaxAbs() const;
  double MaxAbsSlope() const;

 private:
  int Segment(double x) const;

  std::vector<double> xs_;
  Mat values_;  // M x S
};

// Observation operator K : R^N -> R^M with Jacobian, plus measurements k(x).
class ObservationModel {
 public:
  using KFn = std::function<Vec(const Vec& eta)>;
  using KJacFn = std::function<Mat(const Vec& eta)>;
  // Hessians of each component K_a; may be empty (finite differences).
  using KHessFn = std::function<std::vector<Mat>(const Vec& eta)>;

  ObservationModel(int state_dim, int obs_dim, KFn K, KJacFn K_eta,
                   KHessFn K_etaeta, MeasurementSeries series);

  // K(eta) = C eta.
  static ObservationModel Linear(const Mat& C, MeasurementSeries series);

  int state_dim() const { return state_dim_; }
  int obs_dim() const { return obs_dim_; }
  const MeasurementSeries& series() const { return series_; }
  // Operator norm bound of K_eta, 0 when unknown (non-linear K).
  double linear_norm() const { return linear_norm_; }

  Vec K(const Vec& eta) const { return K_(eta); }
  Mat K_eta(const Vec& eta) const { return K_eta_(eta); }
  std::vector<Mat> K_etaeta(const Vec& eta) const;
  Vec k(double x) const { return series_.At(x); }
  Vec k_x(double x) const { return series_.SlopeAt(x); }

  ObservationModel WithSeries(MeasurementSeries series) const;

 private:
  int state_dim_;
  int obs_dim_;
  KFn K_;
  KJacFn K_eta_;
  KHessFn K_etaeta_;
  MeasurementSeries series_;
  double linear_norm_ = 0.0;
};

// H = 1 + coefficient p^exponent, V = drift (zero by default). exponent must
// be 1 or >= 2. Defaults reproduce H = 1 + p, V = 0, c0 = alpha = 1/2, M = 1.
struct PowerOptions {
  double exponent = 1.0;
  double coefficient = 1.0;
  std::shared_ptr<VectorField> drift;
};
LagrangianModel BuiltinPower(int dim, const PowerOptions& options = {});

// H = 1 + sin^2 x + 2p, V = 0, i.e. L = 1 + sin^2 x + |P|^2.
LagrangianModel BuiltinYu(int dim = 1);

// H = 1 + |k(x) - K(eta)|^2 / 2 + p with the supplied law of motion V.
LagrangianModel BuiltinDataAssimilation(const ObservationModel& obs,
                                        const VectorField& dynamics);

// Sampling region for hypothesis checks: x in [x_lo, x_hi], each eta
// component in [-eta_bound, eta_bound], p in [0, p_hi].
struct SampleBox {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double eta_bound = 10.0;
  double p_hi = 100.0;
};

struct HypothesisCheck {
  std::string id;
  double worst_margin = 0.0;
  double x = 0.0;
  Vec eta;
  double p = 0.0;
  bool pass = true;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool pass = true;

  const HypothesisCheck* Find(const std::string& id) const;
};

// Hypothesis ids used in HypothesisReport.
inline constexpr const char* kHypHLowerBound = "H>=1";
inline constexpr const char* kHypHpLowerBound = "H_p>=c0";
inline constexpr const char* kHypConvexity = "2*H_pp*p+H_p>=c0";
inline constexpr const char* kHypHpUpperBound = "H_p<=C(|eta|)";
inline constexpr const char* kHypFirstOrderGrowth =
    "|H_x|+|H_eta|<=C(|eta|)(1+p)";
inline constexpr const char* kHypSecondOrderGrowth =
    "|H_pp|+|H_peta|+|H_px|<=C(|eta|)(1+p^M)";
inline constexpr const char* kHypVGrowth = "|V|<=(1+|eta|^alpha)/c0";
inline constexpr const char* kHypConstants = "c0,alpha in (0,1), M>=1";
inline constexpr const char* kHypDerivatives = "derivatives match finite differences";

// Evaluates every hypothesis line at `samples` quasi-random points of `box`
// (plus the box corners). Violations are reported, never thrown.
HypothesisReport CheckHypotheses(const LagrangianModel& model,
                                 const SampleBox& box, int samples,
                                 std::uint64_t seed);

// Worst relative error between analytic partials and central differences
// (step 1e-5, one-sided near p = 0) over `samples` random points of `box`.
struct DerivativeAudit {
  double worst_rel_error = 0.0;
  std::string worst_partial;
  double x = 0.0;
  Vec eta;
  double p = 0.0;
};
DerivativeAudit AuditDerivatives(const LagrangianModel& model,
                                 const SampleBox& box, int samples,
                                 std::uint64_t seed);
// Same for K_eta (and K_etaeta when provided) of an observation model.
double AuditObservationJacobian(const ObservationModel& obs, double eta_bound,
                                int samples, std::uint64_t seed);

}  // namespace linf

#endif  // LINF_LAGRANGIAN_H_
