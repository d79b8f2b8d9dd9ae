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

#include "linf/lagrangian.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

namespace linf {
namespace {

std::string FormatVec(const Vec& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    out += fmt::format("{}{:.6g}", i ? ", " : "", v[i]);
  }
  return out + ")";
}

bool AllFinite(const HPartials& h) {
  return std::isfinite(h.H) && std::isfinite(h.H_p) && std::isfinite(h.H_pp) &&
         std::isfinite(h.H_x) && std::isfinite(h.H_px) && h.H_eta.allFinite() &&
         h.H_peta.allFinite() && h.H_etaeta.allFinite();
}

bool AllFinite(const VPartials& v) {
  if (!v.V.allFinite() || !v.V_x.allFinite() || !v.V_eta.allFinite()) {
    return false;
  }
  for (const Mat& m : v.V_etaeta) {
    if (!m.allFinite()) return false;
  }
  return true;
}

}  // namespace

double HypothesisConstants::C(double r) const {
  return growth_const * std::pow(1.0 + r, growth_power);
}

VectorField ZeroField(int dim) {
  return VectorField{"zero", dim, [dim](double, const Vec&) {
                       VPartials v;
                       v.V = Vec::Zero(dim);
                       v.V_x = Vec::Zero(dim);
                       v.V_eta = Mat::Zero(dim, dim);
                       v.V_etaeta.assign(dim, Mat::Zero(dim, dim));
                       return v;
                     }};
}

VectorField RotationField() {
  Mat A(2, 2);
  A << 0.0, -1.0, 1.0, 0.0;
  VectorField f = AffineField(A, Vec::Zero(2), Vec::Zero(2));
  f.name = "rotation";
  return f;
}

VectorField AffineField(const Mat& A, const Vec& c, const Vec& d) {
  const int dim = static_cast<int>(c.size());
  if (A.rows() != dim || A.cols() != dim || d.size() != dim) {
    throw InputError("affine field: inconsistent dimensions");
  }
  return VectorField{"affine", dim, [A, c, d, dim](double x, const Vec& eta) {
                       VPartials v;
                       v.V = A * eta + c + d * x;
                       v.V_x = d;
                       v.V_eta = A;
                       v.V_etaeta.assign(dim, Mat::Zero(dim, dim));
                       return v;
                     }};
}

LagrangianModel::LagrangianModel(std::string name, int dim, HFn h,
                                 VectorField v, HypothesisConstants hypotheses,
                                 std::vector<double> x_breakpoints)
    : name_(std::move(name)),
      dim_(dim),
      h_(std::move(h)),
      field_(std::move(v)),
      hypotheses_(hypotheses),
      x_breakpoints_(std::move(x_breakpoints)) {
  if (dim_ < 1) throw InputError("model: dim must be >= 1");
  if (field_.dim != dim_) {
    throw InputError(fmt::format("model '{}': field dim {} != model dim {}",
                                 name_, field_.dim, dim_));
  }
  std::sort(x_breakpoints_.begin(), x_breakpoints_.end());
}

HPartials LagrangianModel::EvalH(double x, const Vec& eta, double p) const {
  HPartials h = h_(x, eta, p);
  if (!AllFinite(h) || h.H_eta.size() != dim_ || h.H_peta.size() != dim_) {
    throw ModelEvaluationError(fmt::format(
        "model '{}': H evaluator failed at x={:.17g}, eta={}, p={:.17g}", name_,
        x, FormatVec(eta), p));
  }
  return h;
}

VPartials LagrangianModel::EvalV(double x, const Vec& eta) const {
  VPartials v = field_.eval(x, eta);
  if (!AllFinite(v) || v.V.size() != dim_) {
    throw ModelEvaluationError(
        fmt::format("model '{}': V evaluator failed at x={:.17g}, eta={}",
                    name_, x, FormatVec(eta)));
  }
  return v;
}

RadialJet EvalJet(const LagrangianModel& model, double x, const Vec& eta,
                  const Vec& P, JetOrder order) {
  RadialJet jet;
  jet.v = model.EvalV(x, eta);
  jet.W = P - jet.v.V;
  jet.p = 0.5 * jet.W.squaredNorm();
  jet.h = model.EvalH(x, eta, jet.p);
  jet.L = jet.h.H;
  if (order == JetOrder::kValue) return jet;

  const HPartials& h = jet.h;
  const VPartials& v = jet.v;
  const Vec q = v.V_eta.transpose() * jet.W;
  jet.L_P = h.H_p * jet.W;
  jet.L_eta = h.H_eta - h.H_p * q;
  if (order == JetOrder::kFirst) return jet;

  const int n = model.dim();
  const Mat I = Mat::Identity(n, n);
  // Total eta-derivative of H_p through p = |P - V|^2 / 2.
  const Vec dHp = h.H_peta - h.H_pp * q;
  jet.L_PP = h.H_pp * jet.W * jet.W.transpose() + h.H_p * I;
  jet.L_Peta = jet.W * dHp.transpose() - h.H_p * v.V_eta;

  Mat H_etaeta = h.H_etaeta;
  if (H_etaeta.size() == 0) {
    H_etaeta.resize(n, n);
    for (int b = 0; b < n; ++b) {
      const double step = 1e-6 * std::max(1.0, std::abs(eta[b]));
      Vec ep = eta, em = eta;
      ep[b] += step;
      em[b] -= step;
      H_etaeta.col(b) = (model.EvalH(x, ep, jet.p).H_eta -
                         model.EvalH(x, em, jet.p).H_eta) /
                        (2.0 * step);
    }
    H_etaeta = 0.5 * (H_etaeta + H_etaeta.transpose()).eval();
  }
  // sum_g W_g Hess(V_g)
  Mat curvature = Mat::Zero(n, n);
  if (static_cast<int>(v.V_etaeta.size()) == n) {
    for (int g = 0; g < n; ++g) curvature += jet.W[g] * v.V_etaeta[g];
  } else {
    for (int b = 0; b < n; ++b) {
      const double step = 1e-6 * std::max(1.0, std::abs(eta[b]));
      Vec ep = eta, em = eta;
      ep[b] += step;
      em[b] -= step;
      const Mat dV = (model.EvalV(x, ep).V_eta - model.EvalV(x, em).V_eta) /
                     (2.0 * step);
      // dV(g, a) = d^2 V_g / d eta_a d eta_b
      curvature.col(b) = dV.transpose() * jet.W;
    }
    curvature = 0.5 * (curvature + curvature.transpose()).eval();
  }
  jet.L_etaeta = H_etaeta - h.H_peta * q.transpose() - q * dHp.transpose() -
                 h.H_p * (curvature - v.V_eta.transpose() * v.V_eta);
  return jet;
}

double EvalL(const LagrangianModel& model, double x, const Vec& eta,
             const Vec& P) {
  return EvalJet(model, x, eta, P, JetOrder::kValue).L;
}

// ----------------------------------------------------------------------------
// Measurements and observations.

MeasurementSeries::MeasurementSeries(std::vector<double> xs, Mat values)
    : xs_(std::move(xs)), values_(std::move(values)) {
  if (xs_.size() < 2) throw InputError("measurements: need >= 2 samples");
  if (static_cast<int>(xs_.size()) != values_.cols()) {
    throw InputError("measurements: sample count mismatch");
  }
  for (size_t s = 0; s < xs_.size(); ++s) {
    if (!std::isfinite(xs_[s]) || !values_.col(s).allFinite()) {
      throw InputError(fmt::format("measurements: sample {} not finite", s));
    }
    if (s > 0 && !(xs_[s] > xs_[s - 1])) {
      throw InputError(
          fmt::format("measurements: x not strictly increasing at sample {}",
                      s));
    }
  }
}

int MeasurementSeries::Segment(double x) const {
  // Index s with xs_[s] <= x < xs_[s + 1], clamped to the end segments.
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  int s = static_cast<int>(it - xs_.begin()) - 1;
  return std::clamp(s, 0, size() - 2);
}

Vec MeasurementSeries::At(double x) const {
  const int s = Segment(x);
  const double t = (x - xs_[s]) / (xs_[s + 1] - xs_[s]);
  return (1.0 - t) * values_.col(s) + t * values_.col(s + 1);
}

Vec MeasurementSeries::SlopeAt(double x) const {
  const int s = Segment(x);
  return (values_.col(s + 1) - values_.col(s)) / (xs_[s + 1] - xs_[s]);
}

bool MeasurementSeries::Covers(const Interval& interval) const {
  const double tol = 1e-12 * std::max(1.0, interval.length());
  return xs_.front() <= interval.a + tol && xs_.back() >= interval.b - tol;
}

double MeasurementSeries::MaxAbs() const {
  return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
}

double MeasurementSeries::MaxAbsSlope() const {
  double worst = 0.0;
  for (int s = 0; s + 1 < size(); ++s) {
    worst = std::max(worst, ((values_.col(s + 1) - values_.col(s)) /
                             (xs_[s + 1] - xs_[s]))
                                .norm());
  }
  return worst;
}

ObservationModel::ObservationModel(int state_dim, int obs_dim, KFn K,
                                   KJacFn K_eta, KHessFn K_etaeta,
                                   MeasurementSeries series)
    : state_dim_(state_dim),
      obs_dim_(obs_dim),
      K_(std::move(K)),
      K_eta_(std::move(K_eta)),
      K_etaeta_(std::move(K_etaeta)),
      series_(std::move(series)) {
  if (series_.obs_dim() != obs_dim_) {
    throw InputError(fmt::format(
        "observation: measurements have {} components, K has {}",
        series_.obs_dim(), obs_dim_));
  }
}

ObservationModel ObservationModel::Linear(const Mat& C,
                                          MeasurementSeries series) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  ObservationModel obs(
      n, m, [C](const Vec& eta) -> Vec { return C * eta; },
      [C](const Vec&) -> Mat { return C; },
      [m, n](const Vec&) { return std::vector<Mat>(m, Mat::Zero(n, n)); },
      std::move(series));
  obs.linear_norm_ = C.operatorNorm();
  return obs;
}

std::vector<Mat> ObservationModel::K_etaeta(const Vec& eta) const {
  if (K_etaeta_) return K_etaeta_(eta);
  std::vector<Mat> out(obs_dim_, Mat::Zero(state_dim_, state_dim_));
  for (int b = 0; b < state_dim_; ++b) {
    const double step = 1e-6 * std::max(1.0, std::abs(eta[b]));
    Vec ep = eta, em = eta;
    ep[b] += step;
    em[b] -= step;
    const Mat dJ = (K_eta(ep) - K_eta(em)) / (2.0 * step);
    for (int a = 0; a < obs_dim_; ++a) out[a].col(b) = dJ.row(a).transpose();
  }
  return out;
}

ObservationModel ObservationModel::WithSeries(MeasurementSeries series) const {
  ObservationModel copy = *this;
  if (series.obs_dim() != obs_dim_) {
    throw InputError("observation: replacement series has wrong dimension");
  }
  copy.series_ = std::move(series);
  return copy;
}

// ----------------------------------------------------------------------------
// Builtins.

LagrangianModel BuiltinPower(int dim, const PowerOptions& options) {
  const double q = options.exponent;
  const double kappa = options.coefficient;
  if (!(q == 1.0 || q >= 2.0)) {
    throw InputError(fmt::format("power model: exponent {} not in {{1}} U [2, inf)", q));
  }
  if (!(kappa > 0.0)) throw InputError("power model: coefficient must be > 0");
  VectorField field = options.drift ? *options.drift : ZeroField(dim);
  auto h = [q, kappa, dim](double, const Vec&, double p) {
    HPartials out;
    out.H = 1.0 + kappa * std::pow(p, q);
    out.H_p = q == 1.0 ? kappa : kappa * q * std::pow(p, q - 1.0);
    out.H_pp = q == 1.0 ? 0.0 : kappa * q * (q - 1.0) * std::pow(p, q - 2.0);
    out.H_eta = Vec::Zero(dim);
    out.H_peta = Vec::Zero(dim);
    out.H_etaeta = Mat::Zero(dim, dim);
    return out;
  };
  HypothesisConstants hyp;
  hyp.c0 = 0.5;
  hyp.alpha = 0.5;
  hyp.M = std::max(1, static_cast<int>(std::ceil(q - 2.0)));
  hyp.growth_const = std::max(1.0, kappa);
  hyp.growth_power = 0.0;
  return LagrangianModel("power", dim, h, field, hyp);
}

LagrangianModel BuiltinYu(int dim) {
  auto h = [dim](double x, const Vec&, double p) {
    HPartials out;
    const double s = std::sin(x);
    out.H = 1.0 + s * s + 2.0 * p;
    out.H_p = 2.0;
    out.H_x = std::sin(2.0 * x);
    out.H_eta = Vec::Zero(dim);
    out.H_peta = Vec::Zero(dim);
    out.H_etaeta = Mat::Zero(dim, dim);
    return out;
  };
  HypothesisConstants hyp;
  hyp.c0 = 0.5;
  hyp.alpha = 0.5;
  hyp.M = 1;
  hyp.growth_const = 2.0;
  hyp.growth_power = 0.0;
  return LagrangianModel("yu", dim, h, ZeroField(dim), hyp);
}

LagrangianModel BuiltinDataAssimilation(const ObservationModel& obs,
                                        const VectorField& dynamics) {
  if (obs.state_dim() != dynamics.dim) {
    throw InputError(fmt::format(
        "data assimilation: observation acts on R^{}, dynamics on R^{}",
        obs.state_dim(), dynamics.dim));
  }
  const int dim = dynamics.dim;
  auto h = [obs, dim](double x, const Vec& eta, double p) {
    HPartials out;
    const Vec misfit = obs.k(x) - obs.K(eta);
    const Mat J = obs.K_eta(eta);
    out.H = 1.0 + 0.5 * misfit.squaredNorm() + p;
    out.H_p = 1.0;
    out.H_pp = 0.0;
    out.H_x = misfit.dot(obs.k_x(x));
    out.H_px = 0.0;
    out.H_eta = -J.transpose() * misfit;
    out.H_peta = Vec::Zero(dim);
    out.H_etaeta = J.transpose() * J;
    const std::vector<Mat> hess = obs.K_etaeta(eta);
    for (int a = 0; a < obs.obs_dim(); ++a) out.H_etaeta -= misfit[a] * hess[a];
    return out;
  };
  HypothesisConstants hyp;
  hyp.c0 = 0.5;
  hyp.alpha = 0.5;
  hyp.M = 1;
  const double kmax = obs.series().MaxAbs();
  const double kxmax = obs.series().MaxAbsSlope();
  if (obs.linear_norm() > 0.0) {
    const double c = obs.linear_norm();
    hyp.growth_const = std::max(1.0, (kmax + c) * (kxmax + c));
    hyp.growth_power = 1.0;
  } else {
    // Unknown K: quadratic growth allowance.
    hyp.growth_const = std::max(1.0, (kmax + 1.0) * (kxmax + 1.0));
    hyp.growth_power = 2.0;
  }
  return LagrangianModel("data_assimilation", dim, h, dynamics, hyp,
                         obs.series().xs());
}

// ----------------------------------------------------------------------------
// Hypothesis checks.

const HypothesisCheck* HypothesisReport::Find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

namespace {

constexpr double kMarginTol = 1e-12;
constexpr double kAuditStep = 1e-5;
constexpr double kAuditTol = 1e-5;

double RadicalInverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

int Prime(int k) {
  static const int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  return kPrimes[k % 20];
}

struct SamplePoint {
  double x;
  Vec eta;
  double p;
};

// Box corners first, then a randomly shifted Halton sequence.
std::vector<SamplePoint> SamplePoints(const SampleBox& box, int dim,
                                      int samples, std::uint64_t seed) {
  std::vector<SamplePoint> points;
  for (double x : {box.x_lo, box.x_hi}) {
    for (double p : {0.0, box.p_hi}) {
      for (double e : {0.0, box.eta_bound, -box.eta_bound}) {
        points.push_back({x, Vec::Constant(dim, e), p});
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(dim + 2);
  for (double& s : shift) s = unit(rng);
  for (int s = 0; s < samples; ++s) {
    auto coord = [&](int d) {
      double v = RadicalInverse(static_cast<std::uint64_t>(s + 1), Prime(d)) +
                 shift[d];
      return v - std::floor(v);
    };
    SamplePoint pt;
    pt.x = box.x_lo + coord(0) * (box.x_hi - box.x_lo);
    pt.eta.resize(dim);
    for (int a = 0; a < dim; ++a) {
      pt.eta[a] = box.eta_bound * (2.0 * coord(a + 1) - 1.0);
    }
    pt.p = box.p_hi * coord(dim + 1);
    points.push_back(pt);
  }
  return points;
}

// First derivative of f at t by central differences; forward second-order
// differences when t - step would leave [lower, inf).
template <typename F>
auto Derivative(F f, double t, double lower = -std::numeric_limits<double>::infinity()) {
  const double step = kAuditStep * std::max(1.0, std::abs(t));
  if (t - step < lower) {
    return ((-3.0 * f(t) + 4.0 * f(t + step) - f(t + 2.0 * step)) /
            (2.0 * step))
        .eval();
  }
  return ((f(t + step) - f(t - step)) / (2.0 * step)).eval();
}

template <typename F>
double DerivativeScalar(F f, double t,
                        double lower = -std::numeric_limits<double>::infinity()) {
  const double step = kAuditStep * std::max(1.0, std::abs(t));
  if (t - step < lower) {
    return (-3.0 * f(t) + 4.0 * f(t + step) - f(t + 2.0 * step)) / (2.0 * step);
  }
  return (f(t + step) - f(t - step)) / (2.0 * step);
}

double RelError(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max(1.0, std::abs(analytic));
}

double RelError(const Mat& analytic, const Mat& fd) {
  return (analytic - fd).cwiseAbs().maxCoeff() /
         std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

bool NearBreakpoint(const LagrangianModel& model, double x) {
  const double guard = 4.0 * kAuditStep * std::max(1.0, std::abs(x));
  for (double b : model.x_breakpoints()) {
    if (std::abs(b - x) <= guard) return true;
  }
  return false;
}

void AuditPoint(const LagrangianModel& model, const SamplePoint& pt,
                DerivativeAudit* audit) {
  const int n = model.dim();
  const double x = pt.x;
  const Vec& eta = pt.eta;
  const double p = pt.p;
  auto record = [&](double err, const char* what) {
    if (err > audit->worst_rel_error) {
      audit->worst_rel_error = err;
      audit->worst_partial = what;
      audit->x = x;
      audit->eta = eta;
      audit->p = p;
    }
  };
  const HPartials h = model.EvalH(x, eta, p);
  const VPartials v = model.EvalV(x, eta);

  auto H_of_p = [&](double t) { return model.EvalH(x, eta, t).H; };
  auto Hp_of_p = [&](double t) { return model.EvalH(x, eta, t).H_p; };
  record(RelError(h.H_p, DerivativeScalar(H_of_p, p, 0.0)), "H_p");
  record(RelError(h.H_pp, DerivativeScalar(Hp_of_p, p, 0.0)), "H_pp");

  if (!NearBreakpoint(model, x)) {
    auto H_of_x = [&](double t) { return model.EvalH(t, eta, p).H; };
    auto Hp_of_x = [&](double t) { return model.EvalH(t, eta, p).H_p; };
    record(RelError(h.H_x, DerivativeScalar(H_of_x, x)), "H_x");
    record(RelError(h.H_px, DerivativeScalar(Hp_of_x, x)), "H_px");
  }
  auto V_of_x = [&](double t) { return model.EvalV(t, eta).V; };
  record(RelError(Mat(v.V_x), Mat(Derivative(V_of_x, x))), "V_x");

  for (int a = 0; a < n; ++a) {
    auto shifted = [&](double t) {
      Vec e = eta;
      e[a] = t;
      return e;
    };
    auto H_of_eta = [&](double t) { return model.EvalH(x, shifted(t), p).H; };
    auto Hp_of_eta = [&](double t) {
      return model.EvalH(x, shifted(t), p).H_p;
    };
    record(RelError(h.H_eta[a], DerivativeScalar(H_of_eta, eta[a])), "H_eta");
    record(RelError(h.H_peta[a], DerivativeScalar(Hp_of_eta, eta[a])),
           "H_peta");
    auto V_of_eta = [&](double t) { return model.EvalV(x, shifted(t)).V; };
    record(RelError(Mat(v.V_eta.col(a)), Mat(Derivative(V_of_eta, eta[a]))),
           "V_eta");
    if (h.H_etaeta.size() != 0) {
      auto Heta_of_eta = [&](double t) {
        return model.EvalH(x, shifted(t), p).H_eta;
      };
      record(RelError(Mat(h.H_etaeta.col(a)),
                      Mat(Derivative(Heta_of_eta, eta[a]))),
             "H_etaeta");
    }
    if (static_cast<int>(v.V_etaeta.size()) == n) {
      auto Veta_of_eta = [&](double t) {
        return model.EvalV(x, shifted(t)).V_eta;
      };
      const Mat dV = Derivative(Veta_of_eta, eta[a]);
      Mat analytic(n, n);
      for (int g = 0; g < n; ++g) analytic.row(g) = v.V_etaeta[g].col(a).transpose();
      record(RelError(analytic, dV), "V_etaeta");
    }
  }
}

}  // namespace

DerivativeAudit AuditDerivatives(const LagrangianModel& model,
                                 const SampleBox& box, int samples,
                                 std::uint64_t seed) {
  DerivativeAudit audit;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    SamplePoint pt;
    pt.x = box.x_lo + unit(rng) * (box.x_hi - box.x_lo);
    pt.eta.resize(model.dim());
    for (int a = 0; a < model.dim(); ++a) {
      pt.eta[a] = box.eta_bound * (2.0 * unit(rng) - 1.0);
    }
    pt.p = box.p_hi * unit(rng);
    AuditPoint(model, pt, &audit);
  }
  return audit;
}

double AuditObservationJacobian(const ObservationModel& obs, double eta_bound,
                                int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec eta(obs.state_dim());
    for (int a = 0; a < eta.size(); ++a) eta[a] = eta_bound * unit(rng);
    const Mat J = obs.K_eta(eta);
    for (int a = 0; a < eta.size(); ++a) {
      auto K_of = [&](double t) {
        Vec e = eta;
        e[a] = t;
        return obs.K(e);
      };
      worst = std::max(worst, RelError(Mat(J.col(a)), Mat(Derivative(K_of, eta[a]))));
    }
  }
  return worst;
}

HypothesisReport CheckHypotheses(const LagrangianModel& model,
                                 const SampleBox& box, int samples,
                                 std::uint64_t seed) {
  const HypothesisConstants& k = model.hypotheses();
  const int n = model.dim();
  HypothesisReport report;
  const char* ids[] = {kHypHLowerBound,      kHypHpLowerBound,
                       kHypConvexity,        kHypHpUpperBound,
                       kHypFirstOrderGrowth, kHypSecondOrderGrowth,
                       kHypVGrowth};
  for (const char* id : ids) {
    HypothesisCheck c;
    c.id = id;
    c.worst_margin = std::numeric_limits<double>::infinity();
    c.eta = Vec::Zero(n);
    report.checks.push_back(c);
  }
  auto update = [&](int idx, double margin, const SamplePoint& pt) {
    HypothesisCheck& c = report.checks[idx];
    if (margin < c.worst_margin) {
      c.worst_margin = margin;
      c.x = pt.x;
      c.eta = pt.eta;
      c.p = pt.p;
    }
  };
  for (const SamplePoint& pt : SamplePoints(box, n, samples, seed)) {
    const HPartials h = model.EvalH(pt.x, pt.eta, pt.p);
    const VPartials v = model.EvalV(pt.x, pt.eta);
    const double r = pt.eta.norm();
    const double C = k.C(r);
    update(0, h.H - 1.0, pt);
    update(1, h.H_p - k.c0, pt);
    update(2, 2.0 * h.H_pp * pt.p + h.H_p - k.c0, pt);
    update(3, C - h.H_p, pt);
    update(4, C * (1.0 + pt.p) - (std::abs(h.H_x) + h.H_eta.norm()), pt);
    update(5,
           C * (1.0 + std::pow(pt.p, k.M)) -
               (std::abs(h.H_pp) + h.H_peta.norm() + std::abs(h.H_px)),
           pt);
    update(6, (1.0 + std::pow(r, k.alpha)) / k.c0 - v.V.norm(), pt);
  }

  HypothesisCheck constants;
  constants.id = kHypConstants;
  constants.eta = Vec::Zero(n);
  constants.worst_margin =
      std::min({k.c0, 1.0 - k.c0, k.alpha, 1.0 - k.alpha,
                static_cast<double>(k.M - 1)});
  report.checks.push_back(constants);

  const DerivativeAudit audit =
      AuditDerivatives(model, box, std::max(samples, 1), seed + 1);
  HypothesisCheck deriv;
  deriv.id = kHypDerivatives;
  deriv.worst_margin = kAuditTol - audit.worst_rel_error;
  deriv.x = audit.x;
  deriv.eta = audit.eta.size() ? audit.eta : Vec::Zero(n);
  deriv.p = audit.p;
  report.checks.push_back(deriv);

  report.pass = true;
  for (auto& c : report.checks) {
    c.pass = c.worst_margin >= -kMarginTol;
    report.pass = report.pass && c.pass;
  }
  return report;
}

}  // namespace linf
