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

#include "linf/elsystem.h"

#include <cmath>

#include <fmt/format.h>

#include "linf/kernels.h"

namespace linf {

ProjPair ProjectionPair(const Vec& xi) {
  const Vec s = Sgn(xi);
  ProjPair out;
  out.tangent = s * s.transpose();
  out.perp = Mat::Identity(xi.size(), xi.size()) - out.tangent;
  return out;
}

SystemPointState MakeState(const LagrangianModel& model, double x,
                           const Vec& eta, const Vec& P, const Vec& X) {
  SystemPointState s;
  s.x = x;
  s.eta = eta;
  s.P = P;
  s.X = X;
  s.v = model.EvalV(x, eta);
  s.W = P - s.v.V;
  s.p = 0.5 * s.W.squaredNorm();
  s.h = model.EvalH(x, eta, s.p);
  return s;
}

CoeffBlocks CoefficientBlocks(const SystemPointState& s,
                              CoefficientConvention convention) {
  const HPartials& h = s.h;
  const double w2 = s.W.squaredNorm();
  const ProjPair proj = ProjectionPair(s.W);
  const Vec q = s.v.V_eta.transpose() * s.W;
  const double perp_coeff =
      convention == CoefficientConvention::kDerived ? h.H_p : h.H_p * h.H_p;
  CoeffBlocks out;
  out.F = -h.H_p * (h.H_x + h.H_eta.dot(s.P)) * s.W +
          perp_coeff * w2 * proj.perp * (h.H_eta - h.H_p * q);
  out.f = -h.H * proj.tangent *
          (-h.H_eta + h.H_p * q + (h.H_peta.dot(s.P) + h.H_px) * s.W);
  out.A = h.H * (h.H_p + h.H_pp * w2) * proj.tangent;
  return out;
}

Vec LinfOperator(const SystemPointState& s) {
  const HPartials& h = s.h;
  const int n = static_cast<int>(s.W.size());
  const double w2 = s.W.squaredNorm();
  const Mat perp_w = w2 * Mat::Identity(n, n) - s.W * s.W.transpose();
  return w2 * h.H_p * h.H_p * s.DW() +
         s.W * h.H_p * (h.H_x + s.P.dot(h.H_eta)) -
         h.H_p * perp_w * (h.H_eta - h.H_p * (s.v.V_eta.transpose() * s.W));
}

Vec LinfOperatorRearranged(const SystemPointState& s,
                           CoefficientConvention convention) {
  const double w2 = s.W.squaredNorm();
  return s.h.H_p * s.h.H_p * w2 * s.DW() -
         CoefficientBlocks(s, convention).F;
}

double NormalizedMagnitude(const Vec& r, const SystemPointState& s) {
  return r.norm() / (1.0 + s.W.squaredNorm() * s.h.H_p * s.h.H_p);
}

namespace {

template <typename NodeFn>
ResidualField NodeResidual(const GridFunction& u, double m, Exec exec,
                           NodeFn fn) {
  const Grid& grid = u.grid();
  if (grid.n_cells() < 3) {
    throw InputError("residual: need at least 3 cells");
  }
  const int k = grid.n_cells() - 1;
  ResidualField out;
  out.grid = grid;
  out.m = m;
  out.raw.resize(u.dim(), k);
  out.normalized.resize(k);
  ForEachIndex(k, exec, [&](int c) {
    const int i = c + 1;
    double norm_mag = 0.0;
    out.raw.col(c) = fn(i, &norm_mag);
    out.normalized[c] = norm_mag;
  });
  double l2 = 0.0;
  for (int c = 0; c < k; ++c) {
    const double r = out.raw.col(c).norm();
    out.sup_raw = std::max(out.sup_raw, r);
    out.sup_normalized = std::max(out.sup_normalized, out.normalized[c]);
    l2 += r * r;
  }
  out.l2_raw = std::sqrt(grid.h() * l2);
  return out;
}

}  // namespace

ResidualField ExpandedResidual(const GridFunction& u,
                               const LagrangianModel& model, double m,
                               Exec exec) {
  if (!(m >= 2.0)) throw InputError("expanded residual: need m >= 2");
  const double inv = std::isinf(m) ? 0.0 : 1.0 / (m - 1.0);
  return NodeResidual(u, m, exec, [&](int i, double* norm_mag) {
    const SystemPointState s =
        MakeState(model, u.grid().node(i), u.node(i), CenteredGradient(u, i),
                  SecondDifference(u, i, 1));
    const CoeffBlocks c = CoefficientBlocks(s);
    const int n = static_cast<int>(s.W.size());
    const Mat lead = inv * c.A + s.h.H_p * s.h.H_p * s.W.squaredNorm() *
                                     Mat::Identity(n, n);
    const Vec r = lead * s.DW() - c.F - inv * c.f;
    *norm_mag = NormalizedMagnitude(r, s);
    return r;
  });
}

ResidualField DaResidual(const GridFunction& u, const ObservationModel& obs,
                         const VectorField& field, Exec exec) {
  if (u.dim() != obs.state_dim() || field.dim != obs.state_dim()) {
    throw InputError(fmt::format(
        "data assimilation residual: state dim {}, observation acts on R^{}, "
        "field on R^{}",
        u.dim(), obs.state_dim(), field.dim));
  }
  return NodeResidual(u, kMInfinity, exec, [&](int i, double* norm_mag) {
    const double x = u.grid().node(i);
    const Vec eta = u.node(i);
    const Vec P = CenteredGradient(u, i);
    const Vec X = SecondDifference(u, i, 1);
    const VPartials v = field.eval(x, eta);
    const Vec W = P - v.V;
    const double w2 = W.squaredNorm();
    const Vec misfit = obs.K(eta) - obs.k(x);  // K(u) - k
    const Mat J = obs.K_eta(eta);
    const ProjPair proj = ProjectionPair(W);
    const Vec r = w2 * (X - v.V_eta * P - v.V_x) -
                  w2 * proj.perp *
                      (J.transpose() * misfit - v.V_eta.transpose() * W) -
                  (misfit.dot(obs.k_x(x)) - misfit.dot(J * P)) * W;
    *norm_mag = r.norm() / (1.0 + w2);
    return r;
  });
}

std::string ResidualToCsv(const ResidualField& r) {
  std::string out = "x";
  for (int c = 0; c < r.raw.rows(); ++c) out += fmt::format(",res_{}", c + 1);
  out += ",|res|\n";
  for (int k = 0; k < r.raw.cols(); ++k) {
    out += fmt::format("{:.17g}", r.node_x(k));
    for (int c = 0; c < r.raw.rows(); ++c) {
      out += fmt::format(",{:.17g}", r.raw(c, k));
    }
    out += fmt::format(",{:.17g}\n", r.raw.col(k).norm());
  }
  return out;
}

}  // namespace linf
