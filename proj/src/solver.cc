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

#include "linf/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "linf/block_tridiag.h"
#include "linf/kernels.h"

namespace linf {

std::vector<int> SolveConfig::DoublingSchedule(int m_max) {
  if (m_max < 1) throw InputError("m_max must be >= 1");
  std::vector<int> out;
  for (int m = 1; m <= m_max; m *= 2) {
    out.push_back(m);
    if (m > m_max / 2) break;
  }
  if (out.back() != m_max) out.push_back(m_max);
  return out;
}

void SolveConfig::Validate() const {
  if (m_schedule.empty()) throw InputError("m schedule is empty");
  if (m_schedule.front() < 1) throw InputError("m schedule must start >= 1");
  for (size_t k = 1; k < m_schedule.size(); ++k) {
    if (m_schedule[k] <= m_schedule[k - 1]) {
      throw InputError("m schedule must be strictly increasing");
    }
  }
  if (!(newton_tol > 0.0) || !(local_tol > 0.0) ||
      !(continuation_stop > 0.0)) {
    throw InputError("tolerances must be positive");
  }
  if (max_newton_iters < 0) throw InputError("max_newton_iters must be >= 0");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw InputError("armijo_c must lie in (0, 1)");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw InputError("backtrack must lie in (0, 1)");
  }
  if (!(levenberg_lambda0 >= 0.0)) {
    throw InputError("levenberg_lambda0 must be >= 0");
  }
  if (min_stages < 1) throw InputError("min_stages must be >= 1");
}

const char* ToString(StageStatus status) {
  switch (status) {
    case StageStatus::kConverged:
      return "converged";
    case StageStatus::kConvergedAtRounding:
      return "converged_at_rounding";
    case StageStatus::kIterationLimit:
      return "iteration_limit";
    case StageStatus::kLineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

double LocalStationarity(const GridFunction& u, const LagrangianModel& model,
                         int m, Exec exec) {
  const Grid& grid = u.grid();
  const double h = grid.h();
  const auto jets = EvalCellJets(u, model, JetOrder::kFirst, exec);
  const int k = grid.n_cells() - 1;
  Vec worst(k);
  ForEachIndex(k, exec, [&](int c) {
    const int i = c + 1;
    const RadialJet& a = jets[i - 1];
    const RadialJet& b = jets[i];
    const double la = std::log(a.L);
    const double lb = std::log(b.L);
    const double loc = std::max(la, lb);
    const Vec ga = (a.L_P / h + 0.5 * a.L_eta) / a.L;
    const Vec gb = (-b.L_P / h + 0.5 * b.L_eta) / b.L;
    const Vec r = std::exp(m * (la - loc)) * ga + std::exp(m * (lb - loc)) * gb;
    worst[c] = h * r.lpNorm<Eigen::Infinity>();
  });
  return k > 0 ? worst.maxCoeff() : 0.0;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMaxLambda = 1e12;
constexpr double kMinStep = 1e-12;

void CheckEndpoints(const GridFunction& u, const AffineData& data) {
  const Grid& g = u.grid();
  const double a = g.interval().a;
  for (int i : {0, g.n_cells()}) {
    const Vec want = data.At(g.node(i), a);
    const double scale = 1.0 + want.lpNorm<Eigen::Infinity>();
    if ((u.node(i) - want).lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
      throw InputError(fmt::format(
          "initial guess does not match the boundary data at node {}", i));
    }
  }
}

struct Direction {
  Vec d;
  bool ok = false;
};

// Solves (T - c g g^T + lambda D) d = -E g with D = |diag T| (1 on rows that
// vanish identically); returns ok = false when the shifted matrix is not
// positive definite.
Direction NewtonDirection(const EnergyHessian& hess, double lambda) {
  const Vec diag = hess.T.Diagonal();
  Vec scale(diag.size());
  Vec frozen = Vec::Zero(diag.size());
  for (int i = 0; i < diag.size(); ++i) {
    const double a = std::abs(diag[i]);
    if (a > 0.0 && std::isfinite(a)) {
      scale[i] = 1.0 / std::sqrt(a);
    } else {
      scale[i] = 1.0;
      frozen[i] = 1.0;
    }
  }
  BlockTridiag s = hess.T.Scaled(scale);
  const int bs = s.block_size();
  for (int b = 0; b < s.blocks(); ++b) {
    s.diag(b).diagonal() += frozen.segment(b * bs, bs);
  }
  s.AddToDiagonal(lambda);
  BlockCholesky chol;
  Direction out;
  if (!chol.Factor(s)) return out;
  const Vec sg = scale.cwiseProduct(hess.gbar);
  const Vec y = scale.cwiseProduct(chol.Solve(sg));
  const double denom = 1.0 - hess.rank_one * hess.gbar.dot(y);
  if (!(denom > 0.0) || !y.allFinite()) return out;
  out.d = -hess.energy * y / denom;
  out.ok = true;
  return out;
}

double DuChangeLq(const Mat& a, const Mat& b, double h, double q) {
  double s = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    s += h * std::pow((a.col(j) - b.col(j)).norm(), q);
  }
  return std::pow(s, 1.0 / q);
}

// (sum_j h |x_j|^{2m})^{1/2m} for columns x_j, computed with a max shift.
double PowerNorm(const Mat& cols, double h, int m, int count) {
  double top = 0.0;
  for (int j = 0; j < count; ++j) top = std::max(top, cols.col(j).norm());
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (int j = 0; j < count; ++j) {
    s += h * std::pow(cols.col(j).norm() / top, 2.0 * m);
  }
  return top * std::pow(s, 1.0 / (2.0 * m));
}

}  // namespace

double BoundConstant(const Interval& interval) {
  return 4.0 * (interval.length() + 1.0);
}

std::pair<GridFunction, StageRecord> MinimizeEm(const GridFunction& u0,
                                                const LagrangianModel& model,
                                                int m, const AffineData& data,
                                                const SolveConfig& cfg) {
  cfg.Validate();
  if (m < 1) throw InputError("m must be >= 1");
  CheckEndpoints(u0, data);
  const Exec exec = cfg.exec;
  GridFunction u = u0;
  StageRecord rec;
  rec.m = m;
  rec.status = StageStatus::kIterationLimit;
  double lambda = cfg.levenberg_lambda0;

  for (int iter = 0;; ++iter) {
    const EnergyHessian hess = AssembleHessian(u, model, m, exec);
    const double gnorm = hess.gradient.lpNorm<Eigen::Infinity>();
    const double loc = LocalStationarity(u, model, m, exec);
    rec.iterations = iter;
    rec.gradient_norm = gnorm;
    rec.local_residual = loc;
    rec.normalized_energy = hess.energy;
    if (gnorm <= cfg.newton_tol && loc <= cfg.local_tol) {
      rec.status = StageStatus::kConverged;
      break;
    }
    if (iter >= cfg.max_newton_iters) {
      rec.status = StageStatus::kIterationLimit;
      break;
    }

    bool accepted = false;
    while (!accepted && lambda <= kMaxLambda) {
      const Direction dir = NewtonDirection(hess, lambda);
      if (!dir.ok) {
        lambda = std::max(1e-8, 10.0 * lambda);
        continue;
      }
      const Vec x0 = InteriorToVector(u);
      const double slope = hess.gradient.dot(dir.d);
      if (!(slope < 0.0)) {
        lambda = std::max(1e-8, 10.0 * lambda);
        continue;
      }
      for (double t = 1.0; t >= kMinStep; t *= cfg.backtrack) {
        GridFunction trial = u;
        VectorToInterior(x0 + t * dir.d, &trial);
        double e_trial;
        try {
          e_trial = EmEnergy(trial, model, m, exec).normalized;
        } catch (const ModelEvaluationError&) {
          continue;
        } catch (const NumericalError&) {
          continue;
        }
        if (!std::isfinite(e_trial)) continue;
        const bool armijo = e_trial <= hess.energy + cfg.armijo_c * t * slope;
        // At large m the energy of a near-critical iterate no longer resolves
        // the step; fall back to the per-node stationarity measure.
        const bool rounding =
            !armijo && e_trial <= hess.energy * (1.0 + 4.0 * kEps) &&
            LocalStationarity(trial, model, m, exec) < loc;
        if (armijo || rounding) {
          u = std::move(trial);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (gnorm <= cfg.newton_tol) break;
        lambda = std::max(1e-8, 10.0 * lambda);
      }
    }
    if (!accepted) {
      rec.status = gnorm <= cfg.newton_tol ? StageStatus::kConvergedAtRounding
                                           : StageStatus::kLineSearchFailure;
      break;
    }
    lambda = lambda > 1e-8 ? lambda / 10.0 : 0.0;
  }

  const EnergyBreakdown e = EmEnergy(u, model, m, exec);
  rec.normalized_energy = e.normalized;
  rec.esup = e.esup;
  return {std::move(u), std::move(rec)};
}

SolveReport ContinuationSolve(const LagrangianModel& model,
                              const AffineData& data, const Grid& grid,
                              const SolveConfig& cfg) {
  cfg.Validate();
  if (data.dim() != model.dim()) {
    throw InputError(fmt::format("boundary data has dim {}, model has dim {}",
                                 data.dim(), model.dim()));
  }
  const double h = grid.h();
  const double C = BoundConstant(grid.interval());
  const double b_max =
      std::max(data.At(grid.interval().a, grid.interval().a).norm(),
               data.At(grid.interval().b, grid.interval().a).norm());

  SolveReport report;
  GridFunction u = GridFunction::Affine(grid, data);
  Mat du_prev = CellGradient(u);
  for (size_t k = 0; k < cfg.m_schedule.size(); ++k) {
    const int m = cfg.m_schedule[k];
    auto [next, rec] = MinimizeEm(u, model, m, data, cfg);
    u = std::move(next);
    const Mat du = CellGradient(u);
    rec.du_change_sup = 0.0;
    for (int j = 0; j < du.cols(); ++j) {
      rec.du_change_sup =
          std::max(rec.du_change_sup, (du.col(j) - du_prev.col(j)).norm());
    }
    rec.du_change_lq = {DuChangeLq(du, du_prev, h, 1.0),
                        DuChangeLq(du, du_prev, h, 2.0),
                        DuChangeLq(du, du_prev, h, 4.0)};
    du_prev = du;
    if (m >= 2) {
      rec.residual_sup =
          ExpandedResidual(u, model, m, cfg.exec).sup_normalized;
    }
    const EnergyBreakdown e = EmEnergy(u, model, m, cfg.exec);
    rec.bound_lhs = PowerNorm(u.values(), h, m, u.n_nodes()) +
                    PowerNorm(du, h, m, static_cast<int>(du.cols()));
    rec.bound_rhs = C * (std::exp(e.log_raw / (2.0 * m)) + b_max + 1.0);
    report.bound_ok = report.bound_ok && rec.bound_lhs <= rec.bound_rhs;
    report.all_converged = report.all_converged && IsConverged(rec.status);
    rec.iterate = u;
    const bool settled = rec.du_change_sup <= cfg.continuation_stop;
    report.stages.push_back(std::move(rec));
    if (static_cast<int>(k) + 1 >= cfg.min_stages && settled) break;
  }

  report.u_final = u;
  const EnergyBreakdown e = EmEnergy(u, model, 1, cfg.exec);
  report.esup_final = e.esup;
  report.residual_inf = ExpandedResidual(u, model, kMInfinity, cfg.exec);
  for (int m : cfg.m_schedule) {
    report.monotonicity.emplace_back(m, PowerMean(e.L, m, nullptr, cfg.exec));
  }
  return report;
}

double SmallestHessianEigenvalue(const EnergyHessian& hess, int iterations,
                                 std::uint64_t seed) {
  BlockCholesky chol;
  if (!chol.Factor(hess.T)) return 0.0;
  const Vec tg = chol.Solve(hess.gbar);
  const double denom = 1.0 - hess.rank_one * hess.gbar.dot(tg);
  if (!(denom > 0.0)) return 0.0;
  // A^{-1} x = T^{-1} x + c T^{-1} g (g^T T^{-1} x) / denom
  auto apply_inverse = [&](const Vec& x) {
    const Vec tx = chol.Solve(x);
    return Vec(tx + hess.rank_one * tg * (tg.dot(x)) / denom);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec x(hess.gbar.size());
  for (int i = 0; i < x.size(); ++i) x[i] = normal(rng);
  x.normalize();
  double mu = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vec y = apply_inverse(x);
    mu = x.dot(y);
    x = y.normalized();
  }
  return mu > 0.0 ? 1.0 / mu : 0.0;
}

}  // namespace linf
