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

#include "linf/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "linf/elsystem.h"
#include "linf/functionals.h"
#include "linf/kernels.h"

namespace linf {
namespace {

double SupCellGradient(const GridFunction& u) {
  const Mat du = CellGradient(u);
  double best = 0.0;
  for (int j = 0; j < du.cols(); ++j) best = std::max(best, du.col(j).norm());
  return best;
}

// True when a breakpoint of the model lies strictly inside the stencil
// (x_{i-1}, x_{i+1}) of node i.
bool AtBreakpoint(const LagrangianModel& model, const Grid& grid, int i) {
  const double lo = grid.node(i - 1);
  const double hi = grid.node(i + 1);
  for (double b : model.x_breakpoints()) {
    if (b > lo && b < hi) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Minimality trials.

struct Span {
  int begin;
  int end;
  int interior() const { return end - begin - 1; }
};

// L_j for cells in [begin, end) of u + phi, phi given on the span interior.
Vec SpanLagrangian(const GridFunction& u, const LagrangianModel& model,
                   const Span& span, const Mat& phi) {
  const Grid& g = u.grid();
  const double h = g.h();
  auto node = [&](int i) -> Vec {
    Vec v = u.node(i);
    if (i > span.begin && i < span.end) v += phi.col(i - span.begin - 1);
    return v;
  };
  Vec L(span.end - span.begin);
  for (int j = span.begin; j < span.end; ++j) {
    const Vec a = node(j);
    const Vec b = node(j + 1);
    L[j - span.begin] =
        EvalL(model, g.midpoint(j), 0.5 * (a + b), (b - a) / h);
  }
  return L;
}

// Smoothed max tau log sum exp(L_j / tau) and its gradient in phi.
double SmoothedMax(const GridFunction& u, const LagrangianModel& model,
                   const Span& span, const Mat& phi, double tau, Mat* grad) {
  const Grid& g = u.grid();
  const double h = g.h();
  auto node = [&](int i) -> Vec {
    Vec v = u.node(i);
    if (i > span.begin && i < span.end) v += phi.col(i - span.begin - 1);
    return v;
  };
  const int cells = span.end - span.begin;
  std::vector<RadialJet> jets(cells);
  double top = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < cells; ++c) {
    const int j = span.begin + c;
    const Vec a = node(j);
    const Vec b = node(j + 1);
    jets[c] = EvalJet(model, g.midpoint(j), 0.5 * (a + b), (b - a) / h,
                      grad ? JetOrder::kFirst : JetOrder::kValue);
    top = std::max(top, jets[c].L);
  }
  double sum = 0.0;
  Vec w(cells);
  for (int c = 0; c < cells; ++c) {
    w[c] = std::exp((jets[c].L - top) / tau);
    sum += w[c];
  }
  if (grad) {
    grad->setZero(u.dim(), span.interior());
    for (int c = 0; c < cells; ++c) {
      const int j = span.begin + c;
      const RadialJet& jet = jets[c];
      const double s = w[c] / sum;
      const Vec left = -jet.L_P / h + 0.5 * jet.L_eta;
      const Vec right = jet.L_P / h + 0.5 * jet.L_eta;
      if (j > span.begin) grad->col(j - span.begin - 1) += s * left;
      if (j + 1 < span.end) grad->col(j - span.begin) += s * right;
    }
  }
  return top + tau * std::log(sum);
}

MinimalityTrial RunTrial(const GridFunction& u, const LagrangianModel& model,
                         const MinimalityOptions& options, int index,
                         double du_scale) {
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                    static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const int n = u.grid().n_cells();
  const double h = u.grid().h();
  std::uniform_int_distribution<int> pick_begin(0, n - 4);
  const int begin = pick_begin(rng);
  std::uniform_int_distribution<int> pick_end(begin + 4, n);
  const Span span{begin, pick_end(rng)};

  MinimalityTrial trial;
  trial.index = index;
  trial.begin_node = span.begin;
  trial.end_node = span.end;
  trial.amplitude =
      options.amplitudes[index % options.amplitudes.size()];

  // Random hat combination scaled so that sup |D phi| = amplitude * scale.
  std::normal_distribution<double> normal;
  Mat phi(u.dim(), span.interior());
  for (int c = 0; c < phi.cols(); ++c) {
    for (int r = 0; r < phi.rows(); ++r) phi(r, c) = normal(rng);
  }
  double dphi = 0.0;
  for (int c = 0; c <= phi.cols(); ++c) {
    const Vec a = c > 0 ? Vec(phi.col(c - 1)) : Vec::Zero(u.dim());
    const Vec b = c < phi.cols() ? Vec(phi.col(c)) : Vec::Zero(u.dim());
    dphi = std::max(dphi, (b - a).norm() / h);
  }
  if (dphi > 0.0) phi *= trial.amplitude * du_scale / dphi;

  const Mat zero = Mat::Zero(u.dim(), span.interior());
  trial.esup_u = SpanLagrangian(u, model, span, zero).maxCoeff();
  double best = SpanLagrangian(u, model, span, phi).maxCoeff();
  Mat best_phi = phi;

  if (options.descent_polish) {
    trial.polished = true;
    const double scale = std::max(trial.esup_u, 1.0);
    for (double rel_tau : {1e-2, 1e-3, 1e-4}) {
      const double tau = rel_tau * scale;
      double step = trial.amplitude * du_scale * h;
      Mat grad;
      double value = SmoothedMax(u, model, span, phi, tau, &grad);
      for (int it = 0; it < options.polish_iterations && step > 0.0; ++it) {
        const double gmax = grad.cwiseAbs().maxCoeff();
        if (!(gmax > 0.0)) break;
        bool moved = false;
        while (step > 1e-14 * du_scale * h) {
          const Mat cand = phi - (step / gmax) * grad;
          Mat cand_grad;
          const double v = SmoothedMax(u, model, span, cand, tau, &cand_grad);
          if (v < value) {
            phi = cand;
            value = v;
            grad = std::move(cand_grad);
            step *= 2.0;
            moved = true;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
        const double e = SpanLagrangian(u, model, span, phi).maxCoeff();
        if (e < best) {
          best = e;
          best_phi = phi;
        }
      }
    }
  }
  trial.coefficients = best_phi;
  trial.esup_perturbed = best;
  trial.margin = std::max(0.0, trial.esup_u - best);
  return trial;
}

// ---------------------------------------------------------------------------
// Young measure clustering.

std::vector<YoungCluster> SingleLinkage(const std::vector<Vec>& samples,
                                        double radius, int total) {
  const int k = static_cast<int>(samples.size());
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if ((samples[a] - samples[b]).norm() <= radius) {
        parent[find(a)] = find(b);
      }
    }
  }
  std::vector<YoungCluster> clusters;
  std::vector<int> slot(k, -1);
  for (int a = 0; a < k; ++a) {
    const int root = find(a);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(clusters.size());
      clusters.push_back({Vec::Zero(samples[a].size()), 0.0, 0});
    }
    YoungCluster& c = clusters[slot[root]];
    c.center += samples[a];
    ++c.count;
  }
  for (YoungCluster& c : clusters) {
    c.center /= c.count;
    c.weight = static_cast<double>(c.count) / total;
  }
  return clusters;
}

}  // namespace

std::vector<MinimalityTrial> VerifyAbsoluteMinimiser(
    const GridFunction& u, const LagrangianModel& model,
    const MinimalityOptions& options) {
  if (u.grid().n_cells() < 4) {
    throw InputError("minimality trials need at least 4 cells");
  }
  if (options.trials < 0) throw InputError("trials must be >= 0");
  if (options.amplitudes.empty()) throw InputError("no perturbation amplitudes");
  const double du_scale = std::max(SupCellGradient(u), 1.0);
  std::vector<MinimalityTrial> out(options.trials);
  ForEachIndex(options.trials, options.exec, [&](int t) {
    out[t] = RunTrial(u, model, options, t, du_scale);
  });
  return out;
}

double WorstMargin(const std::vector<MinimalityTrial>& trials) {
  double worst = 0.0;
  for (const auto& t : trials) worst = std::max(worst, t.margin);
  return worst;
}

double DefaultYoungCap(const GridFunction& u) {
  const double len = u.grid().interval().length();
  return 1e3 * std::max(SupCellGradient(u), 1.0) / len;
}

EmpiricalYoungMeasure BuildEmpiricalYoungMeasure(const GridFunction& u,
                                                 const std::vector<int>& ladder,
                                                 double cap) {
  if (ladder.empty()) throw InputError("Young measure: empty step ladder");
  for (int k : ladder) {
    if (k < 1) throw InputError("Young measure: ladder steps must be >= 1");
  }
  if (!(cap > 0.0)) throw InputError("Young measure: cap must be > 0");
  EmpiricalYoungMeasure eym;
  eym.grid = u.grid();
  eym.ladder = ladder;
  eym.cap = cap;
  const int n = u.grid().n_cells();
  for (int i = 1; i < n; ++i) {
    YoungNode node;
    node.node = i;
    std::vector<Vec> kept;
    for (int k : ladder) {
      if (i - k < 0 || i + k > n) continue;
      node.steps.push_back(k * u.grid().h());
      node.quotients.push_back(SecondDifference(u, i, k));
      if (node.quotients.back().norm() <= cap) {
        kept.push_back(node.quotients.back());
      }
    }
    const int total = static_cast<int>(node.quotients.size());
    if (total > 0) {
      node.clusters = SingleLinkage(kept, 0.1 * cap, total);
      node.escaped_fraction =
          static_cast<double>(total - static_cast<int>(kept.size())) / total;
    }
    eym.nodes.push_back(std::move(node));
  }
  return eym;
}

DSolutionReport DSolutionCheck(const GridFunction& u,
                               const LagrangianModel& model,
                               const EmpiricalYoungMeasure& eym, double tol,
                               const CellMask* cells) {
  if (!(eym.grid == u.grid())) {
    throw InputError("D-solution check: Young measure built on another grid");
  }
  DSolutionReport report;
  report.tol = tol;
  const Grid& g = u.grid();
  for (const YoungNode& yn : eym.nodes) {
    const int i = yn.node;
    DSolutionNode out;
    out.node = i;
    if (cells && !((*cells)[i - 1] && (*cells)[i])) {
      out.checked = false;
      report.nodes.push_back(out);
      continue;
    }
    if (AtBreakpoint(model, g, i)) {
      out.checked = false;
      ++report.skipped_breakpoints;
      report.nodes.push_back(out);
      continue;
    }
    ++report.checked;
    out.vacuous = yn.clusters.empty();
    if (out.vacuous) ++report.vacuous;
    const Vec P = CenteredGradient(u, i);
    for (const YoungCluster& c : yn.clusters) {
      const SystemPointState s = MakeState(model, g.node(i), u.node(i), P,
                                           c.center);
      out.residual =
          std::max(out.residual, NormalizedMagnitude(LinfOperator(s), s));
    }
    report.worst = std::max(report.worst, out.residual);
    report.nodes.push_back(out);
  }
  report.pass = report.worst <= tol;
  return report;
}

double DefaultSingularEps(const GridFunction& u) {
  return std::pow(u.grid().h(), 2.0 / 3.0) *
         std::max(1.0, SupCellGradient(u));
}

SingularSetReport DetectSingularSet(const GridFunction& u,
                                    const LagrangianModel& model, double eps) {
  if (!(eps > 0.0)) throw InputError("singular set: eps must be > 0");
  const int n = u.grid().n_cells();
  const auto jets = EvalCellJets(u, model, JetOrder::kValue, Exec::kSerial);
  SingularSetReport r;
  r.eps = eps;
  r.singular = CellMask(n);
  const double eps3 = eps * eps * eps;
  for (int j = 0; j < n; ++j) {
    const double w = jets[j].W.norm();
    r.singular.Set(j, w * w * w <= eps3);
  }
  r.omega_inf = r.singular.Complement();
  for (int j = 0; j < n; ++j) {
    const bool left = j > 0 && r.singular[j - 1] != r.singular[j];
    const bool right = j + 1 < n && r.singular[j + 1] != r.singular[j];
    if (left || right) r.boundary_cells.push_back(j);
  }
  r.singular_fraction = static_cast<double>(r.singular.Count()) / n;
  r.omega_inf_fraction = static_cast<double>(r.omega_inf.Count()) / n;
  r.boundary_fraction = static_cast<double>(r.boundary_cells.size()) / n;
  if (n >= 3 && !r.omega_inf.Empty()) {
    const ResidualField res = ExpandedResidual(u, model, kMInfinity);
    for (int i = 1; i < n; ++i) {
      if (!(r.omega_inf[i - 1] && r.omega_inf[i])) continue;
      if (AtBreakpoint(model, u.grid(), i)) continue;
      r.residual_sup_omega_inf =
          std::max(r.residual_sup_omega_inf, res.normalized[i - 1]);
    }
  }
  return r;
}

LscTable LscDiagnostic(const SolveReport& report, const LagrangianModel& model,
                       std::uint64_t seed, int sub_masks, double tol) {
  if (report.stages.empty()) throw InputError("lsc: report has no stages");
  const int n = report.u_final.grid().n_cells();
  std::vector<std::pair<std::string, CellMask>> sets;
  sets.emplace_back("full", CellMask::All(n));
  std::mt19937_64 rng(seed);
  for (int s = 0; s < sub_masks; ++s) {
    int level = 1 + static_cast<int>(rng() % 3);
    while (level > 0 && (n >> level) < 1) --level;
    const int parts = 1 << level;
    const int piece = static_cast<int>(rng() % parts);
    const int begin = piece * n / parts;
    const int end = (piece + 1) * n / parts;
    sets.emplace_back(fmt::format("[{},{})", begin, end),
                      CellMask::Range(n, begin, end));
  }
  const Vec L_final = EvalCellLagrangian(report.u_final, model, Exec::kSerial);
  std::vector<Vec> stage_L;
  for (const StageRecord& st : report.stages) {
    stage_L.push_back(EvalCellLagrangian(st.iterate, model, Exec::kSerial));
  }
  LscTable table;
  table.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& [name, mask] : sets) {
    LscRow row;
    row.set = name;
    row.cells = mask.Count();
    for (int j = 0; j < n; ++j) {
      if (mask[j]) row.esup_final = std::max(row.esup_final, L_final[j]);
    }
    row.stage_min = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < report.stages.size(); ++k) {
      const int m = report.stages[k].m;
      const double v = PowerMean(stage_L[k], m, &mask) *
                       std::pow(static_cast<double>(row.cells), 1.0 / m);
      if (v < row.stage_min) {
        row.stage_min = v;
        row.argmin_m = m;
      }
    }
    row.margin = row.stage_min - row.esup_final;
    table.worst_margin = std::min(table.worst_margin, row.margin);
    table.rows.push_back(row);
  }
  table.pass = table.worst_margin >= -tol * std::max(1.0, report.esup_final);
  return table;
}

}  // namespace linf
