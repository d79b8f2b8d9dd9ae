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


#include "linf/assimilation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

#include "linf/functionals.h"
#include "linf/kernels.h"

namespace linf {
namespace {

double UniformSymmetric(std::mt19937_64& rng) {
  // 53 random bits mapped to [-1, 1), independent of the library's
  // distribution implementations.
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

ObservationModel MakeObservation(const AssimilationProblem& problem,
                                 MeasurementSeries series) {
  return ObservationModel::Linear(problem.observation, std::move(series));
}

}  // namespace

void AssimilationProblem::Validate() const {
  if (!(interval.b > interval.a)) throw InputError("assimilation: empty interval");
  if (n_cells < 3) throw InputError("assimilation: n_cells must be >= 3");
  if (!dynamics.eval) throw InputError("assimilation: dynamics not set");
  const int dim = dynamics.dim;
  if (observation.cols() != dim || observation.rows() < 1) {
    throw InputError(fmt::format(
        "assimilation: observation matrix is {}x{}, state dim {}",
        observation.rows(), observation.cols(), dim));
  }
  if (!initial_state && !measurements) {
    throw InputError(
        "assimilation: need an initial state (synthetic) or measurements");
  }
  if (initial_state && initial_state->size() != dim) {
    throw InputError("assimilation: initial state has wrong dimension");
  }
  if (!initial_state && (!left || !right)) {
    throw InputError(
        "assimilation: endpoint data required without a truth trajectory");
  }
  for (const auto* end : {&left, &right}) {
    if (*end && (*end)->size() != dim) {
      throw InputError("assimilation: endpoint data has wrong dimension");
    }
  }
  if (sample_stride < 1) throw InputError("assimilation: sample_stride < 1");
  if (!(noise.amplitude >= 0.0)) {
    throw InputError("assimilation: noise amplitude must be >= 0");
  }
  for (const Outlier& o : noise.outliers) {
    if (o.offset.size() != observation.rows()) {
      throw InputError("assimilation: outlier offset has wrong dimension");
    }
  }
  if (measurements) {
    if (measurements->obs_dim() != observation.rows()) {
      throw InputError("assimilation: measurement dimension mismatch");
    }
    if (!measurements->Covers(interval)) {
      throw InputError("assimilation: measurements do not cover the interval");
    }
  }
}

GridFunction IntegrateTruth(const VectorField& dynamics, const Grid& grid,
                            const Vec& initial_state) {
  GridFunction u(grid, dynamics.dim);
  u.node(0) = initial_state;
  const double h = grid.h();
  for (int i = 0; i < grid.n_cells(); ++i) {
    const double x = grid.node(i);
    const Vec y = u.node(i);
    const Vec k1 = dynamics.eval(x, y).V;
    const Vec k2 = dynamics.eval(x + 0.5 * h, y + 0.5 * h * k1).V;
    const Vec k3 = dynamics.eval(x + 0.5 * h, y + 0.5 * h * k2).V;
    const Vec k4 = dynamics.eval(x + h, y + h * k3).V;
    u.node(i + 1) = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!u.node(i + 1).allFinite()) {
      throw NumericalError(
          fmt::format("truth integration blew up at x = {}", grid.node(i + 1)));
    }
  }
  return u;
}

Synthesis Synthesize(const AssimilationProblem& problem) {
  problem.Validate();
  if (!problem.initial_state) {
    throw InputError("synthesize: no initial state");
  }
  const Grid grid = BuildGrid(problem.interval, problem.n_cells);
  GridFunction truth =
      IntegrateTruth(problem.dynamics, grid, *problem.initial_state);

  std::vector<int> nodes;
  for (int i = 0; i <= grid.n_cells(); i += problem.sample_stride) {
    nodes.push_back(i);
  }
  if (nodes.back() != grid.n_cells()) nodes.push_back(grid.n_cells());

  const int obs_dim = static_cast<int>(problem.observation.rows());
  std::vector<double> xs;
  Mat values(obs_dim, static_cast<int>(nodes.size()));
  std::mt19937_64 rng(problem.noise.seed);
  for (size_t s = 0; s < nodes.size(); ++s) {
    xs.push_back(grid.node(nodes[s]));
    values.col(s) = problem.observation * truth.node(nodes[s]);
    for (int c = 0; c < obs_dim; ++c) {
      values(c, s) += problem.noise.amplitude * UniformSymmetric(rng);
    }
  }
  for (const Outlier& o : problem.noise.outliers) {
    if (o.sample < 0 || o.sample >= values.cols()) {
      throw InputError(fmt::format(
          "synthesize: outlier sample {} outside [0, {})", o.sample,
          values.cols()));
    }
    values.col(o.sample) += o.offset;
  }
  return {std::move(truth), MeasurementSeries(std::move(xs), std::move(values))};
}

PointwiseMisfit ComputePointwiseMisfit(const GridFunction& u,
                                       const LagrangianModel& model,
                                       const ObservationModel& obs) {
  const Grid& g = u.grid();
  const int n = g.n_cells();
  const auto jets = EvalCellJets(u, model, JetOrder::kValue, Exec::kSerial);
  PointwiseMisfit out;
  out.x.resize(n);
  out.model.resize(n);
  out.observation.resize(n);
  out.lagrangian.resize(n);
  for (int j = 0; j < n; ++j) {
    const double x = g.midpoint(j);
    const Vec eta = 0.5 * (u.node(j) + u.node(j + 1));
    out.x[j] = x;
    out.model[j] = jets[j].W.norm();
    out.observation[j] = (obs.K(eta) - obs.k(x)).norm();
    out.lagrangian[j] = jets[j].L;
  }
  return out;
}

MisfitSummary Summarize(const PointwiseMisfit& pointwise, const Grid& grid,
                        const GridFunction& u,
                        const std::optional<GridFunction>& truth) {
  MisfitSummary s;
  const double h = grid.h();
  s.model_sup = pointwise.model.maxCoeff();
  s.model_l2 = std::sqrt(h * pointwise.model.squaredNorm());
  s.obs_sup = pointwise.observation.maxCoeff();
  s.obs_l2 = std::sqrt(h * pointwise.observation.squaredNorm());
  s.esup = pointwise.lagrangian.maxCoeff();
  s.spike = s.esup / pointwise.lagrangian.mean();
  if (truth) {
    if (!(truth->grid() == u.grid())) {
      throw InputError("misfit summary: truth on a different grid");
    }
    s.truth_sup = (u.values() - truth->values()).colwise().norm().maxCoeff();
  }
  return s;
}

ComparisonReport Assimilate(const AssimilationProblem& problem,
                            const SolveConfig& cfg) {
  problem.Validate();
  cfg.Validate();
  ComparisonReport report;
  report.grid = BuildGrid(problem.interval, problem.n_cells);
  if (problem.measurements) {
    report.measurements = *problem.measurements;
    if (problem.initial_state) {
      report.truth = IntegrateTruth(problem.dynamics, report.grid,
                                    *problem.initial_state);
    }
  } else {
    Synthesis syn = Synthesize(problem);
    report.truth = std::move(syn.truth);
    report.measurements = std::move(syn.measurements);
  }
  const ObservationModel obs = MakeObservation(problem, report.measurements);
  const LagrangianModel model = BuiltinDataAssimilation(obs, problem.dynamics);

  SampleBox box = problem.box;
  box.x_lo = problem.interval.a;
  box.x_hi = problem.interval.b;
  report.hypotheses = CheckHypotheses(model, box, problem.hypothesis_samples,
                                      problem.hypothesis_seed);
  if (!report.hypotheses.pass) {
    std::string failed;
    for (const HypothesisCheck& c : report.hypotheses.checks) {
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.id;
    }
    throw InputError("assimilation: hypotheses fail on the sample box: " +
                     failed);
  }

  const Vec left = problem.left ? *problem.left : Vec(report.truth->node(0));
  const Vec right = problem.right
                        ? *problem.right
                        : Vec(report.truth->node(report.grid.n_cells()));
  const AffineData data = AffineThrough(problem.interval, left, right);

  SolveConfig classical_cfg = cfg;
  classical_cfg.m_schedule = {1};
  classical_cfg.min_stages = 1;
  report.classical = ContinuationSolve(model, data, report.grid, classical_cfg);
  report.supremal = ContinuationSolve(model, data, report.grid, cfg);

  report.classical_pointwise =
      ComputePointwiseMisfit(report.classical.u_final, model, obs);
  report.supremal_pointwise =
      ComputePointwiseMisfit(report.supremal.u_final, model, obs);
  report.classical_misfit = Summarize(report.classical_pointwise, report.grid,
                                      report.classical.u_final, report.truth);
  report.supremal_misfit = Summarize(report.supremal_pointwise, report.grid,
                                     report.supremal.u_final, report.truth);
  report.scale = std::max(1.0, report.classical_misfit.esup);
  report.esup_ordering = report.supremal_misfit.esup <=
                         report.classical_misfit.esup + 1e-6 * report.scale;
  report.spike_ordering =
      report.supremal_misfit.spike <= report.classical_misfit.spike;
  return report;
}

std::string ComparisonToCsv(const ComparisonReport& report) {
  const PointwiseMisfit& a = report.classical_pointwise;
  const PointwiseMisfit& b = report.supremal_pointwise;
  std::string out =
      "x,model_misfit_m1,obs_misfit_m1,L_m1,model_misfit_inf,obs_misfit_inf,"
      "L_inf\n";
  for (int j = 0; j < a.x.size(); ++j) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       a.x[j], a.model[j], a.observation[j], a.lagrangian[j],
                       b.model[j], b.observation[j], b.lagrangian[j]);
  }
  return out;
}

MeasurementSeries LoadMeasurements(const std::string& path,
                                   const Interval& interval) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,", 0) != 0) {
    throw InputError(path + ":1: expected header 'x,k_1,...'");
  }
  const int columns =
      static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> xs;
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row = ParseCsvRow(line, path, line_no);
    if (static_cast<int>(row.size()) != columns) {
      throw InputError(fmt::format("{}:{}: expected {} columns, got {}", path,
                                   line_no, columns, row.size()));
    }
    if (!xs.empty() && !(row[0] > xs.back())) {
      throw InputError(fmt::format("{}:{}: x = {} is not increasing", path,
                                   line_no, row[0]));
    }
    xs.push_back(row[0]);
    rows.push_back(std::move(row));
  }
  if (xs.size() < 2) throw InputError(path + ": need at least 2 samples");
  Mat values(columns - 1, static_cast<int>(rows.size()));
  for (size_t s = 0; s < rows.size(); ++s) {
    for (int c = 1; c < columns; ++c) values(c - 1, s) = rows[s][c];
  }
  MeasurementSeries series(std::move(xs), std::move(values));
  if (!series.Covers(interval)) {
    throw InputError(fmt::format(
        "{}: coverage gap, samples span [{}, {}] but the interval is [{}, {}]",
        path, series.xs().front(), series.xs().back(), interval.a, interval.b));
  }
  return series;
}

std::string MeasurementsToCsv(const MeasurementSeries& series) {
  std::string out = "x";
  for (int c = 0; c < series.obs_dim(); ++c) out += fmt::format(",k_{}", c + 1);
  out += '\n';
  for (int s = 0; s < series.size(); ++s) {
    out += fmt::format("{:.17g}", series.xs()[s]);
    for (int c = 0; c < series.obs_dim(); ++c) {
      out += fmt::format(",{:.17g}", series.values()(c, s));
    }
    out += '\n';
  }
  return out;
}

}  // namespace linf
