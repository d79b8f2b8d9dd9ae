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


// linfsolve command-line driver.
//
// Exit status: 0 when every requested check passes, 2 on check failures or
// numerical breakdown, 1 on input errors.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "linf/analysis.h"
#include "linf/assimilation.h"
#include "linf/elsystem.h"
#include "linf/functionals.h"
#include "linf/kernels.h"
#include "linf/problem.h"
#include "linf/report.h"
#include "linf/solver.h"

namespace {

using nlohmann::json;
using namespace linf;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheck = 2;

struct Options {
  std::string problem;
  std::string out = "linf_out";
  std::optional<int> m_max;
  std::optional<int> n_cells;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> eps_sing;
  std::optional<std::string> solution;
  int threads = 0;  // 0: OpenMP default, 1: serial kernels
};

void AddCommonOptions(CLI::App* app, Options* o) {
  app->add_option("--problem", o->problem, "Problem file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--out", o->out, "Output directory");
  app->add_option("--m-max", o->m_max, "Largest exponent of the schedule")
      ->check(CLI::PositiveNumber);
  app->add_option("--n-cells", o->n_cells, "Number of grid cells")
      ->check(CLI::Range(4, 1 << 24));
  app->add_option("--seed", o->seed, "Seed for every randomized step");
  app->add_option("--trials", o->trials, "Minimality trials")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--eps-sing", o->eps_sing, "Singular-set threshold")
      ->check(CLI::PositiveNumber);
  app->add_option("--threads", o->threads,
                  "Kernel threads (1 = serial path, 0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);
}

Problem LoadWithOverrides(const Options& o) {
  Problem p = LoadProblem(o.problem);
  if (o.m_max) p.solver.m_schedule = SolveConfig::DoublingSchedule(*o.m_max);
  if (o.n_cells) SetCellCount(&p, *o.n_cells);
  if (o.seed) {
    p.solver.seed = *o.seed;
    p.verify.seed = *o.seed;
  }
  if (o.trials) p.verify.trials = *o.trials;
  if (o.eps_sing) p.verify.eps_sing = *o.eps_sing;
  if (o.threads == 1) {
    p.solver.exec = Exec::kSerial;
  } else {
    if (o.threads > 1) SetThreadCount(o.threads);
    p.solver.exec = Exec::kParallel;
  }
  return p;
}

json ProblemJson(const Problem& p) {
  json schedule = json::array();
  for (int m : p.solver.m_schedule) schedule.push_back(m);
  return {{"name", p.name},
          {"source", p.source},
          {"model", p.model_name},
          {"interval", {p.interval.a, p.interval.b}},
          {"n_cells", p.n_cells},
          {"dim", p.dim},
          {"m_schedule", schedule}};
}

double AffineDeviation(const GridFunction& u, const AffineData& data) {
  const GridFunction affine = GridFunction::Affine(u.grid(), data);
  return (u.values() - affine.values()).cwiseAbs().maxCoeff();
}

void WriteSolve(OutputDir* out, const SolveReport& r, const std::string& tag) {
  out->Write("solution" + tag + ".csv", GridFunctionToCsv(r.u_final),
             "solution" + tag);
  out->Write("stages" + tag + ".csv", StageTableCsv(r), "stage table" + tag);
  out->Write("monotonicity" + tag + ".csv", MonotonicityCsv(r),
             "power-mean chain" + tag);
  if (r.residual_inf.grid.n_cells() > 0) {
    out->Write("residual_inf" + tag + ".csv", ResidualToCsv(r.residual_inf),
               "limiting residual" + tag);
  }
}

int RunSolve(const Options& o) {
  const Problem p = LoadWithOverrides(o);
  const SolveReport r =
      ContinuationSolve(*p.model, p.data(), p.grid(), p.solver);
  OutputDir out(o.out);
  WriteSolve(&out, r, "");
  const bool pass = r.all_converged && r.bound_ok;
  json report = {{"command", "solve"},
                 {"problem", ProblemJson(p)},
                 {"solve", ToJson(r)},
                 {"affine_deviation_sup", AffineDeviation(r.u_final, p.data())},
                 {"pass", pass}};
  out.WriteReport(report);
  fmt::print("solve {}: E_inf = {:.12g}, {} stages, {}\n", p.name,
             r.esup_final, r.stages.size(), pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitCheck;
}

int RunAssimilate(const Options& o) {
  const Problem p = LoadWithOverrides(o);
  if (p.kind != ProblemKind::kAssimilation) {
    throw InputError(p.source + ": field 'kind': assimilate needs "
                     "kind = \"assimilation\"");
  }
  const ComparisonReport c = Assimilate(*p.assimilation, p.solver);
  OutputDir out(o.out);
  out.Write("measurements.csv", MeasurementsToCsv(c.measurements),
            "measurements");
  if (c.truth) out.Write("truth.csv", GridFunctionToCsv(*c.truth), "truth");
  WriteSolve(&out, c.classical, "_m1");
  WriteSolve(&out, c.supremal, "_inf");
  out.Write("misfit.csv", ComparisonToCsv(c), "pointwise misfits");
  const bool converged = c.classical.all_converged && c.supremal.all_converged;
  const bool pass = converged && c.esup_ordering && c.spike_ordering;
  json report = {{"command", "assimilate"},
                 {"problem", ProblemJson(p)},
                 {"hypotheses", ToJson(c.hypotheses)},
                 {"classical", ToJson(c.classical_misfit)},
                 {"supremal", ToJson(c.supremal_misfit)},
                 {"classical_solve", ToJson(c.classical)},
                 {"supremal_solve", ToJson(c.supremal)},
                 {"scale", c.scale},
                 {"esup_ordering", c.esup_ordering},
                 {"spike_ordering", c.spike_ordering},
                 {"pass", pass}};
  out.WriteReport(report);
  fmt::print(
      "assimilate {}: spike m=1 {:.6g} vs inf {:.6g}; E_inf m=1 {:.10g} vs "
      "inf {:.10g}; {}\n",
      p.name, c.classical_misfit.spike, c.supremal_misfit.spike,
      c.classical_misfit.esup, c.supremal_misfit.esup, pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitCheck;
}

int RunVerify(const Options& o) {
  const Problem p = LoadWithOverrides(o);
  OutputDir out(o.out);
  std::optional<SolveReport> solved;
  GridFunction u;
  if (o.solution) {
    u = ReadGridFunctionCsv(*o.solution);
    const Interval& iv = u.grid().interval();
    const double tol = 1e-9 * p.interval.length();
    if (std::abs(iv.a - p.interval.a) > tol ||
        std::abs(iv.b - p.interval.b) > tol || u.dim() != p.dim) {
      throw InputError(fmt::format(
          "{}: solution on [{}, {}] in R^{} does not match the problem",
          *o.solution, iv.a, iv.b, u.dim()));
    }
  } else {
    solved = ContinuationSolve(*p.model, p.data(), p.grid(), p.solver);
    u = solved->u_final;
    WriteSolve(&out, *solved, "");
  }
  const LagrangianModel& model = *p.model;
  const double esup = EsupEnergy(u, model, CellMask::All(u.grid().n_cells()));
  const double scale = std::max(1.0, esup);

  MinimalityOptions mo;
  mo.trials = p.verify.trials;
  mo.seed = p.verify.seed;
  mo.descent_polish = p.verify.descent_polish;
  mo.exec = p.solver.exec;
  const auto trials = VerifyAbsoluteMinimiser(u, model, mo);
  const double worst = WorstMargin(trials);
  const bool minimal = worst <= 1e-6 * scale;
  out.Write("trials.csv", TrialsCsv(trials), "minimality trials");

  const double eps = p.verify.eps_sing.value_or(DefaultSingularEps(u));
  const SingularSetReport sing = DetectSingularSet(u, model, eps);
  out.Write("singular_set.csv", SingularSetCsv(sing, u.grid()),
            "singular set");

  const EmpiricalYoungMeasure eym = BuildEmpiricalYoungMeasure(
      u, p.verify.young_ladder, DefaultYoungCap(u));
  const DSolutionReport ds = DSolutionCheck(
      u, model, eym, p.verify.dsolution_tol * scale, &sing.omega_inf);
  out.Write("dsolution.csv", DSolutionCsv(ds, u.grid()), "D-solution check");

  json report = {{"command", "verify"},
                 {"problem", ProblemJson(p)},
                 {"solution", o.solution ? json(*o.solution) : json("solved")},
                 {"esup", esup},
                 {"minimality",
                  {{"trials", trials.size()},
                   {"worst_margin", worst},
                   {"tol", 1e-6 * scale},
                   {"pass", minimal}}},
                 {"singular_set", ToJson(sing)},
                 {"dsolution", ToJson(ds)}};
  bool pass = minimal && ds.pass;
  if (solved) {
    const LscTable lsc = LscDiagnostic(*solved, model, p.verify.seed);
    out.Write("lsc.csv", LscCsv(lsc), "semicontinuity table");
    report["lsc"] = ToJson(lsc);
    report["solve"] = ToJson(*solved);
    pass = pass && lsc.pass && solved->all_converged;
  }
  report["pass"] = pass;
  out.WriteReport(report);
  fmt::print(
      "verify {}: worst minimality margin {:.3e} ({}), D-solution worst "
      "{:.3e} ({}), {}\n",
      p.name, worst, minimal ? "ok" : "violated", ds.worst,
      ds.pass ? "ok" : "violated", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitCheck;
}

int RunSweep(const Options& o) {
  Problem p = LoadWithOverrides(o);
  std::vector<int> ns = p.sweep.n_cells;
  if (o.n_cells || ns.empty()) {
    ns = o.n_cells ? std::vector<int>{*o.n_cells}
                   : std::vector<int>{std::max(4, p.n_cells / 2), p.n_cells};
  }
  std::vector<int> ms = p.sweep.m_max;
  if (o.m_max || ms.empty()) ms = {p.solver.m_schedule.back()};
  std::string csv =
      "n_cells,m_max,m,iterations,status,normalized_energy,esup,"
      "du_change_sup,residual_sup\n";
  json runs = json::array();
  bool pass = true;
  for (int n : ns) {
    SetCellCount(&p, n);
    for (int mm : ms) {
      SolveConfig cfg = p.solver;
      cfg.m_schedule = SolveConfig::DoublingSchedule(mm);
      const SolveReport r = ContinuationSolve(*p.model, p.data(), p.grid(), cfg);
      for (const StageRecord& s : r.stages) {
        csv += fmt::format("{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                           n, mm, s.m, s.iterations, ToString(s.status),
                           s.normalized_energy, s.esup, s.du_change_sup,
                           s.residual_sup);
      }
      runs.push_back({{"n_cells", n},
                      {"m_max", mm},
                      {"stages", r.stages.size()},
                      {"esup_final", r.esup_final},
                      {"all_converged", r.all_converged},
                      {"bound_ok", r.bound_ok}});
      pass = pass && r.all_converged && r.bound_ok;
    }
  }
  OutputDir out(o.out);
  out.Write("sweep.csv", csv, "stage table per (n_cells, m_max)");
  out.WriteReport({{"command", "sweep"},
                   {"problem", ProblemJson(p)},
                   {"runs", runs},
                   {"pass", pass}});
  fmt::print("sweep {}: {} runs, {}\n", p.name, runs.size(),
             pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitCheck;
}

int RunCheckModel(const Options& o) {
  const Problem p = LoadWithOverrides(o);
  SampleBox box = p.box;
  box.x_lo = p.interval.a;
  box.x_hi = p.interval.b;
  const HypothesisReport h = CheckHypotheses(
      *p.model, box, p.hypothesis_samples, o.seed.value_or(p.hypothesis_seed));
  std::string csv = "id,pass,worst_margin,x,p\n";
  for (const HypothesisCheck& c : h.checks) {
    csv += fmt::format("\"{}\",{},{:.17g},{:.17g},{:.17g}\n", c.id,
                       c.pass ? 1 : 0, c.worst_margin, c.x, c.p);
  }
  OutputDir out(o.out);
  out.Write("hypotheses.csv", csv, "hypothesis checks");
  out.WriteReport({{"command", "check-model"},
                   {"problem", ProblemJson(p)},
                   {"hypotheses", ToJson(h)},
                   {"pass", h.pass}});
  for (const HypothesisCheck& c : h.checks) {
    if (!c.pass) {
      fmt::print("check-model {}: FAIL {} (worst margin {:.3e})\n", p.name,
                 c.id, c.worst_margin);
    }
  }
  if (h.pass) fmt::print("check-model {}: PASS\n", p.name);
  return h.pass ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linfsolve: L-infinity variational problems for ODE systems"};
  app.require_subcommand(1);
  Options o;
  CLI::App* solve = app.add_subcommand("solve", "Continuation solve");
  CLI::App* assimilate =
      app.add_subcommand("assimilate", "Classical vs supremal assimilation");
  CLI::App* verify =
      app.add_subcommand("verify", "Analysis suite on a stored solution");
  CLI::App* sweep = app.add_subcommand("sweep", "Stage table over n and m");
  CLI::App* check = app.add_subcommand("check-model", "Hypothesis checks");
  for (CLI::App* sub : {solve, assimilate, verify, sweep, check}) {
    AddCommonOptions(sub, &o);
  }
  verify->add_option("--solution", o.solution,
                     "Solution CSV (x,u_1,...); solved when omitted")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return RunSolve(o);
    if (*assimilate) return RunAssimilate(o);
    if (*verify) return RunVerify(o);
    if (*sweep) return RunSweep(o);
    return RunCheckModel(o);
  } catch (const InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitCheck;
  }
}
