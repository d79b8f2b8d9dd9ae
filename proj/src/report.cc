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


#include "linf/report.h"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

namespace linf {

using nlohmann::json;

OutputDir::OutputDir(std::string path) : path_(std::move(path)) {
  std::error_code ec;
  std::filesystem::create_directories(path_, ec);
  if (ec || !std::filesystem::is_directory(path_)) {
    throw InputError("cannot create output directory: " + path_);
  }
}

void OutputDir::Write(const std::string& name, const std::string& content,
                      const std::string& role) {
  const std::string full = (std::filesystem::path(path_) / name).string();
  std::ofstream out(full, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + full);
  out << content;
  if (!out) throw InputError("write failed: " + full);
  files_.emplace_back(role, name);
}

json OutputDir::Manifest() const {
  json files = json::array();
  for (const auto& [role, name] : files_) {
    files.push_back({{"role", role}, {"file", name}});
  }
  return files;
}

void OutputDir::WriteReport(json report) {
  report["files"] = Manifest();
  const std::string full = (std::filesystem::path(path_) / "report.json").string();
  std::ofstream out(full, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + full);
  out << report.dump(2) << '\n';
}

std::string StageTableCsv(const SolveReport& report) {
  std::string out =
      "m,iterations,status,gradient_norm,local_residual,normalized_energy,"
      "esup,du_change_sup,du_change_l1,du_change_l2,du_change_l4,"
      "residual_sup,bound_lhs,bound_rhs\n";
  for (const StageRecord& s : report.stages) {
    out += fmt::format(
        "{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
        "{:.17g},{:.17g},{:.17g},{:.17g}\n",
        s.m, s.iterations, ToString(s.status), s.gradient_norm,
        s.local_residual, s.normalized_energy, s.esup, s.du_change_sup,
        s.du_change_lq[0], s.du_change_lq[1], s.du_change_lq[2],
        s.residual_sup, s.bound_lhs, s.bound_rhs);
  }
  return out;
}

std::string MonotonicityCsv(const SolveReport& report) {
  std::string out = "m,normalized_energy\n";
  for (const auto& [m, e] : report.monotonicity) {
    out += fmt::format("{},{:.17g}\n", m, e);
  }
  out += fmt::format("inf,{:.17g}\n", report.esup_final);
  return out;
}

std::string TrialsCsv(const std::vector<MinimalityTrial>& trials) {
  std::string out =
      "trial,begin_node,end_node,amplitude,polished,esup_u,esup_perturbed,"
      "margin\n";
  for (const MinimalityTrial& t : trials) {
    out += fmt::format("{},{},{},{:.17g},{},{:.17g},{:.17g},{:.17g}\n",
                       t.index, t.begin_node, t.end_node, t.amplitude,
                       t.polished ? 1 : 0, t.esup_u, t.esup_perturbed,
                       t.margin);
  }
  return out;
}

std::string DSolutionCsv(const DSolutionReport& report, const Grid& grid) {
  std::string out = "node,x,checked,vacuous,residual\n";
  for (const DSolutionNode& n : report.nodes) {
    out += fmt::format("{},{:.17g},{},{},{:.17g}\n", n.node, grid.node(n.node),
                       n.checked ? 1 : 0, n.vacuous ? 1 : 0, n.residual);
  }
  return out;
}

std::string SingularSetCsv(const SingularSetReport& report, const Grid& grid) {
  std::string out = "cell,x_mid,singular,boundary\n";
  std::vector<int> boundary(grid.n_cells(), 0);
  for (int j : report.boundary_cells) boundary[j] = 1;
  for (int j = 0; j < grid.n_cells(); ++j) {
    out += fmt::format("{},{:.17g},{},{}\n", j, grid.midpoint(j),
                       report.singular[j] ? 1 : 0, boundary[j]);
  }
  return out;
}

std::string LscCsv(const LscTable& table) {
  std::string out = "set,cells,esup_final,stage_min,argmin_m,margin\n";
  for (const LscRow& r : table.rows) {
    out += fmt::format("\"{}\",{},{:.17g},{:.17g},{},{:.17g}\n", r.set,
                       r.cells, r.esup_final, r.stage_min, r.argmin_m,
                       r.margin);
  }
  return out;
}

json ToJson(const StageRecord& s) {
  return {{"m", s.m},
          {"iterations", s.iterations},
          {"status", ToString(s.status)},
          {"gradient_norm", s.gradient_norm},
          {"local_residual", s.local_residual},
          {"normalized_energy", s.normalized_energy},
          {"esup", s.esup},
          {"du_change_sup", s.du_change_sup},
          {"du_change_lq", {s.du_change_lq[0], s.du_change_lq[1],
                            s.du_change_lq[2]}},
          {"residual_sup", s.residual_sup},
          {"bound_lhs", s.bound_lhs},
          {"bound_rhs", s.bound_rhs}};
}

json ToJson(const SolveReport& r) {
  json stages = json::array();
  for (const StageRecord& s : r.stages) stages.push_back(ToJson(s));
  json mono = json::array();
  for (const auto& [m, e] : r.monotonicity) mono.push_back({m, e});
  return {{"stages", stages},
          {"esup_final", r.esup_final},
          {"residual_inf_sup_normalized", r.residual_inf.sup_normalized},
          {"residual_inf_sup_raw", r.residual_inf.sup_raw},
          {"residual_inf_l2_raw", r.residual_inf.l2_raw},
          {"monotonicity", mono},
          {"all_converged", r.all_converged},
          {"bound_ok", r.bound_ok}};
}

json ToJson(const HypothesisReport& r) {
  json checks = json::array();
  for (const HypothesisCheck& c : r.checks) {
    json eta = json::array();
    for (int k = 0; k < c.eta.size(); ++k) eta.push_back(c.eta[k]);
    checks.push_back({{"id", c.id},
                      {"pass", c.pass},
                      {"worst_margin", c.worst_margin},
                      {"x", c.x},
                      {"eta", eta},
                      {"p", c.p}});
  }
  return {{"pass", r.pass}, {"checks", checks}};
}

json ToJson(const MisfitSummary& s) {
  json out = {{"model_misfit_sup", s.model_sup},
              {"model_misfit_l2", s.model_l2},
              {"obs_misfit_sup", s.obs_sup},
              {"obs_misfit_l2", s.obs_l2},
              {"spike", s.spike},
              {"esup", s.esup}};
  out["truth_deviation_sup"] =
      s.truth_sup ? json(*s.truth_sup) : json(nullptr);
  return out;
}

json ToJson(const DSolutionReport& r) {
  return {{"tol", r.tol},
          {"worst", r.worst},
          {"checked", r.checked},
          {"vacuous", r.vacuous},
          {"skipped_breakpoints", r.skipped_breakpoints},
          {"pass", r.pass}};
}

json ToJson(const SingularSetReport& r) {
  return {{"eps", r.eps},
          {"singular_fraction", r.singular_fraction},
          {"omega_inf_fraction", r.omega_inf_fraction},
          {"boundary_fraction", r.boundary_fraction},
          {"boundary_cells", r.boundary_cells.size()},
          {"residual_sup_omega_inf", r.residual_sup_omega_inf}};
}

json ToJson(const LscTable& t) {
  json rows = json::array();
  for (const LscRow& r : t.rows) {
    rows.push_back({{"set", r.set},
                    {"cells", r.cells},
                    {"esup_final", r.esup_final},
                    {"stage_min", r.stage_min},
                    {"argmin_m", r.argmin_m},
                    {"margin", r.margin}});
  }
  return {{"rows", rows}, {"worst_margin", t.worst_margin}, {"pass", t.pass}};
}

}  // namespace linf
