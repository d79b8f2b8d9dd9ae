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


// Structured output: JSON summaries and CSV detail tables. CSV numbers use
// 17 significant digits so reruns are byte-identical.

#ifndef LINF_REPORT_H_
#define LINF_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "linf/analysis.h"
#include "linf/assimilation.h"
#include "linf/lagrangian.h"
#include "linf/solver.h"

namespace linf {

// An output directory that records every file written into it.
class OutputDir {
 public:
  // Creates the directory. Throws InputError when that fails.
  explicit OutputDir(std::string path);

  const std::string& path() const { return path_; }

  // Writes `content` to path/name and records it under `role`.
  void Write(const std::string& name, const std::string& content,
             const std::string& role);

  // {"role": ..., "file": ...} for each file written so far.
  nlohmann::json Manifest() const;

  // Writes report.json = `report` plus the manifest under "files".
  void WriteReport(nlohmann::json report);

 private:
  std::string path_;
  std::vector<std::pair<std::string, std::string>> files_;  // (role, name)
};

std::string StageTableCsv(const SolveReport& report);
std::string MonotonicityCsv(const SolveReport& report);
std::string TrialsCsv(const std::vector<MinimalityTrial>& trials);
std::string DSolutionCsv(const DSolutionReport& report, const Grid& grid);
std::string SingularSetCsv(const SingularSetReport& report, const Grid& grid);
std::string LscCsv(const LscTable& table);

nlohmann::json ToJson(const StageRecord& stage);
nlohmann::json ToJson(const SolveReport& report);
nlohmann::json ToJson(const HypothesisReport& report);
nlohmann::json ToJson(const MisfitSummary& summary);
nlohmann::json ToJson(const DSolutionReport& report);
nlohmann::json ToJson(const SingularSetReport& report);
nlohmann::json ToJson(const LscTable& table);

}  // namespace linf

#endif  // LINF_REPORT_H_
