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


#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "linf/problem.h"
#include "test_util.h"

namespace linf {
namespace {

using nlohmann::json;
using testing::ProblemPath;

json Minimal() {
  return json::parse(R"({
    "schema_version": 1,
    "name": "t",
    "interval": [0, 1],
    "dim": 1,
    "model": {"name": "yu"},
    "boundary": {"left": [0], "right": [1]}
  })");
}

std::string ErrorOf(const json& doc) {
  try {
    ParseProblem(doc, "test.json");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

TEST(ProblemFile, ShippedProblemsLoad) {
  for (const char* name : {"power.json", "compatible.json", "yu.json",
                           "power_hp2.json", "da_outlier.json",
                           "da_zero_noise.json"}) {
    const Problem p = LoadProblem(ProblemPath(name));
    EXPECT_TRUE(p.model) << name;
    EXPECT_EQ(p.left.size(), p.dim) << name;
  }
  const Problem da = LoadProblem(ProblemPath("da_outlier.json"));
  EXPECT_EQ(da.kind, ProblemKind::kAssimilation);
  EXPECT_EQ(da.dim, 2);
  ASSERT_TRUE(da.truth.has_value());
  EXPECT_EQ(da.left, da.truth->node(0));
  EXPECT_EQ(da.box.eta_bound, 2.0);
}

TEST(ProblemFile, DefaultsAndOverrides) {
  json doc = Minimal();
  doc["solver"] = {{"m_max", 64}, {"seed", 4}};
  doc["verify"] = {{"trials", 12}, {"eps_sing", 0.01}};
  const Problem p = ParseProblem(doc, "test.json");
  EXPECT_EQ(p.n_cells, 64);
  EXPECT_EQ(p.solver.m_schedule.back(), 64);
  EXPECT_EQ(p.solver.seed, 4u);
  EXPECT_EQ(p.verify.trials, 12);
  EXPECT_EQ(*p.verify.eps_sing, 0.01);
  EXPECT_EQ(p.model_name, "yu");
}

TEST(ProblemFile, ErrorsNameTheField) {
  json doc = Minimal();
  doc["model"].erase("name");
  EXPECT_NE(ErrorOf(doc).find("'model.name'"), std::string::npos);

  doc = Minimal();
  doc["boundary"]["left"] = {0, 1};
  EXPECT_NE(ErrorOf(doc).find("'boundary.left'"), std::string::npos);

  doc = Minimal();
  doc["n_cells"] = "many";
  EXPECT_NE(ErrorOf(doc).find("'n_cells'"), std::string::npos);

  doc = Minimal();
  doc["colour"] = 1;
  EXPECT_NE(ErrorOf(doc).find("'colour': unknown field"), std::string::npos);

  doc = Minimal();
  doc["schema_version"] = 2;
  EXPECT_NE(ErrorOf(doc).find("'schema_version'"), std::string::npos);

  doc = Minimal();
  doc["model"] = {{"name", "power"}, {"exponent", 1.5}};
  EXPECT_NE(ErrorOf(doc).find("'model'"), std::string::npos);

  doc = Minimal();
  doc["solver"] = {{"m_schedule", {1, 4, 2}}};
  EXPECT_NE(ErrorOf(doc).find("'solver'"), std::string::npos);

  doc = Minimal();
  doc["interval"] = {1, 0};
  EXPECT_NE(ErrorOf(doc).find("'interval'"), std::string::npos);

  EXPECT_NE(ErrorOf(doc).find("test.json"), std::string::npos);
}

TEST(ProblemFile, InvalidJsonIsAnInputError) {
  const auto path =
      (std::filesystem::temp_directory_path() / "linf_bad.json").string();
  std::ofstream(path) << "{ \"schema_version\": 1,";
  EXPECT_THROW(LoadProblem(path), InputError);
  EXPECT_THROW(LoadProblem("/nonexistent/problem.json"), InputError);
}

TEST(ProblemFile, MeasurementsAreResolvedRelativeToTheFile) {
  const auto dir = std::filesystem::temp_directory_path() / "linf_prob_dir";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "k.csv") << "x,k_1\n0,1\n1,0\n2,1\n";
  std::ofstream(dir / "p.json") << R"({
    "schema_version": 1, "name": "ingest", "kind": "assimilation",
    "interval": [0, 2], "n_cells": 40, "dim": 2,
    "assimilation": {"dynamics": {"type": "zero"},
                     "observation": {"C": [[1, 0]]},
                     "measurements_csv": "k.csv"},
    "boundary": {"left": [1, 0], "right": [1, 0]},
    "hypothesis_box": {"eta_bound": 2}
  })";
  const Problem p = LoadProblem((dir / "p.json").string());
  EXPECT_EQ(p.assimilation->measurements->size(), 3);
  EXPECT_FALSE(p.truth.has_value());
  EXPECT_EQ(p.model->x_breakpoints().size(), 3u);
}

TEST(ProblemFile, SetCellCountResynthesizes) {
  Problem p = LoadProblem(ProblemPath("da_zero_noise.json"));
  SetCellCount(&p, 100);
  EXPECT_EQ(p.grid().n_cells(), 100);
  EXPECT_EQ(p.truth->grid().n_cells(), 100);
  EXPECT_THROW(SetCellCount(&p, 2), InputError);
}

}  // namespace
}  // namespace linf
