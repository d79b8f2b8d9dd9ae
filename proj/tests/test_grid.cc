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


#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "linf/grid.h"
#include "test_util.h"

namespace linf {
namespace {

using testing::Vec2;

TEST(Grid, NodesAndMidpoints) {
  const Grid g = BuildGrid({-1.0, 2.0}, 6);
  EXPECT_EQ(g.n_nodes(), 7);
  EXPECT_DOUBLE_EQ(g.h(), 0.5);
  EXPECT_EQ(g.node(0), -1.0);
  EXPECT_EQ(g.node(6), 2.0);
  EXPECT_DOUBLE_EQ(g.midpoint(1), -0.25);
}

TEST(Grid, LastNodeIsExactlyTheEndpoint) {
  const Grid g = BuildGrid({0.0, 3.141592653589793}, 7);
  EXPECT_EQ(g.node(7), 3.141592653589793);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(BuildGrid({1.0, 1.0}, 4), InputError);
  EXPECT_THROW(BuildGrid({0.0, 1.0}, 1), InputError);
  EXPECT_THROW(BuildGrid({0.0, INFINITY}, 4), InputError);
  EXPECT_THROW(AffineThrough({0, 1}, Vec2(0, 0), Vec::Zero(3)), InputError);
}

TEST(Grid, AffineInterpolantIsExact) {
  const Interval iv{0.0, 2.0};
  const AffineData d = AffineThrough(iv, Vec2(1.0, -1.0), Vec2(3.0, 2.0));
  const GridFunction u = GridFunction::Affine(BuildGrid(iv, 8), d);
  EXPECT_EQ(u.node(0), Vec2(1.0, -1.0));
  EXPECT_EQ(u.node(8), Vec2(3.0, 2.0));
  const Mat du = CellGradient(u);
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(du(0, j), 1.0, 1e-15);
    EXPECT_NEAR(du(1, j), 1.5, 1e-15);
  }
}

TEST(Grid, DifferenceQuotientsOfAQuadratic) {
  // u(x) = (x^2, 3x - x^2 / 2): second derivative (2, -1) for every step.
  const Grid g = BuildGrid({0.0, 1.0}, 16);
  GridFunction u(g, 2);
  for (int i = 0; i <= 16; ++i) {
    const double x = g.node(i);
    u.node(i) = Vec2(x * x, 3 * x - 0.5 * x * x);
  }
  for (int k : {1, 2, 4}) {
    const Vec X = SecondDifference(u, 8, k);
    EXPECT_NEAR(X[0], 2.0, 1e-10);
    EXPECT_NEAR(X[1], -1.0, 1e-10);
  }
  const Vec P = CenteredGradient(u, 4);
  EXPECT_NEAR(P[0], 2 * g.node(4), 1e-13);
  EXPECT_NEAR(P[1], 3 - g.node(4), 1e-13);
}

TEST(CellMask, SetOperations) {
  const CellMask all = CellMask::All(10);
  const CellMask mid = CellMask::Range(10, 3, 7);
  EXPECT_EQ(all.Count(), 10);
  EXPECT_EQ(mid.Count(), 4);
  EXPECT_TRUE(mid.IsSubsetOf(all));
  EXPECT_FALSE(all.IsSubsetOf(mid));
  EXPECT_EQ(mid.Complement().Count(), 6);
  EXPECT_TRUE(CellMask(10).Empty());
  EXPECT_EQ(CellMask::Range(10, -3, 40).Count(), 10);
}

TEST(GridCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  const Grid g = BuildGrid({0.0, 1.0}, 10);
  const GridFunction u = testing::RandomFunction(g, 2, rng, 5.0);
  const auto path =
      (std::filesystem::temp_directory_path() / "linf_grid_rt.csv").string();
  WriteGridFunctionCsv(u, path);
  const GridFunction v = ReadGridFunctionCsv(path);
  EXPECT_TRUE(v.grid() == g);
  EXPECT_EQ(u.values(), v.values());
  EXPECT_EQ(GridFunctionToCsv(u), GridFunctionToCsv(v));
  std::remove(path.c_str());
}

TEST(GridCsv, ErrorsNameTheLine) {
  const auto path =
      (std::filesystem::temp_directory_path() / "linf_grid_bad.csv").string();
  {
    std::ofstream out(path);
    out << "x,u_1\n0,0\n0.5,abc\n1,1\n";
  }
  try {
    ReadGridFunctionCsv(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  std::remove(path.c_str());
}

}  // namespace
}  // namespace linf
