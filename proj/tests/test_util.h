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


#ifndef LINF_TESTS_TEST_UTIL_H_
#define LINF_TESTS_TEST_UTIL_H_

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "linf/grid.h"
#include "linf/lagrangian.h"

namespace linf::testing {

inline std::string ProblemPath(const std::string& name) {
  return std::string(LINF_PROBLEM_DIR) + "/" + name;
}

inline Vec RandomVec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline Vec Vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec Vec1(double a) { return Vec::Constant(1, a); }

// Power model with the drift used by the shipped compatible problem.
inline LagrangianModel CompatibleModel() {
  PowerOptions opt;
  opt.drift = std::make_shared<VectorField>(
      AffineField(Mat::Zero(2, 2), Vec2(0.5, -0.5), Vec2(1.0, 0.0)));
  return BuiltinPower(2, opt);
}

// A power model with a genuinely state-dependent drift and exponent 2.5.
inline LagrangianModel CurvedPowerModel() {
  Mat A(2, 2);
  A << 0.1, -0.3, 0.2, 0.05;
  PowerOptions opt;
  opt.exponent = 2.5;
  opt.coefficient = 0.7;
  opt.drift = std::make_shared<VectorField>(
      AffineField(A, Vec2(0.2, -0.1), Vec2(0.3, 0.4)));
  return BuiltinPower(2, opt);
}

inline ObservationModel RotationObservation(int samples, double length,
                                            double outlier) {
  std::vector<double> xs;
  Mat values(1, samples);
  for (int s = 0; s < samples; ++s) {
    const double x = length * s / (samples - 1);
    xs.push_back(x);
    values(0, s) = std::cos(x) + 0.01 * std::sin(37.0 * s);
  }
  values(0, samples / 2) += outlier;
  Mat C(1, 2);
  C << 1.0, 0.0;
  return ObservationModel::Linear(C, MeasurementSeries(xs, values));
}

inline GridFunction RandomFunction(const Grid& grid, int dim,
                                   std::mt19937_64& rng, double scale) {
  GridFunction u(grid, dim);
  for (int i = 0; i < grid.n_nodes(); ++i) u.node(i) = RandomVec(rng, dim, scale);
  return u;
}

}  // namespace linf::testing

#endif  // LINF_TESTS_TEST_UTIL_H_
