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

#ifndef LINF_TYPES_H_
#define LINF_TYPES_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace linf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Execution path for the data-parallel kernels. kSerial is the reference.
enum class Exec { kSerial, kParallel };

// Malformed input: bad grid, inconsistent dimensions, schema violations.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A model evaluator produced a non-finite or otherwise impossible value.
class ModelEvaluationError : public std::runtime_error {
 public:
  explicit ModelEvaluationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Numerical breakdown during a solve (overflow guard, blow-up).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Sign vector: xi / |xi|, with sgn(0) = 0.
inline Vec Sgn(const Vec& xi) {
  double norm = xi.norm();
  if (norm == 0.0) return Vec::Zero(xi.size());
  return xi / norm;
}

}  // namespace linf

#endif  // LINF_TYPES_H_
