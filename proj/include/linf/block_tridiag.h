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

#ifndef LINF_BLOCK_TRIDIAG_H_
#define LINF_BLOCK_TRIDIAG_H_

#include <vector>

#include <Eigen/Cholesky>

#include "linf/types.h"

namespace linf {

// Symmetric block-tridiagonal matrix with `blocks` diagonal blocks of size
// `block_size`. lower(i) is the block in row i + 1, column i.
class BlockTridiag {
 public:
  BlockTridiag() = default;
  BlockTridiag(int blocks, int block_size);

  int blocks() const { return static_cast<int>(diag_.size()); }
  int block_size() const { return block_size_; }
  int size() const { return blocks() * block_size_; }

  Mat& diag(int i) { return diag_[i]; }
  const Mat& diag(int i) const { return diag_[i]; }
  Mat& lower(int i) { return lower_[i]; }
  const Mat& lower(int i) const { return lower_[i]; }

  Vec Multiply(const Vec& x) const;
  Vec Diagonal() const;
  Mat ToDense() const;
  // D A D for a diagonal D given as a vector.
  BlockTridiag Scaled(const Vec& d) const;
  void AddToDiagonal(double shift);

 private:
  int block_size_ = 0;
  std::vector<Mat> diag_;
  std::vector<Mat> lower_;
};

// Block Cholesky factorization A = L L^T.
class BlockCholesky {
 public:
  // Returns false when A is not numerically positive definite.
  bool Factor(const BlockTridiag& a);
  Vec Solve(const Vec& b) const;

 private:
  int block_size_ = 0;
  std::vector<Eigen::LLT<Mat>> pivots_;
  std::vector<Mat> sub_;  // L_{i+1, i}
};

}  // namespace linf

#endif  // LINF_BLOCK_TRIDIAG_H_
