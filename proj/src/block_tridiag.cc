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

#include "linf/block_tridiag.h"

#include <cmath>

namespace linf {

BlockTridiag::BlockTridiag(int blocks, int block_size)
    : block_size_(block_size),
      diag_(blocks, Mat::Zero(block_size, block_size)),
      lower_(blocks > 0 ? blocks - 1 : 0, Mat::Zero(block_size, block_size)) {}

Vec BlockTridiag::Multiply(const Vec& x) const {
  const int s = block_size_;
  Vec y = Vec::Zero(size());
  for (int i = 0; i < blocks(); ++i) {
    y.segment(i * s, s) += diag_[i] * x.segment(i * s, s);
    if (i + 1 < blocks()) {
      y.segment((i + 1) * s, s) += lower_[i] * x.segment(i * s, s);
      y.segment(i * s, s) += lower_[i].transpose() * x.segment((i + 1) * s, s);
    }
  }
  return y;
}

Vec BlockTridiag::Diagonal() const {
  Vec d(size());
  for (int i = 0; i < blocks(); ++i) {
    d.segment(i * block_size_, block_size_) = diag_[i].diagonal();
  }
  return d;
}

Mat BlockTridiag::ToDense() const {
  const int s = block_size_;
  Mat a = Mat::Zero(size(), size());
  for (int i = 0; i < blocks(); ++i) {
    a.block(i * s, i * s, s, s) = diag_[i];
    if (i + 1 < blocks()) {
      a.block((i + 1) * s, i * s, s, s) = lower_[i];
      a.block(i * s, (i + 1) * s, s, s) = lower_[i].transpose();
    }
  }
  return a;
}

BlockTridiag BlockTridiag::Scaled(const Vec& d) const {
  const int s = block_size_;
  BlockTridiag out = *this;
  for (int i = 0; i < blocks(); ++i) {
    const auto di = d.segment(i * s, s).asDiagonal();
    out.diag_[i] = di * diag_[i] * di;
    if (i + 1 < blocks()) {
      out.lower_[i] = d.segment((i + 1) * s, s).asDiagonal() * lower_[i] * di;
    }
  }
  return out;
}

void BlockTridiag::AddToDiagonal(double shift) {
  for (Mat& d : diag_) d.diagonal().array() += shift;
}

bool BlockCholesky::Factor(const BlockTridiag& a) {
  block_size_ = a.block_size();
  pivots_.clear();
  sub_.clear();
  Mat schur = a.diag(0);
  for (int i = 0; i < a.blocks(); ++i) {
    pivots_.emplace_back(schur);
    const auto& llt = pivots_.back();
    if (llt.info() != Eigen::Success) return false;
    const Mat& l = llt.matrixL();
    if (!l.allFinite() || l.diagonal().minCoeff() <= 0.0) return false;
    if (i + 1 == a.blocks()) break;
    // L_{i+1,i} = C L_i^{-T}
    Mat sub = l.triangularView<Eigen::Lower>()
                  .solve(a.lower(i).transpose())
                  .transpose();
    schur = a.diag(i + 1) - sub * sub.transpose();
    sub_.push_back(std::move(sub));
  }
  return true;
}

Vec BlockCholesky::Solve(const Vec& b) const {
  const int s = block_size_;
  const int k = static_cast<int>(pivots_.size());
  Vec y(b.size());
  for (int i = 0; i < k; ++i) {
    Vec r = b.segment(i * s, s);
    if (i > 0) r -= sub_[i - 1] * y.segment((i - 1) * s, s);
    y.segment(i * s, s) = pivots_[i].matrixL().solve(r);
  }
  Vec x(b.size());
  for (int i = k - 1; i >= 0; --i) {
    Vec r = y.segment(i * s, s);
    if (i + 1 < k) r -= sub_[i].transpose() * x.segment((i + 1) * s, s);
    x.segment(i * s, s) = pivots_[i].matrixU().solve(r);
  }
  return x;
}

}  // namespace linf
