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

// Uniform 1D grids and finite differences of vector-valued grid functions.
//
// Gradients live on cells, second differences on interior nodes. Every
// functional in the library uses midpoint quadrature per cell with the
// nodal average as the value argument; see functionals.h.

#ifndef LINF_GRID_H_
#define LINF_GRID_H_

#include <cstdint>
#include <string>
#include <vector>

#include "linf/types.h"

namespace linf {

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

class Grid {
 public:
  Grid() = default;
  Grid(Interval interval, int n_cells);

  const Interval& interval() const { return interval_; }
  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  double h() const { return h_; }

  // x_i = a + i h; the last node is exactly b.
  double node(int i) const;
  double midpoint(int j) const { return interval_.a + (j + 0.5) * h_; }

  bool operator==(const Grid& other) const;

 private:
  Interval interval_;
  int n_cells_ = 0;
  double h_ = 0.0;
};

// Throws InputError on non-finite endpoints, a >= b, or n_cells < 2.
Grid BuildGrid(Interval interval, int n_cells);

// b(x) = anchor + slope (x - a).
struct AffineData {
  Vec anchor;
  Vec slope;

  int dim() const { return static_cast<int>(anchor.size()); }
  Vec At(double x, double a) const { return anchor + slope * (x - a); }
};

// Builds affine data from the two endpoint values on `interval`.
AffineData AffineThrough(const Interval& interval, const Vec& left,
                         const Vec& right);

// Nodal values of u : [a, b] -> R^N. Column i holds u(x_i).
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid grid, int dim);
  GridFunction(Grid grid, Mat values);

  const Grid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(values_.rows()); }
  int n_nodes() const { return static_cast<int>(values_.cols()); }

  const Mat& values() const { return values_; }
  Mat& values() { return values_; }
  auto node(int i) const { return values_.col(i); }
  auto node(int i) { return values_.col(i); }

  bool AllFinite() const { return values_.allFinite(); }

  // Affine interpolant of `data` sampled at the nodes.
  static GridFunction Affine(const Grid& grid, const AffineData& data);

 private:
  Grid grid_;
  Mat values_;
};

// Per-cell forward differences (u_{j+1} - u_j) / h; column j is cell j.
Mat CellGradient(const GridFunction& u);

// (u_{i+k} - 2 u_i + u_{i-k}) / (k h)^2. Throws InputError when the stencil
// leaves the grid.
Vec SecondDifference(const GridFunction& u, int i, int k);

// Centered gradient (u_{i+1} - u_{i-1}) / (2h) at an interior node.
Vec CenteredGradient(const GridFunction& u, int i);

// Selection of cells (a discrete stand-in for a measurable subset A).
class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(int n_cells, bool value = false)
      : bits_(n_cells, value ? 1 : 0) {}

  static CellMask All(int n_cells) { return CellMask(n_cells, true); }
  // Cells [begin, end).
  static CellMask Range(int n_cells, int begin, int end);

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int j) const { return bits_[j] != 0; }
  void Set(int j, bool value) { bits_[j] = value ? 1 : 0; }
  int Count() const;
  bool Empty() const { return Count() == 0; }
  bool IsSubsetOf(const CellMask& other) const;
  CellMask Complement() const;

 private:
  std::vector<std::uint8_t> bits_;
};

// CSV with header `x,u_1,...,u_N` and 17 significant digits.
std::string GridFunctionToCsv(const GridFunction& u);
void WriteGridFunctionCsv(const GridFunction& u, const std::string& path);
// Reads a CSV written by WriteGridFunctionCsv; the nodes must form a
// uniform grid.
GridFunction ReadGridFunctionCsv(const std::string& path);

// Comma-separated finite numbers; errors name path and line.
std::vector<double> ParseCsvRow(const std::string& line, const std::string& path,
                                int line_no);

}  // namespace linf

#endif  // LINF_GRID_H_
