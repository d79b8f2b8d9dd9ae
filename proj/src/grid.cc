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

#include "linf/grid.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace linf {

Grid::Grid(Interval interval, int n_cells)
    : interval_(interval),
      n_cells_(n_cells),
      h_((interval.b - interval.a) / n_cells) {}

double Grid::node(int i) const {
  if (i == n_cells_) return interval_.b;
  return interval_.a + i * h_;
}

bool Grid::operator==(const Grid& other) const {
  return interval_.a == other.interval_.a && interval_.b == other.interval_.b &&
         n_cells_ == other.n_cells_;
}

Grid BuildGrid(Interval interval, int n_cells) {
  if (!std::isfinite(interval.a) || !std::isfinite(interval.b)) {
    throw InputError("grid: interval endpoints must be finite");
  }
  if (!(interval.a < interval.b)) {
    throw InputError(fmt::format("grid: need a < b, got [{}, {}]", interval.a,
                                 interval.b));
  }
  if (n_cells < 2) {
    throw InputError(fmt::format("grid: need n_cells >= 2, got {}", n_cells));
  }
  return Grid(interval, n_cells);
}

AffineData AffineThrough(const Interval& interval, const Vec& left,
                         const Vec& right) {
  if (left.size() != right.size()) {
    throw InputError("affine data: endpoint dimensions differ");
  }
  return AffineData{left, (right - left) / interval.length()};
}

GridFunction::GridFunction(Grid grid, int dim)
    : grid_(grid), values_(Mat::Zero(dim, grid.n_nodes())) {}

GridFunction::GridFunction(Grid grid, Mat values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.cols() != grid_.n_nodes()) {
    throw InputError(fmt::format("grid function: {} columns for {} nodes",
                                 values_.cols(), grid_.n_nodes()));
  }
  if (values_.rows() < 1) throw InputError("grid function: dim must be >= 1");
}

GridFunction GridFunction::Affine(const Grid& grid, const AffineData& data) {
  GridFunction u(grid, data.dim());
  for (int i = 0; i < grid.n_nodes(); ++i) {
    u.node(i) = data.At(grid.node(i), grid.interval().a);
  }
  return u;
}

Mat CellGradient(const GridFunction& u) {
  const int n = u.grid().n_cells();
  const double h = u.grid().h();
  Mat du(u.dim(), n);
  for (int j = 0; j < n; ++j) du.col(j) = (u.node(j + 1) - u.node(j)) / h;
  return du;
}

Vec SecondDifference(const GridFunction& u, int i, int k) {
  if (k < 1 || i - k < 0 || i + k >= u.n_nodes()) {
    throw InputError(fmt::format(
        "second difference: stencil ({}, {}) outside grid of {} nodes", i, k,
        u.n_nodes()));
  }
  const double t = k * u.grid().h();
  return (u.node(i + k) - 2.0 * u.node(i) + u.node(i - k)) / (t * t);
}

Vec CenteredGradient(const GridFunction& u, int i) {
  if (i < 1 || i + 1 >= u.n_nodes()) {
    throw InputError(fmt::format("centered gradient: node {} not interior", i));
  }
  return (u.node(i + 1) - u.node(i - 1)) / (2.0 * u.grid().h());
}

CellMask CellMask::Range(int n_cells, int begin, int end) {
  CellMask mask(n_cells);
  for (int j = std::max(begin, 0); j < std::min(end, n_cells); ++j) {
    mask.Set(j, true);
  }
  return mask;
}

int CellMask::Count() const {
  int count = 0;
  for (auto b : bits_) count += b;
  return count;
}

bool CellMask::IsSubsetOf(const CellMask& other) const {
  if (other.size() != size()) return false;
  for (int j = 0; j < size(); ++j) {
    if ((*this)[j] && !other[j]) return false;
  }
  return true;
}

CellMask CellMask::Complement() const {
  CellMask out(size());
  for (int j = 0; j < size(); ++j) out.Set(j, !(*this)[j]);
  return out;
}

std::string GridFunctionToCsv(const GridFunction& u) {
  std::string out = "x";
  for (int c = 0; c < u.dim(); ++c) out += fmt::format(",u_{}", c + 1);
  out += "\n";
  for (int i = 0; i < u.n_nodes(); ++i) {
    out += fmt::format("{:.17g}", u.grid().node(i));
    for (int c = 0; c < u.dim(); ++c) {
      out += fmt::format(",{:.17g}", u.values()(c, i));
    }
    out += "\n";
  }
  return out;
}

void WriteGridFunctionCsv(const GridFunction& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << GridFunctionToCsv(u);
}

std::vector<double> ParseCsvRow(const std::string& line, const std::string& path,
                                int line_no) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || !std::isfinite(v)) {
      throw InputError(fmt::format("{}:{}: bad number '{}'", path, line_no,
                                   cell));
    }
    row.push_back(v);
  }
  return row;
}

GridFunction ReadGridFunctionCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,", 0) != 0) {
    throw InputError(path + ":1: expected header 'x,u_1,...'");
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(ParseCsvRow(line, path, line_no));
    if (rows.back().size() != rows.front().size() || rows.back().size() < 2) {
      throw InputError(fmt::format("{}:{}: wrong column count", path, line_no));
    }
  }
  if (rows.size() < 3) throw InputError(path + ": need at least 3 nodes");
  const int n_cells = static_cast<int>(rows.size()) - 1;
  Grid grid = BuildGrid({rows.front()[0], rows.back()[0]}, n_cells);
  const int dim = static_cast<int>(rows.front().size()) - 1;
  Mat values(dim, n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) {
    if (std::abs(rows[i][0] - grid.node(i)) > 1e-9 * grid.interval().length()) {
      throw InputError(fmt::format("{}: node {} breaks the uniform grid", path,
                                   i));
    }
    for (int c = 0; c < dim; ++c) values(c, i) = rows[i][c + 1];
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace linf
