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


#include "linf/problem.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>

#include <fmt/format.h>

namespace linf {
namespace {

using nlohmann::json;

// Typed access into a JSON object with error messages naming the file and
// the dotted field path.
class Node {
 public:
  Node(const json& value, std::string path, const std::string& source)
      : value_(value), path_(std::move(path)), source_(source) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw InputError(fmt::format("{}: field '{}': {}", source_,
                                 path_.empty() ? "<root>" : path_, what));
  }

  const json& value() const { return value_; }

  bool Has(const char* key) const { return value_.contains(key); }

  Node Child(const char* key) const {
    if (!value_.contains(key)) {
      Node(value_, Join(key), source_).Fail("missing required field");
    }
    return Node(value_.at(key), Join(key), source_);
  }

  Node Element(size_t i) const {
    return Node(value_.at(i), fmt::format("{}[{}]", path_, i), source_);
  }

  void ExpectObject(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) Fail("expected an object");
    for (const auto& item : value_.items()) {
      bool known = false;
      for (const char* k : allowed) known = known || item.key() == k;
      if (!known) Node(item.value(), Join(item.key().c_str()), source_)
          .Fail("unknown field");
    }
  }

  double Number() const {
    if (!value_.is_number()) Fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) Fail("expected a finite number");
    return v;
  }

  long long Integer() const {
    if (!value_.is_number_integer()) Fail("expected an integer");
    return value_.get<long long>();
  }

  int Int(int lo, int hi = std::numeric_limits<int>::max()) const {
    const long long v = Integer();
    if (v < lo || v > hi) Fail(fmt::format("must lie in [{}, {}]", lo, hi));
    return static_cast<int>(v);
  }

  std::uint64_t Seed() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() &&
                                          value_.get<long long>() >= 0)) {
      Fail("expected a non-negative integer");
    }
    return value_.get<std::uint64_t>();
  }

  bool Bool() const {
    if (!value_.is_boolean()) Fail("expected true or false");
    return value_.get<bool>();
  }

  std::string String() const {
    if (!value_.is_string()) Fail("expected a string");
    return value_.get<std::string>();
  }

  Vec Vector(int size = -1) const {
    if (value_.is_number() && size == 1) return Vec::Constant(1, Number());
    if (!value_.is_array()) Fail("expected an array of numbers");
    if (size >= 0 && static_cast<int>(value_.size()) != size) {
      Fail(fmt::format("expected {} entries, got {}", size, value_.size()));
    }
    Vec v(static_cast<int>(value_.size()));
    for (size_t i = 0; i < value_.size(); ++i) v[i] = Element(i).Number();
    return v;
  }

  Mat Matrix(int rows, int cols) const {
    if (!value_.is_array()) Fail("expected an array of rows");
    if (rows >= 0 && static_cast<int>(value_.size()) != rows) {
      Fail(fmt::format("expected {} rows, got {}", rows, value_.size()));
    }
    if (value_.empty()) Fail("expected at least one row");
    Mat m(static_cast<int>(value_.size()), cols);
    for (size_t r = 0; r < value_.size(); ++r) {
      m.row(r) = Element(r).Vector(cols).transpose();
    }
    return m;
  }

  std::vector<int> IntList(int lo) const {
    if (!value_.is_array() || value_.empty()) {
      Fail("expected a non-empty array of integers");
    }
    std::vector<int> out;
    for (size_t i = 0; i < value_.size(); ++i) out.push_back(Element(i).Int(lo));
    return out;
  }

  double NumberOr(const char* key, double fallback) const {
    return Has(key) ? Child(key).Number() : fallback;
  }

 private:
  std::string Join(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json& value_;
  std::string path_;
  const std::string& source_;
};

VectorField ParseField(const Node& node, int dim) {
  node.ExpectObject({"type", "A", "c", "d"});
  const std::string type = node.Child("type").String();
  if (type == "zero") return ZeroField(dim);
  if (type == "rotation") {
    if (dim != 2) node.Child("type").Fail("rotation needs dim = 2");
    return RotationField();
  }
  if (type == "affine" || type == "custom") {
    const Mat A = node.Has("A") ? node.Child("A").Matrix(dim, dim)
                                : Mat::Zero(dim, dim);
    const Vec c = node.Has("c") ? node.Child("c").Vector(dim) : Vec::Zero(dim);
    const Vec d = node.Has("d") ? node.Child("d").Vector(dim) : Vec::Zero(dim);
    return AffineField(A, c, d);
  }
  node.Child("type").Fail(
      "expected one of zero, rotation, affine, custom; got '" + type + "'");
}

void ParseSolver(const Node& node, SolveConfig* cfg) {
  node.ExpectObject({"m_max", "m_schedule", "newton_tol", "local_tol",
                     "max_newton_iters", "continuation_stop", "min_stages",
                     "levenberg_lambda0", "seed"});
  if (node.Has("m_max") && node.Has("m_schedule")) {
    node.Child("m_schedule").Fail("give either m_max or m_schedule");
  }
  if (node.Has("m_max")) {
    cfg->m_schedule = SolveConfig::DoublingSchedule(node.Child("m_max").Int(1));
  }
  if (node.Has("m_schedule")) {
    cfg->m_schedule = node.Child("m_schedule").IntList(1);
  }
  cfg->newton_tol = node.NumberOr("newton_tol", cfg->newton_tol);
  cfg->local_tol = node.NumberOr("local_tol", cfg->local_tol);
  cfg->continuation_stop =
      node.NumberOr("continuation_stop", cfg->continuation_stop);
  cfg->levenberg_lambda0 =
      node.NumberOr("levenberg_lambda0", cfg->levenberg_lambda0);
  if (node.Has("max_newton_iters")) {
    cfg->max_newton_iters = node.Child("max_newton_iters").Int(0);
  }
  if (node.Has("min_stages")) cfg->min_stages = node.Child("min_stages").Int(1);
  if (node.Has("seed")) cfg->seed = node.Child("seed").Seed();
  try {
    cfg->Validate();
  } catch (const InputError& e) {
    node.Fail(e.what());
  }
}

void ParseVerify(const Node& node, VerifySettings* v) {
  node.ExpectObject({"trials", "seed", "eps_sing", "descent_polish",
                     "young_ladder", "dsolution_tol"});
  if (node.Has("trials")) v->trials = node.Child("trials").Int(0);
  if (node.Has("seed")) v->seed = node.Child("seed").Seed();
  if (node.Has("eps_sing")) {
    v->eps_sing = node.Child("eps_sing").Number();
    if (!(*v->eps_sing > 0.0)) node.Child("eps_sing").Fail("must be > 0");
  }
  if (node.Has("descent_polish")) {
    v->descent_polish = node.Child("descent_polish").Bool();
  }
  if (node.Has("young_ladder")) {
    v->young_ladder = node.Child("young_ladder").IntList(1);
  }
  if (node.Has("dsolution_tol")) {
    v->dsolution_tol = node.Child("dsolution_tol").Number();
    if (!(v->dsolution_tol > 0.0)) {
      node.Child("dsolution_tol").Fail("must be > 0");
    }
  }
}

void ParseBox(const Node& node, Problem* p) {
  node.ExpectObject({"eta_bound", "p_hi", "samples", "seed"});
  p->box.eta_bound = node.NumberOr("eta_bound", p->box.eta_bound);
  p->box.p_hi = node.NumberOr("p_hi", p->box.p_hi);
  if (!(p->box.eta_bound > 0.0)) node.Child("eta_bound").Fail("must be > 0");
  if (!(p->box.p_hi > 0.0)) node.Child("p_hi").Fail("must be > 0");
  if (node.Has("samples")) p->hypothesis_samples = node.Child("samples").Int(1);
  if (node.Has("seed")) p->hypothesis_seed = node.Child("seed").Seed();
}

std::shared_ptr<const LagrangianModel> ParseModel(const Node& node, int dim) {
  node.ExpectObject({"name", "exponent", "coefficient", "drift"});
  const std::string name = node.Child("name").String();
  if (name == "power") {
    PowerOptions opt;
    opt.exponent = node.NumberOr("exponent", opt.exponent);
    opt.coefficient = node.NumberOr("coefficient", opt.coefficient);
    if (node.Has("drift")) {
      opt.drift =
          std::make_shared<VectorField>(ParseField(node.Child("drift"), dim));
    }
    try {
      return std::make_shared<const LagrangianModel>(BuiltinPower(dim, opt));
    } catch (const InputError& e) {
      node.Fail(e.what());
    }
  }
  if (name == "yu") {
    for (const char* k : {"exponent", "coefficient", "drift"}) {
      if (node.Has(k)) node.Child(k).Fail("not a parameter of the yu model");
    }
    return std::make_shared<const LagrangianModel>(BuiltinYu(dim));
  }
  if (name == "data_assimilation") {
    node.Child("name").Fail(
        "data_assimilation models need kind = \"assimilation\"");
  }
  node.Child("name").Fail(
      "expected one of power, yu, data_assimilation; got '" + name + "'");
}

void ResolveAssimilation(Problem* p) {
  AssimilationProblem& ap = *p->assimilation;
  ap.interval = p->interval;
  ap.n_cells = p->n_cells;
  ap.box = p->box;
  ap.box.x_lo = p->interval.a;
  ap.box.x_hi = p->interval.b;
  ap.hypothesis_samples = p->hypothesis_samples;
  ap.hypothesis_seed = p->hypothesis_seed;
  ap.Validate();
  MeasurementSeries series;
  p->truth.reset();
  if (ap.measurements) {
    series = *ap.measurements;
    if (ap.initial_state) {
      p->truth = IntegrateTruth(ap.dynamics, p->grid(), *ap.initial_state);
    }
  } else {
    Synthesis syn = Synthesize(ap);
    p->truth = std::move(syn.truth);
    series = std::move(syn.measurements);
  }
  const ObservationModel obs =
      ObservationModel::Linear(ap.observation, std::move(series));
  p->model = std::make_shared<const LagrangianModel>(
      BuiltinDataAssimilation(obs, ap.dynamics));
  p->left = ap.left ? *ap.left : Vec(p->truth->node(0));
  p->right = ap.right ? *ap.right : Vec(p->truth->node(p->n_cells));
}

void ParseAssimilation(const Node& node, Problem* p) {
  node.ExpectObject({"dynamics", "observation", "initial_state",
                     "sample_stride", "noise", "measurements_csv"});
  AssimilationProblem ap;
  const Node dyn = node.Child("dynamics");
  if (!dyn.value().is_object() || !dyn.Has("type")) {
    dyn.Fail("expected an object with a 'type'");
  }
  const std::string type = dyn.Child("type").String();
  int dim = p->dim;
  if (type == "rotation") dim = 2;
  if (dim < 1) dyn.Fail("state dimension unknown; set top-level 'dim'");
  p->dim = dim;
  ap.dynamics = ParseField(dyn, dim);

  const Node obs = node.Child("observation");
  obs.ExpectObject({"C"});
  ap.observation = obs.Child("C").Matrix(-1, dim);

  if (node.Has("initial_state")) {
    ap.initial_state = node.Child("initial_state").Vector(dim);
  }
  if (node.Has("sample_stride")) {
    ap.sample_stride = node.Child("sample_stride").Int(1);
  }
  const int obs_dim = static_cast<int>(ap.observation.rows());
  if (node.Has("noise")) {
    const Node noise = node.Child("noise");
    noise.ExpectObject({"amplitude", "seed", "outliers"});
    ap.noise.amplitude = noise.NumberOr("amplitude", 0.0);
    if (!(ap.noise.amplitude >= 0.0)) {
      noise.Child("amplitude").Fail("must be >= 0");
    }
    if (noise.Has("seed")) ap.noise.seed = noise.Child("seed").Seed();
    if (noise.Has("outliers")) {
      const Node list = noise.Child("outliers");
      if (!list.value().is_array()) list.Fail("expected an array");
      for (size_t i = 0; i < list.value().size(); ++i) {
        const Node o = list.Element(i);
        o.ExpectObject({"sample", "offset"});
        ap.noise.outliers.push_back(
            {o.Child("sample").Int(0), o.Child("offset").Vector(obs_dim)});
      }
    }
  }
  if (node.Has("measurements_csv")) {
    const std::filesystem::path rel = node.Child("measurements_csv").String();
    const std::filesystem::path base =
        std::filesystem::path(p->source).parent_path();
    const std::string path = rel.is_absolute() ? rel.string()
                                               : (base / rel).string();
    ap.measurements = LoadMeasurements(path, p->interval);
  }
  if (!ap.initial_state && !ap.measurements) {
    node.Fail("need 'initial_state' or 'measurements_csv'");
  }
  p->assimilation = std::move(ap);
}

}  // namespace

Problem ParseProblem(const nlohmann::json& doc, const std::string& source) {
  const Node root(doc, "", source);
  root.ExpectObject({"schema_version", "name", "kind", "interval", "n_cells",
                     "dim", "model", "boundary", "solver", "verify", "sweep",
                     "hypothesis_box", "assimilation"});
  const int version = root.Child("schema_version").Int(0);
  if (version != kSchemaVersion) {
    root.Child("schema_version")
        .Fail(fmt::format("unsupported version {}, expected {}", version,
                          kSchemaVersion));
  }
  Problem p;
  p.source = source;
  p.name = root.Child("name").String();
  if (root.Has("kind")) {
    const std::string kind = root.Child("kind").String();
    if (kind == "boundary_value") {
      p.kind = ProblemKind::kBoundaryValue;
    } else if (kind == "assimilation") {
      p.kind = ProblemKind::kAssimilation;
    } else {
      root.Child("kind").Fail("expected boundary_value or assimilation");
    }
  }
  const Vec interval = root.Child("interval").Vector(2);
  if (!(interval[1] > interval[0])) {
    root.Child("interval").Fail("expected [a, b] with a < b");
  }
  p.interval = {interval[0], interval[1]};
  if (root.Has("n_cells")) p.n_cells = root.Child("n_cells").Int(4);
  p.dim = root.Has("dim") ? root.Child("dim").Int(1, 64) : 0;
  if (root.Has("solver")) ParseSolver(root.Child("solver"), &p.solver);
  if (root.Has("verify")) ParseVerify(root.Child("verify"), &p.verify);
  if (root.Has("hypothesis_box")) ParseBox(root.Child("hypothesis_box"), &p);
  if (root.Has("sweep")) {
    const Node sw = root.Child("sweep");
    sw.ExpectObject({"n_cells", "m_max"});
    if (sw.Has("n_cells")) p.sweep.n_cells = sw.Child("n_cells").IntList(4);
    if (sw.Has("m_max")) p.sweep.m_max = sw.Child("m_max").IntList(1);
  }

  if (p.kind == ProblemKind::kBoundaryValue) {
    if (root.Has("assimilation")) {
      root.Child("assimilation").Fail("only allowed with kind = assimilation");
    }
    if (p.dim == 0) p.dim = 1;
    p.model = ParseModel(root.Child("model"), p.dim);
    p.model_name = p.model->name();
    const Node b = root.Child("boundary");
    b.ExpectObject({"left", "right"});
    p.left = b.Child("left").Vector(p.dim);
    p.right = b.Child("right").Vector(p.dim);
  } else {
    if (root.Has("model")) {
      const Node m = root.Child("model");
      m.ExpectObject({"name"});
      if (m.Child("name").String() != "data_assimilation") {
        m.Child("name").Fail("assimilation problems use data_assimilation");
      }
    }
    ParseAssimilation(root.Child("assimilation"), &p);
    if (root.Has("boundary")) {
      const Node b = root.Child("boundary");
      b.ExpectObject({"left", "right"});
      p.assimilation->left = b.Child("left").Vector(p.dim);
      p.assimilation->right = b.Child("right").Vector(p.dim);
    }
    p.model_name = "data_assimilation";
    try {
      ResolveAssimilation(&p);
    } catch (const InputError& e) {
      root.Child("assimilation").Fail(e.what());
    }
  }
  return p;
}

Problem LoadProblem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  return ParseProblem(doc, path);
}

void SetCellCount(Problem* problem, int n_cells) {
  if (n_cells < 4) throw InputError("n_cells must be >= 4");
  problem->n_cells = n_cells;
  if (problem->kind == ProblemKind::kAssimilation) {
    ResolveAssimilation(problem);
  }
}

}  // namespace linf
