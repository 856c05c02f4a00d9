// Copyright 2026 The unlearnspn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "unlearnspn/serialize.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "unlearnspn/error.hpp"

namespace unlearnspn {
namespace {

constexpr std::string_view kMagic = "USPNMODL";
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 4;
constexpr int kMaxDepth = 4096;

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) U8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) U8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Bool(bool v) { U8(v ? 1 : 0); }
  void Bytes(std::string_view s) {
    U64(s.size());
    out_.append(s);
  }
  template <typename T, typename Fn>
  void Vec(const std::vector<T>& v, Fn&& each) {
    U64(v.size());
    for (const T& x : v) each(x);
  }
  void F64s(const std::vector<double>& v) {
    Vec(v, [&](double x) { F64(x); });
  }
  void U64s(const std::vector<std::uint64_t>& v) {
    Vec(v, [&](std::uint64_t x) { U64(x); });
  }
  void Vars(const std::vector<VarIndex>& v) {
    Vec(v, [&](VarIndex x) { U64(x); });
  }
  void U32s(const std::vector<std::uint32_t>& v) {
    Vec(v, [&](std::uint32_t x) { U32(x); });
  }
  void Section(std::string_view tag, const std::string& body) {
    out_.append(tag);
    Bytes(body);
  }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t U8() {
    Need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t U32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(U8()) << (8 * i);
    return v;
  }
  std::uint64_t U64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(U8()) << (8 * i);
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  bool Bool() {
    const std::uint8_t v = U8();
    if (v > 1) Fail("bad boolean");
    return v == 1;
  }
  std::string_view Bytes() {
    const std::uint64_t n = U64();
    Need(n);
    std::string_view s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  // Element count of a vector whose elements take at least `min_size` bytes.
  std::size_t Count(std::size_t min_size) {
    const std::uint64_t n = U64();
    if (min_size > 0 && n > (in_.size() - pos_) / min_size) Fail("length out of range");
    return n;
  }
  template <typename T, typename Fn>
  std::vector<T> Vec(std::size_t min_size, Fn&& each) {
    std::vector<T> v(Count(min_size));
    for (T& x : v) x = each();
    return v;
  }
  std::vector<double> F64s() {
    return Vec<double>(8, [&] { return F64(); });
  }
  std::vector<std::uint64_t> U64s() {
    return Vec<std::uint64_t>(8, [&] { return U64(); });
  }
  std::vector<VarIndex> Vars() {
    return Vec<VarIndex>(8, [&] { return static_cast<VarIndex>(U64()); });
  }
  std::vector<std::uint32_t> U32s() {
    return Vec<std::uint32_t>(4, [&] { return U32(); });
  }
  std::string_view Section(std::string_view tag) {
    Need(4);
    if (in_.substr(pos_, 4) != tag) Fail("expected section " + std::string(tag));
    pos_ += 4;
    return Bytes();
  }
  void End() {
    if (pos_ != in_.size()) Fail("trailing bytes");
  }
  [[noreturn]] static void Fail(const std::string& what) {
    throw Error(ErrorCode::kCorruption, "corrupt model file: " + what);
  }

 private:
  void Need(std::uint64_t n) {
    if (n > in_.size() - pos_) Fail("truncated");
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

template <typename E>
E Enum(std::uint8_t v, std::uint8_t max) {
  if (v > max) Reader::Fail("enum value out of range");
  return static_cast<E>(v);
}

void PutClusteringConfig(Writer& w, const ClusteringConfig& c) {
  w.U32(c.k);
  w.U8(static_cast<std::uint8_t>(c.strategy));
  w.F64(c.quantum);
  w.U32(c.max_iterations);
  w.Bool(c.record_trajectory);
}

ClusteringConfig GetClusteringConfig(Reader& r) {
  ClusteringConfig c;
  c.k = r.U32();
  c.strategy = Enum<ClusteringStrategy>(r.U8(), 1);
  c.quantum = r.F64();
  c.max_iterations = r.U32();
  c.record_trajectory = r.Bool();
  return c;
}

void PutIndependenceConfig(Writer& w, const IndependenceConfig& c) {
  w.U32(c.num_features);
  w.F64(c.scale);
  w.F64(c.threshold);
  w.F64(c.ridge);
}

IndependenceConfig GetIndependenceConfig(Reader& r) {
  IndependenceConfig c;
  c.num_features = r.U32();
  c.scale = r.F64();
  c.threshold = r.F64();
  c.ridge = r.F64();
  return c;
}

void PutClustering(Writer& w, const ClusteringModel& m) {
  PutClusteringConfig(w, m.config);
  w.Vars(m.scope);
  w.U64(m.dim);
  w.F64s(m.init_centroids);
  w.F64s(m.phases);
  w.F64s(m.final_centroids);
  w.U32s(m.rows);
  w.U32s(m.assignment);
  w.U64s(m.cluster_counts);
  w.Vec(m.trajectory, [&](const ClusteringIteration& it) {
    w.F64s(it.centroids);
    w.F64s(it.sums);
    w.U64s(it.counts);
  });
  w.U32(m.iterations);
  w.Bool(m.converged);
}

ClusteringModel GetClustering(Reader& r) {
  ClusteringModel m;
  m.config = GetClusteringConfig(r);
  m.scope = r.Vars();
  m.dim = r.U64();
  m.init_centroids = r.F64s();
  m.phases = r.F64s();
  m.final_centroids = r.F64s();
  m.rows = r.U32s();
  m.assignment = r.U32s();
  m.cluster_counts = r.U64s();
  m.trajectory = r.Vec<ClusteringIteration>(24, [&] {
    ClusteringIteration it;
    it.centroids = r.F64s();
    it.sums = r.F64s();
    it.counts = r.U64s();
    return it;
  });
  m.iterations = r.U32();
  m.converged = r.Bool();
  const std::size_t cells = static_cast<std::size_t>(m.config.k) * m.dim;
  if (m.init_centroids.size() != cells || m.final_centroids.size() != cells ||
      m.phases.size() != m.dim || m.assignment.size() != m.rows.size() ||
      m.cluster_counts.size() != m.config.k) {
    Reader::Fail("inconsistent clustering dimensions");
  }
  for (std::uint32_t a : m.assignment) {
    if (a >= m.config.k) Reader::Fail("cluster label out of range");
  }
  return m;
}

void PutIndependence(Writer& w, const IndependenceModel& m) {
  PutIndependenceConfig(w, m.config);
  w.Vars(m.scope);
  w.F64s(m.weights);
  w.F64s(m.phases);
  w.F64s(m.coefficients);
  w.Vec(m.components, [&](const std::vector<VarIndex>& c) { w.Vars(c); });
  w.U64(m.num_rows);
}

IndependenceModel GetIndependence(Reader& r) {
  IndependenceModel m;
  m.config = GetIndependenceConfig(r);
  m.scope = r.Vars();
  m.weights = r.F64s();
  m.phases = r.F64s();
  m.coefficients = r.F64s();
  m.components = r.Vec<std::vector<VarIndex>>(8, [&] { return r.Vars(); });
  m.num_rows = r.U64();
  const std::size_t d = m.scope.size();
  if (m.coefficients.size() != d * d || m.weights.size() != d * m.config.num_features ||
      m.phases.size() != m.weights.size()) {
    Reader::Fail("inconsistent independence dimensions");
  }
  return m;
}

void PutLeaf(Writer& w, const std::optional<LeafStats>& leaf) {
  if (!leaf) {
    w.U8(0);
    return;
  }
  if (const auto* g = std::get_if<GaussianLeafStats>(&*leaf)) {
    w.U8(1);
    w.U64(g->n);
    w.F64(g->shift);
    w.F64(g->sum.sum);
    w.F64(g->sum.compensation);
    w.F64(g->sum_sq.sum);
    w.F64(g->sum_sq.compensation);
    return;
  }
  const auto& c = std::get<CategoricalLeafStats>(*leaf);
  w.U8(2);
  w.U64s(c.counts);
  w.U64(c.n);
  w.F64(c.alpha);
}

std::optional<LeafStats> GetLeaf(Reader& r) {
  switch (r.U8()) {
    case 0:
      return std::nullopt;
    case 1: {
      GaussianLeafStats g;
      g.n = r.U64();
      g.shift = r.F64();
      g.sum.sum = r.F64();
      g.sum.compensation = r.F64();
      g.sum_sq.sum = r.F64();
      g.sum_sq.compensation = r.F64();
      return g;
    }
    case 2: {
      CategoricalLeafStats c;
      c.counts = r.U64s();
      c.n = r.U64();
      c.alpha = r.F64();
      return c;
    }
    default:
      Reader::Fail("bad leaf tag");
  }
}

void PutNode(Writer& w, const Node& node) {
  const NodeState& st = node.state;
  w.U8(static_cast<std::uint8_t>(node.kind));
  w.Vars(st.scope);
  w.U8(static_cast<std::uint8_t>(st.op));
  w.U32s(st.data);
  w.U64(st.num_data);
  w.U8(static_cast<std::uint8_t>(st.independencies));
  w.U8(static_cast<std::uint8_t>(st.clusters));
  w.Bool(st.exist_uninformative);
  w.Bool(st.all_uninformative);
  w.U64(st.seed);
  w.U32s(st.path);
  w.Bool(st.clustering.has_value());
  if (st.clustering) PutClustering(w, *st.clustering);
  w.Bool(st.variable_split.has_value());
  if (st.variable_split) PutIndependence(w, *st.variable_split);
  w.Bool(st.decision_analyses.has_value());
  if (st.decision_analyses) {
    PutClustering(w, st.decision_analyses->clustering);
    PutIndependence(w, st.decision_analyses->independence);
  }
  w.U64s(node.child_counts);
  PutLeaf(w, node.leaf);
  w.U64(node.children.size());
  for (const Node& child : node.children) PutNode(w, child);
}

Node GetNode(Reader& r, int depth) {
  if (depth > kMaxDepth) Reader::Fail("tree too deep");
  Node node;
  NodeState& st = node.state;
  node.kind = Enum<NodeKind>(r.U8(), 2);
  st.scope = r.Vars();
  st.op = Enum<Op>(r.U8(), kNumOps - 1);
  st.data = r.U32s();
  st.num_data = r.U64();
  st.independencies = Enum<Tri>(r.U8(), 2);
  st.clusters = Enum<Tri>(r.U8(), 2);
  st.exist_uninformative = r.Bool();
  st.all_uninformative = r.Bool();
  st.seed = r.U64();
  st.path = r.U32s();
  if (r.Bool()) st.clustering = GetClustering(r);
  if (r.Bool()) st.variable_split = GetIndependence(r);
  if (r.Bool()) {
    ClusteringModel clustering = GetClustering(r);
    IndependenceModel independence = GetIndependence(r);
    st.decision_analyses = DecisionAnalyses{std::move(clustering), std::move(independence)};
  }
  node.child_counts = r.U64s();
  node.leaf = GetLeaf(r);
  node.children.resize(r.Count(1));
  for (Node& child : node.children) child = GetNode(r, depth + 1);
  return node;
}

std::string ConfigSection(const LearnConfig& c) {
  Writer w;
  w.U64(c.master_seed);
  w.U32(c.min_instances);
  PutClusteringConfig(w, c.clustering);
  PutIndependenceConfig(w, c.independence);
  w.F64(c.categorical_alpha);
  w.U8(static_cast<std::uint8_t>(c.removal_mode));
  return w.Take();
}

LearnConfig GetConfig(std::string_view bytes) {
  Reader r(bytes);
  LearnConfig c;
  c.master_seed = r.U64();
  c.min_instances = r.U32();
  c.clustering = GetClusteringConfig(r);
  c.independence = GetIndependenceConfig(r);
  c.categorical_alpha = r.F64();
  c.removal_mode = Enum<RemovalMode>(r.U8(), 1);
  r.End();
  return c;
}

std::string DataSection(const Dataset& d) {
  Writer w;
  w.U64(d.num_rows());
  w.U64(d.num_vars());
  for (VarIndex v = 0; v < d.num_vars(); ++v) {
    for (double x : d.column(v)) w.F64(x);
  }
  return w.Take();
}

Dataset GetData(std::string_view bytes, Schema schema) {
  Reader r(bytes);
  const std::uint64_t rows = r.U64();
  const std::uint64_t vars = r.U64();
  if (vars != schema.size()) Reader::Fail("column count differs from schema");
  if (vars > 0 && rows > bytes.size() / (8 * vars)) Reader::Fail("row count out of range");
  std::vector<std::vector<double>> columns(vars, std::vector<double>(rows));
  for (auto& column : columns) {
    for (double& x : column) x = r.F64();
  }
  r.End();
  try {
    return Dataset(std::move(schema), std::move(columns));
  } catch (const Error& e) {
    Reader::Fail(std::string("embedded data: ") + e.what());
  }
}

std::uint32_t Crc(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large payloads in chunks.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t at = 0; at < bytes.size(); at += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - at);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + at),
                static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string SerializeModel(const Spn& spn) {
  if (!spn.dataset) throw Error(ErrorCode::kUsage, "model has no dataset");
  Writer payload;
  payload.Section("CONF", ConfigSection(spn.config));
  payload.Section("SCHM", spn.dataset->schema().ToJson().dump());
  payload.Section("DATA", DataSection(*spn.dataset));
  {
    Writer w;
    w.U32s(spn.removed);
    payload.Section("REMV", w.Take());
  }
  {
    Writer w;
    PutNode(w, spn.root);
    payload.Section("TREE", w.Take());
  }
  const std::string body = payload.Take();
  Writer header;
  std::string out(kMagic);
  header.U32(kModelFormatVersion);
  header.U64(body.size());
  header.U32(Crc(body));
  out += header.Take();
  out += body;
  return out;
}

Spn DeserializeModel(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic) {
    Reader::Fail("not a model file");
  }
  Reader header(bytes.substr(kMagic.size(), kHeaderSize - kMagic.size()));
  const std::uint32_t version = header.U32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersion, "unsupported model format version " +
                                         std::to_string(version) + " (expected " +
                                         std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint64_t size = header.U64();
  const std::uint32_t crc = header.U32();
  const std::string_view body = bytes.substr(kHeaderSize);
  if (body.size() != size) Reader::Fail("payload length mismatch");
  if (Crc(body) != crc) Reader::Fail("checksum mismatch");

  Reader r(body);
  Spn spn;
  spn.config = GetConfig(r.Section("CONF"));
  Schema schema;
  try {
    schema = Schema::FromJson(nlohmann::json::parse(r.Section("SCHM")));
  } catch (const std::exception& e) {
    Reader::Fail(std::string("schema: ") + e.what());
  }
  spn.dataset = std::make_shared<const Dataset>(GetData(r.Section("DATA"), std::move(schema)));
  {
    Reader rr(r.Section("REMV"));
    spn.removed = rr.U32s();
    rr.End();
  }
  {
    Reader rr(r.Section("TREE"));
    spn.root = GetNode(rr, 0);
    rr.End();
  }
  r.End();
  try {
    spn.config.Validate();
  } catch (const Error& e) {
    Reader::Fail(std::string("configuration: ") + e.what());
  }
  if (!std::is_sorted(spn.removed.begin(), spn.removed.end()) ||
      std::adjacent_find(spn.removed.begin(), spn.removed.end()) != spn.removed.end() ||
      (!spn.removed.empty() && spn.removed.back() >= spn.dataset->num_rows())) {
    Reader::Fail("bad removed-row list");
  }
  if (const auto violations = Validate(spn); !violations.empty()) {
    Reader::Fail("invalid tree at " + violations.front().path + ": " +
                 violations.front().message);
  }
  return spn;
}

void SaveModel(const Spn& spn, const std::string& path) {
  WriteFileAtomic(path, SerializeModel(spn));
}

Spn LoadModel(const std::string& path) { return DeserializeModel(ReadFile(path)); }

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "write failed for " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename onto " + path);
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace unlearnspn
