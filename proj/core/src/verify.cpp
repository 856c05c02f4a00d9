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

#include "unlearnspn/verify.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "unlearnspn/error.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/random.hpp"
#include "unlearnspn/serialize.hpp"

namespace unlearnspn {
namespace {

constexpr double kBound = 10.0;
constexpr std::size_t kBoundaryAttempts = 400;
constexpr std::size_t kBoundaryMaxRows = 40;

constexpr std::array<std::string_view, kNumGenerators> kGeneratorNames = {
    "mixed",     "constant-columns",  "blobs",           "independent-blocks",
    "near-threshold", "singleton-cluster", "low-cardinality", "boundary"};

// Transitions that random data rarely produces; the boundary generator
// searches for them in turn.
constexpr std::array<std::pair<Op, Op>, 10> kRareTransitions = {{
    {Op::kNaiveFactorization, Op::kSplitData},
    {Op::kNaiveFactorization, Op::kSplitVariables},
    {Op::kNaiveFactorization, Op::kSplitUninformative},
    {Op::kSplitData, Op::kSplitUninformative},
    {Op::kSplitData, Op::kNaiveFactorization},
    {Op::kSplitData, Op::kSplitVariables},
    {Op::kSplitVariables, Op::kSplitData},
    {Op::kSplitVariables, Op::kSplitUninformative},
    {Op::kSplitVariables, Op::kNaiveFactorization},
    {Op::kSplitUninformative, Op::kNaiveFactorization},
}};

double Clamp(double v) { return std::clamp(v, -kBound, kBound); }

Variable Gaussian(std::size_t j) {
  return {"x" + std::to_string(j), VarKind::kGaussian, {}, -kBound, kBound};
}

Variable Categorical(std::size_t j, std::size_t k) {
  Variable v{"c" + std::to_string(j), VarKind::kCategorical, {}, 0.0, 0.0};
  for (std::size_t i = 0; i < k; ++i) v.categories.push_back(std::string(1, char('a' + i)));
  return v;
}

// Column-major builder.
struct Table {
  std::vector<Variable> vars;
  std::vector<std::vector<double>> columns;

  void Add(Variable v, std::vector<double> column) {
    vars.push_back(std::move(v));
    columns.push_back(std::move(column));
  }
  std::shared_ptr<const Dataset> Finish() {
    return std::make_shared<const Dataset>(Schema(std::move(vars)), std::move(columns));
  }
};

std::size_t Bucket(double z, std::size_t k) {
  // Equal-width bins over [-2, 2].
  const double pos = (z + 2.0) / 4.0 * static_cast<double>(k);
  return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(k - 1)));
}

std::shared_ptr<const Dataset> Mixed(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> latent(n);
  for (double& z : latent) z = rng.Normal();
  Table t;
  for (std::size_t j = 0; j < d; ++j) {
    const double loading = static_cast<double>(rng.Below(3));
    const double noise = 0.2 + rng.Uniform();
    const bool categorical = rng.Uniform() < 0.3;
    const std::size_t k = 2 + rng.Below(3);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = loading * latent[i] + noise * rng.Normal();
      col[i] = categorical ? static_cast<double>(Bucket(v / (loading + 1.0), k))
                           : Clamp(2.0 * v);
    }
    if (categorical) {
      t.Add(Categorical(j, k), std::move(col));
    } else {
      t.Add(Gaussian(j), std::move(col));
    }
  }
  return t.Finish();
}

std::shared_ptr<const Dataset> ConstantColumns(Rng& rng, std::size_t n, std::size_t d) {
  Table t;
  for (std::size_t j = 0; j < d; ++j) {
    const double kind = rng.Uniform();
    const double base = std::round(rng.Uniform(-5.0, 5.0));
    std::vector<double> col(n, base);
    if (kind < 0.35) {
      // constant
    } else if (kind < 0.7) {
      const std::size_t odd = 1 + rng.Below(2);
      for (std::size_t m = 0; m < odd; ++m) col[rng.Below(n)] = base + 1.0 + static_cast<double>(m);
    } else {
      for (double& v : col) v = Clamp(base + rng.Normal());
    }
    t.Add(Gaussian(j), std::move(col));
  }
  return t.Finish();
}

std::shared_ptr<const Dataset> Blobs(Rng& rng, std::size_t n, std::size_t d) {
  const std::size_t m = 2 + rng.Below(2);
  std::vector<std::vector<double>> centers(m, std::vector<double>(d));
  for (auto& c : centers) {
    for (double& x : c) x = rng.Uniform(-7.0, 7.0);
  }
  std::vector<std::size_t> blob(n);
  for (auto& b : blob) b = rng.Below(m);
  const double spread = 0.3 + rng.Uniform();
  Table t;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col(n);
    const bool categorical = j > 0 && rng.Uniform() < 0.25;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = categorical ? static_cast<double>(blob[i] % 2)
                           : Clamp(centers[blob[i]][j] + spread * rng.Normal());
    }
    if (categorical) {
      t.Add(Categorical(j, 2), std::move(col));
    } else {
      t.Add(Gaussian(j), std::move(col));
    }
  }
  return t.Finish();
}

std::shared_ptr<const Dataset> IndependentBlocks(Rng& rng, std::size_t n, std::size_t d) {
  const std::size_t blocks = std::min<std::size_t>(d, 2 + rng.Below(2));
  std::vector<std::vector<double>> latent(blocks, std::vector<double>(n));
  for (auto& z : latent) {
    for (double& v : z) v = rng.Normal();
  }
  const double noise = 0.05 + 0.3 * rng.Uniform();
  Table t;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t b = j % blocks;
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = latent[b][i];
      col[i] = Clamp(2.0 * (j % 2 == 0 ? z : z * z - 1.0) + noise * rng.Normal());
    }
    t.Add(Gaussian(j), std::move(col));
  }
  return t.Finish();
}

std::shared_ptr<const Dataset> SingletonCluster(Rng& rng, std::size_t n, std::size_t d) {
  const std::size_t outlier = rng.Below(n);
  Table t;
  std::vector<double> latent(n);
  for (double& z : latent) z = rng.Normal();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col(n);
    const double far = rng.Uniform() < 0.5 ? 9.0 : -9.0;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = i == outlier ? far : Clamp(0.4 * latent[i] + 0.2 * rng.Normal());
    }
    t.Add(Gaussian(j), std::move(col));
  }
  return t.Finish();
}

std::shared_ptr<const Dataset> LowCardinality(Rng& rng, std::size_t n, std::size_t d) {
  Table t;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t levels = 2 + rng.Below(2);
    const double skew = rng.Uniform(0.5, 0.95);
    const bool categorical = rng.Uniform() < 0.4;
    std::vector<double> col(n);
    for (double& v : col) {
      std::size_t level = 0;
      while (level + 1 < levels && rng.Uniform() > skew) ++level;
      v = static_cast<double>(level);
    }
    // Tie some columns to the previous one so dependencies exist.
    if (j > 0 && !categorical && rng.Uniform() < 0.4) {
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.Uniform() < 0.8) col[i] = Clamp(t.columns.back()[i] * 2.0);
      }
    }
    if (categorical) {
      for (double& v : col) v = std::min(v, 1.0);
      t.Add(Categorical(j, 2), std::move(col));
    } else {
      t.Add(Gaussian(j), std::move(col));
    }
  }
  return t.Finish();
}

// First row whose removal takes the root decision from `target.first` to
// `target.second`.
std::optional<RowId> FlippingRow(const Dataset& data, const LearnConfig& config,
                                 std::pair<Op, Op> target) {
  const DataView full = DataView::Full(data);
  const std::uint64_t seed = RootSeed(config.master_seed);
  if (DecideOperation(full, config, seed).op != target.first) return std::nullopt;
  for (RowId r = 0; r < data.num_rows(); ++r) {
    if (DecideOperation(full.WithoutRow(r), config, seed).op == target.second) return r;
  }
  return std::nullopt;
}

// Moves row `r` to the front.
std::shared_ptr<const Dataset> RowFirst(const Dataset& data, RowId r) {
  std::vector<RowId> order(data.num_rows());
  order[0] = r;
  std::size_t at = 1;
  for (RowId i = 0; i < data.num_rows(); ++i) {
    if (i != r) order[at++] = i;
  }
  return std::make_shared<const Dataset>(data.Subset(order));
}

std::shared_ptr<const Dataset> Boundary(const SyntheticSpec& spec, std::size_t n,
                                        std::size_t d) {
  const auto target = kRareTransitions[spec.seed % kRareTransitions.size()];
  std::shared_ptr<const Dataset> last;
  for (std::size_t attempt = 0; attempt < kBoundaryAttempts; ++attempt) {
    Rng rng(DeriveChildSeed(spec.seed, attempt));
    const std::size_t vars = std::max<std::size_t>(2, d);
    switch (attempt % 4) {
      case 0:
        last = LowCardinality(rng, n, vars);
        break;
      case 1:
        last = Mixed(rng, n, vars);
        break;
      case 2:
        last = SingletonCluster(rng, n, vars);
        break;
      default:
        last = ConstantColumns(rng, n, vars);
        break;
    }
    if (const auto row = FlippingRow(*last, spec.config, target)) {
      return RowFirst(*last, *row);
    }
  }
  return last;
}

std::string Hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

std::size_t ResolveThreads(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested == 0 ? std::thread::hardware_concurrency() : requested;
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(1, jobs));
}

// Runs fn(i) for i in [0, jobs) on `threads` workers.
void ParallelFor(std::size_t jobs, std::size_t threads,
                 const std::function<void(std::size_t)>& fn) {
  threads = ResolveThreads(threads, jobs);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

std::string FirstViolation(const std::vector<Violation>& violations) {
  return violations.front().path + ": " + violations.front().message;
}

std::string Describe(const char* which, const std::vector<Violation>& violations) {
  return std::string(which) + " model invalid: " + violations.front().message;
}

struct TrialResult {
  bool pass = false;
  std::optional<CrFailure> failure;
  std::shared_ptr<const Dataset> data;
  std::size_t validated = 0;
  std::array<std::size_t, 7> actions{};
  std::size_t generator = 0;
};

bool SameDecision(const Decision& a, const Decision& b, std::string& detail) {
  if (a.op != b.op) {
    detail = "operation";
    return false;
  }
  if (a.independencies != b.independencies || a.clusters != b.clusters ||
      a.exist_uninformative != b.exist_uninformative ||
      a.all_uninformative != b.all_uninformative) {
    detail = "flags";
    return false;
  }
  if (a.uninformative != b.uninformative) {
    detail = "uninformative variables";
    return false;
  }
  if (a.clustering.has_value() != b.clustering.has_value() ||
      (a.clustering && (a.clustering->rows != b.clustering->rows ||
                        !SamePartition(*a.clustering, *b.clustering)))) {
    detail = "clustering";
    return false;
  }
  if (a.independence.has_value() != b.independence.has_value() ||
      (a.independence && a.independence->components != b.independence->components)) {
    detail = "variable split";
    return false;
  }
  return true;
}

}  // namespace

std::string_view GeneratorName(Generator generator) {
  return kGeneratorNames[static_cast<std::size_t>(generator)];
}

std::shared_ptr<const Dataset> Generate(const SyntheticSpec& spec) {
  if (spec.rows == 0 || spec.vars == 0) {
    throw Error(ErrorCode::kUsage, "synthetic data needs rows and variables");
  }
  Rng rng(spec.seed);
  const std::size_t n = spec.rows;
  const std::size_t d = spec.vars;
  switch (spec.generator) {
    case Generator::kMixed:
      return Mixed(rng, n, d);
    case Generator::kConstantColumns:
      return ConstantColumns(rng, n, d);
    case Generator::kBlobs:
      return Blobs(rng, n, d);
    case Generator::kIndependentBlocks:
      return IndependentBlocks(rng, n, d);
    case Generator::kNearThreshold:
      return rng.Uniform() < 0.5 ? Blobs(rng, n, d) : Mixed(rng, n, d);
    case Generator::kSingletonCluster:
      return SingletonCluster(rng, n, d);
    case Generator::kLowCardinality:
      return LowCardinality(rng, n, d);
    case Generator::kBoundary:
      return Boundary(spec, n, d);
  }
  throw Error(ErrorCode::kUsage, "unknown generator");
}

SyntheticSpec SampleSpec(std::uint64_t seed, std::size_t index, std::size_t min_rows,
                         std::size_t max_rows, std::size_t max_vars,
                         const LearnConfig& base) {
  Rng rng(DeriveChildSeed(seed, index));
  SyntheticSpec spec;
  spec.generator = static_cast<Generator>(index % kNumGenerators);
  spec.rows = min_rows + rng.Below(max_rows - min_rows + 1);
  spec.vars = 1 + rng.Below(max_vars);
  spec.seed = rng.Next();
  spec.config = base;
  spec.config.master_seed = rng.Next();
  static constexpr std::array<std::uint32_t, 5> kThresholds = {2, 4, 8, 16, 50};
  spec.config.min_instances = kThresholds[rng.Below(kThresholds.size())];
  switch (spec.generator) {
    case Generator::kNearThreshold:
      spec.config.min_instances =
          static_cast<std::uint32_t>(std::max<std::size_t>(1, spec.rows - 1 - rng.Below(2)));
      break;
    case Generator::kBoundary:
      spec.rows = std::min(spec.rows, kBoundaryMaxRows);
      spec.vars = std::max<std::size_t>(spec.vars, std::min<std::size_t>(2, max_vars));
      spec.config.min_instances = std::min<std::uint32_t>(
          spec.config.min_instances, static_cast<std::uint32_t>(spec.rows / 2));
      spec.config.min_instances = std::max<std::uint32_t>(spec.config.min_instances, 1);
      break;
    default:
      break;
  }
  return spec;
}

std::string Fingerprint(const Dataset& dataset) {
  // FNV-1a over the schema text and the raw value bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (char c : dataset.schema().ToJson().dump()) mix(static_cast<unsigned char>(c));
  for (VarIndex v = 0; v < dataset.num_vars(); ++v) {
    for (double x : dataset.column(v)) {
      const auto bits = std::bit_cast<std::uint64_t>(x);
      for (int i = 0; i < 8; ++i) mix((bits >> (8 * i)) & 0xff);
    }
  }
  return Hex(h);
}

Spn RetrainOracle(std::shared_ptr<const Dataset> dataset, std::vector<RowId> removed,
                  const LearnConfig& config) {
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
  return LearnSpn(std::move(dataset), config, std::move(removed));
}

double ToleranceFor(RemovalMode mode) {
  return mode == RemovalMode::kExactReplay ? 0.0 : 1e-9;
}

CrReport CheckZeroCr(const CrOptions& options) {
  if (options.trials == 0) throw Error(ErrorCode::kUsage, "trials must be at least 1");
  if (options.min_rows < 2 || options.max_rows < options.min_rows || options.max_vars < 1) {
    throw Error(ErrorCode::kUsage, "bad trial shape");
  }
  CrReport report;
  report.mode = options.mode;
  report.tolerance = ToleranceFor(options.mode);
  report.trials = options.trials;

  std::vector<TrialResult> results(options.trials);
  ParallelFor(options.trials, options.threads, [&](std::size_t i) {
    TrialResult& out = results[i];
    SyntheticSpec spec = SampleSpec(options.seed, i, options.min_rows, options.max_rows,
                                    options.max_vars, options.base);
    spec.config.removal_mode = options.mode;
    out.generator = static_cast<std::size_t>(spec.generator);
    CrFailure failure;
    failure.trial = i;
    failure.generator = std::string(GeneratorName(spec.generator));
    failure.dataset_seed = spec.seed;
    failure.rows = spec.rows;
    failure.vars = spec.vars;
    failure.master_seed = spec.config.master_seed;
    failure.threshold = spec.config.min_instances;
    auto fail = [&](std::string path, std::string detail) {
      failure.path = std::move(path);
      failure.detail = std::move(detail);
      out.failure = failure;
    };
    try {
      out.data = Generate(spec);
      failure.fingerprint = Fingerprint(*out.data);
      Spn spn = LearnSpn(out.data, spec.config);
      if (auto v = Validate(spn); !v.empty()) return fail(v.front().path, Describe("trained", v));
      ++out.validated;

      Rng pick(DeriveChildSeed(spec.seed, 0x5E1EC7));
      const std::size_t removals = std::min(options.removals, out.data->num_rows() - 1);
      for (std::size_t m = 0; m < removals; ++m) {
        const std::vector<RowId> live = spn.LiveRows();
        RowId row = live[pick.Below(live.size())];
        if (spec.generator == Generator::kBoundary && m == 0) row = 0;
        failure.removed.push_back(row);
        const RemovalOutcome outcome = UnlearnSpn(spn, row, options.unlearn);
        for (const ActionRecord& a : outcome.actions) {
          ++out.actions[static_cast<std::size_t>(a.action)];
        }
        if (auto v = Validate(spn); !v.empty()) {
          return fail(v.front().path, Describe("unlearned", v));
        }
        ++out.validated;
      }
      const Spn oracle = RetrainOracle(out.data, failure.removed, spec.config);
      if (auto v = Validate(oracle); !v.empty()) {
        return fail(v.front().path, Describe("oracle", v));
      }
      ++out.validated;
      const Comparison cmp = StructuralEqual(spn, oracle, report.tolerance);
      if (!cmp) return fail(cmp.path, cmp.detail);
      out.pass = true;
    } catch (const std::exception& e) {
      fail("/", std::string("exception: ") + e.what());
    }
  });

  for (TrialResult& r : results) {
    report.validated_models += r.validated;
    ++report.by_generator[r.generator];
    for (std::size_t a = 0; a < r.actions.size(); ++a) report.actions[a] += r.actions[a];
    if (r.pass) {
      ++report.passes;
      continue;
    }
    if (!options.failure_dir.empty() && r.data) {
      WriteReproBundle(options.failure_dir, *r.data, *r.failure);
    }
    report.failures.push_back(std::move(*r.failure));
  }
  return report;
}

std::vector<std::pair<Op, Op>> PossibleTransitions() {
  using enum Op;
  return {{kCreateLeaf, kCreateLeaf},
          {kNaiveFactorization, kNaiveFactorization},
          {kNaiveFactorization, kSplitUninformative},
          {kNaiveFactorization, kSplitData},
          {kNaiveFactorization, kSplitVariables},
          {kSplitUninformative, kSplitUninformative},
          {kSplitUninformative, kNaiveFactorization},
          {kSplitData, kSplitUninformative},
          {kSplitData, kNaiveFactorization},
          {kSplitData, kSplitVariables},
          {kSplitData, kSplitData},
          {kSplitVariables, kSplitUninformative},
          {kSplitVariables, kNaiveFactorization},
          {kSplitVariables, kSplitData},
          {kSplitVariables, kSplitVariables}};
}

std::vector<std::pair<Op, Op>> RevisionReport::MissingTransitions() const {
  std::vector<std::pair<Op, Op>> missing;
  for (const auto& [from, to] : PossibleTransitions()) {
    if (transitions[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] == 0) {
      missing.emplace_back(from, to);
    }
  }
  return missing;
}

RevisionReport CheckRevision(const RevisionOptions& options) {
  if (options.max_rows < 2 || options.max_vars < 1 || options.seeds == 0) {
    throw Error(ErrorCode::kUsage, "bad sweep shape");
  }
  struct DatasetResult {
    std::size_t checks = 0;
    std::size_t unlearn_checks = 0;
    std::size_t validated = 0;
    std::vector<RevisionMismatch> mismatches;
    std::vector<CrFailure> unlearn_failures;
    TransitionCounts transitions{};
  };
  const std::size_t jobs = options.seeds * kNumGenerators;
  std::vector<DatasetResult> results(jobs);

  ParallelFor(jobs, options.threads, [&](std::size_t job) {
    DatasetResult& out = results[job];
    const SyntheticSpec spec = SampleSpec(options.seed, job, 2, options.max_rows,
                                          options.max_vars, options.base);
    const LearnConfig& config = spec.config;
    RevisionMismatch base;
    base.generator = std::string(GeneratorName(spec.generator));
    base.dataset_seed = spec.seed;
    base.master_seed = config.master_seed;
    base.threshold = config.min_instances;
    std::shared_ptr<const Dataset> data;
    try {
      data = Generate(spec);
      const Spn spn = LearnSpn(data, config);
      if (auto v = Validate(spn); !v.empty()) {
        RevisionMismatch m = base;
        m.detail = "trained model invalid at " + FirstViolation(v);
        out.mismatches.push_back(std::move(m));
        return;
      }
      ++out.validated;

      VisitNodes(spn.root, [&](const Node& node) {
        const NodeState& st = node.state;
        if (st.data.size() < 2) return;
        const DataView view(*data, st.data, st.scope);
        for (RowId row : st.data) {
          const DataView survivors = view.WithoutRow(row);
          const Decision predicted = Revise(st, row, survivors, config).decision;
          const Decision actual = DecideOperation(survivors, config, st.seed);
          ++out.checks;
          ++out.transitions[static_cast<std::size_t>(st.op)]
                           [static_cast<std::size_t>(predicted.op)];
          std::string detail;
          if (!SameDecision(predicted, actual, detail)) {
            RevisionMismatch m = base;
            m.path = FormatPath(st.path);
            m.row = row;
            m.op_old = st.op;
            m.predicted = predicted.op;
            m.actual = actual.op;
            m.detail = detail;
            out.mismatches.push_back(std::move(m));
          }
        }
      });

      if (!options.check_unlearning) return;
      const double tolerance = ToleranceFor(config.removal_mode);
      for (RowId row : spn.root.state.data) {
        if (spn.root.state.data.size() < 2) break;
        CrFailure f;
        f.trial = job;
        f.generator = base.generator;
        f.fingerprint = Fingerprint(*data);
        f.dataset_seed = spec.seed;
        f.rows = spec.rows;
        f.vars = spec.vars;
        f.master_seed = config.master_seed;
        f.threshold = config.min_instances;
        f.removed = {row};
        Spn copy = spn;
        UnlearnSpn(copy, row);
        const Spn oracle = RetrainOracle(data, {row}, config);
        ++out.unlearn_checks;
        if (auto v = Validate(copy); !v.empty()) {
          f.path = v.front().path;
          f.detail = "unlearned model invalid: " + v.front().message;
          out.unlearn_failures.push_back(std::move(f));
          continue;
        }
        if (auto v = Validate(oracle); !v.empty()) {
          f.path = v.front().path;
          f.detail = "oracle model invalid: " + v.front().message;
          out.unlearn_failures.push_back(std::move(f));
          continue;
        }
        out.validated += 2;
        if (const Comparison cmp = StructuralEqual(copy, oracle, tolerance); !cmp) {
          f.path = cmp.path;
          f.detail = cmp.detail;
          out.unlearn_failures.push_back(std::move(f));
        }
      }
    } catch (const std::exception& e) {
      RevisionMismatch m = base;
      m.detail = std::string("exception: ") + e.what();
      out.mismatches.push_back(std::move(m));
    }
  });

  RevisionReport report;
  report.datasets = jobs;
  for (DatasetResult& r : results) {
    report.checks += r.checks;
    report.unlearn_checks += r.unlearn_checks;
    report.validated_models += r.validated;
    for (std::size_t a = 0; a < kNumOps; ++a) {
      for (std::size_t b = 0; b < kNumOps; ++b) report.transitions[a][b] += r.transitions[a][b];
    }
    for (auto& m : r.mismatches) report.mismatches.push_back(std::move(m));
    for (auto& f : r.unlearn_failures) report.unlearn_failures.push_back(std::move(f));
  }
  return report;
}

void WriteReproBundle(const std::string& dir, const Dataset& dataset,
                      const CrFailure& failure) {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(dir) / ("trial-" + std::to_string(failure.trial));
  fs::create_directories(root);
  {
    std::ostringstream csv;
    WriteCsv(csv, dataset, {.header = true, .delimiter = ','});
    WriteFileAtomic((root / "data.csv").string(), csv.str());
  }
  WriteFileAtomic((root / "schema.json").string(), dataset.schema().ToJson().dump(2));
  nlohmann::json repro = {
      {"trial", failure.trial},
      {"generator", failure.generator},
      {"fingerprint", failure.fingerprint},
      {"dataset_seed", failure.dataset_seed},
      {"rows", failure.rows},
      {"vars", failure.vars},
      {"master_seed", failure.master_seed},
      {"threshold", failure.threshold},
      {"removed", failure.removed},
      {"path", failure.path},
      {"detail", failure.detail},
  };
  WriteFileAtomic((root / "repro.json").string(), repro.dump(2) + "\n");
}

}  // namespace unlearnspn
