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

#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "unlearnspn/bench.hpp"
#include "unlearnspn/dataset.hpp"
#include "unlearnspn/error.hpp"
#include "unlearnspn/learn.hpp"
#include "unlearnspn/serialize.hpp"
#include "unlearnspn/spn.hpp"
#include "unlearnspn/unlearn.hpp"
#include "unlearnspn/verify.hpp"

namespace unlearnspn::cli {
namespace {

struct ConfigFlags {
  std::uint64_t seed = 0;
  std::uint32_t threshold = LearnConfig{}.min_instances;
  std::uint32_t k = ClusteringConfig{}.k;
  double rdc_threshold = IndependenceConfig{}.threshold;
  std::string mode = "incremental";
  std::string clustering = "quantized";
  double alpha = 0.0;

  void Register(CLI::App* app) {
    app->add_option("--seed", seed, "Master seed")->capture_default_str();
    app->add_option("--threshold", threshold, "Rows at or below which a node is factorized")
        ->capture_default_str();
    app->add_option("--k", k, "Clusters per data split")->capture_default_str();
    app->add_option("--rdc-threshold", rdc_threshold, "Dependency threshold")
        ->capture_default_str();
    app->add_option("--mode", mode, "Leaf removal mode")
        ->check(CLI::IsMember({"incremental", "exact-replay"}))
        ->capture_default_str();
    app->add_option("--clustering", clustering, "Clustering strategy")
        ->check(CLI::IsMember({"quantized", "replay"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Categorical additive smoothing")->capture_default_str();
  }

  LearnConfig Build() const {
    LearnConfig config;
    config.master_seed = seed;
    config.min_instances = threshold;
    config.clustering.k = k;
    config.clustering.strategy =
        clustering == "replay" ? ClusteringStrategy::kReplay : ClusteringStrategy::kQuantized;
    config.independence.threshold = rdc_threshold;
    config.removal_mode = ParseMode(mode);
    config.categorical_alpha = alpha;
    config.Validate();
    return config;
  }

  static RemovalMode ParseMode(const std::string& m) {
    return m == "exact-replay" ? RemovalMode::kExactReplay : RemovalMode::kIncremental;
  }
};

struct DataFlags {
  std::string data;
  std::string schema;
  bool header = false;
  char delimiter = ',';

  void Register(CLI::App* app, bool required) {
    auto* d = app->add_option("--data", data, "CSV file")->check(CLI::ExistingFile);
    auto* s = app->add_option("--schema", schema, "Schema JSON file")->check(CLI::ExistingFile);
    if (required) {
      d->required();
      s->required();
    }
    app->add_flag("--header", header, "The CSV starts with a header line");
    app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
  }

  CsvOptions Csv() const { return {header, delimiter}; }

  std::shared_ptr<const Dataset> Load() const {
    const Schema parsed = LoadSchema(schema);
    return std::make_shared<const Dataset>(LoadCsv(data, parsed, Csv()));
  }
};

std::string OpCounts(const TreeStats& stats) {
  std::ostringstream out;
  for (int i = 0; i < kNumOps; ++i) {
    if (i > 0) out << ' ';
    out << OpName(static_cast<Op>(i)) << '=' << stats.ops[static_cast<std::size_t>(i)];
  }
  return out.str();
}

void PrintSummary(std::ostream& out, const Spn& spn) {
  const TreeStats stats = ComputeTreeStats(spn.root);
  out << "rows " << spn.root.state.num_data << " (removed " << spn.removed.size()
      << "), variables " << spn.dataset->num_vars() << "\n";
  out << "nodes " << stats.nodes << " (sum " << stats.sum_nodes << ", product "
      << stats.product_nodes << ", leaf " << stats.leaves << "), depth " << stats.depth
      << "\n";
  out << "operations " << OpCounts(stats) << "\n";
}

std::vector<RowId> ParseRows(const std::vector<std::string>& specs) {
  std::vector<RowId> rows;
  for (const std::string& spec : specs) {
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ',')) {
      token.erase(0, token.find_first_not_of(" \t"));
      token.erase(token.find_last_not_of(" \t") + 1);
      if (token.empty()) continue;
      std::size_t used = 0;
      unsigned long value = 0;
      try {
        value = std::stoul(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || value > std::numeric_limits<RowId>::max()) {
        throw Error(ErrorCode::kUsage, "bad row id '" + token + "'");
      }
      rows.push_back(static_cast<RowId>(value));
    }
  }
  return rows;
}

void DumpNode(std::ostream& out, const Node& node, const Dataset& data, std::size_t depth,
              std::size_t max_depth) {
  const NodeState& st = node.state;
  out << std::string(2 * depth, ' ') << FormatPath(st.path) << ' ' << OpName(st.op)
      << " rows=" << st.num_data << " scope={";
  for (std::size_t i = 0; i < st.scope.size(); ++i) {
    out << (i ? "," : "") << data.schema().variable(st.scope[i]).name;
  }
  out << '}';
  if (node.kind == NodeKind::kSum) {
    out << " counts=[";
    for (std::size_t i = 0; i < node.child_counts.size(); ++i) {
      out << (i ? "," : "") << node.child_counts[i];
    }
    out << ']';
  }
  if (node.leaf) {
    if (const auto* g = std::get_if<GaussianLeafStats>(&*node.leaf)) {
      out << " gaussian mean=" << g->mean() << " var=" << g->variance();
    } else {
      const auto& c = std::get<CategoricalLeafStats>(*node.leaf);
      out << " categorical counts=[";
      for (std::size_t i = 0; i < c.counts.size(); ++i) out << (i ? "," : "") << c.counts[i];
      out << ']';
    }
  }
  if (st.exist_uninformative) out << (st.all_uninformative ? " all-constant" : " some-constant");
  out << '\n';
  if (depth + 1 > max_depth) {
    if (!node.children.empty()) {
      out << std::string(2 * depth + 2, ' ') << "... " << node.children.size()
          << " children\n";
    }
    return;
  }
  for (const Node& child : node.children) DumpNode(out, child, data, depth + 1, max_depth);
}

void WriteReport(const std::string& path, const std::string& lines) {
  if (!path.empty()) WriteFileAtomic(path, lines);
}

nlohmann::json FailureJson(const CrFailure& f) {
  return {{"trial", f.trial},       {"generator", f.generator},
          {"fingerprint", f.fingerprint}, {"dataset_seed", f.dataset_seed},
          {"rows", f.rows},         {"vars", f.vars},
          {"master_seed", f.master_seed}, {"threshold", f.threshold},
          {"removed", f.removed},   {"path", f.path},
          {"detail", f.detail}};
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum-product network learning with exact data removal"};
  app.name("unlearnspn");
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Learn a model from a CSV file");
  DataFlags train_data;
  ConfigFlags train_config;
  std::string train_out;
  train_data.Register(train, true);
  train_config.Register(train);
  train->add_option("--out", train_out, "Model file to write")->required();

  // unlearn
  auto* unlearn = app.add_subcommand("unlearn", "Remove rows from a trained model");
  std::string unlearn_model, unlearn_out, unlearn_log;
  std::vector<std::string> unlearn_rows;
  bool unlearn_verify = false;
  bool unlearn_quiet = false;
  unlearn->add_option("--model", unlearn_model, "Model file")->required()->check(CLI::ExistingFile);
  unlearn->add_option("--rows", unlearn_rows, "Row ids, comma separated")->required();
  unlearn->add_option("--out", unlearn_out, "Model file to write")->required();
  unlearn->add_option("--log", unlearn_log, "Write the action log as JSON lines");
  unlearn->add_flag("--verify", unlearn_verify, "Compare with retraining on the survivors");
  unlearn->add_flag("--quiet", unlearn_quiet, "Print only the summary");

  // eval
  auto* eval = app.add_subcommand("eval", "Mean log-likelihood of a CSV file");
  std::string eval_model, eval_data;
  bool eval_header = false;
  char eval_delimiter = ',';
  eval->add_option("--model", eval_model, "Model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_data, "CSV file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--header", eval_header, "The CSV starts with a header line");
  eval->add_option("--delimiter", eval_delimiter, "Field delimiter");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Time unlearning against retraining");
  DataFlags bench_data;
  ConfigFlags bench_config;
  BenchmarkOptions bench_options;
  std::string bench_report;
  std::size_t synthetic_rows = 0;
  bench_data.Register(bench, false);
  bench_config.Register(bench);
  bench->add_option("--sample", bench_options.sample, "Rows in the initial model")
      ->capture_default_str();
  bench->add_option("--m", bench_options.removals, "Removals per repeat")->capture_default_str();
  bench->add_option("--repeats", bench_options.repeats, "Repeats")->capture_default_str();
  bench->add_option("--schedule-seed", bench_options.seed, "Seed of sampling and schedules")
      ->capture_default_str();
  bench->add_option("--synthetic", synthetic_rows,
                    "Use a synthetic table with this many rows instead of --data");
  bench->add_option("--report", bench_report, "Write JSON lines here");

  // train-overhead
  auto* overhead = app.add_subcommand("train-overhead",
                                      "Time the state-recording learner against the plain one");
  DataFlags overhead_data;
  ConfigFlags overhead_config;
  OverheadOptions overhead_options;
  std::string overhead_report;
  std::size_t overhead_synthetic = 0;
  overhead_data.Register(overhead, false);
  overhead_config.Register(overhead);
  overhead->add_option("--repeats", overhead_options.repeats, "Repeats")->capture_default_str();
  overhead->add_option("--synthetic", overhead_synthetic,
                       "Use a synthetic table with this many rows instead of --data");
  overhead->add_option("--report", overhead_report, "Write JSON lines here");

  // verify-cr
  auto* verify_cr = app.add_subcommand("verify-cr", "Check unlearning against retraining");
  CrOptions cr;
  std::string cr_mode = "exact-replay";
  std::string cr_report;
  verify_cr->add_option("--trials", cr.trials, "Trials")->capture_default_str();
  verify_cr->add_option("--seed", cr.seed, "Seed of the trial generator")->capture_default_str();
  verify_cr->add_option("--mode", cr_mode, "Leaf removal mode")
      ->check(CLI::IsMember({"incremental", "exact-replay"}))
      ->capture_default_str();
  verify_cr->add_option("--max-rows", cr.max_rows, "Largest dataset")->capture_default_str();
  verify_cr->add_option("--max-vars", cr.max_vars, "Most variables")->capture_default_str();
  verify_cr->add_option("--removals", cr.removals, "Rows removed per trial")
      ->capture_default_str();
  verify_cr->add_option("--threads", cr.threads, "Worker threads, 0 for all cores");
  verify_cr->add_option("--failures-dir", cr.failure_dir, "Reproduction bundles go here");
  verify_cr->add_option("--report", cr_report, "Write JSON lines here");

  // verify-rev
  auto* verify_rev = app.add_subcommand("verify-rev", "Check the revision function exhaustively");
  RevisionOptions rev;
  std::string rev_report;
  verify_rev->add_option("--seeds", rev.seeds, "Seeds per generator")->capture_default_str();
  verify_rev->add_option("--seed", rev.seed, "Seed of the sweep")->capture_default_str();
  verify_rev->add_option("--max-rows", rev.max_rows, "Largest dataset")->capture_default_str();
  verify_rev->add_option("--max-vars", rev.max_vars, "Most variables")->capture_default_str();
  verify_rev->add_option("--threads", rev.threads, "Worker threads, 0 for all cores");
  verify_rev->add_option("--report", rev_report, "Write JSON lines here");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Print a model's tree");
  std::string inspect_model;
  std::size_t inspect_depth = 64;
  inspect->add_option("--model", inspect_model, "Model file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--max-depth", inspect_depth, "Deepest level printed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      const LearnConfig config = train_config.Build();
      const auto data = train_data.Load();
      const auto start = std::chrono::steady_clock::now();
      const Spn spn = LearnSpn(data, config);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      SaveModel(spn, train_out);
      PrintSummary(out, spn);
      out << "trained in " << std::fixed << std::setprecision(3) << seconds << " s, wrote "
          << train_out << "\n";
      return kExitOk;
    }

    if (*unlearn) {
      const std::vector<RowId> rows = ParseRows(unlearn_rows);
      if (rows.empty()) {
        err << "warning: no row ids given; nothing removed, nothing written\n";
        return kExitOk;
      }
      Spn spn = LoadModel(unlearn_model);
      const auto start = std::chrono::steady_clock::now();
      const RemovalOutcome outcome = UnlearnBatch(spn, rows);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (unlearn_verify) {
        const Spn oracle = RetrainOracle(spn.dataset, spn.removed, spn.config);
        const Comparison cmp =
            StructuralEqual(spn, oracle, ToleranceFor(spn.config.removal_mode));
        if (!cmp) {
          err << "verification failed at " << cmp.path << ": " << cmp.detail << "\n";
          return kExitVerification;
        }
        out << "verified: equal to retraining on the survivors\n";
      }
      SaveModel(spn, unlearn_out);
      if (!unlearn_log.empty()) {
        std::ostringstream lines;
        for (const ActionRecord& a : outcome.actions) {
          lines << nlohmann::json{{"path", a.path},
                                  {"action", ActionName(a.action)},
                                  {"op_old", OpName(a.op_old)},
                                  {"op_new", OpName(a.op_new)}}
                       .dump()
                << "\n";
        }
        WriteFileAtomic(unlearn_log, lines.str());
      }
      if (!unlearn_quiet) {
        for (const ActionRecord& a : outcome.actions) {
          if (a.action == UnlearnAction::kSkipped) continue;
          out << a.path << ' ' << ActionName(a.action) << ' ' << OpName(a.op_old);
          if (a.op_new != a.op_old) out << "->" << OpName(a.op_new);
          out << "\n";
        }
      }
      out << "removed " << outcome.rows.size() << " row(s) in " << std::fixed
          << std::setprecision(6) << seconds << " s\n";
      PrintSummary(out, spn);
      return kExitOk;
    }

    if (*eval) {
      const Spn spn = LoadModel(eval_model);
      const Dataset data =
          LoadCsv(eval_data, spn.dataset->schema(), {eval_header, eval_delimiter});
      double total = 0.0;
      for (RowId r = 0; r < data.num_rows(); ++r) total += LogLikelihood(spn, data.row(r));
      out << "rows " << data.num_rows() << "\n";
      out << "mean log-likelihood " << std::setprecision(17)
          << total / static_cast<double>(data.num_rows()) << "\n";
      return kExitOk;
    }

    if (*bench) {
      bench_options.config = bench_config.Build();
      std::shared_ptr<const Dataset> data;
      if (synthetic_rows > 0) {
        data = MakeBenchmarkDataset(synthetic_rows, 8, bench_options.seed);
      } else if (!bench_data.data.empty() && !bench_data.schema.empty()) {
        data = bench_data.Load();
      } else {
        throw Error(ErrorCode::kUsage, "benchmark needs --data and --schema or --synthetic");
      }
      const BenchmarkReport report = RunBenchmark(*data, bench_options);
      out << report.Table();
      WriteReport(bench_report, report.JsonLines());
      return kExitOk;
    }

    if (*overhead) {
      overhead_options.config = overhead_config.Build();
      std::shared_ptr<const Dataset> data;
      if (overhead_synthetic > 0) {
        data = MakeBenchmarkDataset(overhead_synthetic, 8, overhead_options.config.master_seed);
      } else if (!overhead_data.data.empty() && !overhead_data.schema.empty()) {
        data = overhead_data.Load();
      } else {
        throw Error(ErrorCode::kUsage,
                    "train-overhead needs --data and --schema or --synthetic");
      }
      const OverheadReport report = RunTrainOverhead(*data, overhead_options);
      out << report.Table();
      WriteReport(overhead_report, report.JsonLines());
      return report.identical_structure ? kExitOk : kExitVerification;
    }

    if (*verify_cr) {
      cr.mode = ConfigFlags::ParseMode(cr_mode);
      const CrReport report = CheckZeroCr(cr);
      out << "mode " << cr_mode << ", tolerance " << report.tolerance << "\n";
      out << "trials " << report.trials << ", passes " << report.passes << ", failures "
          << report.failures.size() << ", validated models " << report.validated_models
          << "\n";
      out << "actions";
      for (std::size_t a = 0; a < report.actions.size(); ++a) {
        out << ' ' << ActionName(static_cast<UnlearnAction>(a)) << '=' << report.actions[a];
      }
      out << "\n";
      std::ostringstream lines;
      for (const CrFailure& f : report.failures) {
        out << "FAIL trial " << f.trial << " (" << f.generator << ", " << f.rows << "x"
            << f.vars << ") at " << f.path << ": " << f.detail << "\n";
        lines << FailureJson(f).dump() << "\n";
      }
      lines << nlohmann::json{{"record", "summary"},
                              {"mode", cr_mode},
                              {"trials", report.trials},
                              {"passes", report.passes},
                              {"failures", report.failures.size()}}
                   .dump()
            << "\n";
      WriteReport(cr_report, lines.str());
      return report.failures.empty() ? kExitOk : kExitVerification;
    }

    if (*verify_rev) {
      const RevisionReport report = CheckRevision(rev);
      out << "datasets " << report.datasets << ", checks " << report.checks
          << ", mismatches " << report.mismatches.size() << ", unlearning checks "
          << report.unlearn_checks << ", unlearning failures "
          << report.unlearn_failures.size() << "\n";
      out << "transitions (old -> new: count)\n";
      nlohmann::json transitions = nlohmann::json::object();
      for (const auto& [from, to] : PossibleTransitions()) {
        const std::size_t count =
            report.transitions[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
        const std::string name = std::string(OpName(from)) + "->" + std::string(OpName(to));
        out << "  " << std::left << std::setw(8) << name << count << "\n";
        transitions[name] = count;
      }
      const auto missing = report.MissingTransitions();
      for (const auto& [from, to] : missing) {
        out << "MISSING " << OpName(from) << "->" << OpName(to) << "\n";
      }
      std::ostringstream lines;
      for (const RevisionMismatch& m : report.mismatches) {
        out << "MISMATCH " << m.generator << " seed " << m.dataset_seed << " at " << m.path
            << " row " << m.row << ": " << OpName(m.op_old) << " predicted "
            << OpName(m.predicted) << ", actual " << OpName(m.actual) << " (" << m.detail
            << ")\n";
        lines << nlohmann::json{{"record", "mismatch"},
                                {"generator", m.generator},
                                {"dataset_seed", m.dataset_seed},
                                {"master_seed", m.master_seed},
                                {"threshold", m.threshold},
                                {"path", m.path},
                                {"row", m.row},
                                {"op_old", OpName(m.op_old)},
                                {"predicted", OpName(m.predicted)},
                                {"actual", OpName(m.actual)},
                                {"detail", m.detail}}
                     .dump()
              << "\n";
      }
      for (const CrFailure& f : report.unlearn_failures) {
        out << "UNLEARN FAIL " << f.generator << " at " << f.path << ": " << f.detail << "\n";
        lines << FailureJson(f).dump() << "\n";
      }
      lines << nlohmann::json{{"record", "summary"},
                              {"datasets", report.datasets},
                              {"checks", report.checks},
                              {"mismatches", report.mismatches.size()},
                              {"transitions", transitions}}
                   .dump()
            << "\n";
      WriteReport(rev_report, lines.str());
      const bool ok =
          report.mismatches.empty() && report.unlearn_failures.empty() && missing.empty();
      return ok ? kExitOk : kExitVerification;
    }

    if (*inspect) {
      const Spn spn = LoadModel(inspect_model);
      PrintSummary(out, spn);
      DumpNode(out, spn.root, *spn.dataset, 0, inspect_depth);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace unlearnspn::cli
