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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace unlearnspn {

// Stable public handle of a data point. Ids are assigned 0..n-1 in file
// order and never reused; removal tombstones an id instead of renumbering.
using RowId = std::uint32_t;
using VarIndex = std::size_t;

enum class VarKind : std::uint8_t { kCategorical = 0, kGaussian = 1 };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kGaussian;
  std::vector<std::string> categories;  // categorical only
  double lo = 0.0;                      // gaussian only
  double hi = 0.0;                      // gaussian only

  bool operator==(const Variable&) const = default;
};

// Ordered variable declarations. Gaussian bounds are declared, never
// inferred from data: the clustering initializer draws from them.
class Schema {
 public:
  static constexpr int kVersion = 1;

  Schema() = default;
  // Throws Error(kSchema) when an invariant is violated.
  explicit Schema(std::vector<Variable> variables);

  std::size_t size() const { return variables_.size(); }
  const Variable& variable(VarIndex i) const { return variables_.at(i); }
  const std::vector<Variable>& variables() const { return variables_; }

  // Category code of `label` for categorical variable `i`.
  std::optional<std::size_t> CategoryCode(VarIndex i,
                                          std::string_view label) const;

  // {"schema_version": 1, "variables": [{"name", "kind", ...}]}
  static Schema FromJson(const nlohmann::json& doc);
  nlohmann::json ToJson() const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Variable> variables_;
};

Schema LoadSchema(const std::string& path);

// Immutable column-major table. Categorical values are stored as their
// integer category code.
class Dataset {
 public:
  Dataset() = default;
  // Validates every value against the schema; throws Error(kDomain) naming
  // row and variable.
  Dataset(Schema schema, std::vector<std::vector<double>> columns);

  static Dataset FromRows(Schema schema,
                          const std::vector<std::vector<double>>& rows);

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_vars() const { return schema_.size(); }

  double value(RowId row, VarIndex var) const { return columns_[var][row]; }
  std::span<const double> column(VarIndex var) const { return columns_[var]; }
  std::vector<double> row(RowId row) const;
  std::vector<RowId> AllRows() const;

  // Copy of the listed rows, renumbered 0..k-1 in the given order.
  Dataset Subset(std::span<const RowId> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t num_rows_ = 0;
};

struct CsvOptions {
  bool header = false;
  char delimiter = ',';
};

// Row ids are 0..n-1 in file order. Errors carry the 1-based line number and
// the offending column.
Dataset LoadCsv(const std::string& path, const Schema& schema,
                const CsvOptions& options = {});
Dataset ParseCsv(std::istream& in, const Schema& schema,
                 const CsvOptions& options = {},
                 const std::string& source = "<stream>");

// Shortest round-trip formatting of gaussian values; categorical labels.
void WriteCsv(std::ostream& out, const Dataset& dataset, const CsvOptions& options = {});

// Parses one record against the schema. `where` prefixes error messages.
std::vector<double> ParseRecord(const Schema& schema,
                                std::span<const std::string> fields,
                                const std::string& where);

// A subset of rows and variables of a dataset. Rows and scope are kept
// ascending so summation order is fixed. The dataset must outlive the view.
class DataView {
 public:
  DataView(const Dataset& dataset, std::vector<RowId> rows,
           std::vector<VarIndex> scope);

  static DataView Full(const Dataset& dataset);

  const Dataset& dataset() const { return *dataset_; }
  const std::vector<RowId>& rows() const { return rows_; }
  const std::vector<VarIndex>& scope() const { return scope_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  bool Contains(RowId row) const;
  double value(RowId row, VarIndex var) const {
    return dataset_->value(row, var);
  }

  DataView WithoutRow(RowId row) const;
  DataView WithRows(std::vector<RowId> rows) const;
  DataView WithScope(std::vector<VarIndex> scope) const;

 private:
  const Dataset* dataset_;
  std::vector<RowId> rows_;
  std::vector<VarIndex> scope_;
};

// True iff every value of `var` over the view's rows is identical. Exact
// comparison, not a variance threshold. Throws Error(kEmpty) on an empty view.
bool IsUninformative(const DataView& view, VarIndex var);

// New view without `drop_rows` and limited to `keep_scope`. Throws
// Error(kEmpty) when either result set is empty, Error(kUsage) when the
// arguments are not subsets of the view.
DataView Restrict(const DataView& view, std::span<const RowId> drop_rows,
                  std::span<const VarIndex> keep_scope);

}  // namespace unlearnspn
