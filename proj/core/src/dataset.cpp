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

#include "unlearnspn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "unlearnspn/error.hpp"

namespace unlearnspn {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitFields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    std::string_view field = Trim(line.substr(
        start, pos == std::string_view::npos ? std::string_view::npos
                                             : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    fields.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

void CheckValue(const Variable& var, double value, const std::string& where) {
  if (var.kind == VarKind::kCategorical) {
    if (!(value >= 0.0) || value != std::floor(value) ||
        value >= static_cast<double>(var.categories.size())) {
      throw Error(ErrorCode::kDomain, where + ": variable '" + var.name +
                                          "' has invalid category code " +
                                          std::to_string(value));
    }
    return;
  }
  if (!std::isfinite(value) || value < var.lo || value > var.hi) {
    std::ostringstream msg;
    msg << where << ": variable '" << var.name << "' value " << value
        << " outside declared domain [" << var.lo << ", " << var.hi << "]";
    throw Error(ErrorCode::kDomain, msg.str());
  }
}

}  // namespace

Schema::Schema(std::vector<Variable> variables)
    : variables_(std::move(variables)) {
  std::unordered_set<std::string> names;
  for (const Variable& var : variables_) {
    if (var.name.empty()) {
      throw Error(ErrorCode::kSchema, "variable with empty name");
    }
    if (!names.insert(var.name).second) {
      throw Error(ErrorCode::kSchema, "duplicate variable name '" + var.name + "'");
    }
    if (var.kind == VarKind::kCategorical) {
      if (var.categories.empty()) {
        throw Error(ErrorCode::kSchema,
                    "categorical variable '" + var.name + "' has no categories");
      }
      std::set<std::string> labels(var.categories.begin(), var.categories.end());
      if (labels.size() != var.categories.size()) {
        throw Error(ErrorCode::kSchema, "categorical variable '" + var.name +
                                            "' has duplicate labels");
      }
    } else if (!std::isfinite(var.lo) || !std::isfinite(var.hi) ||
               !(var.lo < var.hi)) {
      throw Error(ErrorCode::kSchema, "gaussian variable '" + var.name +
                                          "' needs finite bounds lo < hi");
    }
  }
}

std::optional<std::size_t> Schema::CategoryCode(VarIndex i,
                                                std::string_view label) const {
  const auto& cats = variable(i).categories;
  const auto it = std::find(cats.begin(), cats.end(), label);
  if (it == cats.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cats.begin());
}

Schema Schema::FromJson(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorCode::kSchema, "schema: missing 'schema_version'");
  }
  if (doc.at("schema_version").get<int>() != kVersion) {
    throw Error(ErrorCode::kVersion,
                "schema: unsupported schema_version " +
                    doc.at("schema_version").dump());
  }
  std::vector<Variable> vars;
  try {
    for (const auto& entry : doc.at("variables")) {
      Variable var;
      var.name = entry.at("name").get<std::string>();
      const auto kind = entry.at("kind").get<std::string>();
      if (kind == "categorical") {
        var.kind = VarKind::kCategorical;
        for (const auto& label : entry.at("categories")) {
          var.categories.push_back(label.is_string() ? label.get<std::string>()
                                                     : label.dump());
        }
      } else if (kind == "gaussian") {
        var.kind = VarKind::kGaussian;
        var.lo = entry.at("lo").get<double>();
        var.hi = entry.at("hi").get<double>();
      } else {
        throw Error(ErrorCode::kSchema, "schema: unknown kind '" + kind +
                                            "' for variable '" + var.name + "'");
      }
      vars.push_back(std::move(var));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("schema: ") + e.what());
  }
  return Schema(std::move(vars));
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json vars = nlohmann::json::array();
  for (const Variable& var : variables_) {
    nlohmann::json entry = {{"name", var.name}};
    if (var.kind == VarKind::kCategorical) {
      entry["kind"] = "categorical";
      entry["categories"] = var.categories;
    } else {
      entry["kind"] = "gaussian";
      entry["lo"] = var.lo;
      entry["hi"] = var.hi;
    }
    vars.push_back(std::move(entry));
  }
  return {{"schema_version", kVersion}, {"variables", std::move(vars)}};
}

Schema LoadSchema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open schema file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  return Schema::FromJson(doc);
}

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.size()) {
    throw Error(ErrorCode::kSchema,
                "dataset has " + std::to_string(columns_.size()) +
                    " columns but schema declares " +
                    std::to_string(schema_.size()));
  }
  num_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (VarIndex v = 0; v < columns_.size(); ++v) {
    if (columns_[v].size() != num_rows_) {
      throw Error(ErrorCode::kSchema, "ragged dataset columns");
    }
    for (std::size_t r = 0; r < num_rows_; ++r) {
      CheckValue(schema_.variable(v), columns_[v][r], "row " + std::to_string(r));
    }
  }
}

Dataset Dataset::FromRows(Schema schema,
                          const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> columns(schema.size());
  for (auto& col : columns) col.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw Error(ErrorCode::kSchema, "row " + std::to_string(r) + " has " +
                                          std::to_string(rows[r].size()) +
                                          " values, schema declares " +
                                          std::to_string(schema.size()));
    }
    for (VarIndex v = 0; v < schema.size(); ++v) columns[v].push_back(rows[r][v]);
  }
  return Dataset(std::move(schema), std::move(columns));
}

std::vector<double> Dataset::row(RowId row) const {
  std::vector<double> out(num_vars());
  for (VarIndex v = 0; v < num_vars(); ++v) out[v] = columns_[v][row];
  return out;
}

std::vector<RowId> Dataset::AllRows() const {
  std::vector<RowId> rows(num_rows_);
  for (std::size_t r = 0; r < num_rows_; ++r) rows[r] = static_cast<RowId>(r);
  return rows;
}

Dataset Dataset::Subset(std::span<const RowId> rows) const {
  std::vector<std::vector<double>> columns(num_vars());
  for (VarIndex v = 0; v < num_vars(); ++v) {
    columns[v].reserve(rows.size());
    for (RowId r : rows) columns[v].push_back(columns_[v].at(r));
  }
  return Dataset(schema_, std::move(columns));
}

std::vector<double> ParseRecord(const Schema& schema,
                                std::span<const std::string> fields,
                                const std::string& where) {
  if (fields.size() != schema.size()) {
    throw Error(ErrorCode::kSchema, where + ": expected " +
                                        std::to_string(schema.size()) +
                                        " fields, found " +
                                        std::to_string(fields.size()));
  }
  std::vector<double> values(schema.size());
  for (VarIndex v = 0; v < schema.size(); ++v) {
    const Variable& var = schema.variable(v);
    const std::string& field = fields[v];
    if (field.empty() || field == "?" || field == "NA") {
      throw Error(ErrorCode::kParse,
                  where + ", column '" + var.name + "': missing value");
    }
    if (var.kind == VarKind::kCategorical) {
      const auto code = schema.CategoryCode(v, field);
      if (!code) {
        throw Error(ErrorCode::kDomain, where + ", column '" + var.name +
                                            "': unknown category '" + field + "'");
      }
      values[v] = static_cast<double>(*code);
      continue;
    }
    double parsed = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, parsed);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::kParse, where + ", column '" + var.name +
                                         "': cannot parse '" + field + "'");
    }
    CheckValue(var, parsed, where);
    values[v] = parsed;
  }
  return values;
}

Dataset ParseCsv(std::istream& in, const Schema& schema,
                 const CsvOptions& options, const std::string& source) {
  std::vector<std::vector<double>> columns(schema.size());
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = SplitFields(line, options.delimiter);
    const auto values = ParseRecord(
        schema, fields,
        source + ": line " + std::to_string(line_no) + " (row " +
            std::to_string(columns.empty() ? 0 : columns.front().size()) + ")");
    for (VarIndex v = 0; v < values.size(); ++v) columns[v].push_back(values[v]);
  }
  if (schema.size() == 0 || columns.front().empty()) {
    throw Error(ErrorCode::kEmpty, source + ": no rows");
  }
  return Dataset(schema, std::move(columns));
}

Dataset LoadCsv(const std::string& path, const Schema& schema,
                const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open data file " + path);
  return ParseCsv(in, schema, options, path);
}

void WriteCsv(std::ostream& out, const Dataset& dataset, const CsvOptions& options) {
  const Schema& schema = dataset.schema();
  if (options.header) {
    for (VarIndex v = 0; v < schema.size(); ++v) {
      if (v > 0) out << options.delimiter;
      out << schema.variable(v).name;
    }
    out << '\n';
  }
  char buffer[32];
  for (RowId r = 0; r < dataset.num_rows(); ++r) {
    for (VarIndex v = 0; v < schema.size(); ++v) {
      if (v > 0) out << options.delimiter;
      const Variable& var = schema.variable(v);
      const double value = dataset.value(r, v);
      if (var.kind == VarKind::kCategorical) {
        out << var.categories[static_cast<std::size_t>(value)];
      } else {
        const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
        out.write(buffer, res.ptr - buffer);
      }
    }
    out << '\n';
  }
}

DataView::DataView(const Dataset& dataset, std::vector<RowId> rows,
                   std::vector<VarIndex> scope)
    : dataset_(&dataset), rows_(std::move(rows)), scope_(std::move(scope)) {
  if (!std::is_sorted(rows_.begin(), rows_.end()) ||
      std::adjacent_find(rows_.begin(), rows_.end()) != rows_.end()) {
    throw Error(ErrorCode::kUsage, "view rows must be strictly ascending");
  }
  if (!std::is_sorted(scope_.begin(), scope_.end()) ||
      std::adjacent_find(scope_.begin(), scope_.end()) != scope_.end()) {
    throw Error(ErrorCode::kUsage, "view scope must be strictly ascending");
  }
  if (!rows_.empty() && rows_.back() >= dataset.num_rows()) {
    throw Error(ErrorCode::kRowAbsent, "view row outside dataset");
  }
  if (!scope_.empty() && scope_.back() >= dataset.num_vars()) {
    throw Error(ErrorCode::kUsage, "view scope outside schema");
  }
}

DataView DataView::Full(const Dataset& dataset) {
  std::vector<VarIndex> scope(dataset.num_vars());
  for (VarIndex v = 0; v < scope.size(); ++v) scope[v] = v;
  return DataView(dataset, dataset.AllRows(), std::move(scope));
}

bool DataView::Contains(RowId row) const {
  return std::binary_search(rows_.begin(), rows_.end(), row);
}

DataView DataView::WithoutRow(RowId row) const {
  std::vector<RowId> rows;
  rows.reserve(rows_.size());
  for (RowId r : rows_) {
    if (r != row) rows.push_back(r);
  }
  return DataView(*dataset_, std::move(rows), scope_);
}

DataView DataView::WithRows(std::vector<RowId> rows) const {
  return DataView(*dataset_, std::move(rows), scope_);
}

DataView DataView::WithScope(std::vector<VarIndex> scope) const {
  return DataView(*dataset_, rows_, std::move(scope));
}

bool IsUninformative(const DataView& view, VarIndex var) {
  if (view.empty()) throw Error(ErrorCode::kEmpty, "undefined variance");
  const auto column = view.dataset().column(var);
  const double first = column[view.rows().front()];
  for (RowId r : view.rows()) {
    if (column[r] != first) return false;
  }
  return true;
}

DataView Restrict(const DataView& view, std::span<const RowId> drop_rows,
                  std::span<const VarIndex> keep_scope) {
  std::set<RowId> drop(drop_rows.begin(), drop_rows.end());
  for (RowId r : drop) {
    if (!view.Contains(r)) {
      throw Error(ErrorCode::kUsage,
                  "row " + std::to_string(r) + " is not part of the view");
    }
  }
  std::vector<VarIndex> scope(keep_scope.begin(), keep_scope.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  for (VarIndex v : scope) {
    if (!std::binary_search(view.scope().begin(), view.scope().end(), v)) {
      throw Error(ErrorCode::kUsage,
                  "variable " + std::to_string(v) + " is not in the view scope");
    }
  }
  std::vector<RowId> rows;
  rows.reserve(view.size());
  for (RowId r : view.rows()) {
    if (!drop.contains(r)) rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::kEmpty, "restriction leaves no rows");
  if (scope.empty()) throw Error(ErrorCode::kEmpty, "restriction leaves no variables");
  return DataView(view.dataset(), std::move(rows), std::move(scope));
}

}  // namespace unlearnspn
