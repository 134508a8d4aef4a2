//
// Copyright 2026 The dp-saddle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cmath>
#include <string>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpsaddle/cli.h"
#include "dpsaddle/kernels.h"
#include "json.hpp"

namespace dpsaddle::cli {
namespace {

constexpr char kVersion[] = "0.1.0";
constexpr char kErrorMarker[] = "ERR";

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.14e", x);
}

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvCell {
  std::string operator()(std::monostate) const { return ""; }
  std::string operator()(double x) const { return FormatDouble(x); }
  std::string operator()(std::int64_t x) const { return std::to_string(x); }
  std::string operator()(const std::string& s) const { return Quote(s); }
  std::string operator()(const CellError&) const { return kErrorMarker; }
};

// JSON has no infinities; they are written as strings so nothing is lost.
struct JsonCell {
  nlohmann::json operator()(std::monostate) const { return nullptr; }
  nlohmann::json operator()(double x) const {
    if (std::isfinite(x)) return x;
    return FormatDouble(x);
  }
  nlohmann::json operator()(std::int64_t x) const { return x; }
  nlohmann::json operator()(const std::string& s) const { return s; }
  nlohmann::json operator()(const CellError&) const { return kErrorMarker; }
};

const char* CommandName(Command c) {
  switch (c) {
    case Command::kDelta:
      return "delta";
    case Command::kEpsilon:
      return "epsilon";
    case Command::kCompare:
      return "compare";
  }
  return "";
}

}  // namespace

bool Table::has_errors() const {
  for (const auto& row : rows) {
    for (const Cell& c : row) {
      if (std::holds_alternative<CellError>(c)) return true;
    }
  }
  return false;
}

void WriteCsv(const Table& table, std::ostream& out) {
  std::vector<std::string> quoted;
  for (const std::string& h : table.header) quoted.push_back(Quote(h));
  out << absl::StrJoin(quoted, ",") << "\n";
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    for (const Cell& c : row) cells.push_back(std::visit(CsvCell{}, c));
    out << absl::StrJoin(cells, ",") << "\n";
  }
}

void WriteJson(const Table& table, const RunSpec& spec, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json errors = nlohmann::json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const Cell& cell = table.rows[r][c];
      row[table.header[c]] = std::visit(JsonCell{}, cell);
      if (const auto* e = std::get_if<CellError>(&cell)) {
        errors.push_back(
            {{"row", r}, {"column", table.header[c]}, {"message", e->message}});
      }
    }
    rows.push_back(std::move(row));
  }

  nlohmann::json mechanisms = nlohmann::json::array();
  for (const CompositionTerm& term : spec.base) {
    mechanisms.push_back({{"mechanism", term.mechanism.DebugString()},
                          {"count_per_n", term.count}});
  }
  std::vector<std::string> methods;
  for (const Column& col : spec.columns) methods.push_back(col.key());

  nlohmann::json parameters = {
      {"command", CommandName(spec.command)},
      {"mechanisms", mechanisms},
      {"n", spec.ns},
      {"methods", methods},
      {"bounds", spec.bounds},
  };
  if (spec.config_path.empty()) {
    parameters["sigma"] = spec.sigma;
    parameters["sensitivity"] = spec.sensitivity;
    if (spec.lambda) parameters["lambda"] = *spec.lambda;
  } else {
    parameters["config"] = spec.config_path;
  }
  if (spec.delta_target) {
    parameters["delta"] = *spec.delta_target;
  } else {
    parameters["epsilon"] = spec.epsilons;
  }

  nlohmann::json doc = {
      {"rows", rows},
      {"meta",
       {{"parameters", parameters},
        {"versions",
         {{"dp-saddle", kVersion},
          {"kernels", std::string(kernels::IsaName(kernels::Active().isa))}}},
        {"tolerances",
         {{"oracle_rel_tol", spec.oracle.rel_tol},
          {"oracle_abs_tol_log", spec.oracle.abs_tol_log},
          {"oracle_max_panels", spec.oracle.max_panels},
          {"oracle_precision_bits", spec.oracle.working_precision_bits}}},
        {"errors", errors}}},
  };
  out << doc.dump(2) << "\n";
}

}  // namespace dpsaddle::cli
