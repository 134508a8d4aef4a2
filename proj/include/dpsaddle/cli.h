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

// The dp-saddle command line: argument model, table rendering and the three
// subcommands. Kept as a library so the commands can be tested in-process.

#ifndef DPSADDLE_CLI_H_
#define DPSADDLE_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsaddle/accountants.h"
#include "dpsaddle/oracle.h"
#include "dpsaddle/plrv.h"

namespace dpsaddle::cli {

enum class Command { kDelta, kEpsilon, kCompare };
enum class Format { kCsv, kJson };

// An accountant or the oracle.
struct Column {
  std::optional<Method> method;  // empty for the oracle

  bool is_truth() const { return !method.has_value(); }
  // "sp_msd1", "truth", ...; used as the column-name prefix.
  std::string key() const;
};

struct RunSpec {
  Command command = Command::kDelta;
  // One entry per mechanism with its count for n = 1; every count is
  // multiplied by each value of `ns`.
  std::vector<CompositionTerm> base;
  std::vector<std::int64_t> ns;
  std::vector<double> epsilons;
  std::optional<double> delta_target;
  std::vector<Column> columns;
  bool bounds = false;
  Format format = Format::kCsv;
  OracleConfig oracle;
  std::string out_path;  // empty for stdout
  int threads = 1;
  // Flags as given, echoed into the JSON metadata.
  double sigma = 0;
  std::optional<double> lambda;
  double sensitivity = 1;
  std::string config_path;
};

// Parses "lo:hi:step" into the inclusive arithmetic grid.
absl::StatusOr<std::vector<double>> ParseRange(const std::string& text);
absl::StatusOr<std::vector<std::int64_t>> ParseIntRange(
    const std::string& text);

// Reads `kind sigma lambda count` lines; kind is "gaussian" or "subsampled".
absl::StatusOr<std::vector<CompositionTerm>> ParseCompositionConfig(
    const std::string& text);

// A table cell: blank, number, integer, text, or a failed computation.
struct CellError {
  std::string message;
};
using Cell =
    std::variant<std::monostate, double, std::int64_t, std::string, CellError>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  bool has_errors() const;
};

void WriteCsv(const Table& table, std::ostream& out);
void WriteJson(const Table& table, const RunSpec& spec, std::ostream& out);

Table RunDelta(const RunSpec& spec);
Table RunEpsilon(const RunSpec& spec);
Table RunCompare(const RunSpec& spec);

// Entry point of the executable. Returns the process exit code: 0 when every
// cell was computed, 1 when some cell failed, 2 on a usage error.
int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace dpsaddle::cli

#endif  // DPSADDLE_CLI_H_
