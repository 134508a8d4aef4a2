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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "dpsaddle/cli.h"

namespace dpsaddle::cli {
namespace {

constexpr int kUsageError = 2;
constexpr int kCellFailure = 1;

// Runs fn(0..count−1) on up to `threads` workers. Results land at their own
// index, so the output does not depend on scheduling.
template <typename T>
std::vector<T> ParallelMap(std::size_t count, int threads,
                           const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
  return out;
}

absl::StatusOr<Composition> ComposeFor(const RunSpec& spec, std::int64_t n) {
  std::vector<CompositionTerm> terms = spec.base;
  for (CompositionTerm& term : terms) term.count *= n;
  return Composition::Create(std::move(terms));
}

// n·Σ count·λ: expected number of passes over the data.
double Epochs(const RunSpec& spec, std::int64_t n) {
  double per_n = 0;
  for (const CompositionTerm& term : spec.base) {
    per_n += static_cast<double>(term.count) * term.mechanism.lambda();
  }
  return per_n * static_cast<double>(n);
}

CellError ToError(const absl::Status& status) {
  return CellError{std::string(status.ToString())};
}

// Natural-log δ with the optional error radius.
struct LogDelta {
  double log_delta = 0;
  std::optional<double> err;
};

absl::StatusOr<LogDelta> ComputeLogDelta(const Column& column,
                                         const RunSpec& spec, std::int64_t n,
                                         double epsilon) {
  absl::StatusOr<Composition> c = ComposeFor(spec, n);
  if (!c.ok()) return c.status();
  if (column.is_truth()) {
    absl::StatusOr<double> v = LogDeltaTruth(*c, epsilon, spec.oracle);
    if (!v.ok()) return v.status();
    return LogDelta{*v, std::nullopt};
  }
  absl::StatusOr<DeltaEstimate> e = EstimateDelta(*column.method, *c, epsilon);
  if (!e.ok()) return e.status();
  return LogDelta{e->log_delta, e->err_bound()};
}

absl::StatusOr<double> ComputeEpsilon(const Column& column, const RunSpec& spec,
                                      std::int64_t n) {
  absl::StatusOr<Composition> c = ComposeFor(spec, n);
  if (!c.ok()) return c.status();
  absl::StatusOr<Probability> target =
      Probability::Create(std::min(1.0, *spec.delta_target));
  if (!target.ok()) return target.status();
  if (column.is_truth()) return EpsilonTruth(*c, *target, spec.oracle);
  return EpsilonOfDelta(*column.method, *c, *target);
}

bool IsSpClt(const Column& column) {
  return column.method == Method::kSpClt;
}

// (n, ε) grid in row order.
struct Query {
  std::int64_t n;
  double epsilon;
};

std::vector<Query> Queries(const RunSpec& spec) {
  std::vector<Query> q;
  for (std::int64_t n : spec.ns) {
    for (double eps : spec.epsilons) q.push_back({n, eps});
  }
  return q;
}

// Evaluates every (query, column) cell of a δ table.
std::vector<absl::StatusOr<LogDelta>> DeltaCells(
    const RunSpec& spec, const std::vector<Query>& queries,
    const std::vector<Column>& columns) {
  const std::size_t width = columns.size();
  return ParallelMap<absl::StatusOr<LogDelta>>(
      queries.size() * width, spec.threads, [&](std::size_t i) {
        const Query& q = queries[i / width];
        return ComputeLogDelta(columns[i % width], spec, q.n, q.epsilon);
      });
}

void PushDelta(const absl::StatusOr<LogDelta>& cell, std::vector<Cell>& row) {
  if (!cell.ok()) {
    row.push_back(ToError(cell.status()));
    row.push_back(ToError(cell.status()));
    return;
  }
  row.push_back(cell->log_delta / std::numbers::ln10);
  row.push_back(std::exp(cell->log_delta));
}

}  // namespace

Table RunDelta(const RunSpec& spec) {
  Table table;
  table.header = {"n", "epsilon"};
  for (const Column& col : spec.columns) {
    table.header.push_back(col.key() + "_log10_delta");
    table.header.push_back(col.key() + "_delta");
    if (spec.bounds && IsSpClt(col)) {
      table.header.push_back(col.key() + "_delta_lo");
      table.header.push_back(col.key() + "_delta_hi");
    }
  }

  const std::vector<Query> queries = Queries(spec);
  const auto cells = DeltaCells(spec, queries, spec.columns);
  const std::size_t width = spec.columns.size();
  for (std::size_t r = 0; r < queries.size(); ++r) {
    std::vector<Cell> row = {queries[r].n, queries[r].epsilon};
    for (std::size_t j = 0; j < width; ++j) {
      const auto& cell = cells[r * width + j];
      PushDelta(cell, row);
      if (!spec.bounds || !IsSpClt(spec.columns[j])) continue;
      if (!cell.ok() || !cell->err) {
        const CellError e = cell.ok() ? CellError{"no error bound available"}
                                      : ToError(cell.status());
        row.push_back(e);
        row.push_back(e);
        continue;
      }
      const double delta = std::exp(cell->log_delta);
      row.push_back(std::max(0.0, delta - *cell->err));
      row.push_back(std::min(1.0, delta + *cell->err));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table RunEpsilon(const RunSpec& spec) {
  Table table;
  table.header = {"n", "epochs"};
  const Column* truth = nullptr;
  for (const Column& col : spec.columns) {
    table.header.push_back(col.key() + "_epsilon");
    if (col.is_truth()) truth = &col;
  }
  if (truth != nullptr) {
    for (const Column& col : spec.columns) {
      if (!col.is_truth()) table.header.push_back(col.key() + "_rel_err");
    }
  }

  const std::size_t width = spec.columns.size();
  const auto cells = ParallelMap<absl::StatusOr<double>>(
      spec.ns.size() * width, spec.threads, [&](std::size_t i) {
        return ComputeEpsilon(spec.columns[i % width], spec, spec.ns[i / width]);
      });

  for (std::size_t r = 0; r < spec.ns.size(); ++r) {
    std::vector<Cell> row = {spec.ns[r], Epochs(spec, spec.ns[r])};
    const absl::StatusOr<double>* truth_cell = nullptr;
    for (std::size_t j = 0; j < width; ++j) {
      const auto& cell = cells[r * width + j];
      if (spec.columns[j].is_truth()) truth_cell = &cell;
      row.push_back(cell.ok() ? Cell(*cell) : Cell(ToError(cell.status())));
    }
    if (truth != nullptr) {
      for (std::size_t j = 0; j < width; ++j) {
        if (spec.columns[j].is_truth()) continue;
        const auto& cell = cells[r * width + j];
        if (!cell.ok()) {
          row.push_back(ToError(cell.status()));
        } else if (!truth_cell->ok()) {
          row.push_back(ToError(truth_cell->status()));
        } else if (**truth_cell == 0) {
          // ε = 0 on both sides is exact agreement; otherwise undefined.
          row.push_back(*cell == 0 ? Cell(0.0) : Cell(std::monostate{}));
        } else {
          row.push_back(*cell / **truth_cell - 1.0);
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table RunCompare(const RunSpec& spec) {
  std::vector<Column> columns = {Column{}};
  std::vector<Column> methods;
  for (const Column& col : spec.columns) {
    if (!col.is_truth()) methods.push_back(col);
  }
  columns.insert(columns.end(), methods.begin(), methods.end());

  Table table;
  table.header = {"n", "epsilon", "truth_log10_delta", "truth_delta"};
  for (const Column& col : methods) {
    table.header.push_back(col.key() + "_delta");
    table.header.push_back(col.key() + "_rel_err");
  }

  const std::vector<Query> queries = Queries(spec);
  const auto cells = DeltaCells(spec, queries, columns);
  const std::size_t width = columns.size();
  std::vector<double> worst(methods.size(), 0.0);
  std::vector<bool> worst_valid(methods.size(), true);

  for (std::size_t r = 0; r < queries.size(); ++r) {
    std::vector<Cell> row = {queries[r].n, queries[r].epsilon};
    const auto& truth = cells[r * width];
    PushDelta(truth, row);
    for (std::size_t j = 0; j < methods.size(); ++j) {
      const auto& cell = cells[r * width + j + 1];
      if (!cell.ok()) {
        row.push_back(ToError(cell.status()));
        row.push_back(ToError(cell.status()));
        worst_valid[j] = false;
        continue;
      }
      row.push_back(std::exp(cell->log_delta));
      if (!truth.ok()) {
        row.push_back(ToError(truth.status()));
        worst_valid[j] = false;
        continue;
      }
      // δ_acc/δ_true − 1 from the logs, which stays accurate below 1e-300.
      double rel;
      if (std::isinf(truth->log_delta) && std::isinf(cell->log_delta)) {
        rel = 0;
      } else if (std::isinf(truth->log_delta)) {
        rel = std::numeric_limits<double>::infinity();
      } else {
        rel = std::expm1(cell->log_delta - truth->log_delta);
      }
      row.push_back(rel);
      worst[j] = std::max(worst[j], std::abs(rel));
    }
    table.rows.push_back(std::move(row));
  }

  std::vector<Cell> footer = {std::string("max_abs_rel_err"), std::monostate{},
                              std::monostate{}, std::monostate{}};
  for (std::size_t j = 0; j < methods.size(); ++j) {
    footer.push_back(std::monostate{});
    footer.push_back(worst_valid[j]
                         ? Cell(worst[j])
                         : Cell(CellError{"some rows failed"}));
  }
  table.rows.push_back(std::move(footer));
  return table;
}

namespace {

// Raw flag values shared by every subcommand.
struct Flags {
  std::optional<double> sigma;
  std::optional<double> lambda;
  double sensitivity = 1.0;
  std::optional<std::int64_t> n;
  std::string n_range;
  std::vector<double> eps;
  std::string eps_range;
  std::optional<double> delta;
  std::vector<std::string> methods;
  bool bounds = false;
  std::string format = "csv";
  std::optional<double> oracle_rel_tol;
  std::string out;
  int threads = 1;
  std::string config;
};

void AddFlags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--sigma", f.sigma, "Noise standard deviation");
  cmd.add_option("--lambda", f.lambda,
                 "Poisson sampling rate; omit for the plain Gaussian");
  cmd.add_option("--sens", f.sensitivity, "L2 sensitivity")
      ->capture_default_str();
  cmd.add_option("--n", f.n, "Number of compositions");
  cmd.add_option("--n-range", f.n_range, "Sweep n over lo:hi:step");
  cmd.add_option("--eps", f.eps, "Comma-separated epsilon values")
      ->delimiter(',');
  cmd.add_option("--eps-range", f.eps_range, "Sweep epsilon over lo:hi:step");
  cmd.add_option("--delta", f.delta, "Target delta");
  cmd.add_option("--methods", f.methods,
                 "Comma-separated methods: sp-msd0, sp-msd1, sp-clt, ma, "
                 "ma-refined, ma-quadratic, clt-standard, truth")
      ->delimiter(',');
  cmd.add_flag("--bounds", f.bounds, "Add the sp-clt error interval");
  cmd.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd.add_option("--oracle-rel-tol", f.oracle_rel_tol,
                 "Relative tolerance of the oracle");
  cmd.add_option("--out", f.out, "Output file (default stdout)");
  cmd.add_option("--threads", f.threads, "Worker threads")
      ->capture_default_str();
  cmd.add_option("--config", f.config,
                 "Heterogeneous composition file ('kind sigma lambda count' "
                 "per line)");
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::StatusOr<std::vector<Column>> ParseColumns(
    const std::vector<std::string>& names, Command command) {
  std::vector<Column> out;
  if (names.empty()) {
    for (Method m : {Method::kSpMsd0, Method::kSpMsd1, Method::kSpClt,
                     Method::kMa, Method::kMaRefined, Method::kMaQuadratic,
                     Method::kCltStandard}) {
      out.push_back(Column{m});
    }
    return out;
  }
  for (const std::string& name : names) {
    Column col;
    if (name != "truth") {
      std::optional<Method> m = ParseMethod(name);
      if (!m) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown method '", name, "'"));
      }
      col.method = *m;
    } else if (command == Command::kCompare) {
      continue;  // always present
    }
    for (const Column& seen : out) {
      if (seen.method == col.method) {
        return absl::InvalidArgumentError(
            absl::StrCat("method '", name, "' listed twice"));
      }
    }
    out.push_back(col);
  }
  if (out.empty()) {
    return absl::InvalidArgumentError("compare needs at least one accountant");
  }
  return out;
}

absl::StatusOr<RunSpec> BuildSpec(Command command, const Flags& f) {
  RunSpec spec;
  spec.command = command;

  if (!f.config.empty()) {
    if (f.sigma || f.lambda) {
      return absl::InvalidArgumentError(
          "--config cannot be combined with --sigma or --lambda");
    }
    absl::StatusOr<std::string> text = ReadFile(f.config);
    if (!text.ok()) return absl::InvalidArgumentError(text.status().message());
    absl::StatusOr<std::vector<CompositionTerm>> terms =
        ParseCompositionConfig(*text);
    if (!terms.ok()) return terms.status();
    spec.base = *std::move(terms);
    spec.config_path = f.config;
  } else {
    if (!f.sigma) return absl::InvalidArgumentError("--sigma is required");
    absl::StatusOr<MechanismSpec> mech =
        f.lambda ? MechanismSpec::SubsampledGaussian(*f.sigma, *f.lambda,
                                                     f.sensitivity)
                 : MechanismSpec::Gaussian(*f.sigma, f.sensitivity);
    if (!mech.ok()) return mech.status();
    spec.base = {{*mech, 1}};
    spec.sigma = *f.sigma;
    spec.lambda = f.lambda;
    spec.sensitivity = f.sensitivity;
  }

  if (f.n && !f.n_range.empty()) {
    return absl::InvalidArgumentError("give --n or --n-range, not both");
  }
  if (!f.n_range.empty()) {
    absl::StatusOr<std::vector<std::int64_t>> ns = ParseIntRange(f.n_range);
    if (!ns.ok()) return ns.status();
    spec.ns = *std::move(ns);
  } else {
    const std::int64_t n = f.n.value_or(1);
    if (n < 1) return absl::InvalidArgumentError("--n must be >= 1");
    spec.ns = {n};
  }

  const bool has_eps = !f.eps.empty() || !f.eps_range.empty();
  if (command == Command::kEpsilon) {
    if (has_eps) {
      return absl::InvalidArgumentError("epsilon takes --delta, not --eps");
    }
    if (!f.delta) return absl::InvalidArgumentError("--delta is required");
    if (!(*f.delta > 0) || std::isnan(*f.delta)) {
      return absl::InvalidArgumentError("--delta must be positive");
    }
    spec.delta_target = *f.delta;
  } else {
    if (f.delta) {
      return absl::InvalidArgumentError(
          "--delta is only valid for the epsilon command");
    }
    if (!f.eps.empty() && !f.eps_range.empty()) {
      return absl::InvalidArgumentError("give --eps or --eps-range, not both");
    }
    if (!f.eps_range.empty()) {
      absl::StatusOr<std::vector<double>> eps = ParseRange(f.eps_range);
      if (!eps.ok()) return eps.status();
      spec.epsilons = *std::move(eps);
    } else {
      spec.epsilons = f.eps;
    }
    if (spec.epsilons.empty()) {
      return absl::InvalidArgumentError("--eps or --eps-range is required");
    }
    for (double e : spec.epsilons) {
      if (!std::isfinite(e) || e < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("epsilon must be finite and >= 0, got ", e));
      }
    }
  }

  absl::StatusOr<std::vector<Column>> cols = ParseColumns(f.methods, command);
  if (!cols.ok()) return cols.status();
  spec.columns = *std::move(cols);
  spec.bounds = f.bounds;
  if (spec.bounds && command != Command::kDelta) {
    return absl::InvalidArgumentError("--bounds applies to the delta command");
  }
  spec.format = f.format == "json" ? Format::kJson : Format::kCsv;

  if (f.oracle_rel_tol) {
    if (!(*f.oracle_rel_tol > 0 && *f.oracle_rel_tol < 1)) {
      return absl::InvalidArgumentError("--oracle-rel-tol must be in (0, 1)");
    }
    spec.oracle.rel_tol = *f.oracle_rel_tol;
  }
  spec.out_path = f.out;

  spec.threads = f.threads;
  if (const char* env = std::getenv("DP_SADDLE_THREADS");
      env != nullptr && *env != '\0') {
    if (!absl::SimpleAtoi(env, &spec.threads)) {
      return absl::InvalidArgumentError(
          absl::StrCat("DP_SADDLE_THREADS='", env, "' is not an integer"));
    }
  }
  if (spec.threads < 1) {
    return absl::InvalidArgumentError("thread count must be >= 1");
  }
  return spec;
}

}  // namespace

int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Saddle-point privacy accountant for (subsampled) Gaussian "
               "mechanisms",
               "dp-saddle"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* delta = app.add_subcommand("delta", "delta(epsilon) per method");
  CLI::App* epsilon =
      app.add_subcommand("epsilon", "epsilon(delta) per method and n");
  CLI::App* compare =
      app.add_subcommand("compare", "accountants against the oracle");
  for (CLI::App* cmd : {delta, epsilon, compare}) AddFlags(*cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsageError;
  }

  const Command command = epsilon->parsed()   ? Command::kEpsilon
                          : compare->parsed() ? Command::kCompare
                                              : Command::kDelta;
  absl::StatusOr<RunSpec> spec = BuildSpec(command, flags);
  if (!spec.ok()) {
    err << "dp-saddle: " << spec.status().message() << "\n"
        << "Run with --help for usage.\n";
    return kUsageError;
  }

  Table table;
  switch (command) {
    case Command::kDelta:
      table = RunDelta(*spec);
      break;
    case Command::kEpsilon:
      table = RunEpsilon(*spec);
      break;
    case Command::kCompare:
      table = RunCompare(*spec);
      break;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!spec->out_path.empty()) {
    file.open(spec->out_path);
    if (!file) {
      err << "dp-saddle: cannot write " << spec->out_path << "\n";
      return kUsageError;
    }
    sink = &file;
  }
  if (spec->format == Format::kJson) {
    WriteJson(table, *spec, *sink);
  } else {
    WriteCsv(table, *sink);
  }
  sink->flush();

  if (table.has_errors()) {
    for (const auto& row : table.rows) {
      for (const Cell& c : row) {
        if (const auto* e = std::get_if<CellError>(&c)) {
          err << "dp-saddle: " << e->message << "\n";
        }
      }
    }
    return kCellFailure;
  }
  return 0;
}

}  // namespace dpsaddle::cli
