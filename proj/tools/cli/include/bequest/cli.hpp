#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bequest/model.hpp"
#include "bequest/verify.hpp"

namespace bequest::cli {

enum class Command { Solve, Eval, Table, Verify, Sweep };
enum class Format { Csv, Json, Text };

std::string_view to_string(Command command) noexcept;
std::string_view to_string(Format format) noexcept;

struct RunConfig {
  Command command = Command::Solve;
  MarketParams params;
  Format format = Format::Text;
  std::optional<std::string> output_path;
  std::uint64_t seed = 0;

  std::vector<double> wealth;  ///< eval points; empty means the default probes

  bool diff = false;
  std::optional<int> round_digits;

  std::optional<double> perturb_yb;
  bool run_fd = true;
  bool run_mc = true;
  FdConfig fd;
  std::uint64_t mc_paths = 100000;
  double mc_dt = 1.0 / 2500.0;
  std::optional<double> mc_w0;

  std::string axis;  ///< "c" or "h"
  std::vector<double> grid;
  std::vector<double> probes;
};

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Output of one command: scalar fields plus zero or more tables.
struct Report {
  Command command = Command::Solve;
  std::vector<std::pair<std::string, Cell>> fields;
  std::vector<Table> tables;
  int exit_code = 0;
  std::string diagnostic;  ///< written to stderr when non-empty
};

/// Shortest decimal string that reads back to the same double.
std::string format_number(double value);

/// Parses "lo:hi:n" into n evenly spaced points (n = 1 gives {lo}).
/// Throws ConfigError on malformed or empty specs.
std::vector<double> parse_grid(std::string_view spec);

Report cmd_solve(const RunConfig& cfg);
Report cmd_eval(const RunConfig& cfg);
Report cmd_table(const RunConfig& cfg);
Report cmd_verify(const RunConfig& cfg);
Report cmd_sweep(const RunConfig& cfg);
Report dispatch(const RunConfig& cfg);

std::string render(const Report& report, Format format);

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 1 verification failure, 2 usage or validation error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bequest::cli
