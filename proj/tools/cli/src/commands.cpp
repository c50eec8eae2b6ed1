#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "bequest/analysis.hpp"
#include "bequest/cli.hpp"
#include "bequest/errors.hpp"
#include "bequest/solver.hpp"

namespace bequest::cli {

namespace {

constexpr double kGoldenTolerance = 0.0005;
constexpr double kOracleTolerance = 0.02;

Cell maybe(const std::optional<double>& value) {
  if (value) return *value;
  return std::monostate{};
}

std::string probe_label(const char* prefix, double w) { return std::string(prefix) + "(" + format_number(w) + ")"; }

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("malformed grid '" + std::string(spec) + "': bad number '" + std::string(text) + "'");
  }
  return value;
}

double rounded(double value, const std::optional<int>& digits) {
  if (!digits || !std::isfinite(value)) return value;
  const double scale = std::pow(10.0, *digits);
  return std::round(value * scale) / scale;
}

void add_params(Report& report, const MarketParams& p) {
  report.fields.insert(report.fields.end(), {{"r", p.r},
                                             {"mu", p.mu},
                                             {"sigma", p.sigma},
                                             {"lambda", p.lambda},
                                             {"h", p.h},
                                             {"b", p.b},
                                             {"c", p.c}});
}

std::vector<double> default_eval_points(const Solution& s) { return {0.25 * s.w_s(), 0.5 * s.w_s(), 0.75 * s.w_s()}; }

}  // namespace

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::Solve:
      return "solve";
    case Command::Eval:
      return "eval";
    case Command::Table:
      return "table";
    case Command::Verify:
      return "verify";
    case Command::Sweep:
      return "sweep";
  }
  return "unknown";
}

std::string_view to_string(Format format) noexcept {
  switch (format) {
    case Format::Csv:
      return "csv";
    case Format::Json:
      return "json";
    case Format::Text:
      return "text";
  }
  return "unknown";
}

std::vector<double> parse_grid(std::string_view spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
  if (spec.empty() || second == std::string_view::npos || spec.find(':', second + 1) != std::string_view::npos) {
    throw ConfigError("malformed grid '" + std::string(spec) + "': expected lo:hi:n");
  }
  const double lo = parse_number(spec.substr(0, first), spec);
  const double hi = parse_number(spec.substr(first + 1, second - first - 1), spec);
  const std::string_view count_text = spec.substr(second + 1);
  long long n = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), n);
  if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
    throw ConfigError("malformed grid '" + std::string(spec) + "': bad point count");
  }
  if (n < 1) throw ConfigError("empty grid '" + std::string(spec) + "'");
  if (hi < lo) throw ConfigError("malformed grid '" + std::string(spec) + "': hi < lo");
  if (n == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  grid.back() = hi;
  return grid;
}

Report cmd_solve(const RunConfig& cfg) {
  const Solution s = solve(cfg.params);
  const DerivedConstants& d = s.derived;
  Report report;
  report.command = Command::Solve;
  report.fields.emplace_back("regime", std::string(to_string(s.regime)));
  add_params(report, cfg.params);
  report.fields.insert(report.fields.end(), {{"w_s", s.w_s()},
                                             {"w_b", s.w_b},
                                             {"C1", d.C1},
                                             {"C2", maybe(d.C2)},
                                             {"insurance_threshold", d.insurance_threshold},
                                             {"m", d.m},
                                             {"q", d.q},
                                             {"p", d.p},
                                             {"p0", d.p0},
                                             {"alpha1", d.alpha1},
                                             {"alpha2", d.alpha2},
                                             {"beta1", d.beta1},
                                             {"beta2", d.beta2},
                                             {"y_b0", maybe(s.y_b0)},
                                             {"y_g0", maybe(s.y_g0)},
                                             {"y_bg", maybe(s.y_bg)},
                                             {"y_0", maybe(s.y_0)},
                                             {"y_b", maybe(s.y_b)},
                                             {"y_g", maybe(s.y_g)}});
  return report;
}

Report cmd_eval(const RunConfig& cfg) {
  const Solution s = solve(cfg.params);
  Report report;
  report.command = Command::Eval;
  report.fields.emplace_back("regime", std::string(to_string(s.regime)));
  report.fields.emplace_back("w_s", s.w_s());
  report.fields.emplace_back("w_b", s.w_b);

  Table table{"points", {"w", "ok", "phi", "phi_w", "phi_ww", "pi_star", "D_star", "y", "error"}, {}};
  int succeeded = 0;
  for (double w : cfg.wealth.empty() ? default_eval_points(s) : cfg.wealth) {
    try {
      const StrategyEval e = eval(s, w);
      const Cell y = on_dual_branch(s, w) ? Cell{e.y} : Cell{};
      table.rows.push_back({w, true, e.phi, e.phi_w, e.phi_ww, e.pi_star, e.D_star, y, std::monostate{}});
      ++succeeded;
    } catch (const DomainError& ex) {
      table.rows.push_back({w, false, {}, {}, {}, {}, {}, {}, std::string(ex.what())});
    }
  }
  report.tables.push_back(std::move(table));
  if (succeeded == 0) {
    report.exit_code = 2;
    report.diagnostic = "no evaluation point lies in [0, w_s]";
  }
  return report;
}

Report cmd_table(const RunConfig& cfg) {
  const ReferenceTables computed = reproduce_tables(cfg.fd);
  Report report;
  report.command = Command::Table;
  add_params(report, computed.base);

  Table table{"rows", {"table", "key", "source", "w_b", "w_s"}, {}};
  for (double w : kProbeWealths) table.columns.push_back(probe_label("pi", w));
  auto emit = [&](const char* name, const TableRow& row, const char* source) {
    std::vector<Cell> cells{std::string(name), row.key, std::string(source), rounded(row.w_b, cfg.round_digits),
                            rounded(row.w_s, cfg.round_digits)};
    for (double v : row.pi) cells.emplace_back(rounded(v, cfg.round_digits));
    table.rows.push_back(std::move(cells));
  };
  for (const auto& row : computed.consumption) emit("consumption", row, "closed-form");
  for (const auto& row : computed.premium) emit("premium", row, "closed-form");
  emit("premium", computed.no_insurance, "fd-oracle");
  report.tables.push_back(std::move(table));

  if (cfg.diff) {
    Table diff{"diff", {"table", "key", "column", "computed", "published", "deviation", "tolerance", "within"}, {}};
    double golden_max = 0.0, oracle_max = 0.0;
    std::int64_t outside = 0;
    for (const auto& cell : diff_tables(computed, published_tables())) {
      const bool oracle = cell.table == "no_insurance";
      const double tol = oracle ? kOracleTolerance : kGoldenTolerance;
      const double dev = cell.deviation();
      (oracle ? oracle_max : golden_max) = std::max(oracle ? oracle_max : golden_max, dev);
      if (!(dev <= tol)) ++outside;
      diff.rows.push_back({cell.table, cell.key, cell.column, cell.computed, cell.published, dev, tol, dev <= tol});
    }
    report.fields.emplace_back("cells", static_cast<std::int64_t>(diff.rows.size()));
    report.fields.emplace_back("cells_outside_tolerance", outside);
    report.fields.emplace_back("max_deviation", golden_max);
    report.fields.emplace_back("oracle_max_deviation", oracle_max);
    report.tables.push_back(std::move(diff));
  }
  return report;
}

Report cmd_verify(const RunConfig& cfg) {
  Solution s = solve(cfg.params);
  if (cfg.perturb_yb) s = perturb_yb(s, *cfg.perturb_yb);

  VerifyConfig vc;
  vc.fd = cfg.fd;
  vc.run_fd = cfg.run_fd;
  vc.run_mc = cfg.run_mc;
  vc.mc.n_paths = cfg.mc_paths;
  vc.mc.dt = cfg.mc_dt;
  vc.mc.seed = cfg.seed;
  vc.mc_w0 = cfg.mc_w0;
  const VerificationReport v = run_verification(s, vc);

  double worst_gap = v.pasting_ok || !v.pasting_gaps.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& g : v.pasting_gaps) worst_gap = std::max(worst_gap, g.max_gap());

  std::string failures;
  for (const auto& name : v.failures()) failures += (failures.empty() ? "" : ",") + name;

  Report report;
  report.command = Command::Verify;
  report.fields.emplace_back("regime", std::string(to_string(s.regime)));
  report.fields.emplace_back("w_s", s.w_s());
  report.fields.emplace_back("w_b", s.w_b);
  report.fields.emplace_back("seed", static_cast<std::int64_t>(cfg.seed));
  report.fields.emplace_back("passed", v.passed());
  report.fields.emplace_back("failures", failures);
  if (v.mc_estimate) {
    report.fields.emplace_back("mc_w0", v.mc_w0);
    report.fields.emplace_back("phi_w0", v.phi_w0);
    report.fields.emplace_back("mc_estimate", *v.mc_estimate);
    report.fields.emplace_back("mc_stderr", *v.mc_stderr);
  }

  Table checks{"checks", {"check", "ran", "value", "limit", "passed"}, {}};
  checks.rows.push_back({std::string("residual"), true, v.residual_sup, vc.residual_limit, v.residual_ok});
  checks.rows.push_back({std::string("pasting"), true, worst_gap, vc.pasting_limit, v.pasting_ok});
  checks.rows.push_back({std::string("fd"), vc.run_fd, maybe(v.fd_sup_error), vc.fd_limit, v.fd_ok});
  checks.rows.push_back({std::string("mc"), vc.run_mc, v.mc_z ? Cell{std::abs(*v.mc_z)} : Cell{}, vc.z_limit, v.mc_ok});
  report.tables.push_back(std::move(checks));

  Table gaps{"pasting_points", {"w", "d_phi", "d_phi_w", "d_phi_ww"}, {}};
  for (const auto& g : v.pasting_gaps) gaps.rows.push_back({g.w, g.d_phi, g.d_phi_w, g.d_phi_ww});
  report.tables.push_back(std::move(gaps));

  if (!v.passed()) {
    report.exit_code = 1;
    report.diagnostic = "verification failed: " + failures;
  }
  return report;
}

Report cmd_sweep(const RunConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("sweep needs a non-empty --grid");
  const std::vector<double> probes =
      cfg.probes.empty() ? std::vector<double>(kProbeWealths.begin(), kProbeWealths.end()) : cfg.probes;
  SweepResult sweep;
  if (cfg.axis == "c") {
    sweep = sweep_consumption(cfg.params, cfg.grid, probes);
  } else if (cfg.axis == "h") {
    sweep = sweep_premium(cfg.params, cfg.grid, probes);
  } else {
    throw ConfigError("sweep axis must be c or h, got '" + cfg.axis + "'");
  }

  Report report;
  report.command = Command::Sweep;
  report.fields.emplace_back("axis", cfg.axis);
  add_params(report, cfg.params);

  Table table{"rows", {cfg.axis, "ok", "regime", "w_b", "w_s"}, {}};
  for (double w : probes) table.columns.push_back(probe_label("phi", w));
  for (double w : probes) table.columns.push_back(probe_label("pi", w));
  table.columns.emplace_back("error");
  bool any_ok = false;
  for (const auto& row : sweep.rows) {
    std::vector<Cell> cells{row.x, row.ok};
    if (row.ok) {
      any_ok = true;
      cells.insert(cells.end(), {std::string(to_string(row.regime)), row.w_b, row.w_s});
      for (double v : row.phi) cells.emplace_back(v);
      for (double v : row.pi) cells.emplace_back(v);
      cells.emplace_back(std::monostate{});
    } else {
      cells.resize(table.columns.size() - 1);
      cells.emplace_back(row.error);
    }
    table.rows.push_back(std::move(cells));
  }
  report.tables.push_back(std::move(table));
  if (!any_ok) {
    report.exit_code = 2;
    report.diagnostic = "no sweep row could be solved";
  }
  return report;
}

Report dispatch(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Solve:
      return cmd_solve(cfg);
    case Command::Eval:
      return cmd_eval(cfg);
    case Command::Table:
      return cmd_table(cfg);
    case Command::Verify:
      return cmd_verify(cfg);
    case Command::Sweep:
      return cmd_sweep(cfg);
  }
  throw ConfigError("unknown command");
}

}  // namespace bequest::cli
