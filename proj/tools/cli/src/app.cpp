#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "bequest/analysis.hpp"
#include "bequest/cli.hpp"
#include "bequest/errors.hpp"

namespace bequest::cli {

namespace {

struct Parsed {
  RunConfig cfg;
  std::string grid_spec;
  bool no_fd = false;
  bool no_mc = false;
};

void add_param_flags(CLI::App& app, MarketParams& p) {
  app.add_option("--r", p.r, "Riskless rate")->capture_default_str();
  app.add_option("--mu", p.mu, "Risky drift")->capture_default_str();
  app.add_option("--sigma", p.sigma, "Risky volatility")->capture_default_str();
  app.add_option("--lambda", p.lambda, "Mortality hazard rate")->capture_default_str();
  app.add_option("--h", p.h, "Premium rate per unit of death benefit")->capture_default_str();
  app.add_option("--b", p.b, "Bequest goal")->capture_default_str();
  app.add_option("--c", p.c, "Consumption rate")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Parsed parsed;
  RunConfig& cfg = parsed.cfg;
  cfg.params = reference_base();

  CLI::App app{"Maximal probability of reaching a bequest goal with term life insurance", "bequest"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "Read flags from a key = value file (flags on the command line win)");
  app.allow_config_extras(false);
  add_param_flags(app, cfg.params);

  const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}, {"text", Format::Text}};
  std::string format_name = "text";
  app.add_option("--format", format_name, "Output format: csv, json or text")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
  app.add_option("--out", cfg.output_path, "Write output to this file instead of stdout");
  app.add_option("--seed", cfg.seed, "Random seed for Monte Carlo runs")->capture_default_str();
  app.add_option("--w", cfg.wealth, "Wealth points for eval (repeat or comma-separate)")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--n-grid", cfg.fd.n_grid, "Interior nodes for the finite-difference oracle")
      ->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "Classify the regime and print the solution constants");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate value function and controls at wealth points");
  auto* table_cmd = app.add_subcommand("table", "Reproduce the reference consumption and premium tables");
  table_cmd->add_flag("--diff", cfg.diff, "Also print deviations from the published cells");
  table_cmd->add_option("--round", cfg.round_digits, "Round table cells to this many decimals")
      ->check(CLI::Range(0, 15));
  auto* verify_cmd = app.add_subcommand("verify", "Check the closed form against residual, pasting, FD and MC");
  verify_cmd->add_option("--perturb-yb", cfg.perturb_yb, "Relative perturbation of y_b (fault injection)");
  verify_cmd->add_flag("--no-fd", parsed.no_fd, "Skip the finite-difference oracle");
  verify_cmd->add_flag("--no-mc", parsed.no_mc, "Skip the Monte Carlo check");
  verify_cmd->add_option("--paths", cfg.mc_paths, "Monte Carlo paths")->capture_default_str();
  verify_cmd->add_option("--dt", cfg.mc_dt, "Monte Carlo time step")->capture_default_str();
  verify_cmd->add_option("--w0", cfg.mc_w0, "Monte Carlo starting wealth (default w_s / 2)");
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep consumption or premium and emit plot-ready rows");
  sweep_cmd->add_option("--axis", cfg.axis, "Parameter to sweep")->required()->check(CLI::IsMember({"c", "h"}));
  sweep_cmd->add_option("--grid", parsed.grid_spec, "Grid as lo:hi:n")->required();
  sweep_cmd->add_option("--probe", cfg.probes, "Probe wealths (default 0.1,0.3,0.5,0.7,0.9)")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (*solve_cmd) cfg.command = Command::Solve;
  if (*eval_cmd) cfg.command = Command::Eval;
  if (*table_cmd) cfg.command = Command::Table;
  if (*verify_cmd) cfg.command = Command::Verify;
  if (*sweep_cmd) cfg.command = Command::Sweep;
  cfg.format = formats.at(format_name);
  cfg.run_fd = !parsed.no_fd;
  cfg.run_mc = !parsed.no_mc;

  Report report;
  try {
    if (cfg.command == Command::Sweep) cfg.grid = parse_grid(parsed.grid_spec);
    cfg.params.validate();
    cfg.fd.validate();
    report = dispatch(cfg);
  } catch (const ValidationError& e) {
    err << "bequest: invalid parameter " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "bequest: " << e.what() << "\n";
    return 2;
  }

  const std::string text = render(report, cfg.format);
  if (cfg.output_path) {
    std::ofstream file(*cfg.output_path, std::ios::binary);
    if (!file || !(file << text)) {
      err << "bequest: cannot write " << *cfg.output_path << "\n";
      return 2;
    }
  } else {
    out << text;
  }
  if (!report.diagnostic.empty()) err << "bequest: " << report.diagnostic << "\n";
  return report.exit_code;
}

}  // namespace bequest::cli
