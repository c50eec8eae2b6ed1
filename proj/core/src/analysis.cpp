#include "bequest/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bequest/errors.hpp"

namespace bequest {

namespace {

SweepRow probe_row(const MarketParams& params, double x, const std::vector<double>& probes) {
  SweepRow row;
  row.x = x;
  try {
    const Solution s = solve(params);
    row.regime = s.regime;
    row.w_b = s.w_b;
    row.w_s = s.w_s();
    for (double w : probes) {
      const StrategyEval e = eval_clamped(s, w);
      row.phi.push_back(e.phi);
      row.pi.push_back(e.pi_star);
    }
    row.ok = true;
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

double relative_gap(double value, double reference) {
  if (value == reference) return 0.0;
  return std::abs(value - reference) / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

TableRow table_row(const MarketParams& params, double key) {
  const Solution s = solve(params);
  TableRow row;
  row.key = key;
  row.w_b = s.w_b;
  row.w_s = s.w_s();
  for (std::size_t i = 0; i < kProbeWealths.size(); ++i) {
    row.pi[i] = eval_clamped(s, kProbeWealths[i]).pi_star;
  }
  return row;
}

void diff_rows(const std::string& table, const TableRow& got, const TableRow& want,
               std::vector<CellDiff>& out) {
  out.push_back({table, want.key, "w_b", got.w_b, want.w_b});
  out.push_back({table, want.key, "w_s", got.w_s, want.w_s});
  for (std::size_t i = 0; i < kProbeWealths.size(); ++i) {
    std::string column = "pi(" + std::to_string(kProbeWealths[i]).substr(0, 3) + ")";
    out.push_back({table, want.key, column, got.pi[i], want.pi[i]});
  }
}

}  // namespace

SweepResult sweep_consumption(const MarketParams& base, const std::vector<double>& c_grid,
                              const std::vector<double>& probes) {
  SweepResult out{"c", c_grid, probes, {}};
  for (double c : c_grid) out.rows.push_back(probe_row(base.with_c(c), c, probes));
  return out;
}

SweepResult sweep_premium(const MarketParams& base, const std::vector<double>& h_grid,
                          const std::vector<double>& probes) {
  SweepResult out{"h", h_grid, probes, {}};
  for (double h : h_grid) out.rows.push_back(probe_row(base.with_h(h), h, probes));
  return out;
}

LimitValues limit_h_zero(const MarketParams& params, double w) {
  const MarketParams p = params.with_h(0.0);
  if (!(p.c > 0.0)) throw DomainError("limit_h_zero: needs c > 0");
  const DerivedConstants d = derive_constants(p);
  const double cr = p.c / p.r;
  if (!(w >= 0.0 && w <= cr)) throw DomainError("limit_h_zero: wealth outside [0, c/r]");
  return {-std::expm1(d.p0 * std::log1p(-w / cr)), pi_min(p, d, w)};
}

HInfinityReport check_h_infinity(const MarketParams& params, const std::vector<double>& probes,
                                 const std::vector<double>& h_values, const FdConfig& fd) {
  if (!(params.c > 0.0)) throw DomainError("check_h_infinity: needs c > 0");
  FdConfig cfg = fd;
  cfg.insurance_allowed = false;
  const FdResult oracle = fd_solve(params, cfg);

  HInfinityReport report;
  report.h = h_values;
  report.probes = probes;
  for (double w : probes) {
    report.phi_oracle.push_back(oracle.phi_at(w));
    report.pi_oracle.push_back(oracle.pi_at(w));
  }
  for (double h : h_values) {
    const Solution s = solve(params.with_h(h));
    double worst = 0.0;
    for (std::size_t i = 0; i < oracle.w.size(); ++i) {
      worst = std::max(worst, std::abs(eval_clamped(s, oracle.w[i]).phi - oracle.phi[i]));
    }
    report.deviation.push_back(worst);
    report.w_b.push_back(s.w_b);
  }
  report.deviation_decreasing = true;
  report.w_b_increasing = true;
  for (std::size_t i = 1; i < h_values.size(); ++i) {
    if (!(report.deviation[i] < report.deviation[i - 1])) report.deviation_decreasing = false;
    if (!(report.w_b[i] > report.w_b[i - 1])) report.w_b_increasing = false;
  }
  for (double wb : report.w_b) {
    if (!(wb < params.b)) report.w_b_increasing = false;
  }
  return report;
}

double scaling_check(const MarketParams& params, double k, const std::vector<double>& probes) {
  if (!(k > 0.0)) throw DomainError("scaling_check: k must be positive");
  const Solution s1 = solve(params);
  const Solution s2 = solve(params.with_b(k * params.b).with_c(k * params.c));
  double worst = relative_gap(s2.w_b, k * s1.w_b);
  for (double w : probes) {
    if (!(w > 0.0 && w < s1.w_s())) continue;
    const StrategyEval e1 = eval(s1, w);
    const StrategyEval e2 = eval(s2, std::min(k * w, s2.w_s()));
    worst = std::max(worst, relative_gap(e2.phi, e1.phi));
    worst = std::max(worst, relative_gap(e2.pi_star / k, e1.pi_star));
  }
  return worst;
}

MarketParams reference_base() { return MarketParams{0.03, 0.06, 0.20, 0.04, 0.05, 1.0, 0.0}; }

const std::vector<double>& reference_consumption_grid() {
  static const std::vector<double> grid{0.0, 0.0005, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.0629};
  return grid;
}

const std::vector<double>& reference_premium_grid() {
  static const std::vector<double> grid{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.10, 0.20, 0.50};
  return grid;
}

ReferenceTables reproduce_tables(const FdConfig& fd) {
  ReferenceTables t;
  t.base = reference_base();
  for (double c : reference_consumption_grid()) t.consumption.push_back(table_row(t.base.with_c(c), c));
  const MarketParams premium_base = t.base.with_c(0.02);
  for (double h : reference_premium_grid()) t.premium.push_back(table_row(premium_base.with_h(h), h));

  FdConfig cfg = fd;
  cfg.insurance_allowed = false;
  const FdResult oracle = fd_solve(premium_base, cfg);
  t.no_insurance.key = std::numeric_limits<double>::infinity();
  t.no_insurance.w_b = premium_base.b;
  t.no_insurance.w_s = oracle.upper;
  for (std::size_t i = 0; i < kProbeWealths.size(); ++i) {
    t.no_insurance.pi[i] = oracle.pi_at(kProbeWealths[i]);
  }
  return t;
}

double CellDiff::deviation() const { return std::abs(computed - published); }

std::vector<CellDiff> diff_tables(const ReferenceTables& computed, const ReferenceTables& published,
                                  bool include_no_insurance) {
  std::vector<CellDiff> out;
  const auto n1 = std::min(computed.consumption.size(), published.consumption.size());
  for (std::size_t i = 0; i < n1; ++i) diff_rows("consumption", computed.consumption[i], published.consumption[i], out);
  const auto n2 = std::min(computed.premium.size(), published.premium.size());
  for (std::size_t i = 0; i < n2; ++i) diff_rows("premium", computed.premium[i], published.premium[i], out);
  if (include_no_insurance) diff_rows("no_insurance", computed.no_insurance, published.no_insurance, out);
  return out;
}

}  // namespace bequest
