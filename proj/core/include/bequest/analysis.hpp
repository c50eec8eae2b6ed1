#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bequest/model.hpp"
#include "bequest/solver.hpp"
#include "bequest/verify.hpp"

namespace bequest {

/// Wealth levels probed by the sweeps and the reference tables.
inline constexpr std::array<double, 5> kProbeWealths{0.1, 0.3, 0.5, 0.7, 0.9};

struct SweepRow {
  double x = 0.0;  ///< value of the swept parameter
  bool ok = false;
  std::string error;  ///< set when the solve failed
  Regime regime = Regime::ZeroConsumption;
  double w_b = 0.0;
  double w_s = 0.0;
  std::vector<double> phi;  ///< at each probe wealth, 1 at or above w_s
  std::vector<double> pi;   ///< at each probe wealth, 0 at or above w_s
};

struct SweepResult {
  std::string axis;  ///< "c" or "h"
  std::vector<double> grid;
  std::vector<double> probes;
  std::vector<SweepRow> rows;  ///< aligned with grid
};

/// Solves at each consumption rate and evaluates the probes. Failed rows are
/// marked rather than aborting the sweep.
SweepResult sweep_consumption(const MarketParams& base, const std::vector<double>& c_grid,
                              const std::vector<double>& probes = {kProbeWealths.begin(),
                                                                   kProbeWealths.end()});

/// Same for the premium rate h; h = 0 uses the ruin-limit solution.
SweepResult sweep_premium(const MarketParams& base, const std::vector<double>& h_grid,
                          const std::vector<double>& probes = {kProbeWealths.begin(),
                                                               kProbeWealths.end()});

struct LimitValues {
  double phi = 0.0;
  double pi = 0.0;
};

/// Limit of phi and pi* as h -> 0+: 1 - (1 - r w / c)^p0 and pi_min.
/// Requires c > 0 and 0 <= w <= c/r.
LimitValues limit_h_zero(const MarketParams& params, double w);

struct HInfinityReport {
  std::vector<double> h;          ///< finite premiums compared against the oracle
  std::vector<double> deviation;  ///< sup over probes of |phi(h) - phi_no_insurance|
  std::vector<double> w_b;        ///< buy level at each h
  std::vector<double> probes;
  std::vector<double> phi_oracle;  ///< no-insurance oracle at each probe
  std::vector<double> pi_oracle;   ///< oracle investment at each probe
  bool deviation_decreasing = false;
  bool w_b_increasing = false;
};

/// Compares solutions at large h against the finite-difference oracle with
/// insurance disabled. Requires c > 0.
HInfinityReport check_h_infinity(const MarketParams& params, const std::vector<double>& probes,
                                 const std::vector<double>& h_values = {10.0, 100.0, 1000.0},
                                 const FdConfig& fd = {});

/// Max relative deviation of phi(k w), w_b and pi*(k w) / k after scaling b
/// and c by k. Probes at or above w_s are skipped.
double scaling_check(const MarketParams& params, double k, const std::vector<double>& probes);

/// One row of a reference table: key (c or h), w_b, w_s and pi* at the probes.
struct TableRow {
  double key = 0.0;
  double w_b = 0.0;
  double w_s = 0.0;
  std::array<double, 5> pi{};
};

struct ReferenceTables {
  MarketParams base;                 ///< parameters shared by both tables
  std::vector<TableRow> consumption;  ///< rows keyed by c at h = 0.05
  std::vector<TableRow> premium;      ///< rows keyed by h at c = 0.02
  TableRow no_insurance;              ///< h = infinity row, from the oracle (w_b = b, w_s = max(b, c/r))
};

/// Parameters of the reference tables: r = 0.03, mu = 0.06, sigma = 0.2,
/// lambda = 0.04, h = 0.05, b = 1, c = 0.
MarketParams reference_base();
const std::vector<double>& reference_consumption_grid();
const std::vector<double>& reference_premium_grid();

/// Computes both tables (unrounded). The no-insurance row comes from the
/// finite-difference oracle.
ReferenceTables reproduce_tables(const FdConfig& fd = {});

/// Published values of both tables, as printed.
const ReferenceTables& published_tables();

struct CellDiff {
  std::string table;   ///< "consumption" or "premium"
  double key = 0.0;
  std::string column;  ///< "w_b", "w_s" or "pi(0.1)" ...
  double computed = 0.0;
  double published = 0.0;
  double deviation() const;
};

/// Cell-by-cell comparison of computed against published tables.
std::vector<CellDiff> diff_tables(const ReferenceTables& computed, const ReferenceTables& published,
                                  bool include_no_insurance = true);

}  // namespace bequest
