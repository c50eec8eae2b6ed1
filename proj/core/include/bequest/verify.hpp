#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bequest/model.hpp"
#include "bequest/solver.hpp"

namespace bequest {

// ---------------------------------------------------------------------------
// HJB residual and smooth pasting

/// Candidate value and derivatives at one wealth level.
struct ValuePoint {
  double w = 0.0;
  double phi = 0.0;
  double phi_w = 0.0;
  double phi_ww = 0.0;
};

/// lambda (phi - 1{w >= w_b}) - (r w - c - h (b - w) 1{w_b <= w <= min(w_s, b)}) phi_w
///   + m phi_w^2 / phi_ww.
/// The last term is the negated supremum over pi; it is 0 when phi_w = 0 and
/// phi_ww >= 0, and -inf when phi_w != 0 and phi_ww >= 0.
double hjb_residual(const MarketParams& params, const DerivedConstants& derived, double w_b,
                    const ValuePoint& point);

/// Residual of a closed-form solution with analytic derivatives. Requires
/// 0 < w < w_s and w not a pasting point.
double hjb_residual(const Solution& solution, double w);

struct PastingGap {
  double w = 0.0;
  double d_phi = 0.0;
  double d_phi_w = 0.0;
  double d_phi_ww = 0.0;

  double max_gap() const;
};

/// Absolute one-sided gaps at every pasting point. Empty when there are none.
std::vector<PastingGap> smooth_pasting_check(const Solution& solution);

// ---------------------------------------------------------------------------
// Finite-difference oracle

struct FdConfig {
  int n_grid = 2000;  ///< interior nodes
  double tol = 1e-10;
  int max_sweeps = 10000;
  bool insurance_allowed = true;

  void validate() const;
};

struct FdResult {
  std::vector<double> w;    ///< n_grid + 2 nodes including both boundaries
  std::vector<double> phi;
  std::vector<double> pi;   ///< investment control per node (0 at boundaries)
  std::vector<char> buy;    ///< insurance decision per node
  double upper = 0.0;       ///< right boundary (phi = 1 there)
  bool insurance_allowed = true;
  int sweeps = 0;
  double last_change = 0.0;

  /// Linear interpolation of phi; 1 above the right boundary.
  double phi_at(double wealth) const;
  /// Linear interpolation of pi; 0 above the right boundary.
  double pi_at(double wealth) const;
};

/// Policy iteration on the discretized HJB equation. The domain is [0, w_s]
/// with insurance, and [0, max(c/r, b)] without. Throws NonConvergence.
FdResult fd_solve(const MarketParams& params, const FdConfig& cfg = {});

/// Max |discrete HJB residual| at interior nodes, with controls re-derived
/// from the returned grid function and the same stencil as fd_solve. Nodes
/// within `exclude` of any point in `skip` are ignored.
double fd_discrete_residual(const MarketParams& params, const FdResult& result,
                            const std::vector<double>& skip = {}, double exclude = 0.0);

/// Max |phi_closed - phi_fd| over the grid nodes.
double fd_sup_error(const Solution& solution, const FdResult& result);

// ---------------------------------------------------------------------------
// Monte Carlo

struct McConfig {
  std::uint64_t n_paths = 100000;
  double dt = 1.0 / 2500.0;
  std::uint64_t seed = 0;
  double w0 = 0.0;
  /// Also treat a step as ruined when the Brownian bridge between two
  /// positive endpoints crosses zero.
  bool bridge_correction = true;
  /// Worker count; 0 means BEQUEST_OPT_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Investment rule plus an insurance interval. Death benefit b - w is in force
/// on [insure_lo, insure_hi]; reaching `absorb` counts as success.
struct FeedbackStrategy {
  std::function<double(double)> pi;
  double insure_lo = 1.0;
  double insure_hi = 0.0;  ///< empty interval when insure_hi < insure_lo
  double absorb = 0.0;
  /// pi sampled at 2^16 + 1 equally spaced points on [0, absorb] plus one
  /// guard entry. Built from `pi` by mc_estimate when empty.
  std::vector<double> pi_table;

  /// pi* and D* from the closed form; absorbs at w_s.
  static FeedbackStrategy optimal(const Solution& solution);
  /// Never buys insurance. Invests pi_min when c > 0 and the optimal pi*
  /// when c = 0; absorbs at max(b, c/r).
  static FeedbackStrategy never_insure(const Solution& solution);
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;  ///< binomial standard error
  std::uint64_t successes = 0;
  std::uint64_t n_paths = 0;
  std::uint64_t ruined = 0;
  double mean_steps = 0.0;
};

/// Throws ConfigError on invalid cfg. Identical results for identical seeds
/// whatever the worker count.
McResult mc_estimate(const MarketParams& params, const FeedbackStrategy& strategy,
                     const McConfig& cfg);

/// |estimate - reference| / stderr, 0 when both are equal and +inf when the
/// standard error is 0 but they differ.
double mc_z_score(const McResult& result, double reference);

/// Worker count from BEQUEST_OPT_THREADS (if set and positive), capped by
/// hardware concurrency.
unsigned default_thread_count();

// ---------------------------------------------------------------------------
// Combined report

struct VerifyConfig {
  int residual_points = 1000;
  FdConfig fd;
  McConfig mc;
  std::optional<double> mc_w0;  ///< overrides mc.w0; defaults to w_s / 2 when unset
  bool run_fd = true;
  bool run_mc = true;
  double residual_limit = 1e-8;
  double pasting_limit = 1e-8;
  double fd_limit = 1e-3;
  double z_limit = 3.0;
};

struct VerificationReport {
  double residual_sup = 0.0;
  std::vector<PastingGap> pasting_gaps;
  std::optional<double> fd_sup_error;
  std::optional<double> mc_estimate;
  std::optional<double> mc_stderr;
  std::optional<double> mc_z;
  double mc_w0 = 0.0;
  double phi_w0 = 0.0;

  bool residual_ok = true;
  bool pasting_ok = true;
  bool fd_ok = true;
  bool mc_ok = true;

  bool passed() const { return residual_ok && pasting_ok && fd_ok && mc_ok; }
  /// Names of the failed checks, in evaluation order.
  std::vector<std::string> failures() const;
};

/// Interior wealth grid of `n` points strictly inside (0, w_s), skipping
/// pasting points.
std::vector<double> interior_grid(const Solution& solution, int n);

VerificationReport run_verification(const Solution& solution, const VerifyConfig& cfg);

}  // namespace bequest
