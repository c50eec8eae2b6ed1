#pragma once

#include <optional>
#include <vector>

#include "bequest/model.hpp"

namespace bequest {

/// Regime tag plus every free parameter needed to evaluate the value function.
/// Dual parameters that a regime does not use are left empty.
struct Solution {
  Regime regime = Regime::ZeroConsumption;
  MarketParams params;
  DerivedConstants derived;
  double w_b = 0.0;  ///< buy level
  std::optional<double> y_b0;
  std::optional<double> y_g0;
  std::optional<double> y_bg;
  std::optional<double> y_0;
  std::optional<double> y_b;
  std::optional<double> y_g;

  double w_s() const noexcept { return derived.w_s; }
};

/// Value function, its derivatives and the optimal controls at one wealth level.
/// `y` is the marginal value phi_w.
struct StrategyEval {
  double w = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double phi_w = 0.0;
  double phi_ww = 0.0;
  double pi_star = 0.0;
  double D_star = 0.0;
};

Solution solve(const MarketParams& params);

Solution solve_zero_consumption(const MarketParams& params, const DerivedConstants& derived);
Solution solve_full_insurance(const MarketParams& params, const DerivedConstants& derived);
Solution solve_buy_level_low_c(const MarketParams& params, const DerivedConstants& derived);
Solution solve_full_insurance_above_rb(const MarketParams& params,
                                       const DerivedConstants& derived);
Solution solve_buy_level_above_rb(const MarketParams& params, const DerivedConstants& derived);
Solution solve_ruin_limit(const MarketParams& params, const DerivedConstants& derived);

/// Requires 0 <= w <= w_s; throws DomainError otherwise.
StrategyEval eval(const Solution& solution, double w);

/// Same as eval for w < w_s. For w >= w_s returns phi = 1, pi* = 0 and
/// zero derivatives, with D* = (b - w)+ when w >= w_b.
StrategyEval eval_clamped(const Solution& solution, double w);

/// Marginal value y = phi_w(w) on a dual branch, found by inverting the
/// branch's wealth map. Throws DomainError when w is not on a dual branch.
double invert_dual(const Solution& solution, double w);

/// True when eval at w goes through a dual branch.
bool on_dual_branch(const Solution& solution, double w);

enum class Side { Left, Right };

/// Evaluates the branch adjoining `w` from the given side, so both limits can
/// be compared at a pasting point. Dual branches are evaluated at their
/// endpoint parameter rather than by inversion.
StrategyEval eval_one_sided(const Solution& solution, double w, Side side);

/// Interior wealth levels where two branches meet (w_b when positive, and b
/// for consumption above rb when b < w_s).
std::vector<double> pasting_points(const Solution& solution);

/// Investment that minimizes the probability of lifetime ruin:
/// ((mu - r) / sigma^2) (c/r - w) / (p0 - 1), and 0 for w >= c/r.
double pi_min(const MarketParams& params, const DerivedConstants& derived, double w);

/// Copy of `solution` with y_b scaled by (1 + rel). y_0, y_g and w_b are
/// recomputed from the scaled value; y_b0 and y_bg are kept. Throws DomainError
/// if the regime has no y_b.
Solution perturb_yb(const Solution& solution, double rel);

/// Benchmark without a risky asset and without consumption.
struct DeterministicSolution {
  double w_star = 0.0;   ///< buys full insurance below this wealth
  double w_s_det = 0.0;  ///< hb / (r + h)
};

/// Requires h > 0. w_star is 0 when r >= lambda and w_s_det when
/// lambda >= r + h (insurance is bought at every wealth level).
DeterministicSolution solve_deterministic(const MarketParams& params);

/// Requires 0 <= w <= hb / (r + h).
double deterministic_phi(const MarketParams& params, double w);
double deterministic_phi(const MarketParams& params, const DeterministicSolution& det, double w);

}  // namespace bequest
