#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bequest/errors.hpp"
#include "bequest/verify.hpp"

namespace bequest {

double hjb_residual(const MarketParams& params, const DerivedConstants& derived, double w_b,
                    const ValuePoint& pt) {
  const double w = pt.w;
  const bool insured = w >= w_b && w <= std::min(derived.w_s, params.b);
  const double drift = params.r * w - params.c - (insured ? params.h * (params.b - w) : 0.0);
  double invest;
  if (pt.phi_ww < 0.0) {
    invest = derived.m * pt.phi_w * pt.phi_w / pt.phi_ww;
  } else {
    invest = pt.phi_w == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return params.lambda * (pt.phi - (w >= w_b ? 1.0 : 0.0)) - drift * pt.phi_w + invest;
}

double hjb_residual(const Solution& solution, double w) {
  if (!(w > 0.0 && w < solution.w_s())) {
    throw DomainError("hjb_residual: wealth " + std::to_string(w) + " is not interior");
  }
  for (double x : pasting_points(solution)) {
    if (w == x) throw DomainError("hjb_residual: wealth " + std::to_string(w) + " is a pasting point");
  }
  const StrategyEval e = eval(solution, w);
  return hjb_residual(solution.params, solution.derived, solution.w_b,
                      ValuePoint{w, e.phi, e.phi_w, e.phi_ww});
}

double PastingGap::max_gap() const { return std::max({d_phi, d_phi_w, d_phi_ww}); }

std::vector<PastingGap> smooth_pasting_check(const Solution& solution) {
  std::vector<PastingGap> gaps;
  for (double x : pasting_points(solution)) {
    const StrategyEval lo = eval_one_sided(solution, x, Side::Left);
    const StrategyEval hi = eval_one_sided(solution, x, Side::Right);
    gaps.push_back({x, std::abs(lo.phi - hi.phi), std::abs(lo.phi_w - hi.phi_w),
                    std::abs(lo.phi_ww - hi.phi_ww)});
  }
  return gaps;
}

std::vector<double> interior_grid(const Solution& solution, int n) {
  const auto skip = pasting_points(solution);
  const double w_s = solution.w_s();
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 1; static_cast<int>(grid.size()) < n; ++i) {
    const double w = w_s * i / (n + 1 + static_cast<double>(skip.size()));
    if (std::find(skip.begin(), skip.end(), w) != skip.end()) continue;
    grid.push_back(w);
  }
  return grid;
}

}  // namespace bequest
