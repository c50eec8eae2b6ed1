#include "bequest/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bequest/errors.hpp"
#include "bequest/rootfind.hpp"

namespace bequest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr rootfind::RootConfig kDualRoot{1e-15, 1e-15, 400};

// Coefficients shared by the dual branches.
struct Coeffs {
  double pf;  // (mu - r) / sigma^2
  double cr;  // c / r
  double K1, K2, L;
  double A;   // (c - rb) / (r (r + h))
  double W0;  // (c + hb) / (r + h)
  double g1, g2;
  double den;  // beta1 - beta2
};

Coeffs coeffs(const MarketParams& p, const DerivedConstants& d) {
  Coeffs k{};
  k.pf = (p.mu - p.r) / (p.sigma * p.sigma);
  k.cr = p.c / p.r;
  const double span = d.alpha1 - d.alpha2;
  k.K1 = d.alpha1 * (1.0 - d.alpha2) / span;
  k.K2 = d.alpha2 * (d.alpha1 - 1.0) / span;
  k.L = (d.alpha1 - 1.0) * (1.0 - d.alpha2) / span;
  k.A = (p.c - p.r * p.b) / (p.r * (p.r + p.h));
  k.W0 = (p.c + p.h * p.b) / (p.r + p.h);
  k.g1 = g_func(d.beta1, p, d);
  k.g2 = g_func(d.beta2, p, d);
  k.den = d.beta1 - d.beta2;
  return k;
}

struct Values {
  double w, phi, phi_w, phi_ww, pi;
};

// phi = 1 - kappa X^e with X = (top - w) / span.
struct PowerForm {
  double top, span, kappa, e;
};

Values eval_power(const PowerForm& f, double pf, double w) {
  const double x = (f.top - w) / f.span;
  const double xe2 = std::pow(x, f.e - 2.0);
  const double xe1 = xe2 * x;
  return {w, 1.0 - f.kappa * xe1 * x, f.kappa * f.e * xe1 / f.span,
          -f.kappa * f.e * (f.e - 1.0) * xe2 / (f.span * f.span), pf * (f.top - w) / (f.e - 1.0)};
}

// Lower branch of the zero-consumption solution.
Values eval_zero_low(const Solution& s, double pf, double w) {
  const auto& d = s.derived;
  if (w <= 0.0) return {w, 0.0, kInf, -kInf, 0.0};
  const double phi = d.p * (1.0 - d.q) / (d.p - d.q) * std::pow(w / s.w_b, d.q);
  return {w, phi, d.q * phi / w, d.q * (d.q - 1.0) * phi / (w * w), pf * w / (1.0 - d.q)};
}

// Dual branch below the buy level, parametrized by t = log(y / y0) <= 0.
double low_wealth(const Coeffs& k, const DerivedConstants& d, double t) {
  return k.cr * (1.0 - k.K1 * std::exp((d.alpha1 - 1.0) * t) - k.K2 * std::exp((d.alpha2 - 1.0) * t));
}

Values eval_dual_low(const Solution& s, const Coeffs& k, double t) {
  const auto& d = s.derived;
  const double y0 = *s.y_0;
  const double u = std::exp(t);
  const double e1 = std::exp((d.alpha1 - 1.0) * t);
  const double e2 = std::exp((d.alpha2 - 1.0) * t);
  const double jac = k.cr * k.L * (d.alpha1 * e1 - d.alpha2 * e2);
  const double y = y0 * u;
  return {low_wealth(k, d, t), k.cr * k.L * y * (e2 - e1), y, -y / jac, k.pf * jac};
}

// Dual branch below b for c > rb, parametrized by t = log(y / y_g) >= 0.
double mid_wealth(const Coeffs& k, const DerivedConstants& d, double t) {
  const double e1 = std::exp((d.beta1 - 1.0) * t);
  const double e2 = std::exp((d.beta2 - 1.0) * t);
  return k.W0 - k.A * (d.beta1 * k.g2 * e1 - d.beta2 * k.g1 * e2) / k.den;
}

Values eval_dual_mid(const Solution& s, const Coeffs& k, double t) {
  const auto& d = s.derived;
  const double yg = *s.y_g;
  const double v = std::exp(t);
  const double e1 = std::exp((d.beta1 - 1.0) * t);
  const double e2 = std::exp((d.beta2 - 1.0) * t);
  const double curv =
      (d.beta1 * (d.beta1 - 1.0) * k.g2 * e1 + d.beta2 * (1.0 - d.beta2) * k.g1 * e2) / k.den;
  const double level = ((d.beta1 - 1.0) * k.g2 * e1 + (1.0 - d.beta2) * k.g1 * e2) / k.den;
  const double y = yg * v;
  return {mid_wealth(k, d, t), 1.0 - k.A * level * y, y, -y / (k.A * curv), k.pf * k.A * curv};
}

enum class Piece { ZeroLow, Power, DualLow, DualMid };

// Explicit power form of the branch that ends at the safe level.
PowerForm top_power(const Solution& s) {
  const auto& p = s.params;
  const auto& d = s.derived;
  switch (s.regime) {
    case Regime::ZeroConsumption:
      return {d.w_s, d.w_s - s.w_b, d.q * (d.p - 1.0) / (d.p - d.q), d.p};
    case Regime::FullInsuranceBelowSafe:
      return {d.w_s, d.w_s, 1.0, d.p};
    case Regime::BuyLevelBelowBequestCLow:
      return {d.w_s, d.w_s - s.w_b,
              p.lambda / (p.h * d.p) * (d.w_s - s.w_b) / (p.b - s.w_b), d.p};
    case Regime::FullInsuranceBelowBequest:
    case Regime::BuyLevelAboveRb: {
      const double cr = p.c / p.r;
      return {cr, cr - p.b, (cr - p.b) * *s.y_g / d.p0, d.p0};
    }
    case Regime::RuinLimitHZero: {
      const double cr = p.c / p.r;
      return {cr, cr, 1.0, d.p0};
    }
  }
  return {};
}

// Branch that covers w. With `left`, a pasting point belongs to the branch below it.
Piece piece_at(const Solution& s, double w, bool left) {
  const auto below = [left](double w_, double edge) { return left ? w_ <= edge : w_ < edge; };
  switch (s.regime) {
    case Regime::ZeroConsumption:
      return below(w, s.w_b) ? Piece::ZeroLow : Piece::Power;
    case Regime::BuyLevelBelowBequestCLow:
      return below(w, s.w_b) ? Piece::DualLow : Piece::Power;
    case Regime::FullInsuranceBelowBequest:
      return below(w, s.params.b) ? Piece::DualMid : Piece::Power;
    case Regime::BuyLevelAboveRb:
      if (below(w, s.w_b)) return Piece::DualLow;
      return below(w, s.params.b) ? Piece::DualMid : Piece::Power;
    case Regime::FullInsuranceBelowSafe:
    case Regime::RuinLimitHZero:
      return Piece::Power;
  }
  return Piece::Power;
}

double upper_mid_parameter(const Solution& s) {
  return s.regime == Regime::BuyLevelAboveRb ? std::log(*s.y_bg) : -std::log(*s.y_g0);
}

double invert_low(const Solution& s, const Coeffs& k, double w) {
  const double t_lo = std::log(*s.y_b0);
  if (w == 0.0) return 0.0;
  if (w == s.w_b) return t_lo;
  auto f = [&](double t) { return low_wealth(k, s.derived, t) - w; };
  const auto bracket = rootfind::make_bracket(f, t_lo, 0.0);
  if (!bracket.valid()) {
    throw DomainError("invert_dual: wealth " + std::to_string(w) + " is outside the lower dual branch");
  }
  return rootfind::solve_bracketed(f, bracket, kDualRoot);
}

double invert_mid(const Solution& s, const Coeffs& k, double w) {
  const double t_hi = upper_mid_parameter(s);
  if (w == s.params.b) return 0.0;
  if (s.regime == Regime::BuyLevelAboveRb ? w == s.w_b : w == 0.0) return t_hi;
  auto f = [&](double t) { return mid_wealth(k, s.derived, t) - w; };
  const auto bracket = rootfind::make_bracket(f, 0.0, t_hi);
  if (!bracket.valid()) {
    throw DomainError("invert_dual: wealth " + std::to_string(w) + " is outside the upper dual branch");
  }
  return rootfind::solve_bracketed(f, bracket, kDualRoot);
}

Values eval_piece(const Solution& s, const Coeffs& k, Piece piece, double w) {
  switch (piece) {
    case Piece::ZeroLow:
      return eval_zero_low(s, k.pf, w);
    case Piece::Power:
      return eval_power(top_power(s), k.pf, w);
    case Piece::DualLow: {
      Values v = eval_dual_low(s, k, invert_low(s, k, w));
      v.w = w;
      return v;
    }
    case Piece::DualMid: {
      Values v = eval_dual_mid(s, k, invert_mid(s, k, w));
      v.w = w;
      return v;
    }
  }
  return {};
}

StrategyEval to_eval(const Solution& s, const Values& v, bool insured) {
  StrategyEval out;
  out.w = v.w;
  out.y = v.phi_w;
  out.phi = v.phi;
  out.phi_w = v.phi_w;
  out.phi_ww = v.phi_ww;
  out.pi_star = v.pi;
  out.D_star = insured ? s.params.b - v.w : 0.0;
  return out;
}

bool insured_at(const Solution& s, double w) {
  return w >= s.w_b && w <= std::min(s.w_s(), s.params.b);
}

void require_regime(bool ok, const char* what) {
  if (!ok) throw RegimeMismatch(what);
}

Solution base_solution(Regime regime, const MarketParams& params, const DerivedConstants& derived) {
  Solution s;
  s.regime = regime;
  s.params = params;
  s.derived = derived;
  return s;
}

// Sign change of f on t in (-inf, 0]: walks t = -1, -2, -4, ... until f(t) < 0.
template <typename F>
rootfind::Bracket bracket_below_zero(F&& f) {
  double hi = 0.0, f_hi = f(0.0);
  for (double t = -1.0; t > -1e4; t *= 2.0) {
    const double ft = f(t);
    if (ft < 0.0) return rootfind::Bracket{t, hi, ft, f_hi};
    hi = t;
    f_hi = ft;
  }
  throw RootError(RootError::Kind::BracketNotFound, "no sign change for log argument above -1e4");
}

// Sign change of f on t in [0, inf): walks t = 1, 2, 4, ... until f(t) > 0.
template <typename F>
rootfind::Bracket bracket_above_zero(F&& f, double t_start) {
  double lo = t_start, f_lo = f(t_start);
  for (double t = std::max(2.0 * t_start, 1.0); t < 1e4; t *= 2.0) {
    const double ft = f(t);
    if (ft > 0.0) return rootfind::Bracket{lo, t, f_lo, ft};
    lo = t;
    f_lo = ft;
  }
  throw RootError(RootError::Kind::BracketNotFound, "no sign change for log argument below 1e4");
}

// Shared tail of the two buy-level constructions: w_b, y_b and y_0 from y_b0.
void finish_buy_level(Solution& s, const Coeffs& k, double t_b0) {
  s.y_b0 = std::exp(t_b0);
  s.w_b = low_wealth(k, s.derived, t_b0);
  s.y_b = s.params.lambda / (s.params.h * (s.params.b - s.w_b));
  s.y_0 = *s.y_b / *s.y_b0;
}

}  // namespace

Solution solve(const MarketParams& params) {
  const DerivedConstants derived = derive_constants(params);
  switch (classify_regime(params, derived)) {
    case Regime::ZeroConsumption:
      return solve_zero_consumption(params, derived);
    case Regime::FullInsuranceBelowSafe:
      return solve_full_insurance(params, derived);
    case Regime::BuyLevelBelowBequestCLow:
      return solve_buy_level_low_c(params, derived);
    case Regime::FullInsuranceBelowBequest:
      return solve_full_insurance_above_rb(params, derived);
    case Regime::BuyLevelAboveRb:
      return solve_buy_level_above_rb(params, derived);
    case Regime::RuinLimitHZero:
      return solve_ruin_limit(params, derived);
  }
  throw Error("solve: unknown regime");
}

Solution solve_zero_consumption(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.c == 0.0 && params.h > 0.0, "zero-consumption solution needs c = 0 and h > 0");
  Solution s = base_solution(Regime::ZeroConsumption, params, derived);
  s.w_b = (1.0 - derived.q) / (derived.p - derived.q) * derived.w_s;
  return s;
}

Solution solve_full_insurance(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.h > 0.0 && params.h <= derived.insurance_threshold &&
                     params.c >= derived.C1 && params.c <= params.r * params.b && params.c > 0.0,
                 "full-insurance solution needs h <= r lambda / (r + m) and C1 <= c <= rb");
  return base_solution(Regime::FullInsuranceBelowSafe, params, derived);
}

Solution solve_buy_level_low_c(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.h > 0.0 && params.c > 0.0 && params.c <= params.r * params.b &&
                     params.c < derived.C1,
                 "buy-level solution needs 0 < c <= rb and c < C1");
  Solution s = base_solution(Regime::BuyLevelBelowBequestCLow, params, derived);
  const Coeffs k = coeffs(params, derived);
  const auto& d = derived;
  const double rhs = (d.beta1 - 1.0) * (k.cr - d.w_s);
  auto f = [&](double t) {
    return k.cr * (k.K1 * (d.beta1 - d.alpha1) * std::exp((d.alpha1 - 1.0) * t) +
                   k.K2 * (d.beta1 - d.alpha2) * std::exp((d.alpha2 - 1.0) * t)) -
           rhs;
  };
  const double t_b0 = rootfind::solve_bracketed(f, bracket_below_zero(f), kDualRoot);
  finish_buy_level(s, k, t_b0);
  return s;
}

Solution solve_full_insurance_above_rb(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.h > 0.0 && params.c > params.r * params.b &&
                     (params.h <= derived.insurance_threshold || params.c >= derived.C2.value_or(kInf)),
                 "full-insurance solution above rb needs c > rb and (h <= r lambda / (r + m) or c >= C2)");
  Solution s = base_solution(Regime::FullInsuranceBelowBequest, params, derived);
  const Coeffs k = coeffs(params, derived);
  const auto& d = derived;
  // y_g0 = 1 / v where the dual wealth map reaches 0.
  auto f = [&](double t) { return -mid_wealth(k, d, t); };
  const double t = rootfind::solve_bracketed(f, bracket_above_zero(f, 0.0), kDualRoot);
  const double yg0 = std::exp(-t);
  s.y_g0 = yg0;
  s.y_0 = 1.0 / (k.W0 * (d.beta1 - 1.0) / d.beta1 +
                 k.A * k.g1 / d.beta1 * std::exp((1.0 - d.beta2) * -t));
  s.y_g = *s.y_0 * yg0;
  s.w_b = 0.0;
  return s;
}

Solution solve_buy_level_above_rb(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.h > derived.insurance_threshold && params.c > params.r * params.b &&
                     derived.C2 && params.c < *derived.C2,
                 "buy-level solution above rb needs h > r lambda / (r + m) and rb < c < C2");
  Solution s = base_solution(Regime::BuyLevelAboveRb, params, derived);
  const Coeffs k = coeffs(params, derived);
  const auto& d = derived;
  const double r = params.r, h = params.h, lambda = params.lambda;
  const double l11 = ell_func(d.alpha1, d.beta1, params);
  const double l12 = ell_func(d.alpha1, d.beta2, params);
  const double l21 = ell_func(d.alpha2, d.beta1, params);
  const double l22 = ell_func(d.alpha2, d.beta2, params);
  const double a1m = d.alpha1 - 1.0, ma2 = 1.0 - d.alpha2;

  // The first bracket vanishes identically at x = 1, so it is written as a
  // sum of expm1 terms in t = log x.
  auto first = [&](double t) {
    return -l11 * k.g2 / k.den * std::expm1((d.beta1 - 1.0) * t) +
           l12 * k.g1 / k.den * std::expm1((d.beta2 - 1.0) * t);
  };
  auto second = [&](double t) {
    return h * (ma2 + r / lambda * d.alpha2) + l21 * k.g2 / k.den * std::exp((d.beta1 - 1.0) * t) -
           l22 * k.g1 / k.den * std::exp((d.beta2 - 1.0) * t);
  };
  const double log_const = (d.alpha1 - d.alpha2) * std::log((params.c - r * params.b) / (params.c * (r + h))) -
                           a1m * std::log(a1m) - ma2 * std::log(ma2);
  auto f = [&](double t) {
    return log_const + a1m * std::log(first(t)) + ma2 * std::log(second(t));
  };
  double t_lo = 1.0;
  while (f(t_lo) >= 0.0 && t_lo > 1e-300) t_lo *= 0.5;
  const double t_bg = rootfind::solve_bracketed(f, bracket_above_zero(f, t_lo), kDualRoot);
  s.y_bg = std::exp(t_bg);

  const double t_b0 = std::log(k.A * second(t_bg) / (k.cr * ma2)) / a1m;
  finish_buy_level(s, k, t_b0);
  s.y_g = *s.y_b / *s.y_bg;
  return s;
}

Solution solve_ruin_limit(const MarketParams& params, const DerivedConstants& derived) {
  require_regime(params.h == 0.0 && params.c > 0.0, "ruin-limit solution needs h = 0 and c > 0");
  return base_solution(Regime::RuinLimitHZero, params, derived);
}

StrategyEval eval(const Solution& solution, double w) {
  const double w_s = solution.w_s();
  if (!(w >= 0.0 && w <= w_s)) {
    throw DomainError("eval: wealth " + std::to_string(w) + " outside [0, " + std::to_string(w_s) + "]");
  }
  if (w == w_s) {
    StrategyEval out;
    out.w = w;
    out.phi = 1.0;
    out.D_star = insured_at(solution, w) ? solution.params.b - w : 0.0;
    return out;
  }
  const Coeffs k = coeffs(solution.params, solution.derived);
  const Values v = eval_piece(solution, k, piece_at(solution, w, false), w);
  return to_eval(solution, v, insured_at(solution, w));
}

StrategyEval eval_clamped(const Solution& solution, double w) {
  if (w < solution.w_s()) return eval(solution, w);
  StrategyEval out;
  out.w = w;
  out.phi = 1.0;
  out.D_star = w >= solution.w_b ? std::max(solution.params.b - w, 0.0) : 0.0;
  return out;
}

bool on_dual_branch(const Solution& solution, double w) {
  if (!(w >= 0.0 && w < solution.w_s())) return false;
  const Piece piece = piece_at(solution, w, false);
  return piece == Piece::DualLow || piece == Piece::DualMid;
}

double invert_dual(const Solution& solution, double w) {
  if (!on_dual_branch(solution, w)) {
    throw DomainError("invert_dual: wealth " + std::to_string(w) + " is not on a dual branch");
  }
  const Coeffs k = coeffs(solution.params, solution.derived);
  if (piece_at(solution, w, false) == Piece::DualLow) {
    return *solution.y_0 * std::exp(invert_low(solution, k, w));
  }
  return *solution.y_g * std::exp(invert_mid(solution, k, w));
}

StrategyEval eval_one_sided(const Solution& solution, double w, Side side) {
  const bool left = side == Side::Left;
  const Coeffs k = coeffs(solution.params, solution.derived);
  const Piece piece = piece_at(solution, w, left);
  Values v;
  if (piece == Piece::DualLow && w == solution.w_b) {
    v = eval_dual_low(solution, k, std::log(*solution.y_b0));
  } else if (piece == Piece::DualMid && w == solution.params.b) {
    v = eval_dual_mid(solution, k, 0.0);
  } else if (piece == Piece::DualMid && w == solution.w_b) {
    v = eval_dual_mid(solution, k, upper_mid_parameter(solution));
  } else {
    v = eval_piece(solution, k, piece, w);
  }
  v.w = w;
  const bool insured = left ? (w > solution.w_b && w <= std::min(solution.w_s(), solution.params.b))
                            : insured_at(solution, w);
  return to_eval(solution, v, insured);
}

std::vector<double> pasting_points(const Solution& solution) {
  std::vector<double> points;
  switch (solution.regime) {
    case Regime::ZeroConsumption:
    case Regime::BuyLevelBelowBequestCLow:
      points.push_back(solution.w_b);
      break;
    case Regime::FullInsuranceBelowBequest:
      points.push_back(solution.params.b);
      break;
    case Regime::BuyLevelAboveRb:
      points.push_back(solution.w_b);
      points.push_back(solution.params.b);
      break;
    case Regime::FullInsuranceBelowSafe:
    case Regime::RuinLimitHZero:
      break;
  }
  return points;
}

double pi_min(const MarketParams& params, const DerivedConstants& derived, double w) {
  const double cr = params.c / params.r;
  if (w >= cr) return 0.0;
  return (params.mu - params.r) / (params.sigma * params.sigma) * (cr - w) / (derived.p0 - 1.0);
}

Solution perturb_yb(const Solution& solution, double rel) {
  if (!solution.y_b) throw DomainError("perturb_yb: regime " + std::string(to_string(solution.regime)) + " has no y_b");
  Solution out = solution;
  out.y_b = *solution.y_b * (1.0 + rel);
  out.y_0 = *out.y_b / *out.y_b0;
  if (out.y_bg) out.y_g = *out.y_b / *out.y_bg;
  out.w_b = out.params.b - out.params.lambda / (out.params.h * *out.y_b);
  return out;
}

DeterministicSolution solve_deterministic(const MarketParams& params) {
  params.validate();
  if (!(params.h > 0.0)) throw DomainError("deterministic benchmark needs h > 0");
  const double r = params.r, h = params.h, lambda = params.lambda;
  DeterministicSolution det;
  det.w_s_det = h * params.b / (r + h);
  if (r >= lambda) return det;
  if (lambda >= r + h) {
    det.w_star = det.w_s_det;
    return det;
  }
  const double a = lambda / (r + h), k = lambda / r;
  // Insuring branch minus non-insuring branch, in x = w / w_s. Positive below
  // the switch point and negative above it.
  auto diff = [&](double x) { return -std::expm1(a * std::log1p(-x)) - std::pow(x, k); };
  double lo = 0.5, hi = 0.5;
  if (diff(0.5) < 0.0) {
    while (diff(lo) <= 0.0) lo *= 0.5;
  } else {
    double gap = 0.25;
    hi = 0.75;
    while (diff(hi) >= 0.0 && gap > 1e-300) {
      gap *= 0.5;
      hi = 1.0 - gap;
    }
    lo = 0.5;
  }
  const double x = rootfind::solve_bracketed(diff, rootfind::make_bracket(diff, lo, hi),
                                             rootfind::RootConfig{1e-14, 1e-300, 400});
  det.w_star = x * det.w_s_det;
  return det;
}

double deterministic_phi(const MarketParams& params, const DeterministicSolution& det, double w) {
  if (!(w >= 0.0 && w <= det.w_s_det)) {
    throw DomainError("deterministic_phi: wealth outside [0, hb / (r + h)]");
  }
  const double x = w / det.w_s_det;
  if (w < det.w_star) return -std::expm1(params.lambda / (params.r + params.h) * std::log1p(-x));
  return std::pow(x, params.lambda / params.r);
}

double deterministic_phi(const MarketParams& params, double w) {
  return deterministic_phi(params, solve_deterministic(params), w);
}

}  // namespace bequest
