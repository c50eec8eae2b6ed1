#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bequest/model.hpp"

namespace bequest::testing {

inline MarketParams base_params() { return MarketParams{0.03, 0.06, 0.20, 0.04, 0.05, 1.0, 0.0}; }

struct RegimeCase {
  std::string name;
  MarketParams params;
  Regime regime;
};

/// One parameter set per h > 0 regime, all derived from the base parameters.
inline std::vector<RegimeCase> regime_cases() {
  const MarketParams p = base_params();
  return {
      {"ZeroConsumption", p, Regime::ZeroConsumption},
      {"FullInsuranceBelowSafe", p.with_h(0.02).with_c(0.02), Regime::FullInsuranceBelowSafe},
      {"BuyLevelBelowBequestCLow", p.with_c(0.02), Regime::BuyLevelBelowBequestCLow},
      {"FullInsuranceBelowBequest", p.with_c(0.07), Regime::FullInsuranceBelowBequest},
      {"BuyLevelAboveRb", p.with_c(0.05), Regime::BuyLevelAboveRb},
  };
}

/// Draws parameters from the ranges r in [0.005, 0.08], mu - r in [0.01, 0.08],
/// sigma in [0.05, 0.5], lambda in [0.005, 0.2], h in (0, 1], b = 1 and
/// c in [0, 2 max(rb, C1)].
class ParamSampler {
 public:
  explicit ParamSampler(std::uint64_t seed) : rng_(seed) {}

  MarketParams draw_without_c() {
    MarketParams p;
    p.r = uniform(0.005, 0.08);
    p.mu = p.r + uniform(0.01, 0.08);
    p.sigma = uniform(0.05, 0.5);
    p.lambda = uniform(0.005, 0.2);
    p.h = 1.0 - uniform(0.0, 1.0);  // (0, 1]
    p.b = 1.0;
    p.c = 0.0;
    return p;
  }

  MarketParams draw() {
    MarketParams p = draw_without_c();
    const DerivedConstants d = derive_constants(p);
    p.c = uniform(0.0, 2.0 * std::max(p.r * p.b, d.C1));
    return p;
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Defining equations written out in direct power form. The library solves
// them in log form; these serve as independent back-substitution checks.

struct Exponents {
  double m, a1, a2, b1, b2, p, p0;
};

inline Exponents exponents_from_quadratics(const MarketParams& p) {
  Exponents e{};
  e.m = 0.5 * std::pow((p.mu - p.r) / p.sigma, 2);
  const double k1 = p.r - p.lambda + e.m;
  const double k2 = p.r + p.h - p.lambda + e.m;
  e.a1 = (k1 + std::sqrt(k1 * k1 + 4.0 * e.m * p.lambda)) / (2.0 * e.m);
  e.a2 = (k1 - std::sqrt(k1 * k1 + 4.0 * e.m * p.lambda)) / (2.0 * e.m);
  e.b1 = (k2 + std::sqrt(k2 * k2 + 4.0 * e.m * p.lambda)) / (2.0 * e.m);
  e.b2 = (k2 - std::sqrt(k2 * k2 + 4.0 * e.m * p.lambda)) / (2.0 * e.m);
  e.p = e.b1 / (e.b1 - 1.0);
  e.p0 = e.a1 / (e.a1 - 1.0);
  return e;
}

inline double g_direct(const MarketParams& p, const Exponents& e, double beta) {
  return p.r - (p.r + p.h) * beta / e.a1 + p.h * beta;
}

inline double ell_direct(const MarketParams& p, double alpha, double beta) {
  return beta - (p.h * beta / p.lambda + 1.0) * alpha;
}

/// Low-consumption buy ratio equation, left minus right, at y_b0.
inline double low_c_ratio_residual(const MarketParams& p, const Exponents& e, double y_b0) {
  const double cr = p.c / p.r;
  const double ws = (p.c + p.h * p.b) / (p.r + p.h);
  const double den = e.a1 - e.a2;
  const double lhs = cr * (e.a1 * (1 - e.a2) * (e.b1 - e.a1) / den * std::pow(y_b0, e.a1 - 1) +
                           e.a2 * (e.a1 - 1) * (e.b1 - e.a2) / den * std::pow(y_b0, e.a2 - 1));
  return lhs - (e.b1 - 1) * (cr - ws);
}

/// lambda / (h y_b) from y_b0 (shared by both buy-level regimes).
inline double inverse_yb_direct(const MarketParams& p, const Exponents& e, double y_b0) {
  const double den = e.a1 - e.a2;
  return p.b + p.c / p.r *
                   (e.a1 * (1 - e.a2) / den * std::pow(y_b0, e.a1 - 1) +
                    e.a2 * (e.a1 - 1) / den * std::pow(y_b0, e.a2 - 1) - 1.0);
}

/// Wealth on the low dual branch as a function of y / y_0.
inline double low_branch_wealth(const MarketParams& p, const Exponents& e, double ratio) {
  const double cr = p.c / p.r;
  const double den = e.a1 - e.a2;
  return cr - cr * (e.a1 * (1 - e.a2) / den * std::pow(ratio, e.a1 - 1) +
                    e.a2 * (e.a1 - 1) / den * std::pow(ratio, e.a2 - 1));
}

/// phi on the low dual branch at y with scale y_0.
inline double low_branch_phi(const MarketParams& p, const Exponents& e, double y, double y0) {
  const double ratio = y / y0;
  return p.c / p.r * (e.a1 - 1) * (1 - e.a2) / (e.a1 - e.a2) *
         (-std::pow(ratio, e.a1) + std::pow(ratio, e.a2)) * y0;
}

/// Wealth on the middle dual branch as a function of y / y_g.
inline double mid_branch_wealth(const MarketParams& p, const Exponents& e, double ratio) {
  const double A = (p.c - p.r * p.b) / (p.r * (p.r + p.h));
  const double den = e.b1 - e.b2;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  return (p.c + p.h * p.b) / (p.r + p.h) -
         A * (e.b1 / den * g2 * std::pow(ratio, e.b1 - 1) - e.b2 / den * g1 * std::pow(ratio, e.b2 - 1));
}

/// phi on the middle dual branch at y with scale y_g.
inline double mid_branch_phi(const MarketParams& p, const Exponents& e, double y, double yg) {
  const double ratio = y / yg;
  const double A = (p.c - p.r * p.b) / (p.r * (p.r + p.h));
  const double den = e.b1 - e.b2;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  return 1.0 - A * ((e.b1 - 1) / den * g2 * std::pow(ratio, e.b1) +
                    (1 - e.b2) / den * g1 * std::pow(ratio, e.b2)) * yg;
}

/// Threshold equation for C2: left side and right side at consumption c.
inline std::pair<double, double> c2_sides(MarketParams p, const Exponents& e, double c) {
  p.c = c;
  const double A = (c - p.r * p.b) / (p.r * (p.r + p.h));
  const double W0 = (c + p.h * p.b) / (p.r + p.h);
  const double hb_l = p.h * p.b / p.lambda;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  const double inner = A * g2 / (hb_l * e.b2 + W0 * (1 - e.b2));
  const double lhs = A * std::pow(inner, (1 - e.b2) / (e.b1 - 1));
  const double rhs = (hb_l * e.b1 - W0 * (e.b1 - 1)) / g1;
  return {lhs, rhs};
}

/// Middle ratio equation, left minus right, at y_g0.
inline double mid_ratio_residual(const MarketParams& p, const Exponents& e, double y_g0) {
  const double A = (p.c - p.r * p.b) / (p.r * (p.r + p.h));
  const double den = e.b1 - e.b2;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  const double lhs = A * (e.b1 / den * g2 * std::pow(y_g0, 1 - e.b1) -
                          e.b2 / den * g1 * std::pow(y_g0, 1 - e.b2));
  return lhs - (p.c + p.h * p.b) / (p.r + p.h);
}

/// Right side of the unique-root equation for y_bg (target value 1).
inline double ybg_equation(const MarketParams& p, const Exponents& e, double x) {
  const double den = e.b1 - e.b2;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  const double first = p.h * ((e.a1 - 1) - p.r / p.lambda * e.a1) -
                       ell_direct(p, e.a1, e.b1) * g2 / den * std::pow(x, e.b1 - 1) +
                       ell_direct(p, e.a1, e.b2) * g1 / den * std::pow(x, e.b2 - 1);
  const double second = p.h * ((1 - e.a2) + p.r / p.lambda * e.a2) +
                        ell_direct(p, e.a2, e.b1) * g2 / den * std::pow(x, e.b1 - 1) -
                        ell_direct(p, e.a2, e.b2) * g1 / den * std::pow(x, e.b2 - 1);
  return std::pow((p.c - p.r * p.b) / (p.c * (p.r + p.h)), e.a1 - e.a2) *
         std::pow(1 / (e.a1 - 1), e.a1 - 1) * std::pow(1 / (1 - e.a2), 1 - e.a2) *
         std::pow(first, e.a1 - 1) * std::pow(second, 1 - e.a2);
}

/// y_b0 from y_bg in the buy-level regime above rb.
inline double yb0_from_ybg(const MarketParams& p, const Exponents& e, double ybg) {
  const double A = (p.c - p.r * p.b) / (p.r * (p.r + p.h));
  const double den = e.b1 - e.b2;
  const double g1 = g_direct(p, e, e.b1), g2 = g_direct(p, e, e.b2);
  const double bracket = p.h * ((1 - e.a2) + p.r / p.lambda * e.a2) +
                         ell_direct(p, e.a2, e.b1) * g2 / den * std::pow(ybg, e.b1 - 1) -
                         ell_direct(p, e.a2, e.b2) * g1 / den * std::pow(ybg, e.b2 - 1);
  return std::pow(A * bracket / (p.c / p.r * (1 - e.a2)), 1 / (e.a1 - 1));
}

/// Plain bisection on [lo, hi]; the oracle for every independent root below.
template <typename F>
double bisect(F f, double lo, double hi, int iters = 200) {
  double f_lo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bequest::testing
