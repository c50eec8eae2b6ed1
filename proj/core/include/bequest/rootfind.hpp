#pragma once

// Bracketed scalar root finding. Every transcendental equation of the solver
// is monotone on a known interval, so the methods here never leave the bracket.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

#include "bequest/errors.hpp"

namespace bequest::rootfind {

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;

  /// lo < hi and the endpoint values differ in sign (or one is an exact root).
  bool valid() const noexcept {
    if (!(lo < hi)) return false;
    if (f_lo == 0.0 || f_hi == 0.0) return true;
    return std::signbit(f_lo) != std::signbit(f_hi);
  }
};

struct RootConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_iter = 200;
};

template <typename F>
concept ScalarFunction = std::regular_invocable<F, double> &&
                         std::convertible_to<std::invoke_result_t<F, double>, double>;

template <ScalarFunction F>
Bracket make_bracket(F&& f, double lo, double hi) {
  return Bracket{lo, hi, static_cast<double>(f(lo)), static_cast<double>(f(hi))};
}

/// Bisection with Illinois false-position steps. A false-position step is only
/// taken when the previous step at least halved the bracket, so the width
/// halves at least every second iteration whatever the shape of f. Converged
/// when the width is at most abs_tol + rel_tol * |midpoint|; returns the
/// midpoint of the final bracket (or an exact root if one is hit).
template <ScalarFunction F>
double solve_bracketed(F&& f, Bracket bracket, const RootConfig& cfg = {}) {
  if (!bracket.valid() || std::isnan(bracket.f_lo) || std::isnan(bracket.f_hi)) {
    throw RootError(RootError::Kind::NoSignChange,
                    "solve_bracketed: no sign change on [" + std::to_string(bracket.lo) + ", " +
                        std::to_string(bracket.hi) + "]");
  }
  if (bracket.f_lo == 0.0) return bracket.lo;
  if (bracket.f_hi == 0.0) return bracket.hi;

  double lo = bracket.lo, hi = bracket.hi;
  double f_lo = bracket.f_lo, f_hi = bracket.f_hi;
  double prev_width = hi - lo;
  int last_moved = 0;  // +1: lo replaced last, -1: hi replaced last

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double width = hi - lo;
    if (width <= cfg.abs_tol + cfg.rel_tol * std::abs(mid)) return mid;

    double x = mid;
    if (std::isfinite(f_lo) && std::isfinite(f_hi) && width <= 0.5 * prev_width) {
      const double candidate = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (candidate > lo && candidate < hi) x = candidate;
    }
    prev_width = width;

    const double fx = f(x);
    if (fx == 0.0) return x;
    if (std::isnan(fx)) {
      throw RootError(RootError::Kind::NoSignChange,
                      "solve_bracketed: function is NaN at " + std::to_string(x));
    }
    if (std::signbit(fx) == std::signbit(f_lo)) {
      lo = x;
      f_lo = fx;
      if (last_moved > 0) f_hi *= 0.5;  // Illinois: damp the stale endpoint
      last_moved = 1;
    } else {
      hi = x;
      f_hi = fx;
      if (last_moved < 0) f_lo *= 0.5;
      last_moved = -1;
    }
  }
  throw RootError(RootError::Kind::MaxIterExceeded,
                  "solve_bracketed: iteration cap reached before convergence");
}

/// Grows the upper endpoint geometrically from `lo` (lo, lo*growth, ...) until
/// f changes sign, returning the last two points as the bracket. Gives up at
/// 1e6 * lo.
template <ScalarFunction F>
Bracket expand_bracket_up(F&& f, double lo, double growth = 2.0) {
  if (!(growth > 1.0) || !(lo > 0.0)) {
    throw RootError(RootError::Kind::BracketNotFound,
                    "expand_bracket_up: need lo > 0 and growth > 1");
  }
  const double f_lo = f(lo);
  if (f_lo == 0.0) return Bracket{lo, lo * growth, f_lo, static_cast<double>(f(lo * growth))};
  const double cap = 1e6 * lo;
  double a = lo, fa = f_lo;
  while (a < cap) {
    const double b = std::min(a * growth, cap);
    const double fb = f(b);
    if (fb == 0.0 || std::signbit(fb) != std::signbit(f_lo)) return Bracket{a, b, fa, fb};
    a = b;
    fa = fb;
  }
  throw RootError(RootError::Kind::BracketNotFound,
                  "expand_bracket_up: no sign change below " + std::to_string(cap));
}

}  // namespace bequest::rootfind
