#include "bequest/model.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "bequest/errors.hpp"
#include "bequest/rootfind.hpp"

namespace bequest {

namespace {

void require(bool ok, const char* field, const char* message) {
  if (!ok) throw ValidationError(field, message);
}

// Roots of m x^2 - k x - lambda = 0, larger first, without cancellation.
std::pair<double, double> dual_exponents(double m, double k, double lambda) {
  const double s = std::sqrt(k * k + 4.0 * m * lambda);
  if (k >= 0.0) {
    const double big = (k + s) / (2.0 * m);
    return {big, -lambda / (m * big)};
  }
  const double small = (k - s) / (2.0 * m);
  return {-lambda / (m * small), small};
}

constexpr std::array<std::pair<Regime, std::string_view>, 6> kRegimeNames{{
    {Regime::ZeroConsumption, "ZeroConsumption"},
    {Regime::FullInsuranceBelowSafe, "FullInsuranceBelowSafe"},
    {Regime::BuyLevelBelowBequestCLow, "BuyLevelBelowBequestCLow"},
    {Regime::FullInsuranceBelowBequest, "FullInsuranceBelowBequest"},
    {Regime::BuyLevelAboveRb, "BuyLevelAboveRb"},
    {Regime::RuinLimitHZero, "RuinLimitHZero"},
}};

}  // namespace

void MarketParams::validate() const {
  require(std::isfinite(r) && r > 0.0, "r", "riskless rate must be positive and finite");
  require(std::isfinite(mu) && mu > r, "mu", "risky drift must exceed the riskless rate");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma", "volatility must be positive");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda", "hazard rate must be positive");
  require(std::isfinite(h) && h >= 0.0, "h", "premium rate must be non-negative");
  require(std::isfinite(b) && b > 0.0, "b", "bequest goal must be positive");
  require(std::isfinite(c) && c >= 0.0, "c", "consumption rate must be non-negative");
  require(!(h == 0.0 && c == 0.0), "c",
          "h = 0 with c = 0 is degenerate (free insurance and no ruin risk)");
}

std::string_view to_string(Regime regime) noexcept {
  for (const auto& [tag, name] : kRegimeNames) {
    if (tag == regime) return name;
  }
  return "Unknown";
}

std::optional<Regime> regime_from_string(std::string_view name) noexcept {
  for (const auto& [tag, label] : kRegimeNames) {
    if (label == name) return tag;
  }
  return std::nullopt;
}

DerivedConstants derive_constants(const MarketParams& params) {
  params.validate();
  const auto& [r, mu, sigma, lambda, h, b, c] = params;

  DerivedConstants d;
  const double sharpe = (mu - r) / sigma;
  d.m = 0.5 * sharpe * sharpe;

  const double a = r + lambda + d.m;
  const double root_a = std::sqrt(a * a - 4.0 * r * lambda);
  d.q = 2.0 * lambda / (a + root_a);
  d.p0 = (a + root_a) / (2.0 * r);

  const double bb = r + h + lambda + d.m;
  d.p = (bb + std::sqrt(bb * bb - 4.0 * (r + h) * lambda)) / (2.0 * (r + h));

  std::tie(d.alpha1, d.alpha2) = dual_exponents(d.m, r - lambda + d.m, lambda);
  std::tie(d.beta1, d.beta2) = dual_exponents(d.m, r + h - lambda + d.m, lambda);

  d.w_s = (c <= r * b) ? (c + h * b) / (r + h) : c / r;
  d.C1 = h * b * ((r + h) * d.p / lambda - 1.0);
  d.insurance_threshold = r * lambda / (r + d.m);
  if (h > d.insurance_threshold) d.C2 = find_C2(params, d);
  return d;
}

double g_func(double beta, const MarketParams& params, const DerivedConstants& derived) {
  return params.r - (params.r + params.h) * beta / derived.alpha1 + params.h * beta;
}

double ell_func(double alpha, double beta, const MarketParams& params) {
  return beta - (params.h * beta / params.lambda + 1.0) * alpha;
}

double c2_equation_residual(const MarketParams& params, const DerivedConstants& d, double c) {
  const auto& [r, mu, sigma, lambda, h, b, c_unused] = params;
  (void)mu, (void)sigma, (void)c_unused;
  const double scale = (c - r * b) / (r * (r + h));
  const double w_s = (c + h * b) / (r + h);
  const double hb_lambda = h * b / lambda;
  const double g1 = g_func(d.beta1, params, d);
  const double g2 = g_func(d.beta2, params, d);

  const double inner = scale * g2 / (hb_lambda * d.beta2 + w_s * (1.0 - d.beta2));
  const double lhs = scale * std::pow(inner, (1.0 - d.beta2) / (d.beta1 - 1.0));
  const double rhs = (hb_lambda * d.beta1 - w_s * (d.beta1 - 1.0)) / g1;
  return lhs - rhs;
}

double find_C2(const MarketParams& params, const DerivedConstants& derived) {
  if (!(params.h > derived.insurance_threshold)) {
    throw DomainError("find_C2: requires h > r lambda / (r + m)");
  }
  // Left side increases and right side decreases in c on (rb, C1).
  auto f = [&](double c) { return c2_equation_residual(params, derived, c); };
  const double rb = params.r * params.b;
  auto bracket = rootfind::make_bracket(f, rb * (1.0 + 1e-12), derived.C1 * (1.0 - 1e-12));
  if (!bracket.valid()) {
    // The right side vanishes at C1 while the left side can be far below
    // rounding level there, so the root may sit within an ulp of C1.
    bracket = rootfind::make_bracket(f, rb, derived.C1);
    if (!(bracket.f_hi > 0.0)) return std::nextafter(derived.C1, rb);
  }
  return rootfind::solve_bracketed(f, bracket, rootfind::RootConfig{1e-14, 1e-300, 400});
}

Regime classify_regime(const MarketParams& params, const DerivedConstants& d) {
  if (params.h == 0.0) return Regime::RuinLimitHZero;
  if (params.c == 0.0) return Regime::ZeroConsumption;
  const bool cheap_insurance = params.h <= d.insurance_threshold;
  if (params.c <= params.r * params.b) {
    if (cheap_insurance && params.c >= d.C1) return Regime::FullInsuranceBelowSafe;
    return Regime::BuyLevelBelowBequestCLow;
  }
  if (cheap_insurance || params.c >= *d.C2) return Regime::FullInsuranceBelowBequest;
  return Regime::BuyLevelAboveRb;
}

}  // namespace bequest
