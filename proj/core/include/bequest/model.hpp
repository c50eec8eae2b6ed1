#pragma once

#include <optional>
#include <string_view>

namespace bequest {

/// Exogenous inputs of the bequest problem. Rates are per year, amounts in dollars.
struct MarketParams {
  double r = 0.0;       ///< riskless rate
  double mu = 0.0;      ///< risky drift
  double sigma = 0.0;   ///< risky volatility
  double lambda = 0.0;  ///< mortality hazard rate
  double h = 0.0;       ///< premium per dollar of death benefit per year
  double b = 0.0;       ///< bequest goal
  double c = 0.0;       ///< consumption rate

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  MarketParams with_c(double value) const {
    MarketParams out = *this;
    out.c = value;
    return out;
  }
  MarketParams with_h(double value) const {
    MarketParams out = *this;
    out.h = value;
    return out;
  }
  MarketParams with_b(double value) const {
    MarketParams out = *this;
    out.b = value;
    return out;
  }
};

/// Closed-form constants shared by every regime. Computed once per parameter set.
struct DerivedConstants {
  double m = 0.0;       ///< (mu - r)^2 / (2 sigma^2)
  double q = 0.0;       ///< in (0, 1)
  double p = 0.0;       ///< > 1
  double p0 = 0.0;      ///< p at h = 0
  double alpha1 = 0.0;  ///< > 1
  double alpha2 = 0.0;  ///< < 0
  double beta1 = 0.0;   ///< > alpha1 (equal when h = 0)
  double beta2 = 0.0;   ///< < 0
  double w_s = 0.0;     ///< safe level
  double C1 = 0.0;
  std::optional<double> C2;  ///< only when h exceeds insurance_threshold
  double insurance_threshold = 0.0;  ///< r lambda / (r + m)
};

enum class Regime {
  ZeroConsumption,
  FullInsuranceBelowSafe,
  BuyLevelBelowBequestCLow,
  FullInsuranceBelowBequest,
  BuyLevelAboveRb,
  RuinLimitHZero,
};

std::string_view to_string(Regime regime) noexcept;
std::optional<Regime> regime_from_string(std::string_view name) noexcept;

DerivedConstants derive_constants(const MarketParams& params);

/// Unique consumption rate in (rb, C1) at which a positive buy level vanishes
/// for c > rb. Requires h > r lambda / (r + m); throws DomainError otherwise.
/// `derived` needs every field except C2.
double find_C2(const MarketParams& params, const DerivedConstants& derived);

/// Left side minus right side of the C2 defining equation at consumption `c`.
double c2_equation_residual(const MarketParams& params, const DerivedConstants& derived, double c);

/// r - (r + h) beta / alpha1 + h beta
double g_func(double beta, const MarketParams& params, const DerivedConstants& derived);

/// beta - (h beta / lambda + 1) alpha
double ell_func(double alpha, double beta, const MarketParams& params);

Regime classify_regime(const MarketParams& params, const DerivedConstants& derived);

}  // namespace bequest
