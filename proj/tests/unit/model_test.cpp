#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>

#include "bequest/errors.hpp"
#include "bequest/model.hpp"
#include "support.hpp"

namespace bequest {
namespace {

using testing::base_params;

std::string rejected_field(const MarketParams& p) {
  try {
    p.validate();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

TEST(Validate, AcceptsBaseParameters) { EXPECT_NO_THROW(base_params().validate()); }

TEST(Validate, NamesTheOffendingField) {
  MarketParams p = base_params();
  p.mu = p.r;
  EXPECT_EQ(rejected_field(p), "mu");
  p = base_params();
  p.mu = 0.01;
  EXPECT_EQ(rejected_field(p), "mu");
  p = base_params();
  p.sigma = 0.0;
  EXPECT_EQ(rejected_field(p), "sigma");
  p = base_params();
  p.lambda = 0.0;
  EXPECT_EQ(rejected_field(p), "lambda");
  p = base_params();
  p.b = 0.0;
  EXPECT_EQ(rejected_field(p), "b");
  p = base_params();
  p.c = -0.01;
  EXPECT_EQ(rejected_field(p), "c");
  p = base_params();
  p.h = -0.01;
  EXPECT_EQ(rejected_field(p), "h");
  p = base_params();
  p.r = 0.0;
  EXPECT_EQ(rejected_field(p), "r");
  p = base_params();
  p.sigma = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(rejected_field(p), "sigma");
  p = base_params();
  p.b = std::numeric_limits<double>::infinity();
  EXPECT_EQ(rejected_field(p), "b");
}

TEST(Validate, PremiumBelowHazardIsAllowed) {
  EXPECT_NO_THROW(base_params().with_h(0.01).validate());
}

TEST(Validate, FreeInsuranceWithoutConsumptionIsRejected) {
  EXPECT_EQ(rejected_field(base_params().with_h(0.0)), "c");
  EXPECT_NO_THROW(base_params().with_h(0.0).with_c(0.02).validate());
}

TEST(DeriveConstants, ReferenceThresholds) {
  const DerivedConstants d = derive_constants(base_params());
  EXPECT_NEAR(d.C1, 0.0736, 0.00005);
  ASSERT_TRUE(d.C2.has_value());
  EXPECT_NEAR(*d.C2, 0.0629, 0.00005);
  EXPECT_NEAR(d.w_s, 0.625, 1e-15);
  EXPECT_NEAR(d.m, 0.01125, 1e-15);
  EXPECT_NEAR(d.insurance_threshold, 0.03 * 0.04 / (0.03 + 0.01125), 1e-16);
  EXPECT_NEAR(d.insurance_threshold, 0.0290909090909, 1e-12);
}

TEST(DeriveConstants, ExponentsMatchQuadraticFormula) {
  const MarketParams p = base_params();
  const DerivedConstants d = derive_constants(p);
  const auto e = testing::exponents_from_quadratics(p);
  EXPECT_NEAR(d.alpha1, e.a1, 1e-12 * e.a1);
  EXPECT_NEAR(d.alpha2, e.a2, 1e-12 * std::abs(e.a2));
  EXPECT_NEAR(d.beta1, e.b1, 1e-12 * e.b1);
  EXPECT_NEAR(d.beta2, e.b2, 1e-12 * std::abs(e.b2));
}

TEST(DeriveConstants, SafeLevelSwitchesAtRb) {
  const MarketParams p = base_params();
  EXPECT_DOUBLE_EQ(derive_constants(p.with_c(0.02)).w_s, (0.02 + 0.05) / 0.08);
  EXPECT_DOUBLE_EQ(derive_constants(p.with_c(0.03)).w_s, 1.0);
  EXPECT_DOUBLE_EQ(derive_constants(p.with_c(0.05)).w_s, 0.05 / 0.03);
}

TEST(DeriveConstants, C2OnlyAboveInsuranceThreshold) {
  const MarketParams p = base_params();
  EXPECT_FALSE(derive_constants(p.with_h(0.02)).C2.has_value());
  EXPECT_TRUE(derive_constants(p.with_h(0.03)).C2.has_value());
}

TEST(DeriveConstants, ZeroPremiumCollapsesBeta) {
  const DerivedConstants d = derive_constants(base_params().with_h(0.0).with_c(0.02));
  EXPECT_NEAR(d.beta1, d.alpha1, 1e-14);
  EXPECT_NEAR(d.p, d.p0, 1e-14);
}

TEST(DeriveConstants, InvariantsOverRandomParameters) {
  testing::ParamSampler rng(11);
  for (int i = 0; i < 2000; ++i) {
    const MarketParams p = rng.draw();
    const DerivedConstants d = derive_constants(p);
    ASSERT_GT(d.q, 0.0);
    ASSERT_LT(d.q, 1.0);
    ASSERT_GT(d.p, 1.0);
    ASSERT_GT(d.p0, 1.0);
    ASSERT_LT(d.alpha2, 0.0);
    ASSERT_GT(d.alpha1, 1.0);
    ASSERT_GT(d.beta1, d.alpha1);
    ASSERT_LT(d.beta2, 0.0);
    ASSERT_NEAR(d.p, d.beta1 / (d.beta1 - 1.0), 1e-12 * d.p);
    ASSERT_NEAR(d.p0, d.alpha1 / (d.alpha1 - 1.0), 1e-12 * d.p0);
    const double ws = p.c <= p.r * p.b ? (p.c + p.h * p.b) / (p.r + p.h) : p.c / p.r;
    ASSERT_DOUBLE_EQ(d.w_s, ws);
    if (p.h <= d.insurance_threshold) {
      ASSERT_LE(d.C1, p.r * p.b);
      ASSERT_FALSE(d.C2.has_value());
    } else {
      ASSERT_TRUE(d.C2.has_value());
      ASSERT_GT(*d.C2, p.r * p.b);
      ASSERT_LT(*d.C2, d.C1);
    }
  }
}

TEST(DeriveConstants, CheapInsuranceKeepsC1BelowRb) {
  testing::ParamSampler rng(12);
  int checked = 0;
  for (int i = 0; i < 5000 && checked < 500; ++i) {
    MarketParams p = rng.draw_without_c();
    const DerivedConstants probe = derive_constants(p);
    p.h = probe.insurance_threshold * rng.uniform(0.0, 1.0);
    if (!(p.h > 0.0)) continue;
    const DerivedConstants d = derive_constants(p);
    ASSERT_LE(d.C1, p.r * p.b) << "h = " << p.h;
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(FindC2, ResidualOfIndependentFormIsSmall) {
  const MarketParams p = base_params();
  const DerivedConstants d = derive_constants(p);
  const auto e = testing::exponents_from_quadratics(p);
  const auto [lhs, rhs] = testing::c2_sides(p, e, *d.C2);
  EXPECT_LT(std::abs(lhs - rhs), 1e-10);
}

TEST(FindC2, MatchesIndependentBisection) {
  testing::ParamSampler rng(13);
  int checked = 0;
  while (checked < 200) {
    const MarketParams p = rng.draw_without_c();
    const DerivedConstants d = derive_constants(p);
    if (!d.C2) continue;
    const auto e = testing::exponents_from_quadratics(p);
    auto f = [&](double c) {
      const auto [lhs, rhs] = testing::c2_sides(p, e, c);
      return lhs - rhs;
    };
    const double oracle = testing::bisect(f, p.r * p.b * (1 + 1e-12), d.C1 * (1 - 1e-12));
    ASSERT_NEAR(*d.C2, oracle, 1e-9 * oracle);
    ++checked;
  }
}

TEST(FindC2, ThresholdPremiumIsADomainError) {
  MarketParams p = base_params();
  DerivedConstants d = derive_constants(p);
  p.h = d.insurance_threshold;
  d = derive_constants(p);
  EXPECT_FALSE(d.C2.has_value());
  EXPECT_THROW(find_C2(p, d), DomainError);
}

TEST(GFunc, ReferenceValuesAndSigns) {
  const MarketParams p = base_params();
  const DerivedConstants d = derive_constants(p);
  const auto e = testing::exponents_from_quadratics(p);
  EXPECT_NEAR(g_func(d.beta1, p, d), testing::g_direct(p, e, e.b1), 1e-13);
  EXPECT_NEAR(g_func(d.beta2, p, d), testing::g_direct(p, e, e.b2), 1e-13);
  EXPECT_GT(g_func(d.beta1, p, d), 0.0);
  EXPECT_GT(g_func(d.beta2, p, d), 0.0);
}

TEST(GFunc, VanishesAtBeta1WhenPremiumIsZero) {
  const MarketParams p = base_params().with_h(0.0).with_c(0.02);
  const DerivedConstants d = derive_constants(p);
  EXPECT_NEAR(g_func(d.beta1, p, d), 0.0, 1e-15);
}

TEST(EllFunc, ReferenceValues) {
  const MarketParams p = base_params();
  const DerivedConstants d = derive_constants(p);
  EXPECT_DOUBLE_EQ(ell_func(d.alpha1, d.beta1, p),
                   d.beta1 - (0.05 * d.beta1 / 0.04 + 1.0) * d.alpha1);
  EXPECT_DOUBLE_EQ(ell_func(2.0, 3.0, p), 3.0 - (0.05 * 3.0 / 0.04 + 1.0) * 2.0);
}

TEST(EllFunc, VanishesWhenPremiumIsZero) {
  const MarketParams p = base_params().with_h(0.0).with_c(0.02);
  const DerivedConstants d = derive_constants(p);
  EXPECT_NEAR(ell_func(d.alpha1, d.beta1, p), 0.0, 1e-14);
}

TEST(GAndEll, SignPatternOverRandomParameters) {
  testing::ParamSampler rng(14);
  for (int i = 0; i < 2000; ++i) {
    const MarketParams p = rng.draw();
    const DerivedConstants d = derive_constants(p);
    ASSERT_GT(g_func(d.beta1, p, d), 0.0);
    ASSERT_GT(g_func(d.beta2, p, d), 0.0);
    ASSERT_LT(ell_func(d.alpha1, d.beta1, p), 0.0);
    ASSERT_LT(ell_func(d.alpha1, d.beta2, p), 0.0);
    ASSERT_GT(ell_func(d.alpha2, d.beta1, p), 0.0);
    ASSERT_LT(ell_func(d.alpha2, d.beta2, p), 0.0);
  }
}

TEST(ClassifyRegime, ReferenceExamples) {
  const MarketParams p = base_params();
  auto classify = [](const MarketParams& q) { return classify_regime(q, derive_constants(q)); };
  EXPECT_EQ(classify(p), Regime::ZeroConsumption);
  EXPECT_EQ(classify(p.with_c(0.02)), Regime::BuyLevelBelowBequestCLow);
  EXPECT_EQ(classify(p.with_c(0.05)), Regime::BuyLevelAboveRb);
  EXPECT_EQ(classify(p.with_c(0.0629)), Regime::FullInsuranceBelowBequest);
  EXPECT_EQ(classify(p.with_c(0.07)), Regime::FullInsuranceBelowBequest);
  EXPECT_EQ(classify(p.with_h(0.02).with_c(0.02)), Regime::FullInsuranceBelowSafe);
  EXPECT_EQ(classify(p.with_h(0.02).with_c(0.05)), Regime::FullInsuranceBelowBequest);
  EXPECT_EQ(classify(p.with_h(0.0).with_c(0.02)), Regime::RuinLimitHZero);
}

TEST(ClassifyRegime, BoundaryConventions) {
  const MarketParams p = base_params();
  // c = rb belongs to the low-consumption regimes.
  EXPECT_EQ(classify_regime(p.with_c(0.03), derive_constants(p.with_c(0.03))),
            Regime::BuyLevelBelowBequestCLow);
  // c = C1 with cheap insurance goes to full insurance.
  const MarketParams cheap = p.with_h(0.02);
  const double c1 = derive_constants(cheap).C1;
  EXPECT_EQ(classify_regime(cheap.with_c(c1), derive_constants(cheap.with_c(c1))),
            Regime::FullInsuranceBelowSafe);
  EXPECT_EQ(classify_regime(cheap.with_c(c1 * (1 - 1e-9)), derive_constants(cheap.with_c(c1 * (1 - 1e-9)))),
            Regime::BuyLevelBelowBequestCLow);
}

TEST(ClassifyRegime, TotalOverRandomParameters) {
  testing::ParamSampler rng(15);
  std::set<Regime> seen;
  for (int i = 0; i < 3000; ++i) {
    MarketParams p = rng.draw();
    if (i % 10 == 0) p.c = 0.0;
    const DerivedConstants d = derive_constants(p);
    const Regime regime = classify_regime(p, d);
    seen.insert(regime);
    const double rb = p.r * p.b;
    const bool cheap = p.h <= d.insurance_threshold;
    int matches = 0;
    matches += p.c == 0.0;
    matches += p.c > 0.0 && p.c <= rb && cheap && p.c >= d.C1;
    matches += p.c > 0.0 && p.c <= rb && p.c < d.C1;
    matches += p.c > rb && (cheap || p.c >= *d.C2);
    matches += p.c > rb && !cheap && p.c < *d.C2;
    ASSERT_EQ(matches, 1) << "c = " << p.c << " h = " << p.h;
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(RegimeNames, RoundTrip) {
  for (Regime r : {Regime::ZeroConsumption, Regime::FullInsuranceBelowSafe,
                   Regime::BuyLevelBelowBequestCLow, Regime::FullInsuranceBelowBequest,
                   Regime::BuyLevelAboveRb, Regime::RuinLimitHZero}) {
    const auto back = regime_from_string(to_string(r));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, r);
  }
  EXPECT_FALSE(regime_from_string("Nope").has_value());
}

}  // namespace
}  // namespace bequest
