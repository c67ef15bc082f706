#include <gtest/gtest.h>

#include "trisqrt/identity.hpp"

using namespace trisqrt;

TEST(Identity, LaurentAlgebra) {
  using E = PairingExpr;
  const int k = 24;
  // alpha_1 alpha_2 = p^(k-1)
  EXPECT_EQ(E::alpha1(k) * E::alpha2(k), E::p_pow(k, k - 1));
  EXPECT_EQ(E::alpha1(k) * E::alpha1(k, -1), E::constant(k, Rat(1)));
  EXPECT_EQ(E::p_pow_half(k, 1) * E::p_pow_half(k, 1), E::p_pow(k, 1));
  EXPECT_FALSE(E::p_pow_half(k, 1).integral_p_powers());
  EXPECT_TRUE((E::a_p(k) - E::alpha1(k) - E::alpha2(k)).is_zero());
  EXPECT_THROW(PairingExpr::p_pow(24, 1) + PairingExpr::p_pow(26, 1), Error);
}

TEST(Identity, TermSumString) {
  EXPECT_EQ(sum_T_terms(24, 12, 12).to_string(),
            "p^22*alpha1^-2 - p^6*alpha1^-1*c - 1 + p^-1 + p^-11*b^2 + p^-11*c^2 + p^-22*alpha1^2 - "
            "p^-22*alpha1*b*c");
  EXPECT_EQ(T_terms(24, 12, 12).size(), 6u);
}

TEST(Identity, PrintedEpDiffersByTwoAlpha2ApOverPk) {
  auto c = compare_with_Ep(24, 12, 12);
  EXPECT_FALSE(c.match);
  EXPECT_TRUE(c.discrepancy_is_expected);
  EXPECT_EQ(c.discrepancy.to_string(), "2*p^22*alpha1^-2 + 2*p^-1");
  // with the sign flipped the printed form reproduces the term sum
  EXPECT_EQ(printed_Ep(24, 12, 12, EpSign::TermSum), sum_T_terms(24, 12, 12));
}

TEST(Identity, GridIsUniform) {
  auto grid = weight_grid(40);
  EXPECT_EQ(grid.size(), 1330u);
  for (auto [k, l, m] : grid) {
    auto c = compare_with_Ep(k, l, m);
    ASSERT_FALSE(c.match) << k << "," << l << "," << m;
    ASSERT_TRUE(c.discrepancy_is_expected) << k << "," << l << "," << m;
  }
}

TEST(Identity, DiscrepancyValuations) {
  // evaluated at a p-adic point: valuation -1 in E_p and k-3 after the alpha_1^-2 p^(k-2) prefactor
  const long p = 31;
  const int k = 24;
  ResidueRing R(p, 30);
  PadicInt a1(R, 424186);  // a unit
  auto disc = compare_with_Ep(k, 12, 12).discrepancy;
  auto v = disc.evaluate(a1, Int(7), Int(9));
  EXPECT_EQ(v.valuation(), -1);
  auto scaled = (PairingExpr::alpha1(k, -2) * PairingExpr::p_pow(k, k - 2) * disc).evaluate(a1, Int(7), Int(9));
  EXPECT_EQ(scaled.valuation(), k - 3);
}

TEST(Identity, OddHalfPowersUnsupported) {
  ResidueRing R(11, 5);
  try {
    PairingExpr::p_pow_half(24, 1).evaluate(PadicInt(R, 2), Int(0), Int(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unsupported);
  }
}

TEST(Identity, StepTwoFactorization) {
  for (int k = 4; k <= 40; k += 2) {
    auto r = verify_step2(k);
    EXPECT_TRUE(r.match()) << "k=" << k << " residual " << r.residual.to_string();
  }
  EXPECT_THROW(verify_step2(25), Error);
}

TEST(Identity, WeightChecks) {
  EXPECT_THROW(sum_T_terms(22, 12, 12), Error);
  EXPECT_THROW(printed_Ep(24, 11, 13), Error);
}

TEST(Identity, JsonFields) {
  auto j = to_json(compare_with_Ep(24, 12, 12));
  EXPECT_EQ(j["k"], "24");
  EXPECT_FALSE(j["match"].get<bool>());
  auto s = to_json(verify_step2(24));
  EXPECT_TRUE(s["match"].get<bool>());
  EXPECT_EQ(s["residual"], "0");
}
