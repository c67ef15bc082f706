#include <gtest/gtest.h>

#include <cmath>

#include "trisqrt/lfunc.hpp"

using namespace trisqrt;

namespace {

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
  IntPoly r(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// P(t T) for P low-to-high
IntPoly rescale(const IntPoly& P, const Int& t) {
  IntPoly r = P;
  Int s = 1;
  for (auto& c : r) {
    c *= s;
    s *= t;
  }
  return r;
}

}  // namespace

TEST(Lfunc, DeltaCubedAtTwo) {
  SatakePair d{2, 12, Int(-24)};
  const IntPoly want{Int(1),
                     Int(13824),
                     Int("21902655488"),
                     Int("-493543281917952"),
                     Int("212842370189343326208"),
                     Int("-4239504509996223990595584"),
                     Int("1616130721287063948880806674432"),
                     Int("8762000948777521623145212555558912"),
                     Int("5444517870735015415413993718908291383296")};
  EXPECT_EQ(local_triple_factor(d, d, d), want);
  EXPECT_EQ(local_triple_factor_brute(d, d, d), want);
  // leading coefficient (q^33)^4
  EXPECT_EQ(want.back(), ipow(2, 132));
  auto inv = inverse_series(want, 3);
  EXPECT_EQ(inv[1], Int(-13824));
  EXPECT_EQ(inv[1], ipow(Int(-24), 3));
}

TEST(Lfunc, BruteMatchesResultant) {
  const std::vector<SatakePair> cases{
      {3, 12, Int(252)}, {3, 16, Int(-3348)}, {5, 12, Int(4830)}, {5, 18, Int(-80641650)}, {3, 20, Int(-56280)}};
  for (size_t i = 0; i < cases.size(); ++i)
    for (size_t j = 0; j < cases.size(); ++j) {
      if (cases[i].q != cases[j].q) continue;
      const auto& f = cases[i];
      const auto& g = cases[j];
      EXPECT_EQ(local_triple_factor(f, g, g), local_triple_factor_brute(f, g, g)) << i << "," << j;
    }
}

TEST(Lfunc, EisensteinLikeFactorization) {
  // roots {1, q^(w-1)} for each of g, h: the triple factor splits into four copies of the f factor
  const long q = 3;
  SatakePair f{q, 12, Int(252)};
  SatakePair e{q, 4, Int(1) + ipow(q, 3)}, e2{q, 6, Int(1) + ipow(q, 5)};
  IntPoly want{Int(1)};
  for (const Int& x : {Int(1), ipow(q, 3)})
    for (const Int& y : {Int(1), ipow(q, 5)}) want = poly_mul(want, rescale(local_standard_factor(f), x * y));
  EXPECT_EQ(local_triple_factor(f, e, e2), want);
}

TEST(Lfunc, ComposedProduct) {
  // roots {1, 2} and {3, 5}: products {3, 5, 6, 10}
  IntPoly A{Int(2), Int(-3), Int(1)}, B{Int(15), Int(-8), Int(1)};
  IntPoly want = poly_mul(poly_mul(IntPoly{Int(-3), Int(1)}, IntPoly{Int(-5), Int(1)}),
                          poly_mul(IntPoly{Int(-6), Int(1)}, IntPoly{Int(-10), Int(1)}));
  EXPECT_EQ(composed_product(A, B), want);
  EXPECT_THROW(composed_product(IntPoly{Int(1), Int(2)}, B), Error);
}

TEST(Lfunc, InverseSeriesOfStandardFactor) {
  // 1/(1 - tau(2) T + 2^11 T^2) gives tau(2^j)
  auto c = inverse_series(local_standard_factor({2, 12, Int(-24)}), 4);
  EXPECT_EQ(c, (std::vector<Int>{Int(1), Int(-24), Int(-1472), Int(84480), Int(987136)}));
}

TEST(Lfunc, IntervalArithmetic) {
  Interval a(Rat(1), 128), b(Rat(3), 128);
  auto c = a / b;
  EXPECT_LE(c.lower(), 1.0 / 3);
  EXPECT_GE(c.upper(), 1.0 / 3);
  EXPECT_GE(c.agreeing_digits(), 30);
  auto t = Interval::prime_power(2, Interval(Rat(3), 128));
  EXPECT_NEAR(t.lower(), 0.125, 1e-15);
}

TEST(Lfunc, RealEmbeddingIsolatesRoots) {
  IntPoly m{Int(-20468736), Int(-1080), Int(1)};
  NumberField K(m);
  const double r0 = 540 - 12 * std::sqrt(144169.0), r1 = 540 + 12 * std::sqrt(144169.0);
  RealEmbedding e0(m, 0, 128), e1(m, 1, 128);
  auto v0 = e0(K.gen()), v1 = e1(K.gen());
  EXPECT_LE(v0.lower(), r0 + 1e-9);
  EXPECT_GE(v0.upper(), r0 - 1e-9);
  EXPECT_LE(v1.lower(), r1 + 1e-9);
  EXPECT_GE(v1.upper(), r1 - 1e-9);
  auto n = e1(K.gen() * K.gen() - K.from_int(1080) * K.gen());
  EXPECT_NEAR(n.lower() / 20468736.0, 1.0, 1e-12);
}

TEST(Lfunc, PartialProducts) {
  auto d = real_form(12, 0, 0, 40);
  auto f = real_form(24, 0, 0, 40);
  auto empty = partial_L(Rat(40), 1, d, d, f);
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_NEAR(empty.value.lower(), 1.0, 1e-15);

  auto conv = partial_L(Rat(40), 37, d, d, f, 128);
  EXPECT_EQ(conv.label(), "convergent");
  EXPECT_EQ(conv.w, 45);
  ASSERT_EQ(conv.rows.size(), 12u);
  EXPECT_GE(conv.value.agreeing_digits(), 20);
  const double last = conv.rows.back().value.lower(), prev = conv.rows[conv.rows.size() - 2].value.lower();
  EXPECT_LT(std::fabs(last - prev) / std::fabs(last), 1e-20);

  auto central = partial_L(Rat(23), 13, d, d, f);
  EXPECT_EQ(central.label(), "formal");
}

TEST(Lfunc, PartialProductNeedsCoefficients) {
  auto d = real_form(12, 0, 0, 10);
  EXPECT_THROW(partial_L(Rat(40), 37, d, d, d), Error);
  EXPECT_THROW(real_form(12, 1, 0, 10), Error);
}
