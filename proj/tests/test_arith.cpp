#include <gtest/gtest.h>

#include "trisqrt/arith.hpp"
#include "trisqrt/linalg.hpp"
#include "trisqrt/ntt.hpp"
#include "trisqrt/numfield.hpp"

using namespace trisqrt;

TEST(ResidueRing, BasicOps) {
  ResidueRing R(11, 4);
  EXPECT_EQ(R.modulus(), Int(14641));
  EXPECT_EQ(R.add(Int(14640), Int(5)), Int(4));
  EXPECT_EQ(R.sub(Int(3), Int(5)), Int(14639));
  EXPECT_EQ(R.mul(R.inverse(Int(7)), Int(7)), Int(1));
  EXPECT_EQ(R.from_rat(Rat(Int(1), Int(2))), R.inverse(Int(2)));
  EXPECT_EQ(R.valuation(Int(121 * 3)), 2);
  EXPECT_EQ(R.valuation(Int(0)), 4);
}

TEST(ResidueRing, Errors) {
  EXPECT_THROW(ResidueRing(12, 3), Error);
  EXPECT_THROW(ResidueRing(11, 0), Error);
  ResidueRing R(11, 3);
  try {
    R.inverse(Int(22));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisionByNonUnit);
  }
  EXPECT_THROW(R.from_rat(Rat(Int(1), Int(11))), Error);
}

TEST(PadicInt, RingMismatch) {
  PadicInt a(ResidueRing(11, 3), 5), b(ResidueRing(11, 4), 5);
  try {
    (void)(a + b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RingMismatch);
  }
}

TEST(PadicInt, ValuationOfZeroIsInexact) {
  PadicInt z(ResidueRing(7, 5), 0);
  EXPECT_FALSE(z.valuation().exact);
  EXPECT_EQ(z.valuation().value, 5);
  PadicInt x(ResidueRing(7, 5), 49 * 3);
  EXPECT_TRUE(x.valuation().exact);
  EXPECT_EQ(x.valuation().value, 2);
}

TEST(Hensel, UnitRootOfDeltaAtEleven) {
  const Int tau11(534612);
  for (int M : {1, 4, 12}) {
    auto r = hensel_unit_root(tau11, 11, 12, M);
    const auto& R = r.alpha1.ring();
    Int v = R.add(R.sub(R.mul(r.alpha1.residue(), r.alpha1.residue()), R.mul(R.from_int(tau11), r.alpha1.residue())),
                  R.from_int(ipow(11, 11)));
    EXPECT_EQ(v, 0) << "M=" << M;
    EXPECT_TRUE(r.alpha1.is_unit());
    EXPECT_EQ((r.alpha1 + r.alpha2).residue(), R.from_int(tau11));
    EXPECT_EQ(r.alpha2_valuation, 11);
  }
}

TEST(Hensel, NonOrdinaryRejected) {
  try {
    hensel_unit_root(Int(22), 11, 12, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrdinary);
  }
}

TEST(Hensel, SplitRoots) {
  // x^2 - 1080 x - 20468736 splits at 31
  auto roots = split_roots({Int(-20468736), Int(-1080), Int(1)}, 31, 4);
  ASSERT_EQ(roots.size(), 2u);
  Int m = ipow(31, 4);
  for (const auto& r : roots) EXPECT_EQ(mod_floor(r * r - 1080 * r - 20468736, m), 0);
  try {
    split_roots({Int(1), Int(0), Int(1)}, 7, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSplitField);
  }
}

TEST(PadicNum, NegativePowers) {
  auto x = PadicNum::from_rat(Rat(Int(5), Int(121)), 11, 6);
  EXPECT_EQ(x.valuation(), -2);
  auto y = x.times_p_power(2);
  EXPECT_EQ(y.valuation(), 0);
  auto one = x * x.inverse();
  EXPECT_TRUE(agree_mod(one, PadicNum(11, 0, Int(1), 20), 3));
  auto z = PadicNum::from_rat(Rat(3), 11, 6) - PadicNum::from_rat(Rat(3 + 2 * 1331), 11, 6);
  EXPECT_EQ(z.valuation(), 3);
}

TEST(Ntt, MatchesSchoolbook) {
  ResidueRing R(11, 4);
  std::vector<uint64_t> a(3000), b(2500);
  std::vector<Int> ai(3000), bi(2500);
  for (size_t i = 0; i < a.size(); ++i) ai[i] = a[i] = (i * i * 7 + 3) % 14641;
  for (size_t i = 0; i < b.size(); ++i) bi[i] = b[i] = (i * 131 + 17) % 14641;
  auto fast = mul_mod_ntt(a, b, 14641, 4000);
  auto slow = mul_schoolbook(R, ai, bi, 4000);
  ASSERT_EQ(fast.size(), slow.size());
  for (size_t i = 0; i < fast.size(); ++i) ASSERT_EQ(Int(static_cast<unsigned long>(fast[i])), slow[i]) << i;
}

TEST(Ntt, KroneckerMatchesSchoolbook) {
  ResidueRing R(11, 40);
  std::vector<Int> x(300), y(300);
  for (int i = 0; i < 300; ++i) {
    x[i] = R.from_int(ipow(7, i));
    y[i] = R.from_int(ipow(3, i + 5));
  }
  EXPECT_EQ(mul_mod_kronecker(x, y, R.modulus(), 300), mul_schoolbook(R, x, y, 300));
}

TEST(Linalg, DeterminantAndCharpoly) {
  IntMatrix m(3, 3);
  int v[3][3] = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[i][j];
  EXPECT_EQ(determinant(m), Int(4));
  // x^3 - 6x^2 + 10x - 4
  EXPECT_EQ(charpoly(m), (std::vector<Int>{Int(-4), Int(10), Int(-6), Int(1)}));
}

TEST(NumberField, FactorAndArithmetic) {
  auto fs = factor_monic({Int(6), Int(-5), Int(1)});
  EXPECT_EQ(fs.size(), 2u);
  EXPECT_TRUE(is_irreducible({Int(-20468736), Int(-1080), Int(1)}));
  NumberField K({Int(-20468736), Int(-1080), Int(1)});
  auto g = K.gen();
  EXPECT_EQ(g * g.inverse(), K.one());
  EXPECT_EQ(g.trace(), Rat(1080));
  EXPECT_EQ(g.charpoly(), (IntPoly{Int(-20468736), Int(-1080), Int(1)}));
  EXPECT_THROW(NumberField({Int(6), Int(-5), Int(1)}), Error);
  try {
    NumberField({Int(1), Int(0), Int(0), Int(0), Int(0), Int(1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IrreducibleDegreeTooHigh);
  }
}
