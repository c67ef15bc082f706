#include <gtest/gtest.h>

#include "trisqrt/hida.hpp"

using namespace trisqrt;

TEST(Hida, OrdinaryRanksAtEleven) {
  EXPECT_EQ(ordinary_rank(12, 11), 1);
  EXPECT_EQ(ordinary_rank(22, 11), 1);
  EXPECT_EQ(ordinary_rank(32, 11), 1);
  // every eigenform of S_24 and S_26 has a_11 divisible by 11
  EXPECT_EQ(ordinary_rank(24, 11), 0);
  EXPECT_EQ(ordinary_rank(26, 11), 0);
}

TEST(Hida, ControlRankScanIsConstantOnBranch) {
  auto rows = control_rank_scan(11, {12, 22, 32});
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.branch, 2);
    EXPECT_EQ(r.rank, 1);
  }
  EXPECT_THROW(control_rank_scan(11, {13}), Error);
}

TEST(Hida, NewtonSlopes) {
  // charpoly(T_11) on S_24 vanishes mod 11 at both roots
  auto tp = charpoly(hecke_matrix(24, 11));
  auto s = newton_slopes(tp, 11);
  ASSERT_EQ(s.size(), 2u);
  for (const auto& x : s) {
    ASSERT_TRUE(x.has_value());
    EXPECT_GT(*x, 0);
  }
  EXPECT_EQ(min_nonunit_slope(24, 11), Rat(1));
  EXPECT_EQ(min_nonunit_slope(12, 11), Rat(5));
  EXPECT_EQ(default_up_iterations(24, 11, 4), 4);
  EXPECT_EQ(default_up_iterations(12, 11, 4), 1);
}

TEST(Hida, SpaceAtThirtyOne) {
  auto sp = ordinary_space(24, 31, 4);
  ASSERT_EQ(sp.rank(), 2u);
  EXPECT_TRUE(sp.nonordinary.empty());
  std::vector<Int> alphas;
  for (const auto& b : sp.basis) alphas.push_back(b.alpha1.residue());
  std::sort(alphas.begin(), alphas.end());
  EXPECT_EQ(alphas, (std::vector<Int>{Int(129323), Int(424186)}));
  for (const auto& b : sp.basis) {
    // a_31 = alpha_1 + alpha_2, alpha_1 alpha_2 = 31^23
    EXPECT_EQ((b.alpha1 + b.alpha2).residue(), mod_floor(b.base.a_p, ipow(31, 4)));
    EXPECT_EQ((b.alpha1 * b.alpha2).residue(), 0);
  }
}

TEST(Hida, NotOrdinaryAtEleven) {
  auto sp = ordinary_space(24, 11, 4);
  EXPECT_EQ(sp.rank(), 0u);
  auto forms = padic_eigenforms(24, 11, 4, 30);
  ASSERT_EQ(forms.size(), 2u);
  for (const auto& f : forms) EXPECT_FALSE(f.ordinary);
  try {
    stabilize(forms[0], 11, 30);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrdinary);
  }
}

TEST(Hida, StabilizedIsUpEigen) {
  auto sp = ordinary_space(12, 11, 5, 11 * 50);
  ASSERT_EQ(sp.rank(), 1u);
  const auto& f = sp.basis[0];
  auto up = u_p(f.stream, 11);
  const auto& R = f.stream.ring();
  for (size_t n = 0; n <= up.n_max(); ++n) EXPECT_EQ(up[n], R.mul(f.alpha1.residue(), f.stream[n])) << n;
}

TEST(Hida, ProjectionIsIdempotent) {
  for (auto [k, p] : {std::pair{12, 11L}, std::pair{24, 31L}}) {
    const int M = 4;
    auto probe = ordinary_space(k, p, M);
    const int j = default_up_iterations(k, p, M);
    const size_t len = projection_length(probe, j);
    auto sp = ordinary_space(k, p, M, len);
    std::vector<Int> c;
    for (size_t i = 0; i < sp.rank(); ++i) c.push_back(Int(static_cast<unsigned long>(3 + 2 * i)));
    auto F = recombine(sp, c, len);
    auto proj = ordinary_project(F, sp);
    EXPECT_EQ(proj.slack, 0);
    EXPECT_EQ(proj.coords, c) << "k=" << k << " p=" << p;
    // e(e(F)) = e(F)
    auto again = ordinary_project(recombine(sp, proj.coords, len), sp);
    EXPECT_EQ(again.coords, proj.coords);
  }
}

TEST(Hida, ProjectionAnnihilatesNonOrdinary) {
  const long p = 11;
  const int M = 4;
  auto probe = ordinary_space(12, p, M);
  const int j = default_up_iterations(12, p, M);
  const size_t len = projection_length(probe, j);
  auto sp = ordinary_space(12, p, M, len);
  auto forms = padic_eigenforms(12, p, M, len);
  ASSERT_EQ(forms.size(), 1u);
  // Delta - alpha_1 Delta(qz) has U_p eigenvalue alpha_2, of valuation 11
  auto g = nonunit_stabilization(forms[0], sp.basis[0].alpha1, p, len);
  auto proj = ordinary_project(g, sp);
  ASSERT_EQ(proj.coords.size(), 1u);
  EXPECT_EQ(mod_floor(proj.coords[0], ipow(p, static_cast<unsigned long>(proj.modulus_exponent()))), 0);
}

TEST(Hida, ProjectionNeedsEnoughTerms) {
  auto sp = ordinary_space(12, 11, 4);
  auto F = recombine(sp, {Int(1)}, sp.sturm);
  try {
    ordinary_project(F, sp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientPrecision);
  }
}

TEST(Hida, ClosureViolationOnNonModularInput) {
  auto sp = ordinary_space(12, 11, 4);
  const size_t len = projection_length(sp, 1);
  ResidueRing R(11, 4);
  QExp<ResidueRing> junk(R, len);
  for (size_t n = 1; n <= len; ++n) junk[n] = R.from_int(Int(static_cast<unsigned long>(n * n % 97 + 1)));
  try {
    ordinary_project(junk, sp, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClosureViolation);
  }
}

TEST(Hida, CongruenceAndPairing) {
  auto sp = ordinary_space(24, 31, 4);
  EXPECT_EQ(congruence_p_part(sp, 0), 0);
  EXPECT_EQ(congruence_p_part(sp, 1), 0);
  auto pm = pairing_matrix(sp);
  EXPECT_TRUE(pm.unimodular);
  EXPECT_EQ(pm.hecke_indices.size(), 2u);
  EXPECT_EQ(pm.hecke_indices[0], 1u);
  auto sp12 = ordinary_space(12, 11, 4);
  EXPECT_TRUE(pairing_matrix(sp12).unimodular);
}

TEST(Hida, ContractScalesByH) {
  Projection pr;
  pr.coords = {Int(5)};
  pr.p = 11;
  pr.M = 4;
  auto v = contract(pr, 0, 2);
  EXPECT_EQ(v.residue(), Int(5 * 121));
  EXPECT_THROW(contract(pr, 1, 0), Error);
}
