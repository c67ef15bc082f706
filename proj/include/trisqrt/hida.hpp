#pragma once

// p-adic realization of level-1 eigenforms, unit-root stabilization, the
// ordinary projector (U_p^j followed by a Sturm-bound coordinate solve),
// contraction, congruence exponents and the control-rank scan.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "trisqrt/modforms.hpp"

namespace trisqrt {

/// One embedding of a level-1 eigenform into Z/p^M.
struct PadicEigenform {
  int weight = 0;
  size_t orbit = 0;      // index into eigenbasis(k)
  size_t embedding = 0;  // which root of the orbit's minimal polynomial
  Int root;              // image of the T_2 eigenvalue
  std::vector<Int> coords;  // on the echelon basis
  std::vector<Int> left;    // left T_2 eigenvector, embedded
  QExp<ResidueRing> form;
  Int a_p;
  bool ordinary = false;

  std::string label() const {
    return "k" + std::to_string(weight) + ".o" + std::to_string(orbit) + ".e" + std::to_string(embedding);
  }
};

/// Newton-polygon slopes (root valuations, with multiplicity) of an integer
/// polynomial given low-to-high. Roots equal to zero are reported as nullopt.
inline std::vector<std::optional<Rat>> newton_slopes(const IntPoly& f, long p) {
  std::vector<std::optional<Rat>> out;
  size_t low = 0;
  while (low < f.size() && f[low] == 0) {
    out.push_back(std::nullopt);
    ++low;
  }
  std::vector<std::pair<long, long>> pts;
  for (size_t i = low; i < f.size(); ++i)
    if (f[i] != 0) pts.push_back({static_cast<long>(i), valuation(f[i], p)});
  size_t cur = 0;
  while (cur + 1 < pts.size()) {
    size_t best = cur + 1;
    Rat best_slope(Int(pts[best].second - pts[cur].second), Int(pts[best].first - pts[cur].first));
    best_slope.canonicalize();
    for (size_t j = cur + 2; j < pts.size(); ++j) {
      Rat s(Int(pts[j].second - pts[cur].second), Int(pts[j].first - pts[cur].first));
      s.canonicalize();
      if (s <= best_slope) {
        best_slope = s;
        best = j;
      }
    }
    best_slope.canonicalize();
    for (long i = pts[cur].first; i < pts[best].first; ++i) out.push_back(Rat(-best_slope));
    cur = best;
  }
  return out;
}

/// Embed every eigenform of S_k into Z/p^M with n_max coefficients. Orbits
/// whose a_p is non-ordinary at every embedding are skipped when skip_nonordinary
/// is set (no splitting needed); any other orbit must split mod p.
inline std::vector<PadicEigenform> padic_eigenforms(int k, long p, int M, size_t n_max, bool skip_nonordinary = false) {
  std::vector<PadicEigenform> out;
  const int d = dim_cusp(k);
  if (d == 0) return out;
  ResidueRing ring(p, M);
  auto forms = eigenbasis(k, static_cast<size_t>(std::max<long>(p, 2 * d + 1)));
  const size_t need = std::max(n_max, static_cast<size_t>(p));
  auto basis = detail::echelon_monomials(ring, k, need, true);
  for (size_t o = 0; o < forms.size(); ++o) {
    const auto& f = forms[o];
    const NFElem& ap = f.expansion[static_cast<size_t>(p)];
    if (skip_nonordinary) {
      auto mp = ap.charpoly();
      bool all_nonunit = true;
      for (size_t i = 0; i + 1 < mp.size(); ++i)
        if (valuation(mp[i], p) == 0) all_nonunit = false;
      if (all_nonunit) continue;
    }
    auto roots = f.field.split_roots(p, M);
    for (size_t e = 0; e < roots.size(); ++e) {
      std::vector<Int> coords, left;
      for (const auto& c : f.coords) coords.push_back(c.embed(roots[e], ring));
      for (const auto& c : f.left) left.push_back(c.embed(roots[e], ring));
      std::vector<Int> coeffs(need + 1, Int(0));
      for (int i = 0; i < d; ++i) {
        if (coords[i] == 0) continue;
        for (size_t n = 0; n <= need; ++n) coeffs[n] = ring.add(coeffs[n], ring.mul(coords[i], basis[i][n]));
      }
      Int ap_e = coeffs[static_cast<size_t>(p)];
      QExp<ResidueRing> form(ring, std::move(coeffs), k);
      PadicEigenform pe{k, o, e, roots[e], coords, left, form.truncate(n_max), ap_e, ring.is_unit(ap_e)};
      out.push_back(std::move(pe));
    }
  }
  return out;
}

/// f_P = f - alpha_2 f|[p], the U_p-eigenform with unit eigenvalue alpha_1.
struct StabilizedEigenform {
  PadicEigenform base;
  PadicInt alpha1;
  PadicInt alpha2;
  QExp<ResidueRing> stream;
};

inline StabilizedEigenform stabilize(const PadicEigenform& f, long p, size_t n_max) {
  require(f.ordinary, ErrorCode::NotOrdinary, f.label() + " has a_p of positive valuation");
  const ResidueRing& ring = f.form.ring();
  require(f.form.n_max() >= n_max, ErrorCode::InsufficientPrecision, "stabilize needs n_max coefficients of f");
  auto roots = hensel_unit_root(f.a_p, p, f.weight, ring.precision());
  auto fp = f.form.truncate(n_max);
  auto vf = v_p(f.form, p);
  std::vector<Int> c(n_max + 1);
  for (size_t n = 0; n <= n_max; ++n) c[n] = ring.sub(fp[n], ring.mul(roots.alpha2.residue(), vf[n]));
  QExp<ResidueRing> s(ring, std::move(c), f.weight, p);
  auto up = u_p(s, p);
  for (size_t n = 0; n <= up.n_max(); ++n)
    require(up[n] == ring.mul(roots.alpha1.residue(), s[n]), ErrorCode::ClosureViolation,
            "stabilized " + f.label() + " is not a U_p eigenvector at n=" + std::to_string(n));
  return {f, roots.alpha1, roots.alpha2, std::move(s)};
}

/// The other stabilization f - alpha_1 f|[p] (U_p-eigenvalue alpha_2).
inline QExp<ResidueRing> nonunit_stabilization(const PadicEigenform& f, const PadicInt& alpha1, long p, size_t n_max) {
  const ResidueRing& ring = f.form.ring();
  auto vf = v_p(f.form, p);
  std::vector<Int> c(n_max + 1);
  for (size_t n = 0; n <= n_max; ++n) c[n] = ring.sub(f.form[n], ring.mul(alpha1.residue(), vf[n]));
  return {ring, std::move(c), f.weight, p};
}

struct OrdinarySpace {
  int weight = 0;
  long p = 0;
  int M = 0;
  size_t sturm = 0;  // Sturm bound for Gamma_0(p) in weight k
  std::vector<StabilizedEigenform> basis;
  std::vector<std::string> nonordinary;
  Rat min_nonunit_slope;  // smallest positive U_p slope on S_k(Gamma_0(p))
  size_t rank() const { return basis.size(); }
  long branch() const { return ((weight % (p - 1)) + (p - 1)) % (p - 1); }
};

/// Smallest positive slope of U_p on S_k(Gamma_0(p)): level-p newforms have
/// slope (k-2)/2, and each level-1 form contributes its Hecke-polynomial slopes.
inline Rat min_nonunit_slope(int k, long p) {
  Rat best(Int(k - 2), Int(2));
  best.canonicalize();
  if (dim_cusp(k) == 0) return best;
  auto tp = charpoly(hecke_matrix(k, p));
  Rat half(Int(k - 1), Int(2));
  half.canonicalize();
  for (const auto& s : newton_slopes(tp, p)) {
    Rat sigma = s ? *s : half;
    if (sigma == 0) {
      best = std::min(best, Rat(k - 1));
    } else {
      best = std::min(best, std::min(sigma, half));
    }
  }
  best.canonicalize();
  return best;
}

/// U_p iterations that push every non-unit slope component below p^M.
inline int default_up_iterations(int k, long p, int M) {
  Rat s = min_nonunit_slope(k, p);
  Rat q = Rat(M) / s;
  Int c = q.get_num() / q.get_den();
  if (Rat(c) < q) c += 1;
  return std::max<int>(1, static_cast<int>(c.get_si()));
}

inline OrdinarySpace ordinary_space(int k, long p, int M, size_t n_max = 0) {
  require(k > 2 && k % 2 == 0, ErrorCode::InvalidArgument, "ordinary space needs even k > 2");
  OrdinarySpace sp;
  sp.weight = k;
  sp.p = p;
  sp.M = M;
  sp.sturm = sturm_bound(k, p);
  sp.min_nonunit_slope = min_nonunit_slope(k, p);
  const size_t len = std::max(n_max, sp.sturm);
  for (const auto& f : padic_eigenforms(k, p, M, len, true)) {
    if (f.ordinary)
      sp.basis.push_back(stabilize(f, p, len));
    else
      sp.nonordinary.push_back(f.label());
  }
  return sp;
}

struct Projection {
  std::vector<Int> coords;  // coordinates of e(F) on the stabilized basis
  int slack = 0;            // coordinates are exact mod p^(M - slack)
  int iterations = 0;       // U_p applications
  size_t rows = 0;          // coefficients used in the solve
  int residual_valuation = 0;
  long p = 0;
  int M = 0;
  int modulus_exponent() const { return M - slack; }
};

/// Required input length for ordinary_project with j U_p applications.
inline size_t projection_length(const OrdinarySpace& sp, int iterations) {
  return sp.sturm * static_cast<size_t>(ipow(sp.p, static_cast<unsigned long>(iterations)).get_ui());
}

/// e(F) coordinates: apply U_p^j, then solve F|U_p^j = sum c_i alpha_i^j f_i
/// on a_0..a_B; the residual must vanish mod p^(M - slack).
inline Projection ordinary_project(const QExp<ResidueRing>& F, const OrdinarySpace& sp,
                                   std::optional<int> iterations = std::nullopt) {
  const ResidueRing& ring = F.ring();
  const long p = sp.p;
  const int M = sp.M;
  require(ring.p() == p && ring.precision() == M, ErrorCode::RingMismatch, "input ring differs from the space");
  const int j = iterations.value_or(default_up_iterations(sp.weight, p, M));
  require(j >= 0, ErrorCode::InvalidArgument, "iteration count must be nonnegative");
  const size_t need = projection_length(sp, j);
  require(F.n_max() >= need, ErrorCode::InsufficientPrecision,
          "ordinary projection needs " + std::to_string(need) + " coefficients, have " + std::to_string(F.n_max()));
  QExp<ResidueRing> G = F;
  for (int i = 0; i < j; ++i) G = u_p(G, p);
  const size_t R = sp.rank();

  Projection out;
  out.p = p;
  out.M = M;
  out.iterations = j;
  const size_t max_rows = std::min(G.n_max(), 4 * sp.sturm);
  for (size_t rows = sp.sturm;; rows = std::min(2 * rows, max_rows)) {
    std::vector<Int> scale(R);
    for (size_t i = 0; i < R; ++i) scale[i] = ring.pow(sp.basis[i].alpha1.residue(), static_cast<unsigned long>(j));
    // augmented rows [A | G]
    std::vector<std::vector<Int>> a(rows + 1, std::vector<Int>(R + 1));
    for (size_t n = 0; n <= rows; ++n) {
      for (size_t i = 0; i < R; ++i) a[n][i] = ring.mul(scale[i], sp.basis[i].stream[n]);
      a[n][R] = G[n];
    }
    int slack = 0;
    bool singular = false;
    std::vector<size_t> pivot_row(R);
    std::vector<bool> used(rows + 1, false);
    for (size_t col = 0; col < R && !singular; ++col) {
      size_t best = rows + 1;
      int best_v = M;
      for (size_t n = 0; n <= rows; ++n) {
        if (used[n]) continue;
        int v = ring.valuation(a[n][col]);
        if (v < best_v) {
          best_v = v;
          best = n;
        }
      }
      if (best > rows) {
        singular = true;
        break;
      }
      used[best] = true;
      pivot_row[col] = best;
      slack += best_v;
      const Int pv = ipow(p, static_cast<unsigned long>(best_v));
      const Int unit_inv = ring.inverse(Int(a[best][col] / pv));
      for (size_t n = 0; n <= rows; ++n) {
        if (n == best || a[n][col] == 0) continue;
        Int ratio = ring.mul(Int(a[n][col] / pv), unit_inv);
        for (size_t c = col; c <= R; ++c) a[n][c] = ring.sub(a[n][c], ring.mul(ratio, a[best][c]));
      }
    }
    if ((singular || slack > 0) && rows < max_rows) continue;
    require(!singular, ErrorCode::SingularSystem,
            "stabilized basis is dependent on a_0..a_" + std::to_string(rows) + " mod p");
    require(slack < M, ErrorCode::PrecisionExhausted, "projection slack reaches the working precision");
    // back substitution on the triangular pivot system
    const int prec = M - slack;
    const Int mod = ipow(p, static_cast<unsigned long>(prec));
    std::vector<Int> c(R, Int(0));
    for (size_t col = R; col-- > 0;) {
      const size_t r = pivot_row[col];
      Int rhs = a[r][R];
      for (size_t c2 = col + 1; c2 < R; ++c2) rhs = ring.sub(rhs, ring.mul(a[r][c2], c[c2]));
      int v = ring.valuation(a[r][col]);
      const Int pv = ipow(p, static_cast<unsigned long>(v));
      require(ring.valuation(rhs) >= v, ErrorCode::ClosureViolation,
              "projection system is inconsistent at coordinate " + std::to_string(col));
      Int unit = a[r][col] / pv;
      Int inv;
      mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), mod.get_mpz_t());
      c[col] = mod_floor(Int(rhs / pv) * inv, mod);
    }
    // residual of the recombination on every row
    int resid_v = M;
    for (size_t n = 0; n <= rows; ++n) {
      Int r = G[n];
      for (size_t i = 0; i < R; ++i) r = ring.sub(r, ring.mul(c[i], ring.mul(scale[i], sp.basis[i].stream[n])));
      resid_v = std::min(resid_v, ring.valuation(r));
    }
    require(resid_v >= prec, ErrorCode::ClosureViolation,
            "U_p^" + std::to_string(j) + " F is not in the stabilized span: residual valuation " +
                std::to_string(resid_v) + " < " + std::to_string(prec));
    out.coords = std::move(c);
    out.slack = slack;
    out.rows = rows;
    out.residual_valuation = resid_v;
    return out;
  }
}

/// Recombination sum c_i f_i (the ordinary form with the given coordinates).
inline QExp<ResidueRing> recombine(const OrdinarySpace& sp, const std::vector<Int>& c, size_t n_max) {
  require(c.size() == sp.rank(), ErrorCode::InvalidArgument, "coordinate count differs from the rank");
  ResidueRing ring(sp.p, sp.M);
  QExp<ResidueRing> out(ring, n_max);
  out.set_weight(sp.weight).set_level(sp.p);
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t n = 0; n <= n_max; ++n) out[n] = ring.add(out[n], ring.mul(c[i], sp.basis[i].stream[n]));
  return out;
}

/// H(P) times the target coordinate, where H(P) = p^H_exponent.
inline PadicInt contract(const Projection& proj, size_t target, int H_exponent) {
  require(target < proj.coords.size(), ErrorCode::InvalidArgument, "target is not a basis vector of the space");
  ResidueRing ring(proj.p, std::max(1, proj.modulus_exponent()));
  return PadicInt(ring, proj.coords[target] * ipow(proj.p, static_cast<unsigned long>(H_exponent)));
}

/// Is A x = b solvable over Z/p^M? Diagonalizes A by unimodular row and column
/// operations (minimal-valuation pivots) and tests the transformed right side.
inline bool solvable_mod(std::vector<std::vector<Int>> a, std::vector<Int> b, long p, int M) {
  ResidueRing ring(p, M);
  const size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    size_t br = rows, bc = cols;
    int bv = M;
    for (size_t i = t; i < rows; ++i)
      for (size_t j = t; j < cols; ++j) {
        int v = ring.valuation(a[i][j]);
        if (v < bv) {
          bv = v;
          br = i;
          bc = j;
        }
      }
    if (br == rows) break;
    std::swap(a[t], a[br]);
    std::swap(b[t], b[br]);
    for (auto& row : a) std::swap(row[t], row[bc]);
    const Int pv = ipow(p, static_cast<unsigned long>(bv));
    const Int uinv = ring.inverse(Int(a[t][t] / pv));
    for (size_t i = t + 1; i < rows; ++i) {
      if (a[i][t] == 0) continue;
      Int r = ring.mul(Int(a[i][t] / pv), uinv);
      for (size_t j = t; j < cols; ++j) a[i][j] = ring.sub(a[i][j], ring.mul(r, a[t][j]));
      b[i] = ring.sub(b[i], ring.mul(r, b[t]));
    }
    for (size_t j = t + 1; j < cols; ++j) {
      if (a[t][j] == 0) continue;
      Int r = ring.mul(Int(a[t][j] / pv), uinv);
      for (size_t i = t; i < rows; ++i) a[i][j] = ring.sub(a[i][j], ring.mul(r, a[i][t]));
    }
    if (ring.valuation(b[t]) < bv) return false;
  }
  for (size_t i = t; i < rows; ++i)
    if (b[i] != 0) return false;
  return true;
}

/// Smallest s with p^s e_target in the Z_p-row span of the coefficient matrix
/// (rows = coefficients, columns = basis vectors): then p^s times the target
/// coordinate is integral on every integral form in the span.
inline int congruence_exponent(const std::vector<std::vector<Int>>& columns_by_row, size_t target, long p, int M) {
  const size_t rows = columns_by_row.size();
  const size_t R = rows ? columns_by_row[0].size() : 0;
  require(target < R, ErrorCode::InvalidArgument, "target column out of range");
  // x^T A = p^s e_target  <=>  A^T x = p^s e_target
  std::vector<std::vector<Int>> at(R, std::vector<Int>(rows));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < R; ++j) at[j][i] = columns_by_row[i][j];
  ResidueRing ring(p, M);
  for (int s = 0; s < M; ++s) {
    std::vector<Int> rhs(R, Int(0));
    rhs[target] = ring.from_int(ipow(p, static_cast<unsigned long>(s)));
    if (solvable_mod(at, rhs, p, M)) return s;
  }
  fail(ErrorCode::PrecisionExhausted, "congruence exponent is at least the working precision " + std::to_string(M));
}

inline int congruence_p_part(const OrdinarySpace& sp, size_t target) {
  std::vector<std::vector<Int>> rows(sp.sturm + 1, std::vector<Int>(sp.rank()));
  for (size_t n = 0; n <= sp.sturm; ++n)
    for (size_t i = 0; i < sp.rank(); ++i) rows[n][i] = sp.basis[i].stream[n];
  return congruence_exponent(rows, target, sp.p, sp.M);
}

struct PairingMatrix {
  std::vector<size_t> hecke_indices;  // T_n used, n >= 1
  std::vector<std::vector<Int>> entries;  // entries[i][j] = a(1, f_i | T_{n_j}) = a(n_j, f_i)
  Int det_mod_p;
  bool unimodular = false;
};

/// <f_i, T_n> = a(1, f_i|T_n) = a(n, f_i). Picks T_1 and the next indices that
/// raise the rank mod p.
inline PairingMatrix pairing_matrix(const OrdinarySpace& sp) {
  PairingMatrix pm;
  const size_t R = sp.rank();
  const long p = sp.p;
  auto rank_mod_p = [&](const std::vector<size_t>& idx) {
    std::vector<std::vector<long>> m;
    for (size_t j : idx) {
      std::vector<long> col;
      for (size_t i = 0; i < R; ++i) col.push_back(mod_floor(sp.basis[i].stream[j], Int(p)).get_si());
      m.push_back(col);
    }
    size_t rank = 0;
    for (size_t c = 0; c < R && rank < m.size(); ++c) {
      size_t piv = rank;
      while (piv < m.size() && m[piv][c] % p == 0) ++piv;
      if (piv == m.size()) continue;
      std::swap(m[piv], m[rank]);
      long inv = ResidueRing(p, 1).inverse(Int(m[rank][c])).get_si();
      for (size_t r = 0; r < m.size(); ++r) {
        if (r == rank || m[r][c] % p == 0) continue;
        long f = (m[r][c] * inv) % p;
        for (size_t cc = 0; cc < R; ++cc) m[r][cc] = ((m[r][cc] - f * m[rank][cc]) % p + p) % p;
      }
      ++rank;
    }
    return rank;
  };
  for (size_t n = 1; n <= sp.sturm && pm.hecke_indices.size() < R; ++n) {
    auto trial = pm.hecke_indices;
    trial.push_back(n);
    if (rank_mod_p(trial) == trial.size()) pm.hecke_indices = trial;
  }
  for (size_t i = 0; i < R; ++i) {
    std::vector<Int> row;
    for (size_t n : pm.hecke_indices) row.push_back(sp.basis[i].stream[n]);
    pm.entries.push_back(row);
  }
  if (pm.hecke_indices.size() == R) {
    IntMatrix m(R, R);
    for (size_t i = 0; i < R; ++i)
      for (size_t j = 0; j < R; ++j) m(i, j) = pm.entries[i][j];
    pm.det_mod_p = mod_floor(determinant(m), Int(p));
    pm.unimodular = pm.det_mod_p != 0;
  } else {
    pm.det_mod_p = 0;
  }
  return pm;
}

struct RankRow {
  int weight = 0;
  long branch = 0;  // k mod (p - 1)
  int dimension = 0;
  int rank = 0;
};

/// Ordinary rank of S_k(Gamma_0(p)) for k > 2: the number of level-1
/// eigenforms with unit a_p, read off charpoly(T_p) mod p.
inline int ordinary_rank(int k, long p) {
  const int d = dim_cusp(k);
  if (d == 0) return 0;
  auto cp = charpoly(hecke_matrix(k, p));
  int zero_mult = 0;
  while (zero_mult < d && mod_floor(cp[zero_mult], Int(p)) == 0) ++zero_mult;
  return d - zero_mult;
}

inline std::vector<RankRow> control_rank_scan(long p, const std::vector<int>& ks) {
  std::vector<RankRow> out;
  for (int k : ks) {
    require(k > 2 && k % 2 == 0, ErrorCode::InvalidArgument, "rank scan needs even k > 2");
    out.push_back({k, static_cast<long>(k % (p - 1)), dim_cusp(k), ordinary_rank(k, p)});
  }
  return out;
}

}  // namespace trisqrt
