#pragma once

// Level-1 modular forms: Eisenstein series, Delta, Victor-Miller bases,
// Hecke matrices and eigenforms over number fields, nearly holomorphic forms
// in the Y = -1/(4 pi y) model, Maass-Shimura operators, holomorphic projection.

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "trisqrt/linalg.hpp"
#include "trisqrt/numfield.hpp"
#include "trisqrt/qexp.hpp"

namespace trisqrt {

/// dim M_k(SL_2(Z)).
inline int dim_modular(int k) {
  if (k < 0 || k % 2 != 0) return 0;
  if (k == 0) return 1;
  if (k == 2) return 0;
  return k / 12 + (k % 12 == 2 ? 0 : 1);
}

/// dim S_k(SL_2(Z)).
inline int dim_cusp(int k) {
  if (k < 12 || k % 2 != 0) return 0;
  return dim_modular(k) - 1;
}

/// Sturm bound B = ceil(k * index / 12), index = N prod_{q | N} (1 + 1/q):
/// a weight-k form on Gamma_0(N) whose a_0..a_B vanish mod p^e vanishes mod p^e.
inline size_t sturm_bound(int k, long level = 1) {
  Int index = level;
  Int num = level, den = 1;
  for (long q = 2; q <= level; ++q)
    if (level % q == 0 && is_prime(q)) {
      num *= (q + 1);
      den *= q;
    }
  index = num / den;
  Int b = (Int(k) * index + 11) / 12;
  return static_cast<size_t>(b.get_ui());
}

namespace detail {

inline std::vector<Int> divisor_power_sums(size_t n, unsigned long e) {
  std::vector<Int> s(n + 1, Int(0));
  for (size_t d = 1; d <= n; ++d) {
    Int de = ipow(Int(static_cast<unsigned long>(d)), e);
    for (size_t m = d; m <= n; m += d) s[m] += de;
  }
  return s;
}

}  // namespace detail

/// E_4 = 1 + 240 sum sigma_3(n) q^n and E_6 = 1 - 504 sum sigma_5(n) q^n.
inline QExp<IntegerRing> eisenstein(int k, size_t n_max) {
  require(k == 4 || k == 6, ErrorCode::Unsupported, "only E_4 and E_6 are provided");
  auto s = detail::divisor_power_sums(n_max, static_cast<unsigned long>(k - 1));
  const long c = k == 4 ? 240 : -504;
  std::vector<Int> a(n_max + 1);
  a[0] = 1;
  for (size_t n = 1; n <= n_max; ++n) a[n] = c * s[n];
  return {IntegerRing{}, std::move(a), k};
}

/// Delta = q prod (1 - q^n)^24, through eta^3 = sum (-1)^j (2j+1) q^(j(j+1)/2) raised to the 8th.
template <class Ring>
QExp<Ring> delta_series(const Ring& ring, size_t n_max) {
  std::vector<typename Ring::value_type> e3(n_max, ring.zero());
  for (long j = 0;; ++j) {
    size_t idx = static_cast<size_t>(j * (j + 1) / 2);
    if (idx >= n_max) break;
    e3[idx] = ring.from_int(Int(j % 2 == 0 ? 2 * j + 1 : -(2 * j + 1)));
  }
  auto x = e3;
  for (int i = 0; i < 3; ++i) x = mul_coeffs(ring, x, x, n_max);
  x.resize(n_max, ring.zero());
  std::vector<typename Ring::value_type> c(n_max + 1, ring.zero());
  for (size_t n = 1; n <= n_max; ++n) c[n] = x[n - 1];
  return {ring, std::move(c), 12};
}

inline QExp<IntegerRing> delta_series(size_t n_max) { return delta_series(IntegerRing{}, n_max); }

/// Integral echelon basis: b_i has a(offset + j, b_i) = delta_ij for j < dimension.
struct SpaceBasis {
  int weight = 0;
  bool cuspidal = true;
  size_t n_max = 0;
  std::vector<QExp<IntegerRing>> basis;
  size_t dimension() const { return basis.size(); }
  size_t offset() const { return cuspidal ? 1 : 0; }
};

namespace detail {

template <class Ring>
QExp<Ring> power(const QExp<Ring>& f, int e, size_t n_max) {
  const auto& R = f.ring();
  std::vector<typename Ring::value_type> one(n_max + 1, R.zero());
  one[0] = R.one();
  QExp<Ring> r(R, one, 0);
  QExp<Ring> base = f;
  for (; e > 0; e >>= 1) {
    if (e & 1) r = mul(r, base);
    if (e > 1) base = mul(base, base);
  }
  return r;
}

/// Echelon basis monomials Delta^j E_4^a E_6^b over any ring; the leading
/// coefficients are 1, so the reduction needs no division.
template <class Ring>
std::vector<QExp<Ring>> echelon_monomials(const Ring& R, int k, size_t n_max, bool cuspidal) {
  require(k >= 0 && k % 2 == 0, ErrorCode::InvalidArgument, "weight must be even and nonnegative");
  std::vector<QExp<Ring>> out;
  const int dim = cuspidal ? dim_cusp(k) : dim_modular(k);
  if (dim == 0) return out;
  const size_t off = cuspidal ? 1 : 0;
  require(n_max + 1 >= off + static_cast<size_t>(dim), ErrorCode::InsufficientPrecision,
          "basis of weight " + std::to_string(k) + " needs " + std::to_string(off + dim) + " coefficients");
  auto lift = [&](const QExp<IntegerRing>& f) {
    return change_ring(f, R, [&](const Int& x) { return R.from_int(x); });
  };
  auto e4 = lift(eisenstein(4, n_max)), e6 = lift(eisenstein(6, n_max));
  auto d = delta_series(R, n_max);
  for (int i = 0; i < dim; ++i) {
    const int j = static_cast<int>(off) + i;
    const int w = k - 12 * j;
    const int b = (w % 4 == 0) ? 0 : 1;
    const int a = (w - 6 * b) / 4;
    auto m = mul(mul(power(d, j, n_max), power(e4, a, n_max)), power(e6, b, n_max));
    out.push_back(m.set_weight(k));
  }
  for (int i = dim; i-- > 0;)
    for (int r = 0; r < dim; ++r) {
      if (r == i) continue;
      auto c = out[r][off + i];
      if (R.is_zero(c)) continue;
      for (size_t n = 0; n <= n_max; ++n) out[r][n] = R.sub(out[r][n], R.mul(c, out[i][n]));
    }
  return out;
}

inline SpaceBasis build_basis(int k, size_t n_max, bool cuspidal) {
  SpaceBasis out;
  out.weight = k;
  out.cuspidal = cuspidal;
  out.n_max = n_max;
  out.basis = echelon_monomials(IntegerRing{}, k, n_max, cuspidal);
  return out;
}

}  // namespace detail

/// Victor-Miller basis, cached by (k, n_max, cuspidal). The cache takes a
/// shared lock for lookups, so concurrent readers do not serialize.
inline std::shared_ptr<const SpaceBasis> victor_miller_basis(int k, size_t n_max, bool cuspidal = true) {
  using Key = std::tuple<int, size_t, bool>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const SpaceBasis>> cache;
  const Key key{k, n_max, cuspidal};
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const SpaceBasis>(detail::build_basis(k, n_max, cuspidal));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, built);
  return it->second;
}

/// Matrix of T_q on the cusp-form echelon basis: T_q b_j = sum_i M(i,j) b_i.
inline IntMatrix hecke_matrix(const SpaceBasis& space, long q) {
  const size_t d = space.dimension();
  IntMatrix m(d, d);
  if (d == 0) return m;
  const size_t off = space.offset();
  require(space.n_max >= static_cast<size_t>(q) * (off + d - 1), ErrorCode::InsufficientPrecision,
          "T_" + std::to_string(q) + " matrix needs " + std::to_string(q * (off + d - 1)) + " coefficients");
  for (size_t j = 0; j < d; ++j) {
    auto t = hecke_T(space.basis[j], q, off + d - 1);
    for (size_t i = 0; i < d; ++i) m(i, j) = t[off + i];
  }
  return m;
}

inline IntMatrix hecke_matrix(int k, long q) {
  const int d = dim_cusp(k);
  return hecke_matrix(*victor_miller_basis(k, static_cast<size_t>(q) * std::max(d, 1) + 1), q);
}

/// Normalized Hecke eigenform of level 1 with coefficients in Q[x]/(m),
/// where x is the T_2-eigenvalue. One object per Galois orbit.
struct Eigenform {
  int weight = 0;
  NumberField field;
  std::vector<NFElem> coords;  // on the echelon basis; coords[0] = a(1) = 1
  std::vector<NFElem> left;    // left eigenvector of the T_2 matrix
  QExp<NumberField> expansion;

  size_t degree() const { return field.degree(); }
  bool rational() const { return degree() == 1; }
};

namespace detail {

/// Nonzero vector in the kernel of a singular square matrix over a number field.
inline std::vector<NFElem> nf_kernel_vector(std::vector<std::vector<NFElem>> a, const NumberField& K) {
  const size_t n = a.size();
  std::vector<size_t> pivot_col;
  std::vector<bool> is_pivot(n, false);
  size_t row = 0;
  for (size_t col = 0; col < n && row < n; ++col) {
    size_t piv = row;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) continue;
    std::swap(a[piv], a[row]);
    NFElem inv = a[row][col].inverse();
    for (size_t j = 0; j < n; ++j) a[row][j] = a[row][j] * inv;
    for (size_t i = 0; i < n; ++i) {
      if (i == row || a[i][col].is_zero()) continue;
      NFElem f = a[i][col];
      for (size_t j = 0; j < n; ++j) a[i][j] = a[i][j] - f * a[row][j];
    }
    pivot_col.push_back(col);
    is_pivot[col] = true;
    ++row;
  }
  size_t free_col = n;
  for (size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  require(free_col < n, ErrorCode::SingularSystem, "eigenvalue has a trivial eigenspace");
  std::vector<NFElem> v(n, K.zero());
  v[free_col] = K.one();
  for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -a[r][free_col];
  return v;
}

}  // namespace detail

/// Eigenforms of S_k(SL_2(Z)), one per irreducible factor of the T_2
/// characteristic polynomial, each with n_max coefficients.
inline std::vector<Eigenform> eigenbasis(int k, size_t n_max) {
  const int d = dim_cusp(k);
  std::vector<Eigenform> out;
  if (d == 0) return out;
  auto space = victor_miller_basis(k, std::max(n_max, static_cast<size_t>(2 * d + 1)));
  IntMatrix t2 = hecke_matrix(*space, 2);
  auto cp = charpoly(t2);
  auto factors = factor_monic(cp);
  for (size_t i = 0; i < factors.size(); ++i)
    for (size_t j = i + 1; j < factors.size(); ++j)
      require(factors[i] != factors[j], ErrorCode::Unsupported,
              "T_2 has a repeated eigenvalue in weight " + std::to_string(k));
  std::sort(factors.begin(), factors.end(), [](const IntPoly& a, const IntPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  for (const auto& phi : factors) {
    NumberField K(phi);
    NFElem theta = K.gen();
    std::vector<std::vector<NFElem>> a(d, std::vector<NFElem>(d, K.zero())), at = a;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        NFElem v = K.from_int(t2(r, c));
        if (r == c) v = v - theta;
        a[r][c] = v;
        at[c][r] = v;
      }
    auto v = detail::nf_kernel_vector(a, K);
    require(!v[0].is_zero(), ErrorCode::SingularSystem, "eigenvector with a(1) = 0");
    NFElem s = v[0].inverse();
    for (auto& x : v) x = x * s;
    auto w = detail::nf_kernel_vector(at, K);
    std::vector<NFElem> coeffs(space->n_max + 1, K.zero());
    for (size_t n = 0; n <= space->n_max; ++n)
      for (int i = 0; i < d; ++i)
        if (space->basis[i][n] != 0) coeffs[n] = coeffs[n] + Rat(space->basis[i][n]) * v[i];
    QExp<NumberField> e(K, std::move(coeffs), k);
    out.push_back(Eigenform{k, K, v, w, e.truncate(n_max)});
  }
  return out;
}

/// Coefficient of each eigenform (in its own field) in the expansion of a
/// weight-k cusp form G; conjugate forms receive the conjugate coefficient.
inline std::vector<NFElem> eigen_expansion(const std::vector<Eigenform>& forms, const QExp<RationalField>& G) {
  std::vector<NFElem> out;
  for (const auto& f : forms) {
    const auto& K = f.field;
    const size_t d = f.coords.size();
    require(G.n_max() >= d, ErrorCode::InsufficientPrecision, "eigen-expansion needs a(1..D)");
    NFElem num = K.zero(), den = K.zero();
    for (size_t i = 0; i < d; ++i) {
      num = num + G[i + 1] * f.left[i];
      den = den + f.left[i] * f.coords[i];
    }
    out.push_back(num / den);
  }
  return out;
}

/// Sum over orbits of Tr(c_f a(n, f)); reproduces G when the expansion is right.
inline QExp<RationalField> recombine(const std::vector<Eigenform>& forms, const std::vector<NFElem>& c, size_t n_max) {
  std::vector<Rat> out(n_max + 1, Rat(0));
  for (size_t i = 0; i < forms.size(); ++i)
    for (size_t n = 0; n <= n_max; ++n) out[n] += (c[i] * forms[i].expansion[n]).trace();
  return {RationalField{}, std::move(out), forms.empty() ? std::nullopt : std::optional<int>(forms[0].weight)};
}

/// Nearly holomorphic form sum_t g_t Y^t of weight w.
template <class Ring>
struct NHForm {
  int weight = 0;
  std::vector<QExp<Ring>> comps;

  static NHForm holomorphic(const QExp<Ring>& g) { return {g.require_weight("NHForm"), {g}}; }
  int y_degree() const { return static_cast<int>(comps.size()) - 1; }
  size_t n_max() const {
    size_t n = comps[0].n_max();
    for (const auto& c : comps) n = std::min(n, c.n_max());
    return n;
  }
};

/// delta_w^r. One step: sum g_t Y^t -> sum [(d g_t) Y^t + (w - t) g_t Y^(t+1)].
template <class Ring>
NHForm<Ring> delta_op(const NHForm<Ring>& F, int r) {
  require(r >= 0, ErrorCode::InvalidArgument, "delta_op needs r >= 0");
  NHForm<Ring> cur = F;
  for (int step = 0; step < r; ++step) {
    const auto& R = cur.comps[0].ring();
    const size_t n = cur.n_max();
    std::vector<QExp<Ring>> next(cur.comps.size() + 1, QExp<Ring>(R, n));
    for (size_t t = 0; t < cur.comps.size(); ++t) {
      auto dg = theta(cur.comps[t].truncate(n), 1);
      auto sc = R.from_int(Int(cur.weight - static_cast<int>(t)));
      for (size_t i = 0; i <= n; ++i) {
        next[t][i] = R.add(next[t][i], dg[i]);
        next[t + 1][i] = R.add(next[t + 1][i], R.mul(sc, cur.comps[t][i]));
      }
    }
    cur.weight += 2;
    for (auto& c : next) c.set_weight(cur.weight);
    cur.comps = std::move(next);
  }
  return cur;
}

template <class Ring>
NHForm<Ring> operator*(const NHForm<Ring>& F, const NHForm<Ring>& G) {
  const auto& R = F.comps[0].ring();
  const size_t n = std::min(F.n_max(), G.n_max());
  NHForm<Ring> out{F.weight + G.weight, std::vector<QExp<Ring>>(F.comps.size() + G.comps.size() - 1, QExp<Ring>(R, n))};
  for (size_t t = 0; t < F.comps.size(); ++t)
    for (size_t s = 0; s < G.comps.size(); ++s) out.comps[t + s] = out.comps[t + s] + mul(F.comps[t], G.comps[s]);
  for (auto& c : out.comps) c.set_weight(out.weight);
  return out;
}

/// a(n, H(G)) = sum_t (-1)^t n^t (k-2-t)!/(k-2)! a(n, g_t), from
/// int_0^inf e^(-4 pi n y) y^(k-2-t) dy against the Y^t = (-1/(4 pi y))^t factor.
template <class Ring>
QExp<Ring> holomorphic_projection(const NHForm<Ring>& G) {
  const int k = G.weight;
  const int s = G.y_degree();
  require(k > 2 + 2 * s, ErrorCode::WeightTooSmall,
          "weight " + std::to_string(k) + " needs to exceed 2 + 2*" + std::to_string(s));
  const auto& R = G.comps[0].ring();
  for (const auto& c : G.comps)
    require(R.is_zero(c[0]), ErrorCode::InvalidArgument, "holomorphic projection needs a cuspidal input");
  const size_t n_max = G.n_max();
  std::vector<Rat> factor(s + 1);
  Rat fct = 1;
  for (int t = 0; t <= s; ++t) {
    factor[t] = (t % 2 == 0 ? fct : -fct);
    fct /= (k - 2 - t);  // (k-2-(t+1))!/(k-2)!
  }
  std::vector<typename Ring::value_type> c(n_max + 1, R.zero());
  for (size_t n = 1; n <= n_max; ++n)
    for (int t = 0; t <= s; ++t) {
      if (R.is_zero(G.comps[t][n])) continue;
      Rat w = factor[t] * Rat(ipow(Int(static_cast<unsigned long>(n)), static_cast<unsigned long>(t)));
      c[n] = R.add(c[n], R.mul(R.from_rat(w), G.comps[t][n]));
    }
  return {R, std::move(c), k};
}

}  // namespace trisqrt
