#pragma once

// Number fields Q[x]/(m(x)) of degree <= 4 with m monic, integral and
// irreducible; these hold the Hecke eigenvalues of level-1 eigenforms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "trisqrt/arith.hpp"
#include "trisqrt/linalg.hpp"

namespace trisqrt {

inline constexpr int kMaxFieldDegree = 4;

using IntPoly = std::vector<Int>;  // low-to-high

inline void trim(IntPoly& f) {
  while (f.size() > 1 && f.back() == 0) f.pop_back();
}

inline std::string poly_to_string(const IntPoly& f, const std::string& var = "x") {
  std::string s;
  for (size_t i = f.size(); i-- > 0;) {
    if (f[i] == 0 && f.size() > 1) continue;
    Int c = f[i];
    std::string term;
    bool neg = c < 0;
    Int a = neg ? Int(-c) : c;
    if (i == 0 || a != 1) term = a.get_str();
    if (i >= 1) term += (term.empty() ? "" : "*") + var + (i > 1 ? "^" + std::to_string(i) : "");
    if (s.empty())
      s = (neg ? "-" : "") + term;
    else
      s += (neg ? " - " : " + ") + term;
  }
  return s.empty() ? "0" : s;
}

/// Exact division of monic integer polynomials; returns false on a remainder.
inline bool poly_divide(const IntPoly& num, const IntPoly& den, IntPoly& quot) {
  IntPoly r = num;
  const size_t dn = den.size() - 1;
  if (r.size() < den.size()) return false;
  quot.assign(r.size() - dn, Int(0));
  for (size_t i = r.size(); i-- > dn;) {
    Int c = r[i];
    if (c == 0) continue;
    Int q;
    if (!mpz_divisible_p(c.get_mpz_t(), den.back().get_mpz_t())) return false;
    q = c / den.back();
    quot[i - dn] = q;
    for (size_t j = 0; j <= dn; ++j) r[i - dn + j] -= q * den[j];
  }
  for (auto& c : r)
    if (c != 0) return false;
  return true;
}

namespace detail {

inline bool irreducible_mod(const IntPoly& f, long q) {
  const size_t n = f.size() - 1;
  auto red = [&](const Int& c) { return mod_floor(c, Int(q)).get_si(); };
  if (red(f.back()) == 0) return false;
  auto eval = [&](long x) {
    long acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = (acc * x + red(f[i])) % q;
    return acc;
  };
  for (long x = 0; x < q; ++x)
    if (eval(x) == 0) return false;
  if (n <= 3) return true;
  // degree 4: no monic quadratic factor x^2 + s x + t mod q
  std::vector<long> g(f.size());
  long lead_inv = 1;
  for (long x = 1; x < q; ++x)
    if ((red(f.back()) * x) % q == 1) lead_inv = x;
  for (size_t i = 0; i < f.size(); ++i) g[i] = (red(f[i]) * lead_inv) % q;
  for (long s = 0; s < q; ++s)
    for (long t = 0; t < q; ++t) {
      std::vector<long> r = g;
      for (size_t i = r.size(); i-- > 2;) {
        long c = r[i];
        r[i] = 0;
        r[i - 1] = ((r[i - 1] - c * s) % q + q) % q;
        r[i - 2] = ((r[i - 2] - c * t) % q + q) % q;
      }
      if (r[0] == 0 && r[1] == 0) return false;
    }
  return true;
}

inline std::vector<std::complex<long double>> numeric_roots(const IntPoly& f) {
  const size_t n = f.size() - 1;
  std::vector<long double> c(f.size());
  for (size_t i = 0; i < f.size(); ++i) c[i] = static_cast<long double>(f[i].get_d()) / f.back().get_d();
  long double radius = 1;
  for (size_t i = 0; i < n; ++i) radius = std::max(radius, 1 + std::fabs(c[i]));
  std::vector<std::complex<long double>> z(n);
  const std::complex<long double> seed(0.4L, 0.9L);
  for (size_t i = 0; i < n; ++i) z[i] = radius * std::pow(seed, static_cast<long double>(i));
  auto eval = [&](std::complex<long double> x) {
    std::complex<long double> acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    long double moved = 0;
    for (size_t i = 0; i < n; ++i) {
      std::complex<long double> den = 1;
      for (size_t j = 0; j < n; ++j)
        if (j != i) den *= (z[i] - z[j]);
      auto step = eval(z[i]) / den;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15L * radius) break;
  }
  return z;
}

inline Int round_to_int(long double x) {
  Int r;
  mpz_set_d(r.get_mpz_t(), static_cast<double>(std::llround(x)));
  if (std::fabs(x) > 9e18L) mpz_set_d(r.get_mpz_t(), static_cast<double>(std::round(x)));
  return r;
}

}  // namespace detail

/// Factor a monic integer polynomial of degree <= 4 into monic irreducible
/// factors over Q (with multiplicity). Factors are found numerically and
/// confirmed by exact division; irreducibility of what remains is certified
/// by reduction modulo a prime when possible.
inline std::vector<IntPoly> factor_monic(IntPoly f) {
  trim(f);
  require(f.back() == 1, ErrorCode::InvalidArgument, "factor_monic needs a monic polynomial");
  const size_t n = f.size() - 1;
  require(n <= static_cast<size_t>(kMaxFieldDegree), ErrorCode::IrreducibleDegreeTooHigh,
          "polynomial degree " + std::to_string(n) + " exceeds " + std::to_string(kMaxFieldDegree));
  if (n <= 1) return {f};
  auto roots = detail::numeric_roots(f);
  for (auto& z : roots) {
    if (std::fabs(z.imag()) > 1e-6L * (1 + std::abs(z))) continue;
    Int r = detail::round_to_int(z.real());
    if (poly_eval(f, r) == 0) {
      IntPoly q;
      poly_divide(f, IntPoly{-r, Int(1)}, q);
      auto rest = factor_monic(q);
      rest.insert(rest.begin(), IntPoly{-r, Int(1)});
      return rest;
    }
  }
  if (n == 4) {
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j) {
        auto s = roots[i] + roots[j];
        auto t = roots[i] * roots[j];
        if (std::fabs(s.imag()) > 1e-6L * (1 + std::abs(s)) || std::fabs(t.imag()) > 1e-6L * (1 + std::abs(t)))
          continue;
        IntPoly quad{detail::round_to_int(t.real()), -detail::round_to_int(s.real()), Int(1)};
        IntPoly q;
        if (poly_divide(f, quad, q)) {
          auto a = factor_monic(quad);
          auto b = factor_monic(q);
          a.insert(a.end(), b.begin(), b.end());
          return a;
        }
      }
  }
  return {f};
}

inline bool is_irreducible(const IntPoly& f) {
  for (long q : primes_upto(200))
    if (detail::irreducible_mod(f, q)) return true;
  return factor_monic(f).size() == 1;
}

class NumberField;

/// Element of Q[x]/(m): coordinates on 1, x, ..., x^(d-1).
class NFElem {
 public:
  NFElem(std::shared_ptr<const IntPoly> minpoly, std::vector<Rat> coords)
      : minpoly_(std::move(minpoly)), coords_(std::move(coords)) {
    coords_.resize(degree(), Rat(0));
  }

  size_t degree() const { return minpoly_->size() - 1; }
  const std::vector<Rat>& coords() const { return coords_; }
  const IntPoly& minpoly() const { return *minpoly_; }
  const std::shared_ptr<const IntPoly>& minpoly_ptr() const { return minpoly_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rat& c) { return c == 0; });
  }
  bool is_rational() const {
    return std::all_of(coords_.begin() + 1, coords_.end(), [](const Rat& c) { return c == 0; });
  }

  friend NFElem operator+(const NFElem& a, const NFElem& b) {
    check(a, b);
    NFElem r = a;
    for (size_t i = 0; i < r.coords_.size(); ++i) r.coords_[i] += b.coords_[i];
    return r;
  }
  friend NFElem operator-(const NFElem& a, const NFElem& b) {
    check(a, b);
    NFElem r = a;
    for (size_t i = 0; i < r.coords_.size(); ++i) r.coords_[i] -= b.coords_[i];
    return r;
  }
  NFElem operator-() const {
    NFElem r = *this;
    for (auto& c : r.coords_) c = -c;
    return r;
  }
  friend NFElem operator*(const NFElem& a, const NFElem& b) {
    check(a, b);
    const size_t d = a.degree();
    std::vector<Rat> prod(2 * d - 1, Rat(0));
    for (size_t i = 0; i < d; ++i) {
      if (a.coords_[i] == 0) continue;
      for (size_t j = 0; j < d; ++j) prod[i + j] += a.coords_[i] * b.coords_[j];
    }
    const auto& m = *a.minpoly_;
    for (size_t i = prod.size(); i-- > d;) {
      Rat c = prod[i];
      if (c == 0) continue;
      prod[i] = 0;
      for (size_t j = 0; j < d; ++j) prod[i - d + j] -= c * Rat(m[j]);
    }
    prod.resize(d);
    return {a.minpoly_, std::move(prod)};
  }
  friend NFElem operator*(const Rat& s, const NFElem& a) {
    NFElem r = a;
    for (auto& c : r.coords_) c *= s;
    return r;
  }

  /// Matrix of multiplication by this element on the power basis (column j = this * x^j).
  RatMatrix multiplication_matrix() const {
    const size_t d = degree();
    RatMatrix m(d, d);
    std::vector<Rat> e(d, Rat(0));
    for (size_t j = 0; j < d; ++j) {
      std::fill(e.begin(), e.end(), Rat(0));
      e[j] = 1;
      NFElem col = *this * NFElem(minpoly_, e);
      for (size_t i = 0; i < d; ++i) m(i, j) = col.coords_[i];
    }
    return m;
  }

  Rat trace() const {
    auto m = multiplication_matrix();
    Rat t = 0;
    for (size_t i = 0; i < degree(); ++i) t += m(i, i);
    return t;
  }

  /// Characteristic polynomial of multiplication by this element (integral for algebraic integers).
  IntPoly charpoly() const {
    auto rc = charpoly_rat(multiplication_matrix());
    IntPoly out;
    for (auto& x : rc) {
      require(x.get_den() == 1, ErrorCode::InvalidArgument, "element is not an algebraic integer");
      out.push_back(x.get_num());
    }
    return out;
  }

  NFElem inverse() const {
    require(!is_zero(), ErrorCode::DivisionByNonUnit, "inverse of zero in a number field");
    const size_t d = degree();
    std::vector<Rat> e1(d, Rat(0)), x;
    e1[0] = 1;
    bool ok = solve_in_place(multiplication_matrix(), e1, x);
    require(ok, ErrorCode::InvalidArgument, "number field minpoly is not irreducible");
    return {minpoly_, x};
  }
  friend NFElem operator/(const NFElem& a, const NFElem& b) { return a * b.inverse(); }

  friend bool operator==(const NFElem& a, const NFElem& b) {
    return *a.minpoly_ == *b.minpoly_ && a.coords_ == b.coords_;
  }

  /// Image under x -> root in Z/p^M. Denominators must be prime to p.
  Int embed(const Int& root, const ResidueRing& ring) const {
    Int acc = 0;
    for (size_t i = coords_.size(); i-- > 0;) acc = ring.add(ring.mul(acc, root), ring.from_rat(coords_[i]));
    return acc;
  }

  std::string to_string() const {
    std::string s;
    for (size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == 0) continue;
      std::string term = coords_[i].get_str();
      if (i > 0) term = "(" + term + ")*x" + (i > 1 ? "^" + std::to_string(i) : "");
      s += (s.empty() ? "" : " + ") + term;
    }
    return s.empty() ? "0" : s;
  }

 private:
  static void check(const NFElem& a, const NFElem& b) {
    if (a.minpoly_ != b.minpoly_ && *a.minpoly_ != *b.minpoly_)
      fail(ErrorCode::RingMismatch, "number field elements from different fields");
  }
  std::shared_ptr<const IntPoly> minpoly_;
  std::vector<Rat> coords_;
};

/// Ring descriptor for Q[x]/(m).
class NumberField {
 public:
  using value_type = NFElem;

  explicit NumberField(IntPoly minpoly) {
    trim(minpoly);
    require(minpoly.size() >= 2 && minpoly.back() == 1, ErrorCode::InvalidArgument, "minpoly must be monic of degree >= 1");
    require(minpoly.size() - 1 <= static_cast<size_t>(kMaxFieldDegree), ErrorCode::IrreducibleDegreeTooHigh,
            "field degree " + std::to_string(minpoly.size() - 1) + " exceeds " + std::to_string(kMaxFieldDegree));
    require(is_irreducible(minpoly), ErrorCode::InvalidArgument, "minpoly " + poly_to_string(minpoly) + " is reducible");
    minpoly_ = std::make_shared<const IntPoly>(std::move(minpoly));
  }

  size_t degree() const { return minpoly_->size() - 1; }
  const IntPoly& minpoly() const { return *minpoly_; }

  NFElem zero() const { return {minpoly_, {}}; }
  NFElem one() const { return from_rat(Rat(1)); }
  NFElem gen() const {
    if (degree() == 1) return from_rat(Rat(-(*minpoly_)[0]));
    std::vector<Rat> c(degree(), Rat(0));
    c[1] = 1;
    return {minpoly_, c};
  }
  NFElem from_rat(const Rat& x) const {
    std::vector<Rat> c(degree(), Rat(0));
    c[0] = x;
    return {minpoly_, c};
  }
  NFElem from_int(const Int& x) const { return from_rat(Rat(x)); }
  NFElem from_int(long x) const { return from_rat(Rat(x)); }
  NFElem make(std::vector<Rat> coords) const { return {minpoly_, std::move(coords)}; }

  NFElem add(const NFElem& a, const NFElem& b) const { return a + b; }
  NFElem sub(const NFElem& a, const NFElem& b) const { return a - b; }
  NFElem neg(const NFElem& a) const { return -a; }
  NFElem mul(const NFElem& a, const NFElem& b) const { return a * b; }
  NFElem inverse(const NFElem& a) const { return a.inverse(); }
  bool is_zero(const NFElem& a) const { return a.is_zero(); }
  std::string to_string(const NFElem& a) const { return a.to_string(); }
  std::string tag() const { return "QQ[x]/(" + poly_to_string(*minpoly_) + ")"; }

  bool operator==(const NumberField& o) const { return *minpoly_ == *o.minpoly_; }

  /// Roots of the minimal polynomial in Z/p^M; NonSplitField unless m splits
  /// into distinct linear factors mod p.
  std::vector<Int> split_roots(long p, int M) const { return trisqrt::split_roots(*minpoly_, p, M); }

 private:
  std::shared_ptr<const IntPoly> minpoly_;
};

/// Solve A x = b over a number field. Rows of A are vectors of NFElem.
inline bool nf_solve(std::vector<std::vector<NFElem>> a, std::vector<NFElem> b, std::vector<NFElem>& x) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    NFElem inv = a[col][col].inverse();
    for (size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col].is_zero()) continue;
      NFElem f = a[i][col] * inv;
      for (size_t j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[col][j];
      b[i] = b[i] - f * b[col];
    }
  }
  x.clear();
  for (size_t i = 0; i < n; ++i) x.push_back(b[i] / a[i][i]);
  return true;
}

}  // namespace trisqrt
