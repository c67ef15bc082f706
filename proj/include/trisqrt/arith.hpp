#pragma once

// Exact scalars: unbounded integers and rationals (GMP), residues modulo p^M
// with precision tracking, and Hensel lifting.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "trisqrt/errors.hpp"

namespace trisqrt {

using Int = mpz_class;
using Rat = mpq_class;

inline Int ipow(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

inline Int ipow(long base, unsigned long exp) { return ipow(Int(base), exp); }

/// p-adic valuation of a nonzero integer. Zero is reported as `cap`.
inline int valuation(const Int& x, long p, int cap = 1 << 30) {
  if (x == 0) return cap;
  Int pp(p);
  Int rem;
  int v = static_cast<int>(mpz_remove(rem.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t()));
  return std::min(v, cap);
}

inline int valuation(const Rat& x, long p, int cap = 1 << 30) {
  if (x == 0) return cap;
  return valuation(x.get_num(), p) - valuation(x.get_den(), p);
}

/// Reduction into [0, m).
inline Int mod_floor(const Int& x, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<long> primes_upto(long n) {
  std::vector<long> out;
  if (n < 2) return out;
  std::vector<bool> sieve(static_cast<size_t>(n) + 1, true);
  for (long i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (long j = i * i; j <= n; j += i) sieve[j] = false;
  }
  return out;
}

inline std::string to_string(const Int& x) { return x.get_str(); }
inline std::string to_string(const Rat& x) { return x.get_str(); }

inline Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) fail(ErrorCode::InvalidArgument, "not a rational: " + s);
  r.canonicalize();
  return r;
}

inline Int parse_int(const std::string& s) {
  Int r;
  if (r.set_str(s, 10) != 0) fail(ErrorCode::InvalidArgument, "not an integer: " + s);
  return r;
}

/// The ring Z/p^M, used both as the coefficient ring of truncated p-adic
/// q-expansions and as the home of PadicInt. Copies share one modulus.
class ResidueRing {
 public:
  using value_type = Int;

  ResidueRing(long p, int precision) {
    require(is_prime(p), ErrorCode::InvalidArgument, "p must be prime, got " + std::to_string(p));
    require(precision >= 1, ErrorCode::InvalidArgument, "precision exponent M must be >= 1");
    data_ = std::make_shared<const Data>(Data{p, precision, ipow(p, precision)});
  }

  long p() const { return data_->p; }
  int precision() const { return data_->M; }
  const Int& modulus() const { return data_->modulus; }

  Int zero() const { return Int(0); }
  Int one() const { return Int(1); }
  Int from_int(const Int& x) const { return mod_floor(x, modulus()); }
  Int from_int(long x) const { return from_int(Int(x)); }

  /// Rationals map in when the denominator is prime to p.
  Int from_rat(const Rat& x) const {
    require(trisqrt::valuation(Int(x.get_den()), p()) == 0, ErrorCode::DivisionByNonUnit,
            "denominator " + x.get_den().get_str() + " is divisible by p=" + std::to_string(p()));
    return mul(from_int(x.get_num()), inverse(from_int(x.get_den())));
  }

  Int add(const Int& a, const Int& b) const {
    Int r = a + b;
    if (r >= modulus()) r -= modulus();
    return r;
  }
  Int sub(const Int& a, const Int& b) const {
    Int r = a - b;
    if (r < 0) r += modulus();
    return r;
  }
  Int neg(const Int& a) const { return a == 0 ? Int(0) : Int(modulus() - a); }
  Int mul(const Int& a, const Int& b) const {
    Int r = a * b;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus().get_mpz_t());
    return r;
  }
  bool is_zero(const Int& a) const { return a == 0; }
  bool is_unit(const Int& a) const { return mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(p())) == 0; }

  Int inverse(const Int& a) const {
    Int r;
    if (!is_unit(a) || mpz_invert(r.get_mpz_t(), a.get_mpz_t(), modulus().get_mpz_t()) == 0)
      fail(ErrorCode::DivisionByNonUnit, "element " + a.get_str() + " is not a unit mod " + std::to_string(p()) + "^" +
                                             std::to_string(precision()));
    return r;
  }

  Int pow(const Int& a, const Int& e) const {
    Int r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), modulus().get_mpz_t());
    return r;
  }
  Int pow(const Int& a, unsigned long e) const { return pow(a, Int(e)); }

  /// min(v_p(a), M).
  int valuation(const Int& a) const { return trisqrt::valuation(a, p(), precision()); }

  std::string to_string(const Int& a) const { return a.get_str(); }
  std::string tag() const { return "Z/" + std::to_string(p()) + "^" + std::to_string(precision()); }

  bool operator==(const ResidueRing& o) const { return p() == o.p() && precision() == o.precision(); }

 private:
  struct Data {
    long p;
    int M;
    Int modulus;
  };
  std::shared_ptr<const Data> data_;
};

/// The integers, as a coefficient ring.
struct IntegerRing {
  using value_type = Int;
  Int zero() const { return Int(0); }
  Int one() const { return Int(1); }
  Int from_int(const Int& x) const { return x; }
  Int from_int(long x) const { return Int(x); }
  Int add(const Int& a, const Int& b) const { return a + b; }
  Int sub(const Int& a, const Int& b) const { return a - b; }
  Int neg(const Int& a) const { return -a; }
  Int mul(const Int& a, const Int& b) const { return a * b; }
  bool is_zero(const Int& a) const { return a == 0; }
  std::string to_string(const Int& a) const { return a.get_str(); }
  std::string tag() const { return "ZZ"; }
  bool operator==(const IntegerRing&) const { return true; }
};

/// The rationals, as a coefficient ring.
struct RationalField {
  using value_type = Rat;
  Rat zero() const { return Rat(0); }
  Rat one() const { return Rat(1); }
  Rat from_int(const Int& x) const { return Rat(x); }
  Rat from_int(long x) const { return Rat(x); }
  Rat from_rat(const Rat& x) const { return x; }
  Rat add(const Rat& a, const Rat& b) const { return a + b; }
  Rat sub(const Rat& a, const Rat& b) const { return a - b; }
  Rat neg(const Rat& a) const { return -a; }
  Rat mul(const Rat& a, const Rat& b) const { return a * b; }
  Rat inverse(const Rat& a) const {
    require(a != 0, ErrorCode::DivisionByNonUnit, "division by zero");
    return 1 / a;
  }
  bool is_zero(const Rat& a) const { return a == 0; }
  std::string to_string(const Rat& a) const { return a.get_str(); }
  std::string tag() const { return "QQ"; }
  bool operator==(const RationalField&) const { return true; }
};

/// Valuation report for a truncated p-adic integer: when the residue is zero
/// the true valuation is only known to be at least M.
struct Valuation {
  int value;
  bool exact;
};

/// A p-adic integer known modulo p^M.
class PadicInt {
 public:
  PadicInt(ResidueRing ring, const Int& x) : ring_(std::move(ring)), residue_(ring_.from_int(x)) {}
  PadicInt(ResidueRing ring, long x) : PadicInt(std::move(ring), Int(x)) {}

  const ResidueRing& ring() const { return ring_; }
  long p() const { return ring_.p(); }
  int precision() const { return ring_.precision(); }
  const Int& residue() const { return residue_; }

  Valuation valuation() const {
    if (residue_ == 0) return {precision(), false};
    return {ring_.valuation(residue_), true};
  }
  bool is_unit() const { return ring_.is_unit(residue_); }

  PadicInt inverse() const { return {ring_, ring_.inverse(residue_)}; }
  PadicInt pow(unsigned long e) const { return {ring_, ring_.pow(residue_, e)}; }

  friend PadicInt operator+(const PadicInt& a, const PadicInt& b) {
    check(a, b);
    return {a.ring_, a.ring_.add(a.residue_, b.residue_)};
  }
  friend PadicInt operator-(const PadicInt& a, const PadicInt& b) {
    check(a, b);
    return {a.ring_, a.ring_.sub(a.residue_, b.residue_)};
  }
  friend PadicInt operator*(const PadicInt& a, const PadicInt& b) {
    check(a, b);
    return {a.ring_, a.ring_.mul(a.residue_, b.residue_)};
  }
  PadicInt operator-() const { return {ring_, ring_.neg(residue_)}; }
  friend bool operator==(const PadicInt& a, const PadicInt& b) { return a.ring_ == b.ring_ && a.residue_ == b.residue_; }

  std::string to_string() const { return residue_.get_str(); }

 private:
  static void check(const PadicInt& a, const PadicInt& b) {
    require(a.ring_ == b.ring_, ErrorCode::RingMismatch, a.ring_.tag() + " vs " + b.ring_.tag());
  }
  ResidueRing ring_;
  Int residue_;
};

/// An element p^shift * r of Q_p known modulo p^abs_precision. Used for the
/// Euler-factor quantities, which carry negative powers of p.
class PadicNum {
 public:
  PadicNum(long p, int shift, const Int& r, int abs_precision) : p_(p), shift_(shift), abs_(abs_precision), r_(r) {
    normalize();
  }

  static PadicNum from(const PadicInt& x) { return {x.p(), 0, x.residue(), x.precision()}; }
  static PadicNum from_rat(const Rat& x, long p, int abs_precision) {
    if (x == 0) return {p, 0, Int(0), abs_precision};
    int vd = trisqrt::valuation(x.get_den(), p);
    Int den = x.get_den() / ipow(p, vd);
    int rel = abs_precision + vd;
    if (rel <= 0) return {p, 0, Int(0), abs_precision};
    Int m = ipow(p, rel);
    Int inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    return {p, -vd, mod_floor(x.get_num() * inv, m), abs_precision};
  }

  long p() const { return p_; }
  int abs_precision() const { return abs_; }
  int shift() const { return shift_; }
  const Int& digits() const { return r_; }
  bool is_zero() const { return r_ == 0; }

  /// Known valuation; for a value indistinguishable from zero, abs_precision.
  int valuation() const { return r_ == 0 ? abs_ : shift_ + trisqrt::valuation(r_, p_); }

  friend PadicNum operator+(const PadicNum& a, const PadicNum& b) {
    int s = std::min(a.shift_, b.shift_);
    Int r = a.r_ * ipow(a.p_, a.shift_ - s) + b.r_ * ipow(a.p_, b.shift_ - s);
    return {a.p_, s, r, std::min(a.abs_, b.abs_)};
  }
  PadicNum operator-() const { return {p_, shift_, -r_, abs_}; }
  friend PadicNum operator-(const PadicNum& a, const PadicNum& b) { return a + (-b); }
  friend PadicNum operator*(const PadicNum& a, const PadicNum& b) {
    int prec = std::min(a.abs_ + b.valuation(), b.abs_ + a.valuation());
    return {a.p_, a.shift_ + b.shift_, a.r_ * b.r_, prec};
  }

  PadicNum inverse() const {
    require(r_ != 0, ErrorCode::PrecisionExhausted, "inverting a value indistinguishable from 0");
    int v = valuation();
    Int unit = r_ / ipow(p_, v - shift_);
    int rel = abs_ - v;
    Int m = ipow(p_, rel);
    Int inv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), m.get_mpz_t());
    return {p_, -v, inv, rel - v};
  }
  friend PadicNum operator/(const PadicNum& a, const PadicNum& b) { return a * b.inverse(); }

  PadicNum times_p_power(int e) const { return {p_, shift_ + e, r_, abs_ + e}; }

  /// Integral representative modulo p^abs_precision; requires valuation >= 0.
  PadicInt to_padic_int() const {
    require(valuation() >= 0, ErrorCode::PrecisionExhausted,
            "value has negative valuation " + std::to_string(valuation()));
    require(abs_ >= 1, ErrorCode::PrecisionExhausted, "no p-adic digits left");
    ResidueRing ring(p_, abs_);
    return {ring, r_ * ipow(p_, shift_)};
  }

  /// True when a and b agree modulo p^prec.
  friend bool agree_mod(const PadicNum& a, const PadicNum& b, int prec) {
    PadicNum d = a - b;
    return d.is_zero() ? d.abs_precision() >= prec : d.valuation() >= prec;
  }

  std::string to_string() const {
    std::string s = r_.get_str();
    if (shift_ != 0) s = std::to_string(p_) + "^" + std::to_string(shift_) + "*" + s;
    return s + " + O(" + std::to_string(p_) + "^" + std::to_string(abs_) + ")";
  }

 private:
  void normalize() {
    if (abs_ - shift_ <= 0) {
      r_ = 0;
      shift_ = abs_;
      return;
    }
    r_ = mod_floor(r_, ipow(p_, abs_ - shift_));
    if (r_ == 0) {
      shift_ = std::min(shift_, abs_);
      return;
    }
    int v = trisqrt::valuation(r_, p_);
    if (v > 0) {
      r_ /= ipow(p_, v);
      shift_ += v;
    }
  }

  long p_;
  int shift_;
  int abs_;
  Int r_;
};

/// Polynomial value, coefficients low-to-high.
inline Int poly_eval(const std::vector<Int>& coeffs, const Int& x) {
  Int acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline std::vector<Int> poly_derivative(const std::vector<Int>& coeffs) {
  std::vector<Int> d;
  for (size_t i = 1; i < coeffs.size(); ++i) d.push_back(coeffs[i] * static_cast<long>(i));
  return d;
}

/// Lift a simple root of an integer polynomial from Z/p to Z/p^M (Newton).
inline Int hensel_lift(const std::vector<Int>& coeffs, const Int& root_mod_p, long p, int M) {
  const auto deriv = poly_derivative(coeffs);
  Int modulus = ipow(p, M);
  Int x = mod_floor(root_mod_p, Int(p));
  require(mod_floor(poly_eval(coeffs, x), Int(p)) == 0, ErrorCode::InvalidArgument, "not a root mod p");
  require(mod_floor(poly_eval(deriv, x), Int(p)) != 0, ErrorCode::NonSplitField,
          "root " + x.get_str() + " is not simple mod " + std::to_string(p));
  for (int prec = 1; prec < M;) {
    prec = std::min(2 * prec, M);
    Int m = ipow(p, prec);
    Int fx = mod_floor(poly_eval(coeffs, x), m);
    Int dfx = mod_floor(poly_eval(deriv, x), m);
    Int inv;
    mpz_invert(inv.get_mpz_t(), dfx.get_mpz_t(), m.get_mpz_t());
    x = mod_floor(x - fx * inv, m);
  }
  return mod_floor(x, modulus);
}

/// All roots mod p^M of a polynomial that splits into distinct linear
/// factors mod p. Roots are ordered by their residue mod p^M.
inline std::vector<Int> split_roots(const std::vector<Int>& coeffs, long p, int M) {
  require(coeffs.size() >= 2, ErrorCode::InvalidArgument, "constant polynomial has no roots");
  size_t degree = coeffs.size() - 1;
  require(mod_floor(coeffs.back(), Int(p)) != 0, ErrorCode::NonSplitField, "leading coefficient vanishes mod p");
  std::vector<Int> roots;
  for (long r = 0; r < p; ++r)
    if (mod_floor(poly_eval(coeffs, Int(r)), Int(p)) == 0) roots.push_back(hensel_lift(coeffs, Int(r), p, M));
  require(roots.size() == degree, ErrorCode::NonSplitField,
          "polynomial of degree " + std::to_string(degree) + " has " + std::to_string(roots.size()) +
              " roots mod " + std::to_string(p));
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Unit root of X^2 - a_p X + p^(k-1), with its cofactor.
struct UnitRootPair {
  PadicInt alpha1;
  PadicInt alpha2;        // p^(k-1) * alpha1^-1 mod p^M
  int alpha2_valuation;   // exactly k - 1
};

inline UnitRootPair hensel_unit_root(const Int& a_p, long p, int k, int M) {
  require(k >= 2, ErrorCode::InvalidArgument, "weight must be >= 2");
  ResidueRing ring(p, M);
  require(valuation(a_p, p) == 0, ErrorCode::NotOrdinary,
          "a_p = " + a_p.get_str() + " has positive " + std::to_string(p) + "-adic valuation");
  Int pk1 = ipow(p, static_cast<unsigned long>(k - 1));
  std::vector<Int> poly{pk1, -a_p, Int(1)};
  PadicInt alpha1(ring, hensel_lift(poly, mod_floor(a_p, Int(p)), p, M));
  PadicInt alpha2 = PadicInt(ring, pk1) * alpha1.inverse();
  return {alpha1, alpha2, k - 1};
}

}  // namespace trisqrt
