#pragma once

// Local standard and triple-product Euler factors, and partial Euler products
// evaluated in MPFR interval arithmetic.

#include <mpfr.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trisqrt/modforms.hpp"

namespace trisqrt {

/// Satake data at q: the roots of X^2 - a X + q^(k-1), kept as the polynomial.
struct SatakePair {
  long q = 0;
  int k = 0;
  Int a;

  Int norm() const { return ipow(q, static_cast<unsigned long>(k - 1)); }
  /// X^2 - a X + q^(k-1), low to high.
  IntPoly hecke_poly() const { return {norm(), -a, Int(1)}; }
  /// a^2 - 4 q^(k-1); the roots are rational iff this is a square.
  Int discriminant() const { return a * a - 4 * norm(); }
};

/// 1 - a T + q^(k-1) T^2.
inline IntPoly local_standard_factor(const SatakePair& s) { return {Int(1), -s.a, s.norm()}; }

namespace detail {

/// Sylvester matrix of P (degree m) and Q (degree n), both low to high.
inline IntMatrix sylvester(const IntPoly& P, const IntPoly& Q) {
  const size_t m = P.size() - 1, n = Q.size() - 1;
  IntMatrix S(m + n, m + n);
  for (size_t r = 0; r < n; ++r)
    for (size_t i = 0; i <= m; ++i) S(r, r + i) = P[m - i];
  for (size_t r = 0; r < m; ++r)
    for (size_t i = 0; i <= n; ++i) S(n + r, r + i) = Q[n - i];
  return S;
}

/// Exact interpolation of an integer polynomial of degree <= d from values at 0..d.
inline IntPoly interpolate(const std::vector<Int>& values) {
  const size_t n = values.size();
  std::vector<Rat> out(n, Rat(0));
  for (size_t i = 0; i < n; ++i) {
    // basis polynomial prod_{j != i} (X - j)/(i - j)
    std::vector<Rat> basis{Rat(1)};
    Rat denom = 1;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<Rat> next(basis.size() + 1, Rat(0));
      for (size_t t = 0; t < basis.size(); ++t) {
        next[t + 1] += basis[t];
        next[t] -= basis[t] * Rat(static_cast<long>(j));
      }
      basis = std::move(next);
      denom *= Rat(static_cast<long>(i) - static_cast<long>(j));
    }
    for (size_t t = 0; t < n; ++t) out[t] += basis[t] * Rat(values[i]) / denom;
  }
  IntPoly r(n);
  for (size_t t = 0; t < n; ++t) {
    out[t].canonicalize();
    require(out[t].get_den() == 1, ErrorCode::ClosureViolation, "interpolated resultant is not integral");
    r[t] = out[t].get_num();
  }
  trim(r);
  return r;
}

}  // namespace detail

/// Monic polynomial whose roots are all products x y with A(x) = B(y) = 0:
/// Res_Y(A(Y), Y^deg B * B(X/Y)), by evaluation at integer X and interpolation.
inline IntPoly composed_product(const IntPoly& A, const IntPoly& B) {
  require(A.back() == 1 && B.back() == 1, ErrorCode::InvalidArgument, "composed product needs monic inputs");
  require(B[0] != 0, ErrorCode::InvalidArgument, "composed product needs B(0) != 0");
  const size_t dA = A.size() - 1, dB = B.size() - 1;
  std::vector<Int> values;
  for (size_t x = 0; x <= dA * dB; ++x) {
    IntPoly Bx(dB + 1);
    Int xp = 1;
    for (size_t i = 0; i <= dB; ++i) {
      Bx[dB - i] = B[i] * xp;
      xp *= static_cast<unsigned long>(x);
    }
    values.push_back(determinant(detail::sylvester(A, Bx)));
  }
  return detail::interpolate(values);
}

/// prod over the eight root products rho of (1 - rho T), low to high in T = q^-s.
inline IntPoly local_triple_factor(const SatakePair& f, const SatakePair& g, const SatakePair& h) {
  require(f.q == g.q && g.q == h.q, ErrorCode::InvalidArgument, "Satake data at different primes");
  IntPoly R = composed_product(composed_product(f.hecke_poly(), g.hecke_poly()), h.hecke_poly());
  std::reverse(R.begin(), R.end());
  return R;
}

/// Same product computed in Q[s1,s2,s3]/(s_i^2 - d_i), d_i = a_i^2 - 4 N_i, with
/// roots (a_i +- s_i)/2. T needs +, -, * and Rat scaling. Every component
/// involving some s_i must cancel (Galois stability); that is checked.
template <class T>
std::vector<T> local_triple_factor_brute(const std::vector<std::pair<T, T>>& aN, const T& zero, const T& one) {
  require(aN.size() == 3, ErrorCode::InvalidArgument, "triple factor needs three forms");
  using Elem = std::vector<T>;  // 8 components indexed by a bit mask of s_i
  std::vector<T> d;
  for (const auto& [a, N] : aN) d.push_back(a * a - Rat(4) * N);
  auto emul = [&](const Elem& x, const Elem& y) {
    Elem z(8, zero);
    for (int e = 0; e < 8; ++e)
      for (int f = 0; f < 8; ++f) {
        T t = x[e] * y[f];
        for (int i = 0; i < 3; ++i)
          if ((e >> i & 1) && (f >> i & 1)) t = t * d[i];
        z[e ^ f] = z[e ^ f] + t;
      }
    return z;
  };
  std::vector<Elem> poly{Elem(8, zero)};
  poly[0][0] = one;
  for (int signs = 0; signs < 8; ++signs) {
    Elem rho(8, zero);
    rho[0] = one;
    for (int i = 0; i < 3; ++i) {
      Elem lin(8, zero);
      lin[0] = Rat(Int(1), Int(2)) * aN[i].first;
      lin[1 << i] = Rat(Int((signs >> i & 1) ? -1 : 1), Int(2)) * one;
      rho = emul(rho, lin);
    }
    std::vector<Elem> next(poly.size() + 1, Elem(8, zero));
    for (size_t t = 0; t < poly.size(); ++t) {
      for (int e = 0; e < 8; ++e) next[t][e] = next[t][e] + poly[t][e];
      Elem prod = emul(poly[t], rho);
      for (int e = 0; e < 8; ++e) next[t + 1][e] = next[t + 1][e] - prod[e];
    }
    poly = std::move(next);
  }
  std::vector<T> out;
  for (const auto& c : poly) {
    for (int e = 1; e < 8; ++e)
      require(c[e] == zero, ErrorCode::ClosureViolation, "triple factor coefficient is not Galois-stable");
    out.push_back(c[0]);
  }
  return out;
}

inline IntPoly local_triple_factor_brute(const SatakePair& f, const SatakePair& g, const SatakePair& h) {
  NumberField Q(IntPoly{Int(0), Int(1)});
  std::vector<std::pair<NFElem, NFElem>> data;
  for (const SatakePair* x : {&f, &g, &h}) data.emplace_back(Q.from_int(x->a), Q.from_int(x->norm()));
  auto c = local_triple_factor_brute(data, Q.zero(), Q.one());
  IntPoly out;
  for (const auto& x : c) {
    Rat v = x.coords()[0];
    require(v.get_den() == 1, ErrorCode::ClosureViolation, "triple factor coefficient is not integral");
    out.push_back(v.get_num());
  }
  return out;
}

namespace detail {

/// Polynomial in (a, b, c, A, B, C) with rational coefficients.
struct MPoly {
  using Exp = std::array<int, 6>;
  std::map<Exp, Rat> terms;

  static MPoly var(int i) {
    MPoly m;
    Exp e{};
    e[i] = 1;
    m.terms[e] = 1;
    return m;
  }
  static MPoly constant(const Rat& c) {
    MPoly m;
    if (c != 0) m.terms[Exp{}] = c;
    return m;
  }
  void add(const Exp& e, const Rat& c) {
    auto& slot = terms[e];
    slot += c;
    if (slot == 0) terms.erase(e);
  }
  friend MPoly operator+(MPoly a, const MPoly& b) {
    for (const auto& [e, c] : b.terms) a.add(e, c);
    return a;
  }
  friend MPoly operator-(MPoly a, const MPoly& b) {
    for (const auto& [e, c] : b.terms) a.add(e, -c);
    return a;
  }
  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly r;
    for (const auto& [e1, c1] : a.terms)
      for (const auto& [e2, c2] : b.terms) {
        Exp e;
        for (int i = 0; i < 6; ++i) e[i] = e1[i] + e2[i];
        r.add(e, c1 * c2);
      }
    return r;
  }
  friend MPoly operator*(const Rat& s, const MPoly& a) { return MPoly::constant(s) * a; }
  friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms == b.terms; }
};

/// The nine coefficients of the triple factor as universal polynomials in
/// a, b, c and the norms A, B, C.
inline const std::vector<MPoly>& universal_triple_factor() {
  static const std::vector<MPoly> coeffs = [] {
    std::vector<std::pair<MPoly, MPoly>> aN{
        {MPoly::var(0), MPoly::var(3)}, {MPoly::var(1), MPoly::var(4)}, {MPoly::var(2), MPoly::var(5)}};
    return local_triple_factor_brute(aN, MPoly{}, MPoly::constant(1));
  }();
  return coeffs;
}

}  // namespace detail

/// Coefficients of 1/P(T) up to T^n (P(0) = 1): the Dirichlet coefficients at q^j.
inline std::vector<Int> inverse_series(const IntPoly& P, size_t n) {
  require(!P.empty() && P[0] == 1, ErrorCode::InvalidArgument, "local factor must have constant term 1");
  std::vector<Int> c(n + 1, Int(0));
  c[0] = 1;
  for (size_t j = 1; j <= n; ++j)
    for (size_t i = 1; i < P.size() && i <= j; ++i) c[j] -= P[i] * c[j - i];
  return c;
}

/// Closed interval [lo, hi] of MPFR numbers with outward rounding.
class Interval {
 public:
  explicit Interval(mpfr_prec_t prec = 64) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  Interval(const Rat& x, mpfr_prec_t prec) : Interval(prec) {
    mpfr_set_q(lo_, x.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, x.get_mpq_t(), MPFR_RNDU);
  }
  Interval(const Rat& lo, const Rat& hi, mpfr_prec_t prec) : Interval(prec) {
    mpfr_set_q(lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, hi.get_mpq_t(), MPFR_RNDU);
  }
  Interval(const Interval& o) : Interval(o.prec_) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  Interval& operator=(const Interval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, o.prec_);
      mpfr_set_prec(hi_, o.prec_);
      prec_ = o.prec_;
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  mpfr_prec_t precision() const { return prec_; }
  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
  double lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec_, b.prec_));
    mpfr_t t;
    mpfr_init2(t, r.prec_);
    bool first = true;
    for (auto x : {a.lo_, a.hi_})
      for (auto y : {b.lo_, b.hi_}) {
        mpfr_mul(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    mpfr_clear(t);
    return r;
  }
  Interval reciprocal() const {
    require(!contains_zero(), ErrorCode::DivisionByNonUnit, "interval reciprocal across zero");
    Interval r(prec_);
    mpfr_ui_div(r.lo_, 1, hi_, MPFR_RNDD);
    mpfr_ui_div(r.hi_, 1, lo_, MPFR_RNDU);
    return r;
  }
  friend Interval operator/(const Interval& a, const Interval& b) { return a * b.reciprocal(); }

  /// q^-s for s in [s_lo, s_hi]; decreasing in s since q >= 2.
  static Interval prime_power(long q, const Interval& s) {
    Interval r(s.prec_);
    mpfr_t base, e;
    mpfr_init2(base, s.prec_ + 64);
    mpfr_init2(e, s.prec_);
    mpfr_set_si(base, q, MPFR_RNDN);  // exact
    mpfr_neg(e, s.hi_, MPFR_RNDN);    // exact
    mpfr_pow(r.lo_, base, e, MPFR_RNDD);
    mpfr_neg(e, s.lo_, MPFR_RNDN);
    mpfr_pow(r.hi_, base, e, MPFR_RNDU);
    mpfr_clear(base);
    mpfr_clear(e);
    return r;
  }

  std::string lo_string(int digits = 20) const { return str(lo_, MPFR_RNDD, digits); }
  std::string hi_string(int digits = 20) const { return str(hi_, MPFR_RNDU, digits); }

  /// Leading decimal digits shared by both endpoints.
  int agreeing_digits() const {
    const std::string a = lo_string(40), b = hi_string(40);
    int n = 0;
    for (size_t i = 0; i < std::min(a.size(), b.size()) && a[i] == b[i]; ++i)
      if (std::isdigit(static_cast<unsigned char>(a[i]))) ++n;
    return n;
  }

 private:
  static std::string str(const mpfr_t x, mpfr_rnd_t rnd, int digits) {
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, rnd == MPFR_RNDD ? "%.*RDe" : "%.*RUe", digits - 1, x);
    return buf;
  }

  mpfr_prec_t prec_;
  mpfr_t lo_, hi_;
};

/// Real embedding of an element of a totally real field, as an interval.
class RealEmbedding {
 public:
  /// Embedding number `index` in increasing order of the real roots.
  RealEmbedding(const IntPoly& minpoly, size_t index, mpfr_prec_t prec = 64) : prec_(prec) {
    auto approx = detail::numeric_roots(minpoly);
    std::vector<long double> re;
    for (const auto& z : approx) {
      require(std::fabs(z.imag()) < 1e-6L * (1 + std::abs(z)), ErrorCode::Unsupported, "field is not totally real");
      re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    require(index < re.size(), ErrorCode::InvalidArgument, "embedding index out of range");
    auto to_rat = [](long double x) {
      Rat r;
      mpq_set_d(r.get_mpq_t(), static_cast<double>(x));
      return r;
    };
    const long double span = 1 + std::fabs(re[index]);
    Rat lo = index > 0 ? to_rat((re[index - 1] + re[index]) / 2) : to_rat(re[index] - span);
    Rat hi = index + 1 < re.size() ? to_rat((re[index] + re[index + 1]) / 2) : to_rat(re[index] + span);
    auto eval = [&](const Rat& x) {
      Rat acc = 0;
      for (size_t i = minpoly.size(); i-- > 0;) acc = acc * x + Rat(minpoly[i]);
      return sgn(acc);
    };
    int slo = eval(lo);
    require(slo != 0 || eval(hi) != 0, ErrorCode::ClosureViolation, "root isolation failed");
    require(slo * eval(hi) < 0 || minpoly.size() == 2, ErrorCode::ClosureViolation, "root isolation failed");
    if (minpoly.size() == 2) {
      lo = hi = Rat(-minpoly[0]);
    } else {
      for (int it = 0; it < static_cast<int>(prec) + 16; ++it) {
        Rat mid = (lo + hi) / 2;
        int sm = eval(mid);
        if (sm == 0) {
          lo = hi = mid;
          break;
        }
        if (sm == slo)
          lo = mid;
        else
          hi = mid;
      }
    }
    root_lo_ = lo;
    root_hi_ = hi;
  }

  Interval operator()(const NFElem& x) const {
    Interval root(root_lo_, root_hi_, prec_);
    Interval acc(Rat(0), prec_);
    const auto& c = x.coords();
    for (size_t i = c.size(); i-- > 0;) acc = acc * root + Interval(c[i], prec_);
    return acc;
  }

 private:
  mpfr_prec_t prec_;
  Rat root_lo_, root_hi_;
};

struct PartialLRow {
  long q = 0;
  Interval value;  // product over primes <= q
};

struct PartialLResult {
  Rat s;
  long Q = 0;
  int w = 0;             // k + l + m - 3
  bool convergent = false;  // s > w/2 + 1
  Interval value;
  std::vector<PartialLRow> rows;

  std::string label() const { return convergent ? "convergent" : "formal"; }
};

/// Hecke eigenvalue source for partial_L: a level-1 eigenform under one real embedding.
struct RealForm {
  int weight = 0;
  QExp<NumberField> expansion;
  size_t embedding = 0;
};

inline RealForm real_form(int k, size_t orbit, size_t embedding, size_t n_max) {
  auto forms = eigenbasis(k, n_max);
  require(orbit < forms.size(), ErrorCode::InvalidArgument, "orbit index out of range");
  require(embedding < forms[orbit].degree(), ErrorCode::InvalidArgument, "embedding index out of range");
  return {k, forms[orbit].expansion, embedding};
}

/// prod_{q <= Q} (local triple factor at q^-s)^-1, in interval arithmetic. The
/// local polynomial is expanded over the fields of the three forms (brute route)
/// and then embedded.
inline PartialLResult partial_L(const Rat& s, long Q, const RealForm& f, const RealForm& g, const RealForm& h,
                                mpfr_prec_t prec = 64) {
  PartialLResult out{s, Q, f.weight + g.weight + h.weight - 3, false, Interval(Rat(1), prec), {}};
  out.convergent = s > Rat(Int(out.w), Int(2)) + 1;
  if (Q < 2) return out;
  for (const RealForm* x : {&f, &g, &h})
    require(x->expansion.n_max() >= static_cast<size_t>(Q), ErrorCode::InsufficientPrecision,
            "partial_L needs a(q) for q <= Q");
  std::vector<RealEmbedding> emb;
  for (const RealForm* x : {&f, &g, &h}) emb.emplace_back(x->expansion.ring().minpoly(), x->embedding, prec + 32);
  Interval sv(s, prec + 32);
  Interval acc(Rat(1), prec + 32);
  for (long q : primes_upto(Q)) {
    // each form contributes in its own field; combine numerically
    std::vector<Interval> a;
    for (size_t i = 0; i < 3; ++i) {
      const RealForm& x = i == 0 ? f : (i == 1 ? g : h);
      a.push_back(emb[i](x.expansion[static_cast<size_t>(q)]));
    }
    for (const RealForm* x : {&f, &g, &h})
      a.emplace_back(Rat(ipow(q, static_cast<unsigned long>(x->weight - 1))), prec + 32);
    std::vector<Interval> coeffs;
    for (const auto& mp : detail::universal_triple_factor()) {
      Interval c(Rat(0), prec + 32);
      for (const auto& [e, r] : mp.terms) {
        Interval t(r, prec + 32);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < e[i]; ++j) t = t * a[i];
        c = c + t;
      }
      coeffs.push_back(c);
    }
    Interval T = Interval::prime_power(q, sv);
    Interval P(Rat(0), prec + 32), Tp(Rat(1), prec + 32);
    for (const auto& c : coeffs) {
      P = P + c * Tp;
      Tp = Tp * T;
    }
    acc = acc / P;
    out.rows.push_back({q, acc});
  }
  out.value = acc;
  return out;
}

inline nlohmann::json poly_json(const IntPoly& P) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : P) a.push_back(c.get_str());
  return a;
}

}  // namespace trisqrt
