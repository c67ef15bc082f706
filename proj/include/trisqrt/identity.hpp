#pragma once

// Exact Laurent-polynomial algebra for the Euler-factor bookkeeping. Symbols:
// u with u^2 = p, alpha_1, b_p, c_p. The relations alpha_1 alpha_2 = p^(k-1)
// and a_p = alpha_1 + alpha_2 are imposed by substituting
// alpha_2 = u^(2k-2) alpha_1^-1, which makes the representation canonical.

#include <json.hpp>

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "trisqrt/arith.hpp"

namespace trisqrt {

class PairingExpr {
 public:
  struct Mono {
    int u = 0;       // power of u (u^2 = p)
    int alpha1 = 0;  // power of alpha_1 (any sign)
    int b = 0;
    int c = 0;
    friend bool operator<(const Mono& x, const Mono& y) {
      return std::tie(x.u, x.alpha1, x.b, x.c) < std::tie(y.u, y.alpha1, y.b, y.c);
    }
    friend bool operator==(const Mono& x, const Mono& y) {
      return std::tie(x.u, x.alpha1, x.b, x.c) == std::tie(y.u, y.alpha1, y.b, y.c);
    }
  };

  explicit PairingExpr(int k) : k_(k) {}

  static PairingExpr constant(int k, const Rat& c) {
    PairingExpr e(k);
    e.add_term({}, c);
    return e;
  }
  /// p^x for x in (1/2)Z, given as twice the exponent.
  static PairingExpr p_pow_half(int k, int twice_exponent) {
    PairingExpr e(k);
    e.add_term({twice_exponent, 0, 0, 0}, Rat(1));
    return e;
  }
  static PairingExpr p_pow(int k, int exponent) { return p_pow_half(k, 2 * exponent); }
  static PairingExpr alpha1(int k, int power = 1) {
    PairingExpr e(k);
    e.add_term({0, power, 0, 0}, Rat(1));
    return e;
  }
  static PairingExpr alpha2(int k) {
    PairingExpr e(k);
    e.add_term({2 * k - 2, -1, 0, 0}, Rat(1));
    return e;
  }
  static PairingExpr a_p(int k) { return alpha1(k) + alpha2(k); }
  static PairingExpr b_p(int k) {
    PairingExpr e(k);
    e.add_term({0, 0, 1, 0}, Rat(1));
    return e;
  }
  static PairingExpr c_p(int k) {
    PairingExpr e(k);
    e.add_term({0, 0, 0, 1}, Rat(1));
    return e;
  }

  int k() const { return k_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Mono, Rat>& terms() const { return terms_; }

  friend PairingExpr operator+(PairingExpr a, const PairingExpr& b) {
    check(a, b);
    for (const auto& [m, c] : b.terms_) a.add_term(m, c);
    return a;
  }
  friend PairingExpr operator-(PairingExpr a, const PairingExpr& b) {
    check(a, b);
    for (const auto& [m, c] : b.terms_) a.add_term(m, -c);
    return a;
  }
  friend PairingExpr operator*(const PairingExpr& a, const PairingExpr& b) {
    check(a, b);
    PairingExpr r(a.k_);
    for (const auto& [m1, c1] : a.terms_)
      for (const auto& [m2, c2] : b.terms_)
        r.add_term({m1.u + m2.u, m1.alpha1 + m2.alpha1, m1.b + m2.b, m1.c + m2.c}, c1 * c2);
    return r;
  }
  friend PairingExpr operator*(const Rat& s, const PairingExpr& a) { return PairingExpr::constant(a.k_, s) * a; }
  friend bool operator==(const PairingExpr& a, const PairingExpr& b) { return a.k_ == b.k_ && a.terms_ == b.terms_; }

  /// Every u-exponent is even (the expression lies in Z[1/p][alpha_1^+-1, b, c]).
  bool integral_p_powers() const {
    for (const auto& [m, c] : terms_)
      if (m.u % 2 != 0) return false;
    return true;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      std::string coef = c.get_str();
      std::string t;
      if (m.u != 0) t += (m.u % 2 == 0 ? "p^" + std::to_string(m.u / 2) : "p^(" + std::to_string(m.u) + "/2)");
      auto factor = [&](const char* name, int e) {
        if (e == 0) return;
        if (!t.empty()) t += "*";
        t += name;
        if (e != 1) t += "^" + std::to_string(e);
      };
      factor("alpha1", m.alpha1);
      factor("b", m.b);
      factor("c", m.c);
      std::string term;
      if (t.empty())
        term = coef;
      else if (c == 1)
        term = t;
      else if (c == -1)
        term = "-" + t;
      else
        term = coef + "*" + t;
      if (s.empty())
        s = term;
      else if (term[0] == '-')
        s += " - " + term.substr(1);
      else
        s += " + " + term;
    }
    return s;
  }

  /// Value in Q_p given alpha_1 (a unit mod p^M) and integer b, c. Precision is
  /// tracked through PadicNum; odd u-powers are rejected.
  PadicNum evaluate(const PadicInt& a1, const Int& b, const Int& c) const {
    const long p = a1.p();
    const int M = a1.precision();
    const int big = 4 * (M + k_) + 16;
    PadicNum acc(p, 0, Int(0), big);
    PadicNum a1n = PadicNum::from(a1);
    PadicNum a1inv = a1n.inverse();
    for (const auto& [m, coef] : terms_) {
      require(m.u % 2 == 0, ErrorCode::Unsupported, "half-integral power of p cannot be evaluated in Q_p");
      PadicNum t = PadicNum::from_rat(coef, p, big);
      t = t.times_p_power(m.u / 2);
      const PadicNum& base = m.alpha1 >= 0 ? a1n : a1inv;
      for (int i = 0; i < std::abs(m.alpha1); ++i) t = t * base;
      PadicNum bn(p, 0, b, big), cn(p, 0, c, big);
      for (int i = 0; i < m.b; ++i) t = t * bn;
      for (int i = 0; i < m.c; ++i) t = t * cn;
      acc = acc + t;
    }
    return acc;
  }

 private:
  static void check(const PairingExpr& a, const PairingExpr& b) {
    require(a.k_ == b.k_, ErrorCode::RingMismatch, "expressions specialized at different weights");
  }
  void add_term(const Mono& m, const Rat& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
      return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }

  int k_;
  std::map<Mono, Rat> terms_;
};

namespace detail {

inline void check_weights(int k, int l, int m) {
  require(k % 2 == 0 && l % 2 == 0 && m % 2 == 0, ErrorCode::InvalidArgument, "weights must be even");
  require(k >= l + m, ErrorCode::InvalidArgument, "need k >= l + m");
}

}  // namespace detail

/// The six terms of the pairing computation, as coefficients of <f, G>.
inline std::vector<PairingExpr> T_terms(int k, int l, int m) {
  detail::check_weights(k, l, m);
  using E = PairingExpr;
  const auto ap = E::a_p(k), a2 = E::alpha2(k), b = E::b_p(k), c = E::c_p(k);
  auto P = [&](int twice) { return E::p_pow_half(k, twice); };
  // exponents written as twice their value
  const int e_klm = 4 - (k + l + m);   // 2 - (k+l+m)/2
  const int e_klm3 = 2 - (k + l - m);  // 1 - (k+l-m)/2
  const int e_km = 2 - (k + m);        // 1 - (k+m)/2
  std::vector<E> t;
  t.push_back(P(4 - 2 * k) * (ap * ap - P(2 * k - 2)));
  t.push_back(Rat(-1) * (a2 * P(4 - 2 * k) * ap));
  t.push_back(Rat(-1) * (P(e_klm) * ap * b * c) + P(e_klm3) * b * b);
  t.push_back(a2 * b * c * P(e_klm));
  t.push_back(P(2 - 2 * m) * (c * c - P(2 * m - 2)));
  t.push_back(Rat(-1) * (a2 * P(e_km) * c) + a2 * ap * P(-2 * k));
  return t;
}

inline PairingExpr sum_T_terms(int k, int l, int m) {
  auto t = T_terms(k, l, m);
  PairingExpr s(k);
  for (const auto& x : t) s = s + x;
  return s;
}

enum class EpSign { TermSum, Printed };

inline std::string to_string(EpSign s) { return s == EpSign::TermSum ? "termsum" : "printed"; }

/// E_p with the p^-k alpha_2 a_p term signed as printed (-) or as the term sum gives (+).
inline PairingExpr printed_Ep(int k, int l, int m, EpSign sign = EpSign::Printed) {
  detail::check_weights(k, l, m);
  using E = PairingExpr;
  const auto a1 = E::alpha1(k), ap = E::a_p(k), a2 = E::alpha2(k), b = E::b_p(k), c = E::c_p(k);
  auto P = [&](int twice) { return E::p_pow_half(k, twice); };
  const Rat s = sign == EpSign::Printed ? Rat(-1) : Rat(1);
  return P(-2 * k) * (P(4) * a1 * a1 + s * (a2 * ap)) - P(4 - (k + l + m)) * a1 * b * c + P(2 - (k + l - m)) * b * b +
         P(2 - 2 * m) * c * c - a2 * P(2 - (k + m)) * c - E::constant(k, Rat(1));
}

struct EpComparison {
  int k = 0, l = 0, m = 0;
  bool match = false;               // T-sum equals printed E_p
  bool discrepancy_is_expected = false;  // difference equals 2 alpha_2 a_p p^-k
  PairingExpr discrepancy{0};
};

inline EpComparison compare_with_Ep(int k, int l, int m) {
  EpComparison r;
  r.k = k;
  r.l = l;
  r.m = m;
  r.discrepancy = sum_T_terms(k, l, m) - printed_Ep(k, l, m);
  r.match = r.discrepancy.is_zero();
  using E = PairingExpr;
  auto expected = Rat(2) * (E::alpha2(k) * E::a_p(k) * E::p_pow(k, -k));
  r.discrepancy_is_expected = r.discrepancy == expected;
  return r;
}

/// All even (k, l, m) with min_weight <= l, m and l + m <= k <= k_max.
inline std::vector<std::tuple<int, int, int>> weight_grid(int k_max, int min_weight = 2) {
  std::vector<std::tuple<int, int, int>> out;
  for (int k = 2 * min_weight; k <= k_max; k += 2)
    for (int l = min_weight; l + min_weight <= k; l += 2)
      for (int m = min_weight; l + m <= k; m += 2) out.emplace_back(k, l, m);
  return out;
}

struct Step2Report {
  int k = 0;
  PairingExpr derivation{0};  // p^(-k/2) (p a_p - 2(p+1) alpha_2 + p^(1-k) alpha_2^2 a_p)
  PairingExpr factored{0};    // p^(1-k/2) alpha_1 (1 - alpha_2/alpha_1)(1 - alpha_2/(p alpha_1))
  PairingExpr residual{0};
  bool match() const { return residual.is_zero(); }
};

inline Step2Report verify_step2(int k) {
  require(k % 2 == 0, ErrorCode::InvalidArgument, "k must be even");
  using E = PairingExpr;
  const auto a1 = E::alpha1(k), a1inv = E::alpha1(k, -1), a2 = E::alpha2(k), ap = E::a_p(k);
  const auto p = E::p_pow(k, 1), one = E::constant(k, Rat(1));
  Step2Report r;
  r.k = k;
  r.derivation = E::p_pow_half(k, -k) *
                 (p * ap - Rat(2) * ((p + one) * a2) + E::p_pow(k, 1 - k) * a2 * a2 * ap);
  r.factored = E::p_pow_half(k, 2 - k) * a1 * (one - a2 * a1inv) * (one - a2 * E::p_pow(k, -1) * a1inv);
  r.residual = r.derivation - r.factored;
  return r;
}

inline nlohmann::json to_json(const EpComparison& c) {
  return {{"k", std::to_string(c.k)},
          {"l", std::to_string(c.l)},
          {"m", std::to_string(c.m)},
          {"match", c.match},
          {"discrepancy", c.discrepancy.to_string()},
          {"discrepancy_is_2_alpha2_ap_p^-k", c.discrepancy_is_expected}};
}

inline nlohmann::json to_json(const Step2Report& r) {
  return {{"k", std::to_string(r.k)},
          {"derivation", r.derivation.to_string()},
          {"factored", r.factored.to_string()},
          {"residual", r.residual.to_string()},
          {"match", r.match()}};
}

}  // namespace trisqrt
