#pragma once

// Truncated q-expansions a_0 + a_1 q + ... + a_N q^N over a ring descriptor,
// and the coefficient-level operators T_q, U_p, V_p (= [p]), theta, depletion.

#include <json.hpp>

#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "trisqrt/arith.hpp"
#include "trisqrt/ntt.hpp"

namespace trisqrt {

inline constexpr size_t kSchoolbookCutoff = 48;

template <class Ring>
class QExp {
 public:
  using value_type = typename Ring::value_type;

  QExp(Ring ring, size_t n_max) : ring_(std::move(ring)), c_(n_max + 1, ring_.zero()) {}
  QExp(Ring ring, std::vector<value_type> coeffs, std::optional<int> weight = std::nullopt, long level = 1)
      : ring_(std::move(ring)), c_(std::move(coeffs)), weight_(weight), level_(level) {
    require(!c_.empty(), ErrorCode::InvalidArgument, "q-expansion needs at least a_0");
  }

  const Ring& ring() const { return ring_; }
  size_t n_max() const { return c_.size() - 1; }
  const std::vector<value_type>& coeffs() const { return c_; }
  std::vector<value_type>& coeffs() { return c_; }
  const value_type& operator[](size_t n) const { return c_.at(n); }
  value_type& operator[](size_t n) { return c_.at(n); }

  std::optional<int> weight() const { return weight_; }
  long level() const { return level_; }
  QExp& set_weight(std::optional<int> w) {
    weight_ = w;
    return *this;
  }
  QExp& set_level(long l) {
    level_ = l;
    return *this;
  }

  int require_weight(const char* op) const {
    require(weight_.has_value(), ErrorCode::InvalidArgument, std::string(op) + " needs a weight tag");
    return *weight_;
  }

  bool is_cuspidal() const { return ring_.is_zero(c_[0]); }

  QExp truncate(size_t n_max) const {
    require(n_max <= this->n_max(), ErrorCode::InsufficientPrecision,
            "cannot extend a q-expansion from " + std::to_string(this->n_max()) + " to " + std::to_string(n_max));
    QExp r = *this;
    r.c_.erase(r.c_.begin() + static_cast<std::ptrdiff_t>(n_max + 1), r.c_.end());
    return r;
  }

  friend bool operator==(const QExp& a, const QExp& b) { return a.ring_ == b.ring_ && a.c_ == b.c_; }

 private:
  Ring ring_;
  std::vector<value_type> c_;
  std::optional<int> weight_;
  long level_ = 1;
};

namespace detail {

template <class Ring>
void same_ring(const QExp<Ring>& a, const QExp<Ring>& b) {
  if (!(a.ring() == b.ring())) fail(ErrorCode::RingMismatch, a.ring().tag() + " vs " + b.ring().tag());
}

inline std::optional<int> add_weights(std::optional<int> a, std::optional<int> b) {
  if (a && b) return *a + *b;
  return std::nullopt;
}

inline long lcm_level(long a, long b) {
  Int g;
  mpz_lcm(g.get_mpz_t(), Int(a).get_mpz_t(), Int(b).get_mpz_t());
  return g.get_si();
}

}  // namespace detail

/// Signed integer product through a power-of-two modulus large enough to
/// hold every output coefficient.
inline std::vector<Int> mul_int_kronecker(const std::vector<Int>& a, const std::vector<Int>& b, size_t n_out) {
  const size_t la = std::min(a.size(), n_out), lb = std::min(b.size(), n_out);
  auto max_abs = [](const std::vector<Int>& v, size_t len) {
    Int m = 0;
    for (size_t i = 0; i < len; ++i)
      if (abs(v[i]) > m) m = abs(v[i]);
    return m;
  };
  Int bound = max_abs(a, la) * max_abs(b, lb) * static_cast<unsigned long>(std::min(la, lb));
  Int m = Int(1) << (mpz_sizeinbase(bound.get_mpz_t(), 2) + 2);
  auto lift = [&](const std::vector<Int>& v, size_t len) {
    std::vector<Int> r(len);
    for (size_t i = 0; i < len; ++i) r[i] = mod_floor(v[i], m);
    return r;
  };
  auto out = mul_mod_kronecker(lift(a, la), lift(b, lb), m, n_out);
  const Int half = m / 2;
  for (auto& x : out)
    if (x >= half) x -= m;
  return out;
}

/// Raw coefficient product truncated to n_out terms; picks the back end.
template <class Ring>
std::vector<typename Ring::value_type> mul_coeffs(const Ring& ring, const std::vector<typename Ring::value_type>& a,
                                                  const std::vector<typename Ring::value_type>& b, size_t n_out) {
  if constexpr (std::is_same_v<Ring, ResidueRing>) {
    if (std::min(a.size(), b.size()) > kSchoolbookCutoff) {
      const Int& m = ring.modulus();
      if (mpz_sizeinbase(m.get_mpz_t(), 2) <= 63) {
        auto down = [&](const std::vector<Int>& v) {
          std::vector<uint64_t> r(std::min(v.size(), n_out));
          for (size_t i = 0; i < r.size(); ++i) r[i] = mpz_get_ui(v[i].get_mpz_t());
          return r;
        };
        auto prod = mul_mod_ntt(down(a), down(b), mpz_get_ui(m.get_mpz_t()), n_out);
        std::vector<Int> out(prod.size());
        for (size_t i = 0; i < prod.size(); ++i) out[i] = static_cast<unsigned long>(prod[i]);
        return out;
      }
      return mul_mod_kronecker(a, b, m, n_out);
    }
  }
  if constexpr (std::is_same_v<Ring, IntegerRing>) {
    if (std::min(a.size(), b.size()) > kSchoolbookCutoff) return mul_int_kronecker(a, b, n_out);
  }
  return mul_schoolbook(ring, a, b, n_out);
}

template <class Ring>
QExp<Ring> operator+(const QExp<Ring>& a, const QExp<Ring>& b) {
  detail::same_ring(a, b);
  const size_t n = std::min(a.n_max(), b.n_max());
  std::vector<typename Ring::value_type> c(n + 1, a.ring().zero());
  for (size_t i = 0; i <= n; ++i) c[i] = a.ring().add(a[i], b[i]);
  return {a.ring(), std::move(c), a.weight() == b.weight() ? a.weight() : std::nullopt,
          detail::lcm_level(a.level(), b.level())};
}

template <class Ring>
QExp<Ring> operator-(const QExp<Ring>& a, const QExp<Ring>& b) {
  detail::same_ring(a, b);
  const size_t n = std::min(a.n_max(), b.n_max());
  std::vector<typename Ring::value_type> c(n + 1, a.ring().zero());
  for (size_t i = 0; i <= n; ++i) c[i] = a.ring().sub(a[i], b[i]);
  return {a.ring(), std::move(c), a.weight() == b.weight() ? a.weight() : std::nullopt,
          detail::lcm_level(a.level(), b.level())};
}

template <class Ring>
QExp<Ring> scale(const QExp<Ring>& a, const typename Ring::value_type& s) {
  QExp<Ring> r = a;
  for (auto& x : r.coeffs()) x = a.ring().mul(s, x);
  return r;
}

template <class Ring>
QExp<Ring> mul(const QExp<Ring>& a, const QExp<Ring>& b) {
  detail::same_ring(a, b);
  const size_t n = std::min(a.n_max(), b.n_max());
  auto c = mul_coeffs(a.ring(), a.coeffs(), b.coeffs(), n + 1);
  c.resize(n + 1, a.ring().zero());
  return {a.ring(), std::move(c), detail::add_weights(a.weight(), b.weight()), detail::lcm_level(a.level(), b.level())};
}

template <class Ring>
QExp<Ring> operator*(const QExp<Ring>& a, const QExp<Ring>& b) {
  return mul(a, b);
}

/// Level-1 Hecke operator T_q: a(n) -> a(nq) + q^(k-1) a(n/q).
template <class Ring>
QExp<Ring> hecke_T(const QExp<Ring>& f, long q, std::optional<size_t> out_n = std::nullopt) {
  const int k = f.require_weight("hecke_T");
  require(is_prime(q), ErrorCode::InvalidArgument, "hecke_T needs a prime index");
  const size_t avail = f.n_max() / static_cast<size_t>(q);
  const size_t n_out = out_n.value_or(avail);
  require(n_out <= avail, ErrorCode::InsufficientPrecision,
          "T_" + std::to_string(q) + " output to " + std::to_string(n_out) + " needs " +
              std::to_string(n_out * q) + " input terms, have " + std::to_string(f.n_max()));
  const auto& R = f.ring();
  const auto qk = R.from_int(ipow(q, static_cast<unsigned long>(k - 1)));
  std::vector<typename Ring::value_type> c(n_out + 1, R.zero());
  for (size_t n = 0; n <= n_out; ++n) {
    c[n] = f[n * q];
    if (n % q == 0) c[n] = R.add(c[n], R.mul(qk, f[n / q]));
  }
  return {R, std::move(c), f.weight(), f.level()};
}

/// Composite-index Hecke operator at level 1 via a(n, f|T_m) = sum_{d | (m,n)} d^(k-1) a(mn/d^2).
template <class Ring>
QExp<Ring> hecke_T_composite(const QExp<Ring>& f, long m, std::optional<size_t> out_n = std::nullopt) {
  const int k = f.require_weight("hecke_T");
  require(m >= 1, ErrorCode::InvalidArgument, "Hecke index must be positive");
  const size_t avail = f.n_max() / static_cast<size_t>(m);
  const size_t n_out = out_n.value_or(avail);
  require(n_out <= avail, ErrorCode::InsufficientPrecision, "T_" + std::to_string(m) + " needs more input terms");
  const auto& R = f.ring();
  std::vector<typename Ring::value_type> c(n_out + 1, R.zero());
  for (size_t n = 0; n <= n_out; ++n) {
    for (long d = 1; d <= m; ++d) {
      if (m % d != 0) continue;
      if (n != 0 && n % static_cast<size_t>(d) != 0) continue;
      size_t idx = (static_cast<size_t>(m) * n) / static_cast<size_t>(d * d);
      c[n] = R.add(c[n], R.mul(R.from_int(ipow(d, static_cast<unsigned long>(k - 1))), f[idx]));
    }
  }
  return {R, std::move(c), f.weight(), f.level()};
}

/// U_p: a(n) -> a(np).
template <class Ring>
QExp<Ring> u_p(const QExp<Ring>& f, long p, std::optional<size_t> out_n = std::nullopt) {
  const size_t avail = f.n_max() / static_cast<size_t>(p);
  const size_t n_out = out_n.value_or(avail);
  require(n_out <= avail, ErrorCode::InsufficientPrecision,
          "U_" + std::to_string(p) + " output to " + std::to_string(n_out) + " needs " + std::to_string(n_out * p) +
              " input terms, have " + std::to_string(f.n_max()));
  std::vector<typename Ring::value_type> c(n_out + 1, f.ring().zero());
  for (size_t n = 0; n <= n_out; ++n) c[n] = f[n * p];
  return {f.ring(), std::move(c), f.weight(), f.level() % p == 0 ? f.level() : f.level() * p};
}

/// V_p = [p]: f(z) -> f(pz).
template <class Ring>
QExp<Ring> v_p(const QExp<Ring>& f, long p) {
  const size_t n_out = static_cast<size_t>(p) * f.n_max() + static_cast<size_t>(p) - 1;
  std::vector<typename Ring::value_type> c(n_out + 1, f.ring().zero());
  for (size_t n = 0; n <= f.n_max(); ++n) c[n * p] = f[n];
  return {f.ring(), std::move(c), f.weight(), f.level() * p};
}

/// theta^r with theta = q d/dq.
template <class Ring>
QExp<Ring> theta(const QExp<Ring>& f, int r) {
  require(r >= 0, ErrorCode::InvalidArgument, "theta needs r >= 0");
  if (r == 0) return f;
  const auto& R = f.ring();
  QExp<Ring> g = f;
  for (size_t n = 0; n <= f.n_max(); ++n)
    if (!R.is_zero(g[n])) g[n] = R.mul(R.from_int(ipow(Int(static_cast<unsigned long>(n)), r)), g[n]);
  if (f.weight()) g.set_weight(*f.weight() + 2 * r);
  return g;
}

/// Zero every coefficient with p | n.
template <class Ring>
QExp<Ring> p_deplete(const QExp<Ring>& f, long p) {
  QExp<Ring> g = f;
  for (size_t n = 0; n <= f.n_max(); n += static_cast<size_t>(p)) g[n] = f.ring().zero();
  return g.set_level(f.level() * p * p);
}

/// Depletion through the operator identity g | (1 - T_p [p] + p^(l-1) [p^2]).
template <class Ring>
QExp<Ring> p_deplete_via_hecke(const QExp<Ring>& f, long p) {
  const int l = f.require_weight("p_deplete_via_hecke");
  const auto& R = f.ring();
  auto tp = v_p(hecke_T(f, p), p);
  auto vv = v_p(v_p(f, p), p);
  const size_t n = std::min({f.n_max(), tp.n_max(), vv.n_max()});
  const auto pl = R.from_int(ipow(p, static_cast<unsigned long>(l - 1)));
  std::vector<typename Ring::value_type> c(n + 1, R.zero());
  for (size_t i = 0; i <= n; ++i) c[i] = R.add(R.sub(f[i], tp[i]), R.mul(pl, vv[i]));
  return {R, std::move(c), f.weight(), f.level() * p * p};
}

/// Checks T(lambda)^2 - T(lambda^2) = lambda^(l-1) on each basis vector.
/// Returns the index of the first failure, or nullopt when all pass.
template <class Ring>
std::optional<size_t> diamond_check(int weight, long lambda, const std::vector<QExp<Ring>>& basis) {
  for (size_t i = 0; i < basis.size(); ++i) {
    QExp<Ring> f = basis[i];
    f.set_weight(weight);
    const auto& R = f.ring();
    auto t1 = hecke_T(hecke_T(f, lambda), lambda);
    auto t2 = hecke_T_composite(f, lambda * lambda);
    const size_t n = std::min(t1.n_max(), t2.n_max());
    const auto s = R.from_int(ipow(lambda, static_cast<unsigned long>(weight - 1)));
    for (size_t j = 0; j <= n; ++j)
      if (!(R.sub(t1[j], t2[j]) == R.mul(s, f[j]))) return i;
  }
  return std::nullopt;
}

/// Coefficient-wise ring change (e.g. Z -> Z/p^M).
template <class To, class From, class Map>
QExp<To> change_ring(const QExp<From>& f, const To& ring, Map&& map) {
  std::vector<typename To::value_type> c(f.n_max() + 1, ring.zero());
  for (size_t n = 0; n <= f.n_max(); ++n) c[n] = map(f[n]);
  return {ring, std::move(c), f.weight(), f.level()};
}

inline QExp<ResidueRing> reduce(const QExp<IntegerRing>& f, const ResidueRing& ring) {
  return change_ring(f, ring, [&](const Int& x) { return ring.from_int(x); });
}
inline QExp<ResidueRing> reduce(const QExp<RationalField>& f, const ResidueRing& ring) {
  return change_ring(f, ring, [&](const Rat& x) { return ring.from_rat(x); });
}
inline QExp<RationalField> to_rational(const QExp<IntegerRing>& f) {
  return change_ring(f, RationalField{}, [](const Int& x) { return Rat(x); });
}

template <class Ring>
nlohmann::json to_json(const QExp<Ring>& f) {
  nlohmann::json j;
  j["ring"] = f.ring().tag();
  if constexpr (std::is_same_v<Ring, ResidueRing>) {
    j["p"] = std::to_string(f.ring().p());
    j["M"] = std::to_string(f.ring().precision());
  } else {
    j["p"] = nullptr;
    j["M"] = nullptr;
  }
  j["n_max"] = std::to_string(f.n_max());
  j["weight"] = f.weight() ? nlohmann::json(std::to_string(*f.weight())) : nlohmann::json(nullptr);
  j["level"] = std::to_string(f.level());
  auto& arr = j["coeffs"] = nlohmann::json::array();
  for (const auto& c : f.coeffs()) arr.push_back(f.ring().to_string(c));
  return j;
}

inline QExp<ResidueRing> residue_qexp_from_json(const nlohmann::json& j) {
  ResidueRing ring(std::stol(j.at("p").get<std::string>()), std::stoi(j.at("M").get<std::string>()));
  std::vector<Int> c;
  for (const auto& s : j.at("coeffs")) c.push_back(ring.from_int(parse_int(s.get<std::string>())));
  std::optional<int> w;
  if (!j.at("weight").is_null()) w = std::stoi(j.at("weight").get<std::string>());
  long level = j.contains("level") ? std::stol(j.at("level").get<std::string>()) : 1;
  return {ring, std::move(c), w, level};
}

inline QExp<RationalField> rational_qexp_from_json(const nlohmann::json& j) {
  std::vector<Rat> c;
  for (const auto& s : j.at("coeffs")) c.push_back(parse_rat(s.get<std::string>()));
  std::optional<int> w;
  if (!j.at("weight").is_null()) w = std::stoi(j.at("weight").get<std::string>());
  long level = j.contains("level") ? std::stol(j.at("level").get<std::string>()) : 1;
  return {RationalField{}, std::move(c), w, level};
}

}  // namespace trisqrt
