#pragma once

// Arithmetic measures dmu_g and h*dmu_g on Z_p^x, their moments, the
// correction factors E_p, S, K and the two-route evaluation of D_H at an
// arithmetic point.

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "trisqrt/hida.hpp"
#include "trisqrt/identity.hpp"

namespace trisqrt {

/// Locally constant function on Z_p^x times nu^nu_power, nu the inclusion.
/// With no pieces the locally constant part is 1.
struct TestFunction {
  struct Piece {
    Int residue;
    int t = 1;  // modulus p^t
    Rat scalar = 1;
  };
  std::vector<Piece> pieces;
  int nu_power = 0;

  static TestFunction one() { return {}; }
  static TestFunction nu(int r) {
    require(r >= 0, ErrorCode::InvalidArgument, "nu power must be >= 0");
    TestFunction f;
    f.nu_power = r;
    return f;
  }
  static TestFunction indicator(const Int& a, int t, const Rat& scalar = 1) {
    require(t >= 1, ErrorCode::InvalidArgument, "indicator modulus must be p^t with t >= 1");
    TestFunction f;
    f.pieces.push_back({a, t, scalar});
    return f;
  }
  bool locally_constant_part_trivial() const { return pieces.empty(); }

  /// Value at n prime to p.
  Rat operator()(size_t n, long p) const {
    Rat v = 0;
    if (pieces.empty()) {
      v = 1;
    } else {
      for (const auto& pc : pieces) {
        Int mod = ipow(p, static_cast<unsigned long>(pc.t));
        if (mod_floor(Int(static_cast<unsigned long>(n)) - pc.residue, mod) == 0) v += pc.scalar;
      }
    }
    if (nu_power > 0 && v != 0) v *= Rat(ipow(Int(static_cast<unsigned long>(n)), static_cast<unsigned long>(nu_power)));
    return v;
  }
};

template <class Ring>
struct ArithMeasure {
  QExp<Ring> g;
  std::optional<QExp<Ring>> h;
  int kappa = 0;
  long p = 0;

  QExp<Ring> g_p() const { return p_deplete(g, p); }
};

template <class Ring>
ArithMeasure<Ring> make_measure(const QExp<Ring>& g, long p, std::optional<QExp<Ring>> h = std::nullopt) {
  require(is_prime(p), ErrorCode::InvalidArgument, "p must be prime");
  int kappa = g.require_weight("measure");
  if (h) kappa += h->require_weight("measure");
  return {g, std::move(h), kappa, p};
}

template <class Ring>
QExp<Ring> apply_multiplier(const ArithMeasure<Ring>& mu, QExp<Ring> s) {
  if (!mu.h) return s;
  auto hh = mu.h->n_max() > s.n_max() ? mu.h->truncate(s.n_max()) : *mu.h;
  if (hh.n_max() < s.n_max()) s = s.truncate(hh.n_max());
  return mul(hh, s);
}

/// h * sum_{(n,p)=1} phi(n) a(n, g) q^n.
template <class Ring>
QExp<Ring> eval_measure(const ArithMeasure<Ring>& mu, const TestFunction& phi) {
  const auto& R = mu.g.ring();
  const size_t n_max = mu.g.n_max();
  std::vector<typename Ring::value_type> c(n_max + 1, R.zero());
  for (size_t n = 1; n <= n_max; ++n) {
    if (n % static_cast<size_t>(mu.p) == 0 || R.is_zero(mu.g[n])) continue;
    Rat v = phi(n, mu.p);
    if (v != 0) c[n] = R.mul(R.from_rat(v), mu.g[n]);
  }
  std::optional<int> w;
  if (phi.locally_constant_part_trivial() && mu.g.weight()) w = *mu.g.weight() + 2 * phi.nu_power;
  QExp<Ring> s(R, std::move(c), w, mu.g.level() * mu.p * mu.p);
  auto out = apply_multiplier(mu, std::move(s));
  if (w) out.set_weight(mu.kappa + 2 * phi.nu_power);
  return out;
}

/// Integral of x^r: h * d^r(g_p), weight kappa + 2r.
template <class Ring>
QExp<Ring> moment(const ArithMeasure<Ring>& mu, int r) {
  require(r >= 0, ErrorCode::InvalidArgument, "moment needs r >= 0");
  auto out = apply_multiplier(mu, theta(mu.g_p(), r));
  return out.set_weight(mu.kappa + 2 * r);
}

/// Teichmueller character omega(n) mod p^M.
inline Int teichmuller(const Int& n, const ResidueRing& ring) {
  return ring.pow(mod_floor(n, ring.modulus()), ipow(ring.p(), static_cast<unsigned long>(ring.precision() - 1)).get_ui());
}

/// Checks eval on indicator(a mod p) against sum_j omega^-j(a)/(p-1) (g_p (x) omega^j),
/// the decomposition into twists by the characters mod p.
inline bool twist_check(const ArithMeasure<ResidueRing>& mu, const Int& a) {
  const ResidueRing& R = mu.g.ring();
  const long p = mu.p;
  require(mod_floor(a, Int(p)) != 0, ErrorCode::InvalidArgument, "a must be prime to p");
  const size_t n_max = mu.g.n_max();
  const Int inv = R.inverse(Int(p - 1));
  const Int wa_inv = R.inverse(teichmuller(a, R));
  std::vector<Int> acc(n_max + 1, Int(0));
  std::vector<Int> wn(n_max + 1, Int(0));
  for (size_t n = 1; n <= n_max; ++n)
    if (n % static_cast<size_t>(p) != 0) wn[n] = teichmuller(Int(static_cast<unsigned long>(n)), R);
  Int chi_a = R.one();  // omega^-j(a)
  std::vector<Int> chi_n(n_max + 1, R.one());
  for (long j = 0; j < p - 1; ++j) {
    const Int w = R.mul(chi_a, inv);
    for (size_t n = 1; n <= n_max; ++n) {
      if (n % static_cast<size_t>(p) == 0) continue;
      acc[n] = R.add(acc[n], R.mul(w, R.mul(chi_n[n], mu.g[n])));
      chi_n[n] = R.mul(chi_n[n], wn[n]);
    }
    chi_a = R.mul(chi_a, wa_inv);
  }
  auto twisted = apply_multiplier(mu, QExp<ResidueRing>(R, std::move(acc)));
  auto direct = eval_measure(mu, TestFunction::indicator(a, 1));
  return twisted.coeffs() == direct.coeffs();
}

/// Local data at p: alpha_1 for f, and the p-th coefficients b_p, c_p of g, h.
struct EulerData {
  long p = 0;
  int k = 0, l = 0, m = 0;
  PadicInt alpha1;
  Int b_p, c_p;

  PadicNum alpha1_num() const { return PadicNum::from(alpha1); }
  PadicNum alpha2_num() const { return alpha1_num().inverse().times_p_power(k - 1); }
  PadicNum a_p_num() const { return alpha1_num() + alpha2_num(); }
};

inline EulerData make_euler_data(long p, int k, int l, int m, const PadicInt& alpha1, const Int& b_p, const Int& c_p) {
  detail::check_weights(k, l, m);
  require(alpha1.is_unit(), ErrorCode::NotOrdinary, "alpha_1 must be a p-adic unit");
  return {p, k, l, m, alpha1, b_p, c_p};
}

inline PadicNum euler_factor(const EulerData& d, EpSign sign = EpSign::TermSum) {
  return printed_Ep(d.k, d.l, d.m, sign).evaluate(d.alpha1, d.b_p, d.c_p);
}

struct CorrectionFactors {
  PadicNum E, S, K;
  int prefactor_valuation = 0;  // v_p(alpha_1^-2 p^(k-2)) = k - 2
};

inline CorrectionFactors correction_factors(const EulerData& d, EpSign sign = EpSign::TermSum) {
  const long p = d.p;
  const int big = 4 * (d.alpha1.precision() + d.k) + 16;
  PadicNum one(p, 0, Int(1), big);
  PadicNum a1 = d.alpha1_num(), a2 = d.alpha2_num();
  PadicNum ratio = a2 / a1;
  PadicNum S = (one - ratio) * (one - ratio.times_p_power(-1));
  PadicNum E = euler_factor(d, sign);
  PadicNum K = (a1 * a1).inverse().times_p_power(d.k - 2) * E / S;
  return {E, S, K, d.k - 2};
}

/// prod over Satake roots x of g, y of h of (1 - alpha_2 x y p^-c), c = (k+l+m-2)/2,
/// written through the elementary symmetric functions of the products x y.
inline PadicNum four_factor_euler(const EulerData& d) {
  const long p = d.p;
  const int big = 4 * (d.alpha1.precision() + d.k) + 16;
  PadicNum one(p, 0, Int(1), big);
  PadicNum bT = d.alpha2_num().times_p_power(-(d.k + d.l + d.m - 2) / 2);
  PadicNum b(p, 0, d.b_p, big), c(p, 0, d.c_p, big);
  PadicNum P(p, d.l - 1, Int(1), big + d.l), Q(p, d.m - 1, Int(1), big + d.m);
  PadicNum e1 = b * c;
  PadicNum e2 = Q * b * b + P * c * c - P * Q - P * Q;
  PadicNum e3 = P * Q * e1;
  PadicNum e4 = P * P * Q * Q;
  PadicNum t2 = bT * bT, t3 = t2 * bT, t4 = t3 * bT;
  return one - bT * e1 + t2 * e2 - t3 * e3 + t4 * e4;
}

/// four_factor_euler / S, the correction factor the projection actually sees.
inline PadicNum reference_K(const EulerData& d) { return four_factor_euler(d) / correction_factors(d).S; }

struct TripleConfig {
  int k = 24, l = 12, m = 12;
  long p = 11;
  int M = 4;
  size_t target = 0;                 // index into the ordinary basis
  std::optional<int> iterations;     // U_p applications; slope-aware default
  std::optional<int> H_exponent;     // default: congruence_p_part
  std::optional<size_t> n_max;       // override of sturm * p^j
  EpSign sign = EpSign::TermSum;
};

/// The normalized generator of S_w when it is one-dimensional.
template <class Ring>
QExp<Ring> rational_cusp_form(const Ring& R, int w, size_t n_max) {
  require(w % 2 == 0 && dim_cusp(w) == 1, ErrorCode::Unsupported,
          "g and h must be the cusp form of a weight with dim S_w = 1, got weight " + std::to_string(w));
  return detail::echelon_monomials(R, w, n_max, true)[0];
}

struct DValue {
  OrdinarySpace space;
  Projection projection;
  int H_exponent = 0;
  size_t length = 0;
  PadicInt D;
  double seconds = 0;
};

inline int triple_r(int k, int l, int m) {
  detail::check_weights(k, l, m);
  return (k - l - m) / 2;
}

/// U_p count for h d^r g_p. For r = 0 the input has level p^2 and the first
/// U_p only brings it to level p. For r >= 1 the non-ordinary part shrinks by
/// one power of p per application (observed; the residual check guards it).
inline int moment_iterations(int k, long p, int M, int r) {
  if (r == 0) return 1 + default_up_iterations(k, p, M);
  return M;
}

/// D_H(f, g, h)(P) = <e(h d^r g_p), f_P>: project and contract.
inline DValue evaluate_D(const TripleConfig& cfg) {
  const int r = triple_r(cfg.k, cfg.l, cfg.m);
  auto t0 = std::chrono::steady_clock::now();
  OrdinarySpace sp = ordinary_space(cfg.k, cfg.p, cfg.M);
  require(cfg.target < sp.rank(), ErrorCode::NotOrdinary,
          "weight " + std::to_string(cfg.k) + " has ordinary rank " + std::to_string(sp.rank()) + " at p=" +
              std::to_string(cfg.p) + "; no eigenform with index " + std::to_string(cfg.target));
  const int j = cfg.iterations.value_or(moment_iterations(cfg.k, cfg.p, cfg.M, r));
  const size_t len = cfg.n_max.value_or(projection_length(sp, j));
  ResidueRing R(cfg.p, cfg.M);
  auto g = rational_cusp_form(R, cfg.l, len);
  auto h = cfg.m == cfg.l ? g : rational_cusp_form(R, cfg.m, len);
  auto mu = make_measure(g, cfg.p, std::optional<QExp<ResidueRing>>(h));
  auto F = moment(mu, r);
  Projection proj = ordinary_project(F, sp, j);
  const int s = cfg.H_exponent.value_or(congruence_p_part(sp, cfg.target));
  PadicInt D = contract(proj, cfg.target, s);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(sp), std::move(proj), s, len, D, secs};
}

/// Projection of h d^r g_p for a weight with no ordinary forms: e(F) must vanish.
inline Projection project_moment(const TripleConfig& cfg, double* seconds = nullptr) {
  const int r = triple_r(cfg.k, cfg.l, cfg.m);
  auto t0 = std::chrono::steady_clock::now();
  OrdinarySpace sp = ordinary_space(cfg.k, cfg.p, cfg.M);
  const int j = cfg.iterations.value_or(moment_iterations(cfg.k, cfg.p, cfg.M, r));
  const size_t len = cfg.n_max.value_or(projection_length(sp, j));
  ResidueRing R(cfg.p, cfg.M);
  auto g = rational_cusp_form(R, cfg.l, len);
  auto h = cfg.m == cfg.l ? g : rational_cusp_form(R, cfg.m, len);
  auto F = moment(make_measure(g, cfg.p, std::optional<QExp<ResidueRing>>(h)), r);
  auto proj = ordinary_project(F, sp, j);
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return proj;
}

/// rho = <G, f>/<f, f> for G = H(h delta^r g), as an element of the field of f.
inline std::vector<NFElem> classical_ratios(int k, int l, int m) {
  const int r = triple_r(k, l, m);
  const int d = dim_cusp(k);
  require(d > 0, ErrorCode::InvalidArgument, "S_k is zero");
  const size_t n = static_cast<size_t>(d) + 2;
  RationalField Q;
  auto g = rational_cusp_form(Q, l, n);
  auto h = rational_cusp_form(Q, m, n);
  auto G = NHForm<RationalField>::holomorphic(h) * delta_op(NHForm<RationalField>::holomorphic(g), r);
  auto H = holomorphic_projection(G);
  auto forms = eigenbasis(k, static_cast<size_t>(2 * d + 1));
  return eigen_expansion(forms, H);
}

struct TheoremReport {
  TripleConfig config;
  std::string label;
  size_t rank = 0;
  int iterations = 0;
  size_t length = 0;
  size_t rows = 0;
  int slack = 0;
  int precision = 0;  // M - slack
  int H_exponent = 0;
  Int alpha1, alpha2;  // mod p^M
  Int a_p, b_p, c_p;
  std::optional<CorrectionFactors> factors;
  std::string rho_symbolic;
  Int rho;  // mod p^M
  int rho_valuation = 0;
  Int D;
  Int rhs;  // p^s K rho mod p^precision
  bool verdict = false;
  int agreement = 0;  // v_p(D - p^s K rho), capped at precision
  Int rhs_reference;  // p^s K_ref rho
  bool verdict_reference = false;
  int sign_gap_valuation = 0;  // v_p of the change in p^s K rho when the E_p sign flips
  bool distinguishes_sign = false;
  double seconds = 0;

  std::string regime() const {
    return distinguishes_sign ? "sign-resolving (precision " + std::to_string(precision) + " > " +
                                    std::to_string(sign_gap_valuation) + ")"
                              : "sign-indistinguishable (precision " + std::to_string(precision) +
                                    " <= " + std::to_string(sign_gap_valuation) + ")";
  }
};

/// D =? p^s K rho mod p^(M - slack).
inline TheoremReport verify_theorem(const TripleConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  DValue dv = evaluate_D(cfg);
  const auto& sf = dv.space.basis[cfg.target];
  TheoremReport rep;
  rep.config = cfg;
  rep.label = sf.base.label();
  rep.rank = dv.space.rank();
  rep.iterations = dv.projection.iterations;
  rep.length = dv.length;
  rep.rows = dv.projection.rows;
  rep.slack = dv.projection.slack;
  rep.precision = dv.projection.modulus_exponent();
  rep.H_exponent = dv.H_exponent;
  rep.alpha1 = sf.alpha1.residue();
  rep.alpha2 = sf.alpha2.residue();
  rep.a_p = sf.base.a_p;
  rep.D = dv.D.residue();

  RationalField Q;
  auto g = rational_cusp_form(Q, cfg.l, static_cast<size_t>(cfg.p));
  auto h = rational_cusp_form(Q, cfg.m, static_cast<size_t>(cfg.p));
  rep.b_p = g[static_cast<size_t>(cfg.p)].get_num();
  rep.c_p = h[static_cast<size_t>(cfg.p)].get_num();
  auto ed = make_euler_data(cfg.p, cfg.k, cfg.l, cfg.m, sf.alpha1, rep.b_p, rep.c_p);
  rep.factors = correction_factors(ed, cfg.sign);

  auto ratios = classical_ratios(cfg.k, cfg.l, cfg.m);
  const NFElem& rho = ratios.at(sf.base.orbit);
  rep.rho_symbolic = rho.to_string();
  ResidueRing R(cfg.p, cfg.M);
  rep.rho = rho.embed(sf.base.root, R);
  rep.rho_valuation = R.valuation(rep.rho);

  const ResidueRing Rp(cfg.p, std::max(1, rep.precision));
  const Int K = rep.factors->K.to_padic_int().residue();
  const Int ps = ipow(cfg.p, static_cast<unsigned long>(rep.H_exponent));
  rep.rhs = Rp.mul(Rp.from_int(ps), Rp.mul(Rp.from_int(K), Rp.from_int(rep.rho)));
  rep.verdict = Rp.from_int(rep.D) == rep.rhs;
  rep.agreement = std::min(rep.precision, Rp.valuation(Rp.sub(Rp.from_int(rep.D), rep.rhs)));
  const Int Kref = reference_K(ed).to_padic_int().residue();
  rep.rhs_reference = Rp.mul(Rp.from_int(ps), Rp.mul(Rp.from_int(Kref), Rp.from_int(rep.rho)));
  rep.verdict_reference = Rp.from_int(rep.D) == rep.rhs_reference;

  const EpSign other = cfg.sign == EpSign::TermSum ? EpSign::Printed : EpSign::TermSum;
  PadicNum gap = rep.factors->K - correction_factors(ed, other).K;
  rep.sign_gap_valuation = gap.valuation() + rep.rho_valuation + rep.H_exponent;
  rep.distinguishes_sign = rep.precision > rep.sign_gap_valuation;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline nlohmann::json padic_json(const PadicNum& x) {
  Rat v(x.digits());
  if (x.shift() >= 0)
    v *= Rat(ipow(x.p(), static_cast<unsigned long>(x.shift())));
  else
    v /= Rat(ipow(x.p(), static_cast<unsigned long>(-x.shift())));
  v.canonicalize();
  return {{"value", v.get_str()}, {"valuation", std::to_string(x.valuation())},
          {"abs_precision", std::to_string(x.abs_precision())}};
}

inline nlohmann::json to_json(const TheoremReport& r) {
  const auto& c = r.config;
  return {{"k", std::to_string(c.k)},
          {"l", std::to_string(c.l)},
          {"m", std::to_string(c.m)},
          {"p", std::to_string(c.p)},
          {"M", std::to_string(c.M)},
          {"f", r.label},
          {"ordinary_rank", std::to_string(r.rank)},
          {"up_iterations", std::to_string(r.iterations)},
          {"length", std::to_string(r.length)},
          {"rows", std::to_string(r.rows)},
          {"slack", std::to_string(r.slack)},
          {"precision", std::to_string(r.precision)},
          {"H_exponent", std::to_string(r.H_exponent)},
          {"alpha1", r.alpha1.get_str()},
          {"alpha2", r.alpha2.get_str()},
          {"a_p", r.a_p.get_str()},
          {"b_p", r.b_p.get_str()},
          {"c_p", r.c_p.get_str()},
          {"ep_sign", to_string(c.sign)},
          {"E_p", padic_json(r.factors->E)},
          {"S", padic_json(r.factors->S)},
          {"K", padic_json(r.factors->K)},
          {"K_prefactor_valuation", std::to_string(r.factors->prefactor_valuation)},
          {"rho", r.rho_symbolic},
          {"rho_mod_pM", r.rho.get_str()},
          {"D", r.D.get_str()},
          {"H_K_rho", r.rhs.get_str()},
          {"verdict", r.verdict},
          {"agreement_valuation", std::to_string(r.agreement)},
          {"H_Kref_rho", r.rhs_reference.get_str()},
          {"verdict_four_factor", r.verdict_reference},
          {"sign_gap_valuation", std::to_string(r.sign_gap_valuation)},
          {"regime", r.regime()}};
}

}  // namespace trisqrt
