#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trisqrt.hpp"

using namespace trisqrt;
using nlohmann::json;

namespace {

struct Options {
  long p = 11;
  int M = 4;
  int k = 24, l = 12, m = 12;
  std::optional<size_t> nmax;
  std::string ep_sign = "termsum";
  std::string out;
  std::string format = "json";

  // stage-specific
  std::string series = "delta";
  std::string op;
  long q = 2;
  int r = 0;
  size_t target = 0;
  std::optional<int> iterations;
  std::optional<int> H_exponent;
  int kmax = 40;
  bool grid = false;
  long Q = 50;
  std::string s;
  int prec = 64;
  size_t orbit = 0, embedding = 0;
  std::string residue = "1";
  int t = 1;
  std::vector<int> ks{12, 22, 32};
};

// Exit codes: 0 ok / verdict true, 1 verdict false, 2 validation error, 3 compute error.
enum Exit { kOk = 0, kFalse = 1, kInvalid = 2, kCompute = 3 };

EpSign parse_sign(const std::string& s) {
  if (s == "termsum" || s == "+") return EpSign::TermSum;
  if (s == "printed" || s == "-") return EpSign::Printed;
  fail(ErrorCode::InvalidArgument, "--ep-sign must be termsum (+) or printed (-), got " + s);
}

void emit(const Options& o, const std::string& command, json body, const std::string& text = "") {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["result"] = std::move(body);
  std::string payload = o.format == "text" && !text.empty() ? text : j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(o.out);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write " + o.out);
    f << payload;
  }
}

TripleConfig triple_config(const Options& o) {
  TripleConfig c;
  c.k = o.k;
  c.l = o.l;
  c.m = o.m;
  c.p = o.p;
  c.M = o.M;
  c.target = o.target;
  c.iterations = o.iterations;
  c.H_exponent = o.H_exponent;
  c.n_max = o.nmax;
  c.sign = parse_sign(o.ep_sign);
  require(is_prime(c.p), ErrorCode::InvalidArgument, "p must be prime");
  require(c.M >= 1, ErrorCode::InvalidArgument, "M must be >= 1");
  detail::check_weights(c.k, c.l, c.m);
  return c;
}

int cmd_qexp(const Options& o) {
  const size_t n = o.nmax.value_or(20);
  QExp<IntegerRing> f(IntegerRing{}, n);
  if (o.series == "delta")
    f = delta_series(n).set_weight(12);
  else if (o.series == "e4")
    f = eisenstein(4, n);
  else if (o.series == "e6")
    f = eisenstein(6, n);
  else if (o.series == "cusp")
    f = rational_cusp_form(IntegerRing{}, o.k, n);
  else
    fail(ErrorCode::InvalidArgument, "unknown series " + o.series);
  if (o.op == "tq")
    f = hecke_T(f, o.q);
  else if (o.op == "up")
    f = u_p(f, o.q);
  else if (o.op == "vp")
    f = v_p(f, o.q);
  else if (o.op == "theta")
    f = theta(f, o.r);
  else if (o.op == "deplete")
    f = p_deplete(f, o.q);
  else
    require(o.op.empty(), ErrorCode::InvalidArgument, "unknown op " + o.op);
  if (o.M > 0 && o.format == "residue") {
    emit(o, "qexp", to_json(reduce(f, ResidueRing(o.p, o.M))));
    return kOk;
  }
  emit(o, "qexp", to_json(f));
  return kOk;
}

int cmd_modforms(const Options& o, const std::string& what) {
  const int k = o.k;
  json j;
  j["k"] = std::to_string(k);
  j["dim_modular"] = std::to_string(dim_modular(k));
  j["dim_cusp"] = std::to_string(dim_cusp(k));
  j["sturm_bound"] = std::to_string(sturm_bound(k));
  if (what == "hecke") {
    auto T = hecke_matrix(k, o.q);
    json rows = json::array();
    for (size_t i = 0; i < T.rows(); ++i) {
      json row = json::array();
      for (size_t c = 0; c < T.cols(); ++c) row.push_back(T(i, c).get_str());
      rows.push_back(row);
    }
    j["q"] = std::to_string(o.q);
    j["matrix"] = rows;
    j["charpoly"] = poly_json(charpoly(T));
  } else if (what == "eigen") {
    const size_t n = o.nmax.value_or(10);
    json forms = json::array();
    for (const auto& f : eigenbasis(k, std::max<size_t>(n, 2 * dim_cusp(k) + 1))) {
      json e;
      e["field"] = f.field.tag();
      json a = json::array();
      for (size_t i = 0; i <= n; ++i) a.push_back(f.expansion[i].to_string());
      e["coeffs"] = a;
      forms.push_back(e);
    }
    j["eigenforms"] = forms;
  } else {
    const size_t n = o.nmax.value_or(10);
    json basis = json::array();
    for (const auto& b : victor_miller_basis(k, n, true)->basis) basis.push_back(to_json(b)["coeffs"]);
    j["cusp_basis"] = basis;
  }
  emit(o, "modforms " + what, j);
  return kOk;
}

int cmd_hida(const Options& o, const std::string& what) {
  json j;
  if (what == "ranks") {
    json rows = json::array();
    for (const auto& r : control_rank_scan(o.p, o.ks))
      rows.push_back({{"k", std::to_string(r.weight)},
                      {"branch", std::to_string(r.branch)},
                      {"dim_cusp", std::to_string(r.dimension)},
                      {"ordinary_rank", std::to_string(r.rank)}});
    j["p"] = std::to_string(o.p);
    j["rows"] = rows;
    emit(o, "hida ranks", j);
    return kOk;
  }
  auto sp = ordinary_space(o.k, o.p, o.M);
  j["k"] = std::to_string(o.k);
  j["p"] = std::to_string(o.p);
  j["M"] = std::to_string(o.M);
  j["sturm_bound"] = std::to_string(sp.sturm);
  j["ordinary_rank"] = std::to_string(sp.rank());
  j["min_nonunit_slope"] = sp.min_nonunit_slope.get_str();
  json nonord = json::array();
  for (const auto& s : sp.nonordinary) nonord.push_back(s);
  j["nonordinary"] = nonord;
  json forms = json::array();
  for (size_t i = 0; i < sp.rank(); ++i) {
    const auto& b = sp.basis[i];
    forms.push_back({{"label", b.base.label()},
                     {"a_p", b.base.a_p.get_str()},
                     {"alpha1", b.alpha1.to_string()},
                     {"alpha2", b.alpha2.to_string()},
                     {"congruence_exponent", std::to_string(congruence_p_part(sp, i))}});
  }
  j["forms"] = forms;
  if (what == "stabilize") {
    auto pm = pairing_matrix(sp);
    j["pairing_det_mod_p"] = pm.det_mod_p.get_str();
    j["pairing_unimodular"] = pm.unimodular;
    emit(o, "hida stabilize", j);
    return kOk;
  }
  // project: e(h d^r g_p)
  auto cfg = triple_config(o);
  auto proj = project_moment(cfg);
  json coords = json::array();
  for (const auto& c : proj.coords) coords.push_back(c.get_str());
  j["l"] = std::to_string(o.l);
  j["m"] = std::to_string(o.m);
  j["up_iterations"] = std::to_string(proj.iterations);
  j["rows"] = std::to_string(proj.rows);
  j["slack"] = std::to_string(proj.slack);
  j["residual_valuation"] = std::to_string(proj.residual_valuation);
  j["coords"] = coords;
  emit(o, "hida project", j);
  return kOk;
}

int cmd_measure(const Options& o, const std::string& what) {
  if (what == "verify") {
    auto rep = verify_theorem(triple_config(o));
    std::ostringstream text;
    text << (rep.verdict ? "PASS" : "FAIL") << " D=" << rep.D << " H*K*rho=" << rep.rhs << " mod " << o.p << "^"
         << rep.precision << " [" << rep.regime() << "]\n";
    emit(o, "measure verify", to_json(rep), text.str());
    return rep.verdict ? kOk : kFalse;
  }
  const size_t n = o.nmax.value_or(200);
  ResidueRing R(o.p, o.M);
  auto g = rational_cusp_form(R, o.l, n);
  std::optional<QExp<ResidueRing>> h;
  if (o.m > 0) h = rational_cusp_form(R, o.m, n);
  auto mu = make_measure(g, o.p, h);
  json j;
  if (what == "moment") {
    j = to_json(moment(mu, o.r));
  } else {
    auto phi = TestFunction::indicator(parse_int(o.residue), o.t);
    phi.nu_power = o.r;
    j = to_json(eval_measure(mu, phi));
  }
  emit(o, "measure " + what, j);
  return kOk;
}

int cmd_identity(const Options& o, const std::string& what) {
  std::ostringstream text;
  json j;
  if (what == "check-step2") {
    auto r = verify_step2(o.k);
    j = to_json(r);
    text << (r.match() ? "MATCH" : "MISMATCH") << " k=" << o.k << " residual=" << r.residual.to_string() << "\n";
    emit(o, "identity check-step2", j, text.str());
    return r.match() ? kOk : kFalse;
  }
  std::vector<std::tuple<int, int, int>> pts;
  if (o.grid)
    pts = weight_grid(o.kmax);
  else
    pts.emplace_back(o.k, o.l, o.m);
  json rows = json::array();
  bool uniform = true, expected = true;
  std::optional<bool> first;
  for (auto [k, l, m] : pts) {
    auto c = compare_with_Ep(k, l, m);
    rows.push_back(to_json(c));
    if (!first) first = c.match;
    uniform = uniform && c.match == *first;
    expected = expected && (c.match || c.discrepancy_is_expected);
    text << k << " " << l << " " << m << " " << (c.match ? "match" : "differ: " + c.discrepancy.to_string()) << "\n";
  }
  j["points"] = rows;
  j["count"] = std::to_string(pts.size());
  j["uniform_verdict"] = uniform;
  j["discrepancy_always_2_alpha2_ap_p^-k"] = expected;
  emit(o, "identity check-ep", j, text.str());
  return uniform && expected ? kOk : kFalse;
}

int cmd_lfunc(const Options& o, const std::string& what) {
  json j;
  j["k"] = std::to_string(o.k);
  j["l"] = std::to_string(o.l);
  j["m"] = std::to_string(o.m);
  if (what == "local") {
    require(is_prime(o.q), ErrorCode::InvalidArgument, "q must be prime");
    const size_t need = static_cast<size_t>(o.q);
    RationalField Qf;
    auto g = rational_cusp_form(Qf, o.l, need);
    auto h = rational_cusp_form(Qf, o.m, need);
    j["q"] = std::to_string(o.q);
    if (dim_cusp(o.k) == 1) {
      auto f = rational_cusp_form(Qf, o.k, need);
      SatakePair sf{o.q, o.k, f[need].get_num()}, sg{o.q, o.l, g[need].get_num()}, sh{o.q, o.m, h[need].get_num()};
      auto P = local_triple_factor(sf, sg, sh);
      auto B = local_triple_factor_brute(sf, sg, sh);
      j["field"] = "QQ";
      j["polynomial"] = poly_json(P);
      j["brute_force_agrees"] = P == B;
      j["dirichlet_coefficient"] = inverse_series(P, 1)[1].get_str();
    } else {
      auto forms = eigenbasis(o.k, std::max<size_t>(need, 2 * dim_cusp(o.k) + 1));
      require(o.orbit < forms.size(), ErrorCode::InvalidArgument, "orbit index out of range");
      const auto& F = forms[o.orbit];
      std::vector<std::pair<NFElem, NFElem>> data{
          {F.expansion[need], F.field.from_int(ipow(o.q, static_cast<unsigned long>(o.k - 1)))},
          {F.field.from_rat(g[need]), F.field.from_int(ipow(o.q, static_cast<unsigned long>(o.l - 1)))},
          {F.field.from_rat(h[need]), F.field.from_int(ipow(o.q, static_cast<unsigned long>(o.m - 1)))}};
      auto c = local_triple_factor_brute(data, F.field.zero(), F.field.one());
      json poly = json::array();
      for (const auto& x : c) poly.push_back(x.to_string());
      j["field"] = F.field.tag();
      j["polynomial"] = poly;
    }
    emit(o, "lfunc local", j);
    return kOk;
  }
  const size_t need = static_cast<size_t>(std::max<long>(o.Q, 2));
  auto f = real_form(o.k, o.orbit, o.embedding, std::max(need, 2 * static_cast<size_t>(dim_cusp(o.k)) + 1));
  auto g = real_form(o.l, 0, 0, need), h = real_form(o.m, 0, 0, need);
  Rat s = o.s.empty() ? Rat(Int(o.k + o.l + o.m - 2), Int(2)) : parse_rat(o.s);
  s.canonicalize();
  auto res = partial_L(s, o.Q, f, g, h, o.prec);
  j["s"] = s.get_str();
  j["Q"] = std::to_string(o.Q);
  j["w"] = std::to_string(res.w);
  j["label"] = res.label();
  j["precision_bits"] = std::to_string(o.prec);
  json rows = json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"q", std::to_string(r.q)},
                    {"lo", r.value.lo_string()},
                    {"hi", r.value.hi_string()},
                    {"agreeing_digits", std::to_string(r.value.agreeing_digits())}});
  j["partial_products"] = rows;
  j["value"] = {{"lo", res.value.lo_string()}, {"hi", res.value.hi_string()}};
  emit(o, "lfunc partial", j);
  return kOk;
}

json error_json(const std::string& stage, const Error& e) {
  return {{"schema", 1},
          {"error", {{"stage", stage}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic triple-product measures: modular forms, Hida projection and Euler factors"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--p", o.p, "prime p");
  app.add_option("--M", o.M, "working precision exponent");
  app.add_option("--k", o.k, "weight of f");
  app.add_option("--l", o.l, "weight of g");
  app.add_option("--m", o.m, "weight of h");
  app.add_option("--nmax", o.nmax, "number of q-expansion coefficients");
  app.add_option("--ep-sign", o.ep_sign, "sign of the p^-k alpha_2 a_p term: termsum|printed");
  app.add_option("--out", o.out, "write the report to this path");
  app.add_option("--format", o.format, "json|text|residue");

  auto* qexp = app.add_subcommand("qexp", "q-expansions and operators");
  qexp->add_option("--series", o.series, "delta|e4|e6|cusp");
  qexp->add_option("--op", o.op, "tq|up|vp|theta|deplete");
  qexp->add_option("--q", o.q, "prime for the operator");
  qexp->add_option("--r", o.r, "theta power");

  auto* modforms = app.add_subcommand("modforms", "level-1 spaces, Hecke matrices, eigenforms");
  std::string mf_what = "basis";
  modforms->add_option("what", mf_what, "basis|hecke|eigen");
  modforms->add_option("--q", o.q, "Hecke index");

  auto* hida = app.add_subcommand("hida", "ordinary spaces and projection");
  std::string hida_what;
  hida->add_option("what", hida_what, "stabilize|project|ranks")->required();
  hida->add_option("--iterations", o.iterations, "U_p applications");
  hida->add_option("--ks", o.ks, "weights for the rank scan");

  auto* measure = app.add_subcommand("measure", "measures, moments and the interpolation check");
  std::string measure_what;
  measure->add_option("what", measure_what, "moment|eval|verify")->required();
  measure->add_option("--r", o.r, "moment / nu power");
  measure->add_option("--residue", o.residue, "a in the indicator of a mod p^t");
  measure->add_option("--t", o.t, "indicator modulus exponent");
  measure->add_option("--target", o.target, "index of f in the ordinary basis");
  measure->add_option("--iterations", o.iterations, "U_p applications");
  measure->add_option("--H", o.H_exponent, "exponent of H(P)");

  auto* identity = app.add_subcommand("identity", "Euler-factor algebra checks");
  std::string id_what;
  identity->add_option("what", id_what, "check-ep|check-step2")->required();
  identity->add_flag("--grid", o.grid, "all even (k, l, m) with l + m <= k <= kmax");
  identity->add_option("--kmax", o.kmax, "grid bound");

  auto* lfunc = app.add_subcommand("lfunc", "local triple factors and partial products");
  std::string lf_what;
  lfunc->add_option("what", lf_what, "local|partial")->required();
  lfunc->add_option("--q", o.q, "prime for the local factor");
  lfunc->add_option("--Q", o.Q, "product over primes up to Q");
  lfunc->add_option("--s", o.s, "evaluation point (rational); default the central point");
  lfunc->add_option("--prec", o.prec, "MPFR precision in bits");
  lfunc->add_option("--orbit", o.orbit, "Galois orbit of f");
  lfunc->add_option("--embedding", o.embedding, "real embedding of f");

  auto* verify = app.add_subcommand("verify", "two-route check D = H K rho (default 11, 4, (24,12,12))");
  verify->add_option("--target", o.target, "index of f in the ordinary basis");
  verify->add_option("--iterations", o.iterations, "U_p applications");

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*qexp) return cmd_qexp(o);
    if (*modforms) return cmd_modforms(o, mf_what);
    if (*hida) return cmd_hida(o, hida_what);
    if (*measure) return cmd_measure(o, measure_what);
    if (*identity) return cmd_identity(o, id_what);
    if (*lfunc) return cmd_lfunc(o, lf_what);
    if (*verify) return cmd_measure(o, "verify");
  } catch (const Error& e) {
    std::cerr << error_json(stage, e).dump(2) << "\n";
    const bool invalid = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::Unsupported;
    return invalid ? kInvalid : kCompute;
  }
  return kOk;
}
