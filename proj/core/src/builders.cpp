#include "frobpair/pair.hpp"

#include <fmt/format.h>

#include <sstream>

namespace frobpair {

namespace {

const SortWord kA{Sort::A};
const SortWord kE{Sort::E};
const SortWord kAA{Sort::A, Sort::A};
const SortWord kAE{Sort::A, Sort::E};
const SortWord kEA{Sort::E, Sort::A};
const SortWord kEE{Sort::E, Sort::E};
const SortWord kAAA{Sort::A, Sort::A, Sort::A};
const SortWord kAAAA{Sort::A, Sort::A, Sort::A, Sort::A};

std::vector<std::string> split_labels(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Adds c * (out tuple) to the column of the in tuple; tuples are written as
// space-separated labels.
void put(LinMap& m, std::string_view in, std::string_view out, const RingElem& c) {
  const auto& b = *m.basis();
  m.add_entry(b.index_of_labels(m.codomain(), split_labels(out)), b.index_of_labels(m.domain(), split_labels(in)), c);
}

RingElem num(const RingPtr& r, long v) { return RingElem(r, v); }

// Reads every A-word map of `alg` over `basis`.
FrobeniusAlgebra rebase(const FrobeniusAlgebra& alg, const BasisPtr& basis) {
  if (alg.basis->labels(Sort::A) != basis->labels(Sort::A)) throw Error("A labels differ");
  FrobeniusAlgebra out{basis,
                       retyped(alg.mu, basis, kAA, kA),
                       retyped(alg.eta, basis, {}, kA),
                       retyped(alg.eps, basis, kA, {}),
                       retyped(alg.delta, basis, kA, kAA)};
  return out;
}

void set_algebra(FrobeniusPair& p, const FrobeniusAlgebra& alg) {
  p.set("mu_A", alg.mu);
  p.set("eta", alg.eta);
  p.set("eps", alg.eps);
  p.set("Delta_A", alg.delta);
}

}  // namespace

// ---------------------------------------------------------------------------

TensorVec FrobeniusAlgebra::element(const std::vector<RingElem>& coeffs) const {
  if (coeffs.size() != basis->rank(Sort::A)) throw Error("wrong number of coefficients for an element of A");
  TensorVec v{basis, kA, {}};
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (!coeffs[i].is_zero()) v.entries.emplace_back(static_cast<std::uint32_t>(i), coeffs[i]);
  return v;
}

TensorVec FrobeniusAlgebra::unit() const { return TensorVec{basis, kA, eta.column(0)}; }

TensorVec FrobeniusAlgebra::handle() const {
  return TensorVec{basis, kA, compose(mu, compose(delta, eta)).column(0)};
}

FrobeniusAlgebra quadratic_algebra(const RingPtr& ring, const RingElem& h, const RingElem& t,
                                   const std::vector<std::string>& e_labels) {
  auto basis = std::make_shared<const BasisSpec>(ring, std::vector<std::string>{"1", "X"}, e_labels);
  FrobeniusAlgebra a{basis, LinMap(basis, kAA, kA), LinMap(basis, {}, kA), LinMap(basis, kA, {}),
                     LinMap(basis, kA, kAA)};
  const RingElem one = num(ring, 1);
  put(a.mu, "1 1", "1", one);
  put(a.mu, "1 X", "X", one);
  put(a.mu, "X 1", "X", one);
  put(a.mu, "X X", "X", h);
  put(a.mu, "X X", "1", t);
  put(a.eta, "", "1", one);
  put(a.eps, "X", "", one);
  put(a.delta, "1", "1 X", one);
  put(a.delta, "1", "X 1", one);
  put(a.delta, "1", "1 1", -h);
  put(a.delta, "X", "X X", one);
  put(a.delta, "X", "1 1", t);
  return a;
}

TensorVec multiply(const FrobeniusAlgebra& alg, const TensorVec& x, const TensorVec& y) {
  LinMap xy = tensor(vector_map(x), vector_map(y));
  return TensorVec{alg.basis, kA, compose(alg.mu, xy).column(0)};
}

LinMap multiplication_map(const FrobeniusAlgebra& alg, const TensorVec& x) {
  return compose(alg.mu, tensor(vector_map(x), LinMap::identity(alg.basis, kA)));
}

TensorVec algebra_power(const FrobeniusAlgebra& alg, const TensorVec& x, const TensorVec& x_inv, int e) {
  TensorVec out = alg.unit();
  const TensorVec& f = e >= 0 ? x : x_inv;
  for (int i = 0; i < std::abs(e); ++i) out = multiply(alg, out, f);
  return out;
}

FrobeniusPair algebra_only_pair(const FrobeniusAlgebra& alg, std::string name) {
  FrobeniusPair p(std::move(name), alg.basis);
  set_algebra(p, alg);
  return p;
}

FrobeniusPair build_universal() {
  auto ring = Ring::make(CoefficientDomain::integers, {{"h", false}, {"t", false}});
  auto alg = quadratic_algebra(ring, RingElem::variable(ring, "h"), RingElem::variable(ring, "t"));
  return algebra_only_pair(alg, "universal");
}

FrobeniusPair build_aps() {
  auto ring = Ring::make(CoefficientDomain::integers);
  const RingElem zero(ring), one = num(ring, 1);
  auto alg = quadratic_algebra(ring, zero, zero, {"Y", "Z"});
  const auto& b = alg.basis;
  FrobeniusPair p("aps", b);
  set_algebra(p, alg);

  LinMap mu_ae(b, kAE, kE), mu_ea(b, kEA, kE), d_ae(b, kE, kAE), d_ea(b, kE, kEA);
  for (const char* y : {"Y", "Z"}) {
    put(mu_ae, fmt::format("1 {}", y), y, one);
    put(mu_ea, fmt::format("{} 1", y), y, one);
    put(d_ae, y, fmt::format("X {}", y), one);
    put(d_ea, y, fmt::format("{} X", y), one);
  }
  LinMap mu_eea(b, kEE, kA), d_aee(b, kA, kEE);
  put(mu_eea, "Y Z", "X", one);
  put(mu_eea, "Z Y", "X", one);
  put(d_aee, "1", "Y Z", one);
  put(d_aee, "1", "Z Y", one);
  LinMap nu_ae(b, kA, kE), nu_ea(b, kE, kA);
  put(nu_ae, "1", "Y", one);
  put(nu_ae, "1", "Z", one);
  put(nu_ea, "Y", "X", one);
  put(nu_ea, "Z", "X", one);

  p.set("mu_AE", mu_ae);
  p.set("mu_EA", mu_ea);
  p.set("Delta_AE", d_ae);
  p.set("Delta_EA", d_ea);
  p.set("mu_E", LinMap(b, kEE, kE));
  p.set("Delta_E", LinMap(b, kE, kEE));
  p.set("mu_EEA", mu_eea);
  p.set("Delta_AEE", d_aee);
  p.set("nu_AE", nu_ae);
  p.set("nu_EA", nu_ea);
  p.set("nu_EE", LinMap(b, kE, kE));
  return p;
}

FrobeniusPair build_sqrt(const FrobeniusAlgebra& alg_in, const TensorVec& xi, std::string name) {
  BasisPtr b = alg_in.basis;
  if (b->labels(Sort::E) != b->labels(Sort::A))
    b = std::make_shared<const BasisSpec>(b->ring(), b->labels(Sort::A), b->labels(Sort::A));
  FrobeniusAlgebra alg = rebase(alg_in, b);
  TensorVec x{b, kA, xi.entries};
  TensorVec sq = multiply(alg, x, x);
  TensorVec phi = alg.handle();
  if (!(sq == phi))
    throw Error(fmt::format("xi^2 != phi: xi^2 = {}, phi = {}", sq.to_string(), phi.to_string()));

  FrobeniusPair p(std::move(name), b);
  set_algebra(p, alg);
  p.set("mu_AE", retyped(alg.mu, b, kAE, kE));
  p.set("mu_EA", retyped(alg.mu, b, kEA, kE));
  p.set("mu_E", retyped(alg.mu, b, kEE, kE));
  p.set("mu_EEA", retyped(alg.mu, b, kEE, kA));
  p.set("Delta_AE", retyped(alg.delta, b, kE, kAE));
  p.set("Delta_EA", retyped(alg.delta, b, kE, kEA));
  p.set("Delta_E", retyped(alg.delta, b, kE, kEE));
  p.set("Delta_AEE", retyped(alg.delta, b, kA, kEE));
  LinMap lx = multiplication_map(alg, x);
  p.set("nu_AE", retyped(lx, b, kA, kE));
  p.set("nu_EA", retyped(lx, b, kE, kA));
  p.set("nu_EE", retyped(lx, b, kE, kE));
  p.meta()["xi"] = x.to_string();
  return p;
}

FrobeniusPair build_tt() {
  auto ring = Ring::make(CoefficientDomain::integers_mod_2, {{"l", true}});
  const RingElem l = RingElem::variable(ring, "l");
  auto alg = quadratic_algebra(ring, l * l, RingElem(ring));
  return build_sqrt(alg, alg.element({l, RingElem(ring)}), "tt");
}

FrobeniusPair build_it() {
  auto ring = Ring::make(CoefficientDomain::rationals, {{"t", true}});
  const RingElem t = RingElem::variable(ring, "t"), zero(ring);
  auto alg = quadratic_algebra(ring, zero, t);
  const auto& b = alg.basis;
  // phi = 2X and phi^2 = 4t, so phi^-1 = (4t)^-1 * 2X.
  TensorVec phi = alg.handle();
  TensorVec phi_inv = alg.element({zero, unit_invert(RingElem(ring, 4) * t) * RingElem(ring, 2)});
  if (!(multiply(alg, phi, phi_inv) == alg.unit())) throw Error("internal: phi^-1 is wrong");

  FrobeniusPair p("it", b);
  set_algebra(p, alg);
  p.set("mu_AE", retyped(alg.mu, b, kAE, kE));
  p.set("mu_EA", retyped(alg.mu, b, kEA, kE));
  p.set("Delta_AE", retyped(alg.delta, b, kE, kAE));
  p.set("Delta_EA", retyped(alg.delta, b, kE, kEA));
  const LinMap lphi = multiplication_map(alg, phi), lphi_inv = multiplication_map(alg, phi_inv);
  p.set("mu_EEA", retyped(compose(lphi_inv, alg.mu), b, kEE, kA));
  p.set("Delta_AEE", retyped(compose(alg.delta, lphi), b, kA, kEE));
  p.set("nu_AE", retyped(lphi, b, kA, kE));
  p.set("nu_EA", retyped(LinMap::identity(b, kA), b, kE, kA));
  p.set("nu_EE", LinMap::identity(b, kE));
  // Not part of the structure: filled in with mu_A and Delta_A only so the
  // consistency conditions can be evaluated.
  p.set("mu_E", retyped(alg.mu, b, kEE, kE));
  p.set("Delta_E", retyped(alg.delta, b, kE, kEE));
  p.mark_provisional("mu_E");
  p.mark_provisional("Delta_E");
  p.meta()["phi_inv"] = phi_inv.to_string();
  return p;
}

// ---------------------------------------------------------------------------

namespace {

struct Rank2Field {
  const char* name;
  RingElem Rank2Params::*member;
};

const std::vector<Rank2Field>& rank2_fields() {
  static const std::vector<Rank2Field> f = {
      {"a", &Rank2Params::a},     {"cYY", &Rank2Params::cYY}, {"cYZ", &Rank2Params::cYZ},
      {"cZZ", &Rank2Params::cZZ}, {"dYY", &Rank2Params::dYY}, {"dYZ", &Rank2Params::dYZ},
      {"dZZ", &Rank2Params::dZZ}, {"eY", &Rank2Params::eY},   {"eZ", &Rank2Params::eZ},
      {"fY", &Rank2Params::fY},   {"fZ", &Rank2Params::fZ}};
  return f;
}

}  // namespace

Rank2Params Rank2Params::zero(const RingPtr& ring) {
  Rank2Params p;
  for (const auto& f : rank2_fields()) p.*(f.member) = RingElem(ring);
  return p;
}

Rank2Params Rank2Params::parse(std::string_view text, const RingPtr& ring) {
  Rank2Params p = zero(ring);
  std::string s(text);
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(pos, comma - pos);
    pos = comma + 1;
    auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(fmt::format("expected KEY=VALUE, got '{}'", item));
    std::string key = item.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    auto it = std::find_if(rank2_fields().begin(), rank2_fields().end(),
                           [&](const auto& f) { return key == f.name; });
    if (it == rank2_fields().end()) throw Error(fmt::format("unknown rank2 parameter '{}'", key));
    p.*(it->member) = parse_ring_elem(item.substr(eq + 1), ring);
  }
  return p;
}

std::string Rank2Params::to_string() const {
  std::string out;
  for (const auto& f : rank2_fields()) {
    if (!out.empty()) out += ",";
    out += fmt::format("{}={}", f.name, (this->*(f.member)).to_string());
  }
  return out;
}

FrobeniusPair build_rank2(const Rank2Params& p) {
  const RingPtr& ring = p.a.ring();
  const RingElem one = num(ring, 1), two = num(ring, 2);
  const RingElem& a = p.a;
  auto alg = quadratic_algebra(ring, two * a, -(a * a), {"Y", "Z"});
  const auto& b = alg.basis;
  FrobeniusPair pr("rank2", b);
  set_algebra(pr, alg);

  LinMap mu_ae(b, kAE, kE), mu_ea(b, kEA, kE), d_ae(b, kE, kAE), d_ea(b, kE, kEA);
  for (const char* y : {"Y", "Z"}) {
    put(mu_ae, fmt::format("1 {}", y), y, one);
    put(mu_ae, fmt::format("X {}", y), y, a);
    put(mu_ea, fmt::format("{} 1", y), y, one);
    put(mu_ea, fmt::format("{} X", y), y, a);
    // (X - a) (x) y and its mirror
    put(d_ae, y, fmt::format("X {}", y), one);
    put(d_ae, y, fmt::format("1 {}", y), -a);
    put(d_ea, y, fmt::format("{} X", y), one);
    put(d_ea, y, fmt::format("{} 1", y), -a);
  }
  // x (X - a) for each product coefficient
  auto put_xa = [&](LinMap& m, std::string_view in, const RingElem& c) {
    put(m, in, "X", c);
    put(m, in, "1", -(c * a));
  };
  LinMap mu_eea(b, kEE, kA);
  put_xa(mu_eea, "Y Y", p.cYY);
  put_xa(mu_eea, "Y Z", p.cYZ);
  put_xa(mu_eea, "Z Y", p.cYZ);
  put_xa(mu_eea, "Z Z", p.cZZ);
  LinMap d_aee(b, kA, kEE);
  for (const auto& [in, s] : {std::pair{"1", one}, std::pair{"X", a}}) {
    put(d_aee, in, "Y Y", s * p.dYY);
    put(d_aee, in, "Y Z", s * p.dYZ);
    put(d_aee, in, "Z Y", s * p.dYZ);
    put(d_aee, in, "Z Z", s * p.dZZ);
  }
  LinMap nu_ea(b, kE, kA), nu_ae(b, kA, kE);
  put_xa(nu_ea, "Y", p.eY);
  put_xa(nu_ea, "Z", p.eZ);
  // nu_AE is A-linear: nu(X) = X nu(1) = a nu(1).
  for (const auto& [in, s] : {std::pair{"1", one}, std::pair{"X", a}}) {
    put(nu_ae, in, "Y", s * p.fY);
    put(nu_ae, in, "Z", s * p.fZ);
  }

  pr.set("mu_AE", mu_ae);
  pr.set("mu_EA", mu_ea);
  pr.set("Delta_AE", d_ae);
  pr.set("Delta_EA", d_ea);
  pr.set("mu_E", LinMap(b, kEE, kE));
  pr.set("Delta_E", LinMap(b, kE, kEE));
  pr.set("mu_EEA", mu_eea);
  pr.set("Delta_AEE", d_aee);
  pr.set("nu_AE", nu_ae);
  pr.set("nu_EA", nu_ea);
  pr.set("nu_EE", LinMap(b, kE, kE));
  pr.meta()["params"] = p.to_string();
  pr.meta()["nu_EA"] = "nu_EA(Y) = eY (X - a), nu_EA(Z) = eZ (X - a)";
  return pr;
}

std::vector<ConstraintViolation> check_rank2_constraints(const Rank2Params& p) {
  std::vector<ConstraintViolation> out;
  const RingPtr& ring = p.a.ring();
  const RingElem two = num(ring, 2);
  auto check = [&](std::string name, const RingElem& lhs, const RingElem& rhs, bool published) {
    if (!(lhs == rhs))
      out.push_back({std::move(name), fmt::format("{} != {}", lhs.to_string(), rhs.to_string()), published});
  };
  check("Cf=e (Y)", p.cYY * p.fY + p.cYZ * p.fZ, p.eY, true);
  check("Cf=e (Z)", p.cYZ * p.fY + p.cZZ * p.fZ, p.eZ, true);
  check("e.f=2", p.eY * p.fY + p.eZ * p.fZ, two, true);
  check("cYY dYY + 2 cYZ dYZ + cZZ dZZ = 2", p.cYY * p.dYY + two * p.cYZ * p.dYZ + p.cZZ * p.dZZ, two, true);
  check("De=f (Y)", p.dYY * p.eY + p.dYZ * p.eZ, p.fY, false);
  check("De=f (Z)", p.dYZ * p.eY + p.dZZ * p.eZ, p.fZ, false);
  return out;
}

std::array<RingElem, 4> lemma_first_conditions(const RingElem& a0, const RingElem& a1, const RingElem& b0,
                                                const RingElem& b1, const RingElem& h, const RingElem& t) {
  // X(XY) - X^2 Y and X(XZ) - X^2 Z, coefficients on Y and Z.
  return {a0 * a0 + a1 * b0 - a0 * h - t, a0 * a1 + a1 * b1 - a1 * h, a0 * b0 + b0 * b1 - h * b0,
          a1 * b0 + b1 * b1 - h * b1 - t};
}

// ---------------------------------------------------------------------------

LaurentSqrtData laurent_sqrt_data() {
  auto ring = Ring::make(CoefficientDomain::integers, {{"a", true}, {"b", true}});
  const RingElem a = RingElem::variable(ring, "a"), b = RingElem::variable(ring, "b");
  const RingElem binv = RingElem::variable(ring, "b", -1);
  const RingElem h = num(ring, -2) * binv * (a - binv);
  const RingElem t = -(binv * binv) * (a * a + h);
  auto alg = quadratic_algebra(ring, h, t);
  TensorVec xi = alg.element({a, b});
  return {alg, xi, multiply(alg, xi, xi), alg.handle()};
}

FrobeniusPair build_laurent_sqrt() {
  auto d = laurent_sqrt_data();
  return build_sqrt(d.algebra, d.xi, "laurent_sqrt");
}

// ---------------------------------------------------------------------------

namespace {

// The fixed A-word maps of the E = A⊗A construction and the handle powers.
struct DoubleParts {
  BasisPtr basis;
  FrobeniusAlgebra alg;
  TensorVec phi, phi_inv;
  LinMap act_left, act_right, prod4, delta_mu;

  LinMap power_map(int e) const { return multiplication_map(alg, algebra_power(alg, phi, phi_inv, e)); }
};

DoubleParts double_parts(const FrobeniusAlgebra& alg_in, const TensorVec& phi_inv_in) {
  const auto& la = alg_in.basis->labels(Sort::A);
  std::vector<std::string> e_labels;
  for (const auto& x : la)
    for (const auto& y : la) e_labels.push_back(x + "." + y);
  auto b = std::make_shared<const BasisSpec>(alg_in.basis->ring(), la, e_labels);
  FrobeniusAlgebra alg = rebase(alg_in, b);
  TensorVec phi = alg.handle();
  TensorVec phi_inv{b, kA, phi_inv_in.entries};
  if (!(multiply(alg, phi_inv, phi) == alg.unit()))
    throw Error(fmt::format("phi_inv is not an inverse: phi = {}, phi_inv = {}", phi.to_string(),
                            phi_inv.to_string()));
  const LinMap id = LinMap::identity(b, kA);
  LinMap act_left = compose(alg.mu, tensor(id, alg.mu));    // AAA -> A, a(bc)
  LinMap act_right = compose(alg.mu, tensor(alg.mu, id));   // AAA -> A, (ab)c
  LinMap prod4 = compose(compose(alg.mu, tensor(alg.mu, alg.mu)), LinMap::transposition(b, kAAAA, 2));
  LinMap delta_mu = compose(alg.delta, alg.mu);
  return {b, alg, phi, phi_inv, act_left, act_right, prod4, delta_mu};
}

// Slot k of the exponent tuple controls these generators.
LinMap double_slot_map(const DoubleParts& d, const std::string& gen, int e) {
  const auto& b = d.basis;
  const LinMap pw = d.power_map(e);
  if (gen == "mu_AE") return retyped(compose(d.alg.delta, compose(pw, d.act_left)), b, kAE, kE);
  if (gen == "mu_EA") return retyped(compose(d.alg.delta, compose(pw, d.act_right)), b, kEA, kE);
  if (gen == "mu_EEA") return retyped(compose(pw, d.prod4), b, kEE, kA);
  if (gen == "mu_E") return retyped(compose(d.alg.delta, compose(pw, d.prod4)), b, kEE, kE);
  if (gen == "nu_AE") return retyped(compose(d.alg.delta, pw), b, kA, kE);
  if (gen == "nu_EA") return retyped(compose(pw, d.alg.mu), b, kE, kA);
  if (gen == "nu_EE") return retyped(compose(d.alg.delta, compose(pw, d.alg.mu)), b, kE, kE);
  throw Error("internal: not an exponent slot");
}

const std::vector<std::pair<std::string, int>>& double_slots() {
  static const std::vector<std::pair<std::string, int>> s = {{"mu_AE", 0}, {"mu_EA", 0}, {"mu_EEA", 1},
                                                             {"mu_E", 2},  {"nu_AE", 3}, {"nu_EA", 4},
                                                             {"nu_EE", 5}};
  return s;
}

FrobeniusPair double_base(const DoubleParts& d) {
  const auto& b = d.basis;
  const auto& alg = d.alg;
  const LinMap id = LinMap::identity(b, kA);
  const LinMap mid = LinMap::transposition(b, kAAAA, 2);
  FrobeniusPair p("double", b);
  set_algebra(p, alg);
  // Coproducts and coactions: upside-down images of the products, no handle factors.
  p.set("Delta_AE", retyped(compose(tensor(id, alg.delta), d.delta_mu), b, kE, kAE));
  p.set("Delta_EA", retyped(compose(tensor(alg.delta, id), d.delta_mu), b, kE, kEA));
  LinMap dd = compose(mid, compose(tensor(alg.delta, alg.delta), alg.delta));  // A -> AAAA
  p.set("Delta_AEE", retyped(dd, b, kA, kEE));
  p.set("Delta_E", retyped(compose(dd, alg.mu), b, kE, kEE));
  return p;
}

}  // namespace

FrobeniusPair build_double(const FrobeniusAlgebra& alg, const TensorVec& phi_inv, const DoubleExponents& exps) {
  DoubleParts d = double_parts(alg, phi_inv);
  FrobeniusPair p = double_base(d);
  for (const auto& [gen, slot] : double_slots()) p.set(gen, double_slot_map(d, gen, exps[slot]));
  p.meta()["exponents"] = fmt::format("{},{},{},{},{},{}", exps[0], exps[1], exps[2], exps[3], exps[4], exps[5]);
  return p;
}

DoubleSearchResult search_double_exponents(const FrobeniusAlgebra& alg, const TensorVec& phi_inv, int lo, int hi,
                                           const Theory& theory, const VerifyOptions& options) {
  DoubleSearchResult res;
  if (hi < lo) return res;
  DoubleParts d = double_parts(alg, phi_inv);
  const int width = hi - lo + 1;

  // Precomputed slot maps for every exponent in range.
  std::map<std::string, std::vector<LinMap>> slot_maps;
  for (const auto& [gen, slot] : double_slots())
    for (int e = lo; e <= hi; ++e) slot_maps[gen].push_back(double_slot_map(d, gen, e));

  struct Item {
    const Equation* eq;
    std::array<bool, 6> deps{};
    int ndeps = 0;
  };
  std::vector<Item> items;
  for (const auto& eq : theory.equations) {
    if (eq.group == quarantine_group) continue;
    if (!options.groups.empty() &&
        std::find(options.groups.begin(), options.groups.end(), eq.group) == options.groups.end())
      continue;
    Item it{&eq};
    for (const auto& g : eq.generators())
      for (const auto& [gen, slot] : double_slots())
        if (g == gen && !it.deps[slot]) {
          it.deps[slot] = true;
          ++it.ndeps;
        }
    items.push_back(it);
  }
  // Cheap equations first so cached failures prune early.
  std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.ndeps < y.ndeps; });

  std::size_t box = 1;
  for (int i = 0; i < 6; ++i) box *= static_cast<std::size_t>(width);
  std::vector<std::int8_t> cache(items.size() * box, -1);

  FrobeniusPair base = double_base(d);
  DoubleExponents ex;
  std::array<int, 6> idx{};
  for (std::size_t n = 0; n < box; ++n) {
    std::size_t rest = n;
    for (int s = 5; s >= 0; --s) {
      idx[s] = static_cast<int>(rest % width);
      rest /= width;
      ex[s] = lo + idx[s];
    }
    ++res.tuples_checked;
    std::optional<FrobeniusPair> pair;
    bool all = true;
    for (std::size_t k = 0; k < items.size(); ++k) {
      std::size_t code = 0;
      for (int s = 0; s < 6; ++s) code = code * width + (items[k].deps[s] ? idx[s] : 0);
      auto& c = cache[k * box + code];
      if (c < 0) {
        if (!pair) {
          pair = base;
          for (const auto& [gen, slot] : double_slots()) pair->set(gen, slot_maps[gen][idx[slot]]);
        }
        const Equation& eq = *items[k].eq;
        auto lookup = pair->lookup();
        LinMap l = evaluate_term(eq.lhs, pair->basis(), lookup);
        LinMap r = evaluate_term(eq.rhs, pair->basis(), lookup);
        c = equal(l, r).equal ? 1 : 0;
        ++res.evaluations;
      }
      if (c == 0) {
        all = false;
        break;
      }
    }
    if (all) res.passing.push_back(ex);
  }
  return res;
}

DoubleTestAlgebra double_test_algebra() {
  auto ring = Ring::make(CoefficientDomain::rationals);
  auto alg = quadratic_algebra(ring, RingElem(ring), RingElem(ring, 1));
  TensorVec phi_inv = alg.element({RingElem(ring), RingElem(ring, mpq_class(1, 2))});
  return {alg, phi_inv};
}

}  // namespace frobpair
