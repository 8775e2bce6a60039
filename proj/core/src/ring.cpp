#include "frobpair/ring.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace frobpair {

std::string_view to_string(CoefficientDomain d) {
  switch (d) {
    case CoefficientDomain::integers:
      return "Z";
    case CoefficientDomain::rationals:
      return "Q";
    case CoefficientDomain::integers_mod_2:
      return "Z2";
  }
  return "?";
}

CoefficientDomain parse_domain(std::string_view name) {
  if (name == "Z" || name == "z" || name == "integers") return CoefficientDomain::integers;
  if (name == "Q" || name == "q" || name == "rationals") return CoefficientDomain::rationals;
  if (name == "Z2" || name == "z2" || name == "Z/2" || name == "integers-mod-2")
    return CoefficientDomain::integers_mod_2;
  throw Error(fmt::format("unknown coefficient domain '{}'", name));
}

// ---------------------------------------------------------------------------
// Ring

Ring::Ring(CoefficientDomain domain, std::vector<VarDecl> vars)
    : domain_(domain), vars_(std::move(vars)) {
  name_order_.resize(vars_.size());
  std::iota(name_order_.begin(), name_order_.end(), 0);
  std::sort(name_order_.begin(), name_order_.end(),
            [&](std::size_t a, std::size_t b) { return vars_[a].name < vars_[b].name; });
}

RingPtr Ring::make(CoefficientDomain domain, std::vector<VarDecl> vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.name.empty() || !(std::isalpha(static_cast<unsigned char>(v.name[0])) || v.name[0] == '_'))
      throw Error(fmt::format("invalid variable name '{}'", v.name));
    for (char c : v.name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw Error(fmt::format("invalid variable name '{}'", v.name));
    if (!seen.insert(v.name).second) throw Error(fmt::format("duplicate variable '{}'", v.name));
  }
  return RingPtr(new Ring(domain, std::move(vars)));
}

std::optional<std::size_t> Ring::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  return std::nullopt;
}

std::string Ring::to_string() const {
  std::string out(frobpair::to_string(domain_));
  out += "[";
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) out += ",";
    out += vars_[i].name;
    if (vars_[i].invertible) out += "^+-1";
  }
  out += "]";
  return out;
}

bool same_ring(const RingPtr& a, const RingPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

mpq_class normalize_coeff(CoefficientDomain d, const mpq_class& c) {
  switch (d) {
    case CoefficientDomain::rationals:
      return c;
    case CoefficientDomain::integers:
      if (c.get_den() != 1) throw Error(fmt::format("non-integer coefficient {} over Z", c.get_str()));
      return c;
    case CoefficientDomain::integers_mod_2: {
      // An odd denominator is invertible mod 2, so only the numerator parity matters.
      if (c.get_den() % 2 == 0)
        throw Error(fmt::format("coefficient {} has no value mod 2", c.get_str()));
      mpz_class r = c.get_num() % 2;
      return mpq_class(r != 0 ? 1 : 0);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// RingElem

RingElem::RingElem(RingPtr ring) : ring_(std::move(ring)) {}

RingElem::RingElem(RingPtr ring, const mpq_class& constant) : ring_(std::move(ring)) {
  add_term(Monomial(ring_->vars().size(), 0), constant);
}

RingElem::RingElem(RingPtr ring, long constant) : RingElem(std::move(ring), mpq_class(constant)) {}

RingElem RingElem::variable(RingPtr ring, std::string_view name, int exponent) {
  auto idx = ring->index_of(name);
  if (!idx) throw Error(fmt::format("unknown variable {}", name));
  if (exponent < 0 && !ring->vars()[*idx].invertible)
    throw Error(fmt::format("negative exponent on non-invertible variable {}", name));
  Monomial m(ring->vars().size(), 0);
  m[*idx] = exponent;
  return monomial(std::move(ring), std::move(m), 1);
}

RingElem RingElem::monomial(RingPtr ring, Monomial m, const mpq_class& coeff) {
  RingElem r(std::move(ring));
  if (m.size() != r.ring_->vars().size()) throw Error("monomial arity does not match ring");
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] < 0 && !r.ring_->vars()[i].invertible)
      throw Error(fmt::format("negative exponent on non-invertible variable {}",
                              r.ring_->vars()[i].name));
  r.add_term(m, coeff);
  return r;
}

void RingElem::add_term(const Monomial& m, const mpq_class& c) {
  mpq_class v = normalize_coeff(ring_->domain(), c);
  if (v == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, v);
  if (inserted) return;
  it->second = normalize_coeff(ring_->domain(), it->second + v);
  if (it->second == 0) terms_.erase(it);
}

void RingElem::check_ring(const RingElem& o) const {
  if (!same_ring(ring_, o.ring_)) throw Error("ring mismatch");
}

bool RingElem::is_one() const {
  if (terms_.size() != 1) return false;
  const auto& [m, c] = *terms_.begin();
  return c == 1 && std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
}

bool RingElem::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() != 1) return false;
  const auto& m = terms_.begin()->first;
  return std::all_of(m.begin(), m.end(), [](auto e) { return e == 0; });
}

mpq_class RingElem::constant_value() const {
  if (!is_constant()) throw Error(fmt::format("'{}' is not a constant", to_string()));
  return terms_.empty() ? mpq_class(0) : terms_.begin()->second;
}

RingElem RingElem::operator-() const {
  RingElem r(ring_);
  for (const auto& [m, c] : terms_) r.add_term(m, -c);
  return r;
}

RingElem& RingElem::operator+=(const RingElem& o) {
  check_ring(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

RingElem& RingElem::operator-=(const RingElem& o) {
  check_ring(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

RingElem operator*(const RingElem& a, const RingElem& b) {
  a.check_ring(b);
  RingElem r(a.ring_);
  Monomial m(a.ring_->vars().size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      r.add_term(m, ca * cb);
    }
  return r;
}

RingElem& RingElem::operator*=(const RingElem& o) { return *this = *this * o; }

RingElem RingElem::pow(long e) const {
  RingElem base = e < 0 ? unit_invert(*this) : *this;
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  RingElem acc(ring_, 1);
  while (n) {
    if (n & 1) acc *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return acc;
}

bool operator==(const RingElem& a, const RingElem& b) {
  return same_ring(a.ring_, b.ring_) && a.terms_ == b.terms_;
}

namespace {

// Printing order: compare exponents variable by variable in name order,
// larger exponents first, so "h^2 - 4" and "l + l^-1".
struct PrintOrder {
  const Ring* ring;
  bool operator()(const Monomial* a, const Monomial* b) const {
    for (auto i : ring->name_order()) {
      if ((*a)[i] != (*b)[i]) return (*a)[i] > (*b)[i];
    }
    return false;
  }
};

std::string monomial_text(const Ring& ring, const Monomial& m) {
  std::string out;
  for (auto i : ring.name_order()) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += ring.vars()[i].name;
    if (m[i] != 1) out += fmt::format("^{}", m[i]);
  }
  return out;
}

}  // namespace

std::string RingElem::to_string() const {
  if (!ring_ || terms_.empty()) return "0";
  std::vector<const Monomial*> order;
  order.reserve(terms_.size());
  for (const auto& kv : terms_) order.push_back(&kv.first);
  std::sort(order.begin(), order.end(), PrintOrder{ring_.get()});

  std::string out;
  bool first = true;
  for (const Monomial* m : order) {
    mpq_class c = terms_.at(*m);
    bool negative = c < 0;
    if (negative) c = -c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    std::string mono = monomial_text(*ring_, *m);
    if (mono.empty()) {
      out += c.get_str();
    } else if (c == 1) {
      out += mono;
    } else {
      out += c.get_str() + "*" + mono;
    }
  }
  return out;
}

bool is_unit(const RingElem& x) {
  if (x.terms().size() != 1) return false;
  const auto& [m, c] = *x.terms().begin();
  const auto& vars = x.ring()->vars();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] != 0 && !vars[i].invertible) return false;
  switch (x.ring()->domain()) {
    case CoefficientDomain::integers:
      return c == 1 || c == -1;
    case CoefficientDomain::rationals:
      return c != 0;
    case CoefficientDomain::integers_mod_2:
      return c == 1;
  }
  return false;
}

RingElem unit_invert(const RingElem& x) {
  if (!is_unit(x)) throw Error(fmt::format("not a unit: {}", x.to_string()));
  const auto& [m, c] = *x.terms().begin();
  Monomial inv(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) inv[i] = -m[i];
  RingElem r(x.ring());
  r.add_term(inv, 1 / c);
  return r;
}

// ---------------------------------------------------------------------------
// Parsing: expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
// factor := INT | RAT | VAR ('^' SINT)? | '(' expr ')' ; with unary minus.

namespace {

class Parser {
 public:
  Parser(std::string_view text, const RingPtr& ring) : text_(text), ring_(ring) {}

  RingElem parse() {
    RingElem e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(fmt::format("unexpected '{}'", text_[pos_]));
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(fmt::format("syntax error at position {}: {}", pos_, what));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RingElem expr() {
    RingElem acc(ring_);
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    RingElem t = term();
    acc = negate ? -t : t;
    for (;;) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  RingElem term() {
    RingElem acc = factor();
    while (accept('*')) acc *= factor();
    return acc;
  }

  std::string digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  long signed_int() {
    skip_ws();
    bool neg = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      neg = text_[pos_] == '-';
      ++pos_;
    }
    skip_ws();
    std::string d = digits();
    if (d.empty()) fail("expected integer exponent");
    long v = std::stol(d);
    return neg ? -v : v;
  }

  RingElem factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RingElem e = expr();
      if (!accept(')')) fail("expected ')'");
      return power(std::move(e));
    }
    if (c == '-') {  // unary minus inside a product, e.g. "2*-h"
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = digits();
      mpq_class value(mpz_class(num), 1);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        skip_ws();
        std::string den = digits();
        if (den.empty()) fail("expected denominator");
        if (mpz_class(den) == 0) fail("zero denominator");
        value = mpq_class(mpz_class(num), mpz_class(den));
        value.canonicalize();
      }
      if (ring_->domain() == CoefficientDomain::integers && value.get_den() != 1)
        fail(fmt::format("rational literal {} over Z", value.get_str()));
      return RingElem(ring_, value);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      auto idx = ring_->index_of(name);
      if (!idx) throw Error(fmt::format("unknown variable {}", name));
      long e = 1;
      if (accept('^')) e = signed_int();
      if (e < 0 && !ring_->vars()[*idx].invertible)
        throw Error(fmt::format("negative exponent on non-invertible variable {}", name));
      return RingElem::variable(ring_, name, static_cast<int>(e));
    }
    fail(fmt::format("unexpected '{}'", c));
  }

  RingElem power(RingElem base) {
    if (!accept('^')) return base;
    return base.pow(signed_int());
  }

  std::string_view text_;
  const RingPtr& ring_;
  std::size_t pos_ = 0;
};

}  // namespace

RingElem parse_ring_elem(std::string_view text, const RingPtr& ring) {
  return Parser(text, ring).parse();
}

// ---------------------------------------------------------------------------
// Specialization

RingElem specialize(const RingElem& x, const Assignment& assignment, const RingPtr& target) {
  const Ring& src = *x.ring();
  std::vector<std::optional<RingElem>> values(src.vars().size());
  for (const auto& [name, value] : assignment) {
    auto idx = src.index_of(name);
    if (!idx) throw Error(fmt::format("unknown variable {}", name));
    if (!same_ring(value.ring(), target)) throw Error("ring mismatch");
    if (src.vars()[*idx].invertible && !is_unit(value))
      throw Error(fmt::format("cannot assign non-unit {} to invertible variable {}",
                              value.to_string(), name));
    values[*idx] = value;
  }
  std::vector<std::optional<RingElem>> kept(src.vars().size());
  for (std::size_t i = 0; i < src.vars().size(); ++i) {
    if (values[i]) continue;
    auto t = target->index_of(src.vars()[i].name);
    if (!t) throw Error(fmt::format("variable {} is missing from the target ring", src.vars()[i].name));
    if (src.vars()[i].invertible && !target->vars()[*t].invertible)
      throw Error(fmt::format("variable {} lost invertibility", src.vars()[i].name));
    kept[i] = RingElem::variable(target, src.vars()[i].name);
  }

  RingElem out(target);
  for (const auto& [m, c] : x.terms()) {
    RingElem term(target, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      const RingElem& base = values[i] ? *values[i] : *kept[i];
      term *= base.pow(m[i]);
    }
    out += term;
  }
  return out;
}

RingPtr specialized_ring(const RingPtr& ring, const std::vector<std::string>& removed,
                         std::optional<CoefficientDomain> domain) {
  std::vector<VarDecl> vars;
  for (const auto& v : ring->vars())
    if (std::find(removed.begin(), removed.end(), v.name) == removed.end()) vars.push_back(v);
  return Ring::make(domain.value_or(ring->domain()), std::move(vars));
}

Assignment parse_assignment(std::string_view text, const RingPtr& value_ring) {
  Assignment out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - pos);
    pos = comma == std::string_view::npos ? text.size() : comma + 1;
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("expected NAME=VALUE, got '{}'", item));
    out.emplace_back(std::string(trim(item.substr(0, eq))),
                     parse_ring_elem(trim(item.substr(eq + 1)), value_ring));
  }
  return out;
}

}  // namespace frobpair
