#pragma once

// Exact multivariate Laurent polynomials over Z, Q or Z/2.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace frobpair {

/// Raised for every user-facing failure of the library (bad input, ring
/// mismatch, non-units, malformed files). Messages are meant to be printed.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CoefficientDomain { integers, rationals, integers_mod_2 };

std::string_view to_string(CoefficientDomain d);
CoefficientDomain parse_domain(std::string_view name);

struct VarDecl {
  std::string name;
  bool invertible = false;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

/// A ring declaration: coefficient domain plus named variables, some of which
/// may be declared invertible (Laurent variables).
class Ring {
 public:
  static RingPtr make(CoefficientDomain domain, std::vector<VarDecl> vars = {});

  CoefficientDomain domain() const { return domain_; }
  const std::vector<VarDecl>& vars() const { return vars_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Variable indices sorted by name; the printing and comparison order.
  const std::vector<std::size_t>& name_order() const { return name_order_; }

  std::string to_string() const;

  friend bool operator==(const Ring& a, const Ring& b) {
    return a.domain_ == b.domain_ && a.vars_ == b.vars_;
  }

 private:
  Ring(CoefficientDomain domain, std::vector<VarDecl> vars);

  CoefficientDomain domain_;
  std::vector<VarDecl> vars_;
  std::vector<std::size_t> name_order_;
};

bool same_ring(const RingPtr& a, const RingPtr& b);

/// Exponent vector indexed by the ring's declaration order.
using Monomial = std::vector<std::int32_t>;

class RingElem {
 public:
  using TermMap = std::map<Monomial, mpq_class>;

  RingElem() = default;
  explicit RingElem(RingPtr ring);
  RingElem(RingPtr ring, const mpq_class& constant);
  RingElem(RingPtr ring, long constant);

  static RingElem variable(RingPtr ring, std::string_view name, int exponent = 1);
  static RingElem monomial(RingPtr ring, Monomial m, const mpq_class& coeff);

  const RingPtr& ring() const { return ring_; }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  bool is_constant() const;
  /// Constant term value; requires is_constant().
  mpq_class constant_value() const;

  RingElem operator-() const;
  RingElem& operator+=(const RingElem& o);
  RingElem& operator-=(const RingElem& o);
  RingElem& operator*=(const RingElem& o);

  friend RingElem operator+(RingElem a, const RingElem& b) { return a += b; }
  friend RingElem operator-(RingElem a, const RingElem& b) { return a -= b; }
  friend RingElem operator*(const RingElem& a, const RingElem& b);

  /// Integer power; negative exponents require a unit.
  RingElem pow(long e) const;

  friend bool operator==(const RingElem& a, const RingElem& b);

  /// Canonical text, parseable by parse_ring_elem.
  std::string to_string() const;

  std::size_t term_count() const { return terms_.size(); }

 private:
  friend RingElem unit_invert(const RingElem& x);

  void add_term(const Monomial& m, const mpq_class& c);
  void check_ring(const RingElem& o) const;

  RingPtr ring_;
  TermMap terms_;
};

/// Normalizes a coefficient into the domain; throws when the value is not
/// representable (a non-integer over Z).
mpq_class normalize_coeff(CoefficientDomain d, const mpq_class& c);

RingElem parse_ring_elem(std::string_view text, const RingPtr& ring);

/// Inverse of a unit: a single monomial in invertible variables whose
/// coefficient is invertible in the domain.
RingElem unit_invert(const RingElem& x);

bool is_unit(const RingElem& x);

/// Substitution of variables followed by normalization in `target`. Variables
/// of the source ring that are not assigned must also exist in `target`.
using Assignment = std::vector<std::pair<std::string, RingElem>>;
RingElem specialize(const RingElem& x, const Assignment& assignment, const RingPtr& target);

/// The ring left after removing the assigned variables from `ring` (and
/// optionally switching the coefficient domain).
RingPtr specialized_ring(const RingPtr& ring, const std::vector<std::string>& removed,
                         std::optional<CoefficientDomain> domain = std::nullopt);

/// Parses "h=0,t=1" style lists against `value_ring`.
Assignment parse_assignment(std::string_view text, const RingPtr& value_ring);

}  // namespace frobpair
