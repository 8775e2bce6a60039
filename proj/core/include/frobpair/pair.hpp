#pragma once

// Commutative Frobenius pairs with Mobius maps: the generator table, the
// axiom verifier, the constructions and the structure-file format.

#include "frobpair/theory.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace frobpair {

/// Generator table of a (possibly partial) pair. beta and gamma are never
/// stored: they are derived as eps∘mu_A and Delta_A∘eta.
class FrobeniusPair {
 public:
  FrobeniusPair() = default;
  FrobeniusPair(std::string name, BasisPtr basis);

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const BasisPtr& basis() const { return basis_; }
  const RingPtr& ring() const { return basis_->ring(); }

  /// Stores a generator after checking its words against the signature.
  void set(const std::string& generator, LinMap map);
  void erase(const std::string& generator);
  bool has(std::string_view generator) const;
  /// Stored or derived map; nullptr when absent.
  const LinMap* get(std::string_view generator) const;
  const LinMap& at(std::string_view generator) const;
  const std::map<std::string, LinMap>& stored() const { return maps_; }

  /// Generators filled in only so that the consistency conditions can be
  /// probed; every other equation mentioning them is skipped.
  const std::set<std::string>& provisional() const { return provisional_; }
  void mark_provisional(const std::string& generator) { provisional_.insert(generator); }

  std::map<std::string, std::string>& meta() { return meta_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  GeneratorLookup lookup() const;

  friend bool operator==(const FrobeniusPair& a, const FrobeniusPair& b);

 private:
  void refresh_derived();

  std::string name_;
  BasisPtr basis_;
  std::map<std::string, LinMap> maps_;
  std::map<std::string, LinMap> derived_;
  std::set<std::string> provisional_;
  std::map<std::string, std::string> meta_;
};

// ---------------------------------------------------------------------------
// Verification

enum class Outcome { pass, fail, skip };
std::string_view to_string(Outcome o);

struct EquationResult {
  std::string name;
  std::string group;
  Provenance provenance = Provenance::verbatim;
  Outcome outcome = Outcome::pass;
  std::optional<Witness> witness;
  std::string reason;  // why an equation was skipped
};

struct GroupSummary {
  int pass = 0;
  int fail = 0;
  int skip = 0;
};

struct VerifyReport {
  std::string pair_name;
  int manifest_version = 0;
  bool strict_partial = false;
  std::vector<EquationResult> results;

  std::map<std::string, GroupSummary> summary() const;
  /// Groups in report order (known groups first, then any others).
  std::vector<std::string> groups() const;
  /// No failures outside the quarantine group.
  bool ok() const;
  std::size_t failures() const;
  std::set<std::string> failing_groups() const;

  std::string to_text() const;
  std::string to_json() const;
};

struct VerifyOptions {
  /// Empty means every group.
  std::vector<std::string> groups;
  /// Treat provisional generators as absent.
  bool strict_partial = false;
  /// Stop at the first scored failure (used by exhaustive searches).
  bool stop_at_first_failure = false;
};

VerifyReport verify(const FrobeniusPair& pair, const Theory& theory, const VerifyOptions& options = {});

/// mu_A(Delta_A(eta(1))).
TensorVec handle_element(const FrobeniusPair& pair);

/// Determinant of the Gram matrix beta(b_i (x) b_j) over the A basis.
RingElem gram_determinant(const FrobeniusPair& pair);

// ---------------------------------------------------------------------------
// Frobenius algebras of rank two: A = k[X]/(X^2 - hX - t), basis {1, X},
// eps(1) = 0, eps(X) = 1, Delta(1) = 1⊗X + X⊗1 - h 1⊗1, Delta(X) = X⊗X + t 1⊗1.

struct FrobeniusAlgebra {
  BasisPtr basis;  // only the A labels matter
  LinMap mu, eta, eps, delta;

  /// Coefficients on the A basis, in label order.
  TensorVec element(const std::vector<RingElem>& coeffs) const;
  TensorVec unit() const;
  /// mu(Delta(1)).
  TensorVec handle() const;
};

FrobeniusAlgebra quadratic_algebra(const RingPtr& ring, const RingElem& h, const RingElem& t,
                                   const std::vector<std::string>& e_labels = {"1", "X"});

/// Product of two elements of A.
TensorVec multiply(const FrobeniusAlgebra& alg, const TensorVec& x, const TensorVec& y);
/// Left multiplication by x as a map A -> A.
LinMap multiplication_map(const FrobeniusAlgebra& alg, const TensorVec& x);
TensorVec algebra_power(const FrobeniusAlgebra& alg, const TensorVec& x, const TensorVec& x_inv, int e);

/// The pair whose E maps are all absent; a plain Frobenius algebra.
FrobeniusPair algebra_only_pair(const FrobeniusAlgebra& alg, std::string name);

FrobeniusPair build_universal();
FrobeniusPair build_aps();
FrobeniusPair build_tt();
FrobeniusPair build_it();

struct Rank2Params {
  RingElem a, cYY, cYZ, cZZ, dYY, dYZ, dZZ, eY, eZ, fY, fZ;

  /// Parses "a=0,cYZ=1,..."; unspecified entries are 0.
  static Rank2Params parse(std::string_view text, const RingPtr& ring);
  static Rank2Params zero(const RingPtr& ring);
  std::string to_string() const;
};

FrobeniusPair build_rank2(const Rank2Params& p);

struct ConstraintViolation {
  std::string constraint;
  std::string detail;
  bool published = true;  // false for the condition the published list omits
};

/// Checks C f = e, e·f = 2 and c_YY d_YY + 2 c_YZ d_YZ + c_ZZ d_ZZ = 2 as
/// exact equalities in the base ring, plus D e = f, which the Mobius
/// relation (nu_EA ⊗ id)Delta_AEE = (id ⊗ nu_AE)Delta_A forces as well.
std::vector<ConstraintViolation> check_rank2_constraints(const Rank2Params& p);

/// The four residuals of X(XY) = X^2 Y and X(XZ) = X^2 Z for the action
/// XY = a0 Y + a1 Z, XZ = b0 Y + b1 Z on A = k[X]/(X^2 - hX - t).
std::array<RingElem, 4> lemma_first_conditions(const RingElem& a0, const RingElem& a1, const RingElem& b0,
                                                const RingElem& b1, const RingElem& h, const RingElem& t);

/// E = A with every product, action and coproduct those of A and all Mobius
/// maps multiplication by xi. Throws unless xi^2 equals the handle element.
FrobeniusPair build_sqrt(const FrobeniusAlgebra& alg, const TensorVec& xi, std::string name = "sqrt");

/// k = Z[a^±1, b^±1], h = -2b^-1(a - b^-1), t = -b^-2(a^2 + h), xi = a + bX.
struct LaurentSqrtData {
  FrobeniusAlgebra algebra;
  TensorVec xi;
  TensorVec xi_squared;
  TensorVec handle;
};
LaurentSqrtData laurent_sqrt_data();
FrobeniusPair build_laurent_sqrt();

/// Exponents (e0, e1, e2, nu0, nu1, nu2) of the handle element in the
/// E = A⊗A construction.
using DoubleExponents = std::array<int, 6>;

FrobeniusPair build_double(const FrobeniusAlgebra& alg, const TensorVec& phi_inv, const DoubleExponents& exps);

struct DoubleSearchResult {
  std::vector<DoubleExponents> passing;
  std::size_t tuples_checked = 0;
  std::size_t evaluations = 0;
};

/// Exhaustive verification over [lo, hi]^6. Equation outcomes are cached on
/// the exponents of the generators each equation mentions.
DoubleSearchResult search_double_exponents(const FrobeniusAlgebra& alg, const TensorVec& phi_inv, int lo, int hi,
                                           const Theory& theory, const VerifyOptions& options = {});

/// A = Q[X]/(X^2 - 1), phi = 2X, phi^-1 = X/2.
struct DoubleTestAlgebra {
  FrobeniusAlgebra algebra;
  TensorVec phi_inv;
};
DoubleTestAlgebra double_test_algebra();

// ---------------------------------------------------------------------------
// Structure files (JSON).

std::string save_pair_string(const FrobeniusPair& pair);
FrobeniusPair load_pair_string(std::string_view text);
void save_pair(const FrobeniusPair& pair, const std::string& path);
FrobeniusPair load_pair(const std::string& path);

/// Entrywise ring specialization of every stored generator.
FrobeniusPair specialize_pair(const FrobeniusPair& pair, const Assignment& assignment, const RingPtr& target);

}  // namespace frobpair
