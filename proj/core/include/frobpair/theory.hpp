#pragma once

// String-diagram terms over the fixed generator signature, equation files,
// typechecking, formal dagger/mirror transforms and evaluation to LinMaps.

#include "frobpair/tensor.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace frobpair {

struct GeneratorSig {
  std::string name;
  SortWord domain;
  SortWord codomain;
  std::string dagger;  // upside-down partner
  std::string mirror;  // left-right partner
};

/// The seventeen generators: mu_A, eta, eps, Delta_A, beta, gamma, the
/// actions/coactions, mu_E/Delta_E, mu_EEA/Delta_AEE and the three Mobius maps.
const std::vector<GeneratorSig>& signature();
const GeneratorSig* find_generator(std::string_view name);

struct Item {
  enum class Kind { generator, identity, swap };
  Kind kind = Kind::generator;
  std::string name;          // generator name
  Sort sort = Sort::A;       // identity
  std::optional<std::pair<Sort, Sort>> swap_sorts;  // input sorts of a swap

  SortWord domain() const;
  SortWord codomain() const;
  std::string to_string() const;
  friend bool operator==(const Item&, const Item&) = default;
};

/// Layers in diagram order: layers[0] is applied first (bottom of the picture).
struct Term {
  std::vector<std::vector<Item>> layers;

  std::string to_string() const;
  /// Generator names used (identities and swaps excluded).
  std::set<std::string> generators() const;
  friend bool operator==(const Term&, const Term&) = default;
};

struct TermType {
  SortWord domain;
  SortWord codomain;
};

/// Propagates words layer by layer, resolving untyped `swap` items in place.
TermType typecheck(Term& term);
TermType typecheck(const Term& term);

Term parse_term(std::string_view text);

/// Upside-down image: reversed layers, each generator replaced by its partner.
Term dagger(const Term& t);
/// Left-right image: reversed items, actions and coactions swap sides.
Term mirror(const Term& t);

enum class Provenance { verbatim, corrected, generated };
std::string_view to_string(Provenance p);

struct Equation {
  std::string name;
  std::string group;
  Term lhs;
  Term rhs;
  Provenance provenance = Provenance::verbatim;
  std::string note;
  TermType type;

  std::set<std::string> generators() const;
  std::string to_string() const;  // one manifest line
};

/// The groups reported by the verifier, in report order.
const std::vector<std::string>& known_groups();
inline constexpr std::string_view quarantine_group = "quarantine";

struct Theory {
  int version = 0;
  std::vector<Equation> equations;
};

/// Parses `eq NAME [GROUP, PROVENANCE]: TERM == TERM  # note` lines. Both
/// sides are typechecked; ill-typed equations are rejected with both types.
Theory parse_theory(std::string_view text);
Theory load_theory_file(const std::string& path);

/// The shipped manifest: $FROBPAIR_AXIOMS if set, otherwise the copy
/// compiled into the library.
const Theory& default_theory();
std::string_view embedded_axioms_text();

/// Dagger, mirror and dagger-mirror images of an equation, dropping images
/// that coincide with the original or with each other.
std::vector<Equation> mechanical_images(const Equation& eq);

using GeneratorLookup = std::function<const LinMap*(std::string_view)>;

/// Folds tensor/compose over the layers. Throws when a generator is absent.
LinMap evaluate_term(const Term& term, const BasisPtr& basis, const GeneratorLookup& lookup);

}  // namespace frobpair
