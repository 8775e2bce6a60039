#pragma once

// State cubes: vertices labeled by circle words, edges by merge, split or
// Mobius moves. Signed differentials, d^2 = 0 checks and homology over Q, Z
// and Z/2.

#include "frobpair/pair.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace frobpair {

enum class EdgeKind { merge, split, mobius };

/// Positions are 1-based. Untouched circles keep their relative order.
struct EdgeMove {
  EdgeKind kind = EdgeKind::merge;
  std::size_t i = 1;                  // consumed circle (first one for merge)
  std::size_t j = 2;                  // second consumed circle (merge)
  std::vector<std::size_t> outs{1};   // produced positions (two for split)
  SortWord sorts{Sort::A};            // produced sorts, parallel to outs

  friend bool operator==(const EdgeMove&, const EdgeMove&) = default;
};

struct StateCube {
  std::size_t n = 0;
  std::map<std::string, SortWord> vertices;  // "010" -> word
  std::map<std::string, EdgeMove> edges;     // "0*0" -> move; '*' is the flipped bit
};

StateCube parse_cube_string(std::string_view text);
StateCube load_cube(const std::string& path);
std::string save_cube_string(const StateCube& cube);

/// First violated invariant, or nullopt when the cube is valid.
std::optional<std::string> validate_cube(const StateCube& cube);
/// Throws Error with the validate_cube message.
void require_valid(const StateCube& cube);

/// Vertex bit strings of a given weight, in lexicographic order.
std::vector<std::string> vertices_of_degree(const StateCube& cube, std::size_t degree);

/// The unsigned map of one edge between its vertex words.
LinMap edge_map(const StateCube& cube, const std::string& edge, const FrobeniusPair& pair);

enum class SignRule { ones_before, ones_after };

/// Sparse block matrix between direct sums of vertex spaces.
struct BlockMap {
  std::vector<std::string> sources, targets;
  std::vector<std::size_t> source_offset, target_offset;
  std::size_t rows = 0, cols = 0;
  std::vector<SparseVec> columns;

  RingElem entry(std::size_t row, std::size_t col) const;
  /// "vertex:tuple" for a global row or column index.
  std::string describe_row(const BasisPtr& basis, const StateCube& cube, std::size_t row) const;
  std::string describe_col(const BasisPtr& basis, const StateCube& cube, std::size_t col) const;
};

/// d_i: C_i -> C_{i+1}; each edge from a weight-i vertex enters with sign
/// (-1)^{number of 1-bits before the flipped index} (or after, on request).
BlockMap differential(const StateCube& cube, const FrobeniusPair& pair, std::size_t i,
                      SignRule rule = SignRule::ones_before);

struct DSquaredResult {
  bool zero = true;
  std::size_t degree = 0;  // first i with d_{i+1} d_i != 0
  std::string witness;
};
DSquaredResult check_d_squared(const StateCube& cube, const FrobeniusPair& pair,
                               SignRule rule = SignRule::ones_before);

// ---------------------------------------------------------------------------
// Integer and field linear algebra

using IntMatrix = std::vector<std::vector<mpz_class>>;

struct SmithForm {
  IntMatrix D, U, V;  // U * M * V = D
};
/// Diagonal with d_1 | d_2 | ...; U and V unimodular.
SmithForm smith_normal_form(const IntMatrix& m);

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
IntMatrix identity_matrix(std::size_t n);
/// Bareiss determinant of a square matrix.
mpz_class determinant(const IntMatrix& m);
IntMatrix parse_int_matrix(std::string_view text);
std::string format_int_matrix(const IntMatrix& m);

/// Rank over Q, or over Z/2 when mod2 is set (entries reduced first).
std::size_t rank_of(const std::vector<std::vector<mpq_class>>& m, bool mod2);

enum class Coefficients { rationals, integers, integers_mod_2 };
Coefficients parse_coefficients(std::string_view s);  // q | z | z2
std::string_view to_string(Coefficients c);

struct DegreeHomology {
  std::size_t degree = 0;
  std::size_t betti = 0;
  std::vector<mpz_class> torsion;  // invariant factors > 1, integers only
};

struct HomologyResult {
  Coefficients coefficients = Coefficients::rationals;
  std::string sign_rule;
  std::vector<DegreeHomology> degrees;
  std::string to_text() const;
};

/// Requires every generator entry the cube uses to be a constant;
/// otherwise "specialize first".
HomologyResult homology(const StateCube& cube, const FrobeniusPair& pair, Coefficients coefficients,
                        SignRule rule = SignRule::ones_before);

// ---------------------------------------------------------------------------
// Random cubes

/// Circles with band chords attached; a vertex surgers the bands whose bit is
/// set. Sorts are then chosen so that every edge is a legal move.
struct RandomCubeOptions {
  std::size_t crossings = 2;
  std::size_t max_circles = 3;  // at every vertex
  double twist_probability = 0.25;
  std::size_t max_attempts = 200;
};
std::optional<StateCube> random_cube(std::mt19937_64& rng, const RandomCubeOptions& options = {});

}  // namespace frobpair
