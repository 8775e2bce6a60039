#pragma once

// Sorted free modules (sorts A and E), tensor words over them and exact
// sparse linear maps between tensor words.

#include "frobpair/ring.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frobpair {

enum class Sort : std::uint8_t { A, E };

char sort_letter(Sort s);
Sort parse_sort(char c);

using SortWord = std::vector<Sort>;

/// "AE", or "()" for the empty word (the ground ring).
std::string word_string(const SortWord& w);
SortWord parse_word(std::string_view letters);

/// Basis labels of A and E over a common ring.
class BasisSpec {
 public:
  BasisSpec(RingPtr ring, std::vector<std::string> a_labels, std::vector<std::string> e_labels);

  const RingPtr& ring() const { return ring_; }
  const std::vector<std::string>& labels(Sort s) const { return s == Sort::A ? a_ : e_; }
  std::size_t rank(Sort s) const { return labels(s).size(); }
  std::optional<std::size_t> label_index(Sort s, std::string_view label) const;

  std::size_t dimension(const SortWord& w) const;

  /// Mixed-radix encoding of basis tuples; the first factor is most
  /// significant so index order is lexicographic tuple order.
  std::vector<std::size_t> decode(const SortWord& w, std::size_t index) const;
  std::size_t encode(const SortWord& w, std::span<const std::size_t> tuple) const;
  std::string tuple_string(const SortWord& w, std::size_t index) const;
  std::vector<std::string> tuple_labels(const SortWord& w, std::size_t index) const;
  std::size_t index_of_labels(const SortWord& w, const std::vector<std::string>& labels) const;

  friend bool operator==(const BasisSpec& a, const BasisSpec& b) {
    return same_ring(a.ring_, b.ring_) && a.a_ == b.a_ && a.e_ == b.e_;
  }

 private:
  RingPtr ring_;
  std::vector<std::string> a_, e_;
};

using BasisPtr = std::shared_ptr<const BasisSpec>;

bool same_basis(const BasisPtr& a, const BasisPtr& b);

/// Sparse vector: (index, nonzero coefficient) pairs sorted by index.
using SparseVec = std::vector<std::pair<std::uint32_t, RingElem>>;

/// An element of the tensor word `word`.
struct TensorVec {
  BasisPtr basis;
  SortWord word;
  SparseVec entries;

  std::string to_string() const;
  friend bool operator==(const TensorVec& a, const TensorVec& b) {
    return same_basis(a.basis, b.basis) && a.word == b.word && a.entries == b.entries;
  }
};

/// Witness of an inequality: the first domain basis tuple whose images
/// differ, or a shape message when the maps are not comparable.
struct Witness {
  std::string input;
  std::string lhs;
  std::string rhs;
  std::string to_string() const;
};

struct EqualResult {
  bool equal = true;
  std::optional<Witness> witness;
  explicit operator bool() const { return equal; }
};

class LinMap {
 public:
  LinMap() = default;
  /// The zero map.
  LinMap(BasisPtr basis, SortWord domain, SortWord codomain);

  static LinMap identity(BasisPtr basis, const SortWord& word);
  /// Swap of factors i and i+1 (1-based).
  static LinMap transposition(BasisPtr basis, const SortWord& word, std::size_t i);
  /// Output factor k is input factor perm[k].
  static LinMap permutation(BasisPtr basis, const SortWord& word, const std::vector<std::size_t>& perm);
  /// Multiplication by a scalar on `word`.
  static LinMap scalar(BasisPtr basis, const SortWord& word, const RingElem& c);

  const BasisPtr& basis() const { return basis_; }
  const SortWord& domain() const { return domain_; }
  const SortWord& codomain() const { return codomain_; }
  std::size_t rows() const;
  std::size_t cols() const { return cols_.size(); }

  const SparseVec& column(std::size_t c) const { return cols_[c]; }
  void set_column(std::size_t c, SparseVec v);
  /// Adds `value` at (row, col).
  void add_entry(std::size_t row, std::size_t col, const RingElem& value);
  RingElem entry(std::size_t row, std::size_t col) const;
  std::size_t nonzeros() const;
  bool is_zero() const { return nonzeros() == 0; }

  LinMap operator-() const;
  LinMap& operator+=(const LinMap& o);
  friend LinMap operator+(LinMap a, const LinMap& b) { return a += b; }
  LinMap scaled(const RingElem& c) const;

  /// Applies a ring map entrywise (used for specialization).
  template <class F>
  LinMap map_coefficients(BasisPtr target, F&& f) const;

  friend bool operator==(const LinMap& a, const LinMap& b);

  /// One line per nonzero column: "(in) -> coeff*(out) + ...".
  std::string to_string() const;

 private:
  BasisPtr basis_;
  SortWord domain_, codomain_;
  std::vector<SparseVec> cols_;
};

/// g after f. Requires codomain(f) == domain(g).
LinMap compose(const LinMap& g, const LinMap& f);
/// Kronecker product on concatenated words.
LinMap tensor(const LinMap& f, const LinMap& g);
/// id_{left} (x) f (x) id_{right}.
LinMap embed(const LinMap& f, const SortWord& left, const SortWord& right);

/// The same matrix read between other words of equal dimension, possibly
/// over another basis spec with the same ring.
LinMap retyped(const LinMap& f, BasisPtr basis, const SortWord& domain, const SortWord& codomain);
/// The map k -> word sending 1 to v.
LinMap vector_map(const TensorVec& v);

EqualResult equal(const LinMap& f, const LinMap& g);
TensorVec apply(const LinMap& f, const TensorVec& v);

TensorVec basis_vector(const BasisPtr& basis, const SortWord& word,
                       const std::vector<std::string>& labels);

std::string format_vec(const BasisPtr& basis, const SortWord& word, const SparseVec& v);

// ---------------------------------------------------------------------------

template <class F>
LinMap LinMap::map_coefficients(BasisPtr target, F&& f) const {
  LinMap out(std::move(target), domain_, codomain_);
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    SparseVec col;
    for (const auto& [r, v] : cols_[c]) {
      RingElem w = f(v);
      if (!w.is_zero()) col.emplace_back(r, std::move(w));
    }
    out.cols_[c] = std::move(col);
  }
  return out;
}

}  // namespace frobpair
