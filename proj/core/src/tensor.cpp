#include "frobpair/tensor.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace frobpair {

char sort_letter(Sort s) { return s == Sort::A ? 'A' : 'E'; }

Sort parse_sort(char c) {
  if (c == 'A') return Sort::A;
  if (c == 'E') return Sort::E;
  throw Error(fmt::format("unknown sort '{}'", c));
}

std::string word_string(const SortWord& w) {
  if (w.empty()) return "()";
  std::string out;
  for (Sort s : w) out += sort_letter(s);
  return out;
}

SortWord parse_word(std::string_view letters) {
  SortWord w;
  if (letters == "()") return w;
  for (char c : letters) w.push_back(parse_sort(c));
  return w;
}

// ---------------------------------------------------------------------------

BasisSpec::BasisSpec(RingPtr ring, std::vector<std::string> a_labels, std::vector<std::string> e_labels)
    : ring_(std::move(ring)), a_(std::move(a_labels)), e_(std::move(e_labels)) {
  for (Sort s : {Sort::A, Sort::E}) {
    const auto& ls = labels(s);
    if (ls.empty()) throw Error(fmt::format("basis of {} is empty", sort_letter(s)));
    for (std::size_t i = 0; i < ls.size(); ++i)
      for (std::size_t j = i + 1; j < ls.size(); ++j)
        if (ls[i] == ls[j]) throw Error(fmt::format("duplicate basis label '{}' in {}", ls[i], sort_letter(s)));
  }
}

std::optional<std::size_t> BasisSpec::label_index(Sort s, std::string_view label) const {
  const auto& ls = labels(s);
  for (std::size_t i = 0; i < ls.size(); ++i)
    if (ls[i] == label) return i;
  return std::nullopt;
}

std::size_t BasisSpec::dimension(const SortWord& w) const {
  std::size_t d = 1;
  for (Sort s : w) d *= rank(s);
  return d;
}

std::vector<std::size_t> BasisSpec::decode(const SortWord& w, std::size_t index) const {
  std::vector<std::size_t> t(w.size());
  for (std::size_t k = w.size(); k-- > 0;) {
    t[k] = index % rank(w[k]);
    index /= rank(w[k]);
  }
  return t;
}

std::size_t BasisSpec::encode(const SortWord& w, std::span<const std::size_t> tuple) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < w.size(); ++k) idx = idx * rank(w[k]) + tuple[k];
  return idx;
}

std::vector<std::string> BasisSpec::tuple_labels(const SortWord& w, std::size_t index) const {
  auto t = decode(w, index);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < w.size(); ++k) out.push_back(labels(w[k])[t[k]]);
  return out;
}

std::string BasisSpec::tuple_string(const SortWord& w, std::size_t index) const {
  if (w.empty()) return "1";
  auto ls = tuple_labels(w, index);
  std::string out;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    if (k) out += "⊗";
    out += ls[k];
  }
  return out;
}

std::size_t BasisSpec::index_of_labels(const SortWord& w, const std::vector<std::string>& labels) const {
  if (labels.size() != w.size())
    throw Error(fmt::format("basis tuple of length {} does not fit word {}", labels.size(), word_string(w)));
  std::vector<std::size_t> t(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    auto i = label_index(w[k], labels[k]);
    if (!i) throw Error(fmt::format("unknown {} basis label '{}'", sort_letter(w[k]), labels[k]));
    t[k] = *i;
  }
  return encode(w, t);
}

bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------

namespace {

void accumulate(std::map<std::uint32_t, RingElem>& acc, std::uint32_t row, const RingElem& v) {
  auto [it, inserted] = acc.try_emplace(row, v);
  if (!inserted) {
    it->second += v;
    if (it->second.is_zero()) acc.erase(it);
  }
}

SparseVec flatten(std::map<std::uint32_t, RingElem>& acc) {
  SparseVec out;
  out.reserve(acc.size());
  for (auto& [r, v] : acc)
    if (!v.is_zero()) out.emplace_back(r, std::move(v));
  return out;
}

}  // namespace

std::string format_vec(const BasisPtr& basis, const SortWord& word, const SparseVec& v) {
  if (v.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [r, c] : v) {
    std::string coeff = c.to_string();
    bool simple = c.term_count() == 1;
    if (!first) out += " + ";
    first = false;
    std::string tuple = basis->tuple_string(word, r);
    if (coeff == "1")
      out += tuple;
    else if (simple)
      out += coeff + "*" + tuple;
    else
      out += "(" + coeff + ")*" + tuple;
  }
  return out;
}

std::string TensorVec::to_string() const { return format_vec(basis, word, entries); }

std::string Witness::to_string() const {
  if (lhs.empty() && rhs.empty()) return input;
  return fmt::format("input {}: lhs = {}, rhs = {}", input, lhs, rhs);
}

LinMap::LinMap(BasisPtr basis, SortWord domain, SortWord codomain)
    : basis_(std::move(basis)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
  cols_.resize(basis_->dimension(domain_));
}

std::size_t LinMap::rows() const { return basis_->dimension(codomain_); }

LinMap LinMap::identity(BasisPtr basis, const SortWord& word) {
  LinMap m(basis, word, word);
  RingElem one(basis->ring(), 1);
  for (std::size_t i = 0; i < m.cols_.size(); ++i) m.cols_[i] = {{static_cast<std::uint32_t>(i), one}};
  return m;
}

LinMap LinMap::scalar(BasisPtr basis, const SortWord& word, const RingElem& c) {
  LinMap m(basis, word, word);
  if (c.is_zero()) return m;
  for (std::size_t i = 0; i < m.cols_.size(); ++i) m.cols_[i] = {{static_cast<std::uint32_t>(i), c}};
  return m;
}

LinMap LinMap::permutation(BasisPtr basis, const SortWord& word, const std::vector<std::size_t>& perm) {
  if (perm.size() != word.size()) throw Error("permutation length does not match word");
  SortWord out_word(word.size());
  std::vector<bool> used(word.size(), false);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] >= word.size() || used[perm[k]]) throw Error("not a permutation");
    used[perm[k]] = true;
    out_word[k] = word[perm[k]];
  }
  LinMap m(basis, word, out_word);
  RingElem one(basis->ring(), 1);
  std::vector<std::size_t> out_t(word.size());
  for (std::size_t i = 0; i < m.cols_.size(); ++i) {
    auto t = basis->decode(word, i);
    for (std::size_t k = 0; k < perm.size(); ++k) out_t[k] = t[perm[k]];
    m.cols_[i] = {{static_cast<std::uint32_t>(basis->encode(out_word, out_t)), one}};
  }
  return m;
}

LinMap LinMap::transposition(BasisPtr basis, const SortWord& word, std::size_t i) {
  if (i < 1 || i >= word.size())
    throw Error(fmt::format("transposition index {} out of range for word {}", i, word_string(word)));
  std::vector<std::size_t> perm(word.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
  std::swap(perm[i - 1], perm[i]);
  return permutation(std::move(basis), word, perm);
}

void LinMap::set_column(std::size_t c, SparseVec v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::erase_if(v, [](const auto& e) { return e.second.is_zero(); });
  cols_.at(c) = std::move(v);
}

void LinMap::add_entry(std::size_t row, std::size_t col, const RingElem& value) {
  if (row >= rows() || col >= cols()) throw Error("entry out of range");
  if (value.is_zero()) return;
  auto& v = cols_[col];
  auto it = std::lower_bound(v.begin(), v.end(), row, [](const auto& e, std::size_t r) { return e.first < r; });
  if (it != v.end() && it->first == row) {
    it->second += value;
    if (it->second.is_zero()) v.erase(it);
  } else {
    v.insert(it, {static_cast<std::uint32_t>(row), value});
  }
}

RingElem LinMap::entry(std::size_t row, std::size_t col) const {
  const auto& v = cols_.at(col);
  auto it = std::lower_bound(v.begin(), v.end(), row, [](const auto& e, std::size_t r) { return e.first < r; });
  if (it != v.end() && it->first == row) return it->second;
  return RingElem(basis_->ring());
}

std::size_t LinMap::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

LinMap LinMap::operator-() const {
  LinMap out = *this;
  for (auto& c : out.cols_)
    for (auto& [r, v] : c) v = -v;
  return out;
}

LinMap& LinMap::operator+=(const LinMap& o) {
  if (!same_basis(basis_, o.basis_) || domain_ != o.domain_ || codomain_ != o.codomain_)
    throw Error("cannot add maps of different shape");
  for (std::size_t c = 0; c < cols_.size(); ++c)
    for (const auto& [r, v] : o.cols_[c]) add_entry(r, c, v);
  return *this;
}

LinMap LinMap::scaled(const RingElem& c) const {
  return map_coefficients(basis_, [&](const RingElem& v) { return c * v; });
}

bool operator==(const LinMap& a, const LinMap& b) {
  return same_basis(a.basis_, b.basis_) && a.domain_ == b.domain_ && a.codomain_ == b.codomain_ &&
         a.cols_ == b.cols_;
}

std::string LinMap::to_string() const {
  std::string out = fmt::format("{} -> {}\n", word_string(domain_), word_string(codomain_));
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (cols_[c].empty()) continue;
    out += fmt::format("  {} -> {}\n", basis_->tuple_string(domain_, c), format_vec(basis_, codomain_, cols_[c]));
  }
  return out;
}

LinMap compose(const LinMap& g, const LinMap& f) {
  if (!same_basis(f.basis(), g.basis())) throw Error("basis mismatch in compose");
  if (f.codomain() != g.domain())
    throw Error(fmt::format("cannot compose: codomain {} does not match domain {}", word_string(f.codomain()),
                            word_string(g.domain())));
  LinMap out(f.basis(), f.domain(), g.codomain());
  std::map<std::uint32_t, RingElem> acc;
  for (std::size_t c = 0; c < f.cols(); ++c) {
    acc.clear();
    for (const auto& [mid, fv] : f.column(c))
      for (const auto& [r, gv] : g.column(mid)) accumulate(acc, r, fv * gv);
    out.set_column(c, flatten(acc));
  }
  return out;
}

LinMap tensor(const LinMap& f, const LinMap& g) {
  if (!same_basis(f.basis(), g.basis())) throw Error("basis mismatch in tensor");
  SortWord dom = f.domain(), cod = f.codomain();
  dom.insert(dom.end(), g.domain().begin(), g.domain().end());
  cod.insert(cod.end(), g.codomain().begin(), g.codomain().end());
  LinMap out(f.basis(), dom, cod);
  const std::size_t grows = g.rows();
  for (std::size_t i = 0; i < f.cols(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      SparseVec col;
      for (const auto& [fr, fv] : f.column(i))
        for (const auto& [gr, gv] : g.column(j)) {
          RingElem v = fv * gv;
          if (!v.is_zero()) col.emplace_back(static_cast<std::uint32_t>(fr * grows + gr), std::move(v));
        }
      out.set_column(i * g.cols() + j, std::move(col));
    }
  return out;
}

LinMap embed(const LinMap& f, const SortWord& left, const SortWord& right) {
  LinMap out = f;
  if (!left.empty()) out = tensor(LinMap::identity(f.basis(), left), out);
  if (!right.empty()) out = tensor(out, LinMap::identity(f.basis(), right));
  return out;
}

LinMap retyped(const LinMap& f, BasisPtr basis, const SortWord& domain, const SortWord& codomain) {
  if (!same_ring(basis->ring(), f.basis()->ring())) throw Error("ring mismatch in retyped");
  if (basis->dimension(domain) != f.cols() || basis->dimension(codomain) != f.rows())
    throw Error(fmt::format("cannot read a {} -> {} map as {} -> {}", word_string(f.domain()),
                            word_string(f.codomain()), word_string(domain), word_string(codomain)));
  LinMap out(std::move(basis), domain, codomain);
  for (std::size_t c = 0; c < f.cols(); ++c) out.set_column(c, f.column(c));
  return out;
}

LinMap vector_map(const TensorVec& v) {
  LinMap out(v.basis, {}, v.word);
  out.set_column(0, v.entries);
  return out;
}

EqualResult equal(const LinMap& f, const LinMap& g) {
  EqualResult res;
  if (!same_basis(f.basis(), g.basis()) || f.domain() != g.domain() || f.codomain() != g.codomain()) {
    res.equal = false;
    res.witness = Witness{fmt::format("shape {} -> {} vs {} -> {}", word_string(f.domain()), word_string(f.codomain()),
                                      word_string(g.domain()), word_string(g.codomain())),
                          "", ""};
    return res;
  }
  for (std::size_t c = 0; c < f.cols(); ++c) {
    if (f.column(c) == g.column(c)) continue;
    res.equal = false;
    res.witness = Witness{f.basis()->tuple_string(f.domain(), c), format_vec(f.basis(), f.codomain(), f.column(c)),
                          format_vec(g.basis(), g.codomain(), g.column(c))};
    return res;
  }
  return res;
}

TensorVec apply(const LinMap& f, const TensorVec& v) {
  if (!same_basis(f.basis(), v.basis) || v.word != f.domain())
    throw Error(fmt::format("cannot apply map on {} to a vector of {}", word_string(f.domain()), word_string(v.word)));
  std::map<std::uint32_t, RingElem> acc;
  for (const auto& [c, x] : v.entries) {
    if (c >= f.cols()) throw Error("vector index out of range");
    for (const auto& [r, fv] : f.column(c)) accumulate(acc, r, x * fv);
  }
  return TensorVec{f.basis(), f.codomain(), flatten(acc)};
}

TensorVec basis_vector(const BasisPtr& basis, const SortWord& word, const std::vector<std::string>& labels) {
  std::size_t idx = basis->index_of_labels(word, labels);
  return TensorVec{basis, word, {{static_cast<std::uint32_t>(idx), RingElem(basis->ring(), 1)}}};
}

}  // namespace frobpair
