#include "support.hpp"

#include "frobpair/pair.hpp"

#include <map>

using namespace frobpair;
using Catch::Matchers::ContainsSubstring;

namespace {

Item gen(const std::string& name) { return Item{Item::Kind::generator, name, Sort::A, std::nullopt}; }
Item id(Sort s) { return Item{Item::Kind::identity, "", s, std::nullopt}; }
Item swap(Sort a, Sort b) { return Item{Item::Kind::swap, "", Sort::A, std::pair{a, b}}; }

/// One random layer over `word`: each step consumes a prefix of what is left.
std::vector<Item> random_layer(std::mt19937_64& g, const SortWord& word) {
  std::vector<Item> layer;
  std::size_t pos = 0;
  std::uniform_int_distribution<int> pick(0, 9);
  while (pos < word.size() || layer.empty()) {
    int r = pick(g);
    std::vector<const GeneratorSig*> fits;
    for (const auto& s : signature()) {
      if (s.name == "beta" || s.name == "gamma") continue;
      if (s.domain.size() > word.size() - pos) continue;
      if (!std::equal(s.domain.begin(), s.domain.end(), word.begin() + static_cast<long>(pos))) continue;
      // Keep words short so that maps stay small.
      if (s.codomain.size() > s.domain.size() && word.size() >= 3) continue;
      if (s.domain.empty() && (word.size() >= 2 || r > 2)) continue;
      fits.push_back(&s);
    }
    if (pos + 1 < word.size() && r == 0) {
      layer.push_back(swap(word[pos], word[pos + 1]));
      pos += 2;
    } else if (!fits.empty() && r < 6) {
      const auto* s = fits[std::uniform_int_distribution<std::size_t>(0, fits.size() - 1)(g)];
      layer.push_back(gen(s->name));
      pos += s->domain.size();
    } else if (pos < word.size()) {
      layer.push_back(id(word[pos]));
      ++pos;
    } else {
      layer.push_back(gen("eta"));
    }
  }
  return layer;
}

Term random_term(std::mt19937_64& g, const SortWord& start, int layers) {
  Term t;
  SortWord w = start;
  for (int l = 0; l < layers; ++l) {
    t.layers.push_back(random_layer(g, w));
    w = typecheck(t).codomain;
  }
  return t;
}

SortWord random_start(std::mt19937_64& g) {
  std::uniform_int_distribution<int> len(0, 2);
  std::bernoulli_distribution e(0.5);
  SortWord w(static_cast<std::size_t>(len(g)));
  for (auto& s : w) s = e(g) ? Sort::E : Sort::A;
  return w;
}

}  // namespace

TEST_CASE("signature", "[theory]") {
  CHECK(signature().size() == 17);
  const auto* nu = find_generator("nu_EE");
  REQUIRE(nu);
  CHECK(nu->domain == SortWord{Sort::E});
  CHECK(nu->codomain == SortWord{Sort::E});
  CHECK(find_generator("nu_XY") == nullptr);
}

TEST_CASE("parse_theory examples", "[theory]") {
  auto th = parse_theory("eq assoc [frobA]: (mu_A (x) id_A) ; mu_A == (id_A (x) mu_A) ; mu_A\n");
  REQUIRE(th.equations.size() == 1);
  CHECK(th.equations[0].type.domain == parse_word("AAA"));
  CHECK(th.equations[0].type.codomain == parse_word("A"));

  CHECK_THROWS_WITH(parse_theory("eq bad: mu_A == Delta_A\n"), ContainsSubstring("type error"));
  CHECK_THROWS(parse_theory("eq odd [frobA]: mu_Q == mu_A\n"));

  auto c = parse_theory("eq cancel1 [cancel]: (id_A (x) Delta_AE) ; (beta (x) id_E) == mu_AE\n");
  CHECK(c.equations[0].type.domain == parse_word("AE"));
  CHECK(c.equations[0].type.codomain == parse_word("E"));
}

TEST_CASE("typecheck examples", "[theory]") {
  auto t1 = typecheck(parse_term("nu_AE"));
  CHECK(t1.domain == parse_word("A"));
  CHECK(t1.codomain == parse_word("E"));
  auto t2 = typecheck(parse_term("eta ; Delta_AEE"));
  CHECK(t2.domain.empty());
  CHECK(t2.codomain == parse_word("EE"));
  CHECK_THROWS_WITH(typecheck(parse_term("mu_E ; eps")), ContainsSubstring("type error"));
}

TEST_CASE("shipped manifest", "[theory]") {
  const Theory& th = default_theory();
  CHECK(th.version >= 1);
  std::map<std::string, const Equation*> by_name;
  for (const auto& eq : th.equations) {
    // Parsing already typechecked both sides; do it again on copies.
    auto l = typecheck(eq.lhs), r = typecheck(eq.rhs);
    CHECK(l.domain == r.domain);
    CHECK(l.codomain == r.codomain);
    by_name[eq.name] = &eq;
  }
  CHECK(by_name.size() == th.equations.size());

  int generated = 0;
  for (const auto& eq : th.equations) {
    if (eq.provenance != Provenance::generated) continue;
    ++generated;
    auto cut = eq.name.find("_dagger");
    if (cut == std::string::npos) cut = eq.name.find("_mirror");
    REQUIRE(cut != std::string::npos);
    auto src = by_name.find(eq.name.substr(0, cut));
    REQUIRE(src != by_name.end());
    bool found = false;
    for (const auto& img : mechanical_images(*src->second))
      if (img.name == eq.name) found = (img.lhs == eq.lhs && img.rhs == eq.rhs);
    CHECK(found);
  }
  CHECK(generated == 7);

  const auto& groups = known_groups();
  for (const auto& eq : th.equations) {
    bool known = std::find(groups.begin(), groups.end(), eq.group) != groups.end() || eq.group == quarantine_group;
    CHECK(known);
  }
}

TEST_CASE("shipped manifest is the data file", "[theory]") {
  Theory file = load_theory_file(fptest::data_path("axioms.eq"));
  Theory shipped = parse_theory(embedded_axioms_text());
  CHECK(shipped.version == file.version);
  REQUIRE(file.equations.size() == shipped.equations.size());
  for (std::size_t k = 0; k < file.equations.size(); ++k) CHECK(file.equations[k].to_string() == shipped.equations[k].to_string());
}

TEST_CASE("dagger and mirror", "[theory]") {
  Term t = parse_term("(id_A (x) Delta_AE) ; (mu_A (x) id_E)");
  Term d = dagger(t);
  auto ty = typecheck(d);
  CHECK(ty.domain == parse_word("AE"));
  CHECK(ty.codomain == parse_word("AE"));
  CHECK(dagger(parse_term("nu_AE")) == parse_term("nu_EA"));
  CHECK(mirror(parse_term("mu_AE")) == parse_term("mu_EA"));
}

TEST_CASE("dagger and mirror are involutions", "[theory][property]") {
  auto g = fptest::rng(50);
  for (int k = 0; k < 500; ++k) {
    Term t = random_term(g, random_start(g), 3);
    REQUIRE(dagger(dagger(t)) == t);
    REQUIRE(mirror(mirror(t)) == t);
    auto ty = typecheck(t), dt = typecheck(dagger(t));
    REQUIRE(dt.domain == ty.codomain);
    REQUIRE(dt.codomain == ty.domain);
    auto mt = typecheck(mirror(t));
    REQUIRE(mt.domain == SortWord(ty.domain.rbegin(), ty.domain.rend()));
  }
}

TEST_CASE("evaluate_term is functorial", "[theory][property]") {
  auto aps = build_aps();
  auto g = fptest::rng(51);
  for (int k = 0; k < 200; ++k) {
    Term t1 = random_term(g, random_start(g), 2);
    Term t2 = random_term(g, typecheck(t1).codomain, 2);
    Term both = t1;
    both.layers.insert(both.layers.end(), t2.layers.begin(), t2.layers.end());
    LinMap lhs = evaluate_term(both, aps.basis(), aps.lookup());
    LinMap rhs = compose(evaluate_term(t2, aps.basis(), aps.lookup()), evaluate_term(t1, aps.basis(), aps.lookup()));
    REQUIRE(equal(lhs, rhs));
  }
}

TEST_CASE("evaluate_term examples", "[theory]") {
  auto aps = build_aps();
  LinMap f = evaluate_term(parse_term("eta ; nu_AE"), aps.basis(), aps.lookup());
  CHECK(format_vec(aps.basis(), {Sort::E}, f.column(0)) == "Y + Z");
  auto it = build_it();
  it.erase("mu_E");
  CHECK_THROWS_WITH(evaluate_term(parse_term("mu_E"), it.basis(), it.lookup()), ContainsSubstring("missing generator"));
}
