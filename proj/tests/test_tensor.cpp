#include "support.hpp"

#include "frobpair/pair.hpp"

using namespace frobpair;

namespace {

BasisPtr small_basis() {
  auto R = Ring::make(CoefficientDomain::integers, {{"h", false}});
  return std::make_shared<const BasisSpec>(R, std::vector<std::string>{"1", "X"},
                                           std::vector<std::string>{"Y", "Z", "W"});
}

SortWord random_word(std::mt19937_64& g, std::size_t max_len = 2) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::bernoulli_distribution e(0.4);
  SortWord w(len(g));
  for (auto& s : w) s = e(g) ? Sort::E : Sort::A;
  return w;
}

LinMap random_map(std::mt19937_64& g, const BasisPtr& b, const SortWord& dom, const SortWord& cod) {
  LinMap f(b, dom, cod);
  std::bernoulli_distribution keep(0.35);
  for (std::size_t c = 0; c < f.cols(); ++c)
    for (std::size_t r = 0; r < f.rows(); ++r)
      if (keep(g)) f.add_entry(r, c, fptest::random_elem(g, b->ring(), 2));
  return f;
}

}  // namespace

TEST_CASE("compose and tensor examples", "[tensor]") {
  auto U = build_universal();
  LinMap s = compose(U.at("eps"), U.at("eta"));
  CHECK(s.rows() == 1);
  CHECK(s.cols() == 1);
  CHECK(s.entry(0, 0).is_zero());

  auto aps = build_aps();
  LinMap handle_vec = compose(aps.at("mu_A"), aps.at("gamma"));
  CHECK(format_vec(aps.basis(), {Sort::A}, handle_vec.column(0)) == "2*X");

  auto b = aps.basis();
  LinMap tau = LinMap::transposition(b, {Sort::A, Sort::A}, 1);
  TensorVec v = apply(tau, basis_vector(b, {Sort::A, Sort::A}, {"1", "X"}));
  CHECK(v == basis_vector(b, {Sort::A, Sort::A}, {"X", "1"}));
  CHECK_THROWS_WITH(LinMap::transposition(b, {Sort::A, Sort::A}, 2), Catch::Matchers::ContainsSubstring("out of range"));
  CHECK_THROWS_WITH(compose(aps.at("mu_A"), aps.at("mu_A")), Catch::Matchers::ContainsSubstring("cannot compose"));
  CHECK_THROWS_WITH(tensor(aps.at("mu_A"), U.at("mu_A")), Catch::Matchers::ContainsSubstring("basis mismatch"));
}

TEST_CASE("equal with witnesses", "[tensor]") {
  auto aps = build_aps();
  const LinMap& mu = aps.at("mu_A");
  CHECK(equal(mu, mu));

  LinMap id = LinMap::identity(aps.basis(), {Sort::A});
  auto r = equal(id, compose(mu, aps.at("Delta_A")));
  REQUIRE_FALSE(r);
  REQUIRE(r.witness);
  CHECK(r.witness->input == "1");
  CHECK(r.witness->lhs == "1");
  CHECK(r.witness->rhs == "2*X");

  auto s = equal(mu, aps.at("Delta_A"));
  REQUIRE_FALSE(s);
  CHECK(s.witness->input.starts_with("shape"));
}

TEST_CASE("scalars are 1x1 maps", "[tensor]") {
  auto b = small_basis();
  CHECK(b->dimension({}) == 1);
  CHECK(b->dimension({Sort::A, Sort::E}) == 6);
  CHECK(b->tuple_string({Sort::A, Sort::E}, 5) == "X⊗W");
}

TEST_CASE("interchange law", "[tensor][property]") {
  auto b = small_basis();
  auto g = fptest::rng(40);
  for (int k = 0; k < 150; ++k) {
    SortWord w0 = random_word(g), w1 = random_word(g), w2 = random_word(g);
    SortWord v0 = random_word(g), v1 = random_word(g), v2 = random_word(g);
    LinMap f = random_map(g, b, w0, w1), gg = random_map(g, b, w1, w2);
    LinMap f2 = random_map(g, b, v0, v1), g2 = random_map(g, b, v1, v2);
    REQUIRE(compose(tensor(gg, g2), tensor(f, f2)) == tensor(compose(gg, f), compose(g2, f2)));
  }
}

TEST_CASE("associativity of compose and tensor", "[tensor][property]") {
  auto b = small_basis();
  auto g = fptest::rng(41);
  for (int k = 0; k < 150; ++k) {
    SortWord w0 = random_word(g), w1 = random_word(g), w2 = random_word(g), w3 = random_word(g);
    LinMap f = random_map(g, b, w0, w1), gg = random_map(g, b, w1, w2), h = random_map(g, b, w2, w3);
    REQUIRE(compose(h, compose(gg, f)) == compose(compose(h, gg), f));
    LinMap x = random_map(g, b, random_word(g, 1), random_word(g, 1));
    LinMap y = random_map(g, b, random_word(g, 1), random_word(g, 1));
    LinMap z = random_map(g, b, random_word(g, 1), random_word(g, 1));
    REQUIRE(tensor(tensor(x, y), z) == tensor(x, tensor(y, z)));
  }
}

TEST_CASE("braid relation on three-letter words", "[tensor][property]") {
  auto b = small_basis();
  for (int bits = 0; bits < 8; ++bits) {
    SortWord w;
    for (int k = 0; k < 3; ++k) w.push_back((bits >> k) & 1 ? Sort::E : Sort::A);
    // Each transposition is typed on the word it acts on.
    auto t = [&](const SortWord& word, std::size_t i) { return LinMap::transposition(b, word, i); };
    SortWord a1 = w;
    std::swap(a1[0], a1[1]);
    SortWord a2 = a1;
    std::swap(a2[1], a2[2]);
    LinMap lhs = compose(t(a2, 1), compose(t(a1, 2), t(w, 1)));
    SortWord b1 = w;
    std::swap(b1[1], b1[2]);
    SortWord b2 = b1;
    std::swap(b2[0], b2[1]);
    LinMap rhs = compose(t(b2, 2), compose(t(b1, 1), t(w, 2)));
    REQUIRE(lhs == rhs);
    REQUIRE(compose(t(a1, 1), t(w, 1)) == LinMap::identity(b, w));
  }
}

TEST_CASE("embed agrees with tensoring identities", "[tensor][property]") {
  auto b = small_basis();
  auto g = fptest::rng(42);
  for (int k = 0; k < 50; ++k) {
    SortWord l = random_word(g, 1), r = random_word(g, 1);
    LinMap f = random_map(g, b, random_word(g), random_word(g));
    REQUIRE(embed(f, l, r) == tensor(tensor(LinMap::identity(b, l), f), LinMap::identity(b, r)));
  }
}
