#include "support.hpp"

#include "frobpair/cobordism.hpp"

#include <set>

using namespace frobpair;
using Catch::Matchers::ContainsSubstring;

namespace {

RingElem scalar(const LinMap& m) {
  REQUIRE(m.domain().empty());
  REQUIRE(m.codomain().empty());
  return m.entry(0, 0);
}

std::vector<Event> legal_events(const SortWord& w, std::size_t max_len) {
  std::vector<Event> out;
  auto legal = [](EventKind k, const SortWord& in, const SortWord& o) {
    try {
      generator_for(k, in, o);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  const std::size_t n = w.size();
  if (n < max_len)
    for (std::size_t p = 1; p <= n + 1; ++p) out.push_back({EventKind::birth, p, {}});
  for (std::size_t p = 1; p <= n; ++p) {
    if (w[p - 1] == Sort::A) out.push_back({EventKind::death, p, {}});
    for (Sort s : {Sort::A, Sort::E}) {
      if (legal(EventKind::mobius, {w[p - 1]}, {s})) out.push_back({EventKind::mobius, p, {s}});
      if (p < n && legal(EventKind::merge, {w[p - 1], w[p]}, {s})) out.push_back({EventKind::merge, p, {s}});
      for (Sort s2 : {Sort::A, Sort::E})
        if (n < max_len && legal(EventKind::split, {w[p - 1]}, {s, s2})) out.push_back({EventKind::split, p, {s, s2}});
    }
    if (p < n) out.push_back({EventKind::swap, p, {}});
  }
  return out;
}

SortWord after(const SortWord& w, const Event& e) {
  CobordismWord c{w, {e}};
  return c.output();
}

CobordismWord random_word(std::mt19937_64& g, SortWord input, int events, std::size_t max_len = 3) {
  CobordismWord c{input, {}};
  SortWord w = input;
  for (int k = 0; k < events; ++k) {
    auto opts = legal_events(w, max_len);
    const Event& e = opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(g)];
    c.events.push_back(e);
    w = after(w, e);
  }
  return c;
}

SortWord random_input(std::mt19937_64& g, std::size_t max_len) {
  std::bernoulli_distribution e(0.5);
  SortWord w(std::uniform_int_distribution<std::size_t>(0, max_len)(g));
  for (auto& s : w) s = e(g) ? Sort::E : Sort::A;
  return w;
}

// Every deletion order, reported as the set of final lengths.
void all_reductions(const std::string& w, std::set<std::size_t>& finals) {
  bool any = false;
  const std::size_t n = w.size();
  for (std::size_t i = 0; n >= 2 && i < n; ++i) {
    std::size_t j = (i + 1) % n;
    if (w[i] != w[j] || (n == 2 && i == 1)) continue;
    any = true;
    std::string rest;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i && k != j) rest += w[k];
    all_reductions(rest, finals);
  }
  if (!any) finals.insert(n);
}

std::vector<std::string> pole_words(std::size_t max_len) {
  std::vector<std::string> out{""};
  for (std::size_t len = 2; len <= max_len; len += 2)
    for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
      std::string w;
      for (std::size_t k = 0; k < len; ++k) w += (bits >> k) & 1 ? '-' : '+';
      out.push_back(w);
    }
  return out;
}

}  // namespace

TEST_CASE("parse_cobordism", "[cobordism]") {
  auto d = parse_cobordism("input A\ndeath 1\n");
  CHECK(d.output().empty());

  CHECK_NOTHROW(parse_cobordism("input E E\nmerge 1 E\n"));
  CHECK_NOTHROW(parse_cobordism("input E E\nmerge 1 A\n"));
  CHECK_THROWS_WITH(parse_cobordism("input A A\nmerge 1 E\n"), ContainsSubstring("no generator for AA→E"));
  CHECK_THROWS_WITH(parse_cobordism("input A\nmerge 1 A\n"), ContainsSubstring("out of range"));
  CHECK_THROWS_WITH(parse_cobordism("input A\nsplit 2 A A\n"), ContainsSubstring("line 2"));
  CHECK_THROWS_WITH(parse_cobordism("death 1\n"), ContainsSubstring("input"));
  CHECK_THROWS_WITH(parse_cobordism("input E\ndeath 1\n"), ContainsSubstring("only A circles"));
  CHECK_THROWS_WITH(parse_cobordism("input A\nmobius 1 A\n"), ContainsSubstring("no generator for A→A"));

  auto w = parse_cobordism("# comment\ninput A E\nswap 1\nmobius 1 A\n");
  CHECK(w.output() == parse_word("AA"));
  CHECK(parse_cobordism(w.to_string()).events == w.events);
}

TEST_CASE("closed surfaces", "[cobordism]") {
  auto U = build_universal();
  auto cyl = parse_cobordism("input A\n");
  CHECK(equal(evaluate(cyl, U), LinMap::identity(U.basis(), {Sort::A})));

  CHECK(scalar(evaluate(load_cobordism(fptest::data_path("cobordisms/sphere.cob")), U)).is_zero());
  auto torus = load_cobordism(fptest::data_path("cobordisms/torus.cob"));
  CHECK(scalar(evaluate(torus, U)) == RingElem(U.ring(), 2));
  CHECK(scalar(evaluate(torus, build_aps())) == RingElem(build_aps().ring(), 2));

  auto it = build_it();
  it.erase("mu_E");
  CHECK_THROWS(evaluate(parse_cobordism("input E E\nmerge 1 E\n"), it));
}

TEST_CASE("crosscaps", "[cobordism]") {
  // Two Mobius bands on a cylinder: nu_EA after nu_AE.
  auto aps = build_aps();
  auto w = load_cobordism(fptest::data_path("cobordisms/crosscap_pair.cob"));
  CHECK(equal(evaluate(w, aps), compose(aps.at("nu_EA"), aps.at("nu_AE"))));
}

TEST_CASE("evaluate is functorial under concatenation", "[cobordism][property]") {
  auto aps = build_aps();
  auto g = fptest::rng(60);
  for (int k = 0; k < 200; ++k) {
    auto a = random_word(g, random_input(g, 2), 3);
    auto b = random_word(g, a.output(), 3);
    auto ab = concat(a, b);
    REQUIRE(ab.events.size() == a.events.size() + b.events.size());
    REQUIRE(equal(evaluate(ab, aps), compose(evaluate(b, aps), evaluate(a, aps))));
  }
  CHECK_THROWS_WITH(concat(parse_cobordism("input A\n"), parse_cobordism("input E\n")),
                    ContainsSubstring("cannot concatenate"));
}

TEST_CASE("far commutativity", "[cobordism][property]") {
  // Two independent words on disjoint circle ranges, interleaved at random.
  for (const auto& pair : {build_aps(), build_tt()}) {
    auto g = fptest::rng(61);
    for (int k = 0; k < 100; ++k) {
      auto left = random_word(g, random_input(g, 2), 2, 2);
      auto right = random_word(g, random_input(g, 2), 2, 2);
      auto interleave = [&](std::vector<int> order) {
        CobordismWord out{left.input, {}};
        out.input.insert(out.input.end(), right.input.begin(), right.input.end());
        SortWord lw = left.input;
        std::size_t li = 0, ri = 0;
        for (int side : order) {
          if (side == 0) {
            const Event& e = left.events[li++];
            out.events.push_back(e);
            lw = after(lw, e);
          } else {
            Event e = right.events[ri++];
            e.pos += lw.size();
            out.events.push_back(e);
          }
        }
        return out;
      };
      std::vector<int> seq(left.events.size(), 0);
      seq.insert(seq.end(), right.events.size(), 1);
      LinMap ref = evaluate(interleave(seq), pair);
      REQUIRE(equal(ref, tensor(evaluate(left, pair), evaluate(right, pair))));
      for (int r = 0; r < 3; ++r) {
        std::shuffle(seq.begin(), seq.end(), g);
        REQUIRE(equal(evaluate(interleave(seq), pair), ref));
      }
    }
  }
}

TEST_CASE("diamond suite", "[cobordism]") {
  CHECK(diamond_cases().size() == 11);
  for (const auto& p : {build_aps(), build_tt(), build_laurent_sqrt()}) {
    auto rep = diamond_exchange_suite(p);
    INFO(p.name() << "\n" << rep.to_text());
    CHECK(rep.ok());
    CHECK(rep.results.size() == 132);
  }

  auto aps = diamond_exchange_suite(build_aps());
  // Case 1 labelings: an inessential A intermediate and an essential one.
  int case01 = 0;
  for (const auto& r : aps.results)
    if (r.group == "case01") {
      ++case01;
      CHECK(r.outcome == Outcome::pass);
    }
  CHECK(case01 > 1);

  auto it = diamond_exchange_suite(build_it());
  CHECK_FALSE(it.ok());
  for (const auto& r : it.results)
    if (r.outcome == Outcome::fail) CHECK(r.witness.has_value());
}

TEST_CASE("pole degree examples", "[cobordism]") {
  using enum PoleSide;
  CHECK(pole_degree({left, left}) == 0);
  CHECK(pole_degree({left, right}) == 1);
  CHECK(pole_degree({left, right, left, right}) == 2);
  CHECK(pole_degree({}) == 0);
  CHECK(pole_degree({left, right, right, left}) == 0);
  CHECK_THROWS_WITH(pole_degree({left}), "pole count must be even");

  std::vector<PoleWord> two{{left, right}, {left, left}};
  CHECK(total_degree(two) == 1);
  CHECK(is_essential(two));
  std::vector<PoleWord> empty{{}, {}};
  CHECK(total_degree(empty) == 0);
  CHECK_FALSE(is_essential(empty));

  CHECK(parse_poles("+-") == PoleWord{left, right});
  CHECK(pole_string(parse_poles("-++-")) == "-++-");
  CHECK_THROWS(parse_poles("+x"));
}

TEST_CASE("pole reduction is confluent", "[cobordism][property]") {
  for (const auto& w : pole_words(8)) {
    std::set<std::size_t> finals;
    all_reductions(w, finals);
    INFO(w);
    REQUIRE(finals.size() == 1);
    REQUIRE(*finals.begin() == 2 * pole_degree(parse_poles(w)));
  }
}

TEST_CASE("pole degree invariances", "[cobordism][property]") {
  for (const auto& w : pole_words(8)) {
    std::size_t d = pole_degree(parse_poles(w));
    for (std::size_t r = 1; r < w.size(); ++r) REQUIRE(pole_degree(parse_poles(w.substr(r) + w.substr(0, r))) == d);
    if (w.size() <= 6)
      for (std::size_t at = 0; at <= w.size(); ++at)
        for (const char* pair : {"++", "--"}) {
          std::string x = w;
          x.insert(at, pair);
          REQUIRE(pole_degree(parse_poles(x)) == d);
        }
  }
}
