#include "support.hpp"

#include "frobpair/cube.hpp"

#include <numeric>

using namespace frobpair;
using Catch::Matchers::ContainsSubstring;

namespace {

StateCube cube_file(const char* name) { return load_cube(fptest::data_path(std::string("cubes/") + name)); }

std::vector<std::size_t> bettis(const HomologyResult& h) {
  std::vector<std::size_t> out;
  for (const auto& d : h.degrees) out.push_back(d.betti);
  return out;
}

long euler_of_vertices(const StateCube& c, const BasisPtr& b) {
  long chi = 0;
  for (const auto& [v, w] : c.vertices) {
    long sign = std::count(v.begin(), v.end(), '1') % 2 ? -1 : 1;
    chi += sign * static_cast<long>(b->dimension(w));
  }
  return chi;
}

long euler_of_homology(const HomologyResult& h) {
  long chi = 0;
  for (const auto& d : h.degrees) chi += (d.degree % 2 ? -1 : 1) * static_cast<long>(d.betti);
  return chi;
}

IntMatrix random_matrix(std::mt19937_64& g) {
  std::uniform_int_distribution<std::size_t> dim(0, 5);
  std::uniform_int_distribution<int> val(-6, 6);
  std::size_t r = dim(g), c = dim(g);
  IntMatrix m(r, std::vector<mpz_class>(c));
  for (auto& row : m)
    for (auto& x : row) x = val(g);
  return m;
}

FrobeniusPair tt_at_one() {
  auto tt = build_tt();
  auto k = specialized_ring(tt.ring(), {"l"});
  return specialize_pair(tt, parse_assignment("l=1", k), k);
}

const char* kBadSquare = R"({
  "n": 2,
  "vertices": {"00": ["E","E","E"], "10": ["E","E","E"], "01": ["E","E","E"], "11": ["E","E","E"]},
  "edges": {
    "*0": {"kind": "mobius", "i": 1, "out": 3, "sort": "E"},
    "0*": {"kind": "mobius", "i": 2, "out": 2, "sort": "E"},
    "1*": {"kind": "mobius", "i": 1, "out": 1, "sort": "E"},
    "*1": {"kind": "mobius", "i": 1, "out": 1, "sort": "E"}
  }
})";

}  // namespace

TEST_CASE("validate_cube", "[cube]") {
  CHECK_FALSE(validate_cube(cube_file("split1.json")));
  CHECK_FALSE(validate_cube(cube_file("diamond_essential.json")));

  auto bad = parse_cube_string(R"({"n": 1, "vertices": {"0": ["A"], "1": ["A"]},
    "edges": {"*": {"kind": "merge", "i": 1, "j": 2, "out": 1, "sort": "A"}}})");
  auto err = validate_cube(bad);
  REQUIRE(err);
  CHECK_THAT(*err, ContainsSubstring("merge needs two circles"));

  auto sq = validate_cube(parse_cube_string(kBadSquare));
  REQUIRE(sq);
  CHECK_THAT(*sq, ContainsSubstring("paths disagree"));

  auto illegal = parse_cube_string(R"({"n": 1, "vertices": {"0": ["A", "A"], "1": ["E"]},
    "edges": {"*": {"kind": "merge", "i": 1, "j": 2, "out": 1, "sort": "E"}}})");
  CHECK(validate_cube(illegal));
  CHECK_THROWS(require_valid(illegal));

  CHECK_THROWS_WITH(parse_cube_string("{"), ContainsSubstring("not valid JSON"));
  auto missing = parse_cube_string(R"({"n": 1, "vertices": {"0": ["A"], "1": ["A", "A"]}, "edges": {}})");
  CHECK_THAT(*validate_cube(missing), ContainsSubstring("missing edge"));
}

TEST_CASE("cube files round trip", "[cube]") {
  for (const char* f : {"split1.json", "merge1.json", "diamond_essential.json", "chain_essential.json"}) {
    auto c = cube_file(f);
    auto back = parse_cube_string(save_cube_string(c));
    CHECK(back.n == c.n);
    CHECK(back.vertices == c.vertices);
    CHECK(back.edges == c.edges);
  }
}

TEST_CASE("differential", "[cube]") {
  auto aps = build_aps();
  auto c = cube_file("split1.json");
  auto d0 = differential(c, aps, 0);
  CHECK(d0.rows == 4);
  CHECK(d0.cols == 2);
  // Delta_A(1) = 1⊗X + X⊗1, Delta_A(X) = X⊗X.
  RingElem one(aps.ring(), 1);
  CHECK(d0.entry(1, 0) == one);
  CHECK(d0.entry(2, 0) == one);
  CHECK(d0.entry(0, 0).is_zero());
  CHECK(d0.entry(3, 1) == one);
  CHECK(d0.describe_row(aps.basis(), c, 3) == "1:X⊗X");

  auto d5 = differential(c, aps, 5);
  CHECK(d5.rows == 0);
  for (const auto& col : d5.columns) CHECK(col.empty());

  CHECK(check_d_squared(c, aps).zero);
}

TEST_CASE("square with essential intermediate circles", "[cube]") {
  auto aps = build_aps();
  auto c = cube_file("diamond_essential.json");
  // The two paths agree before signs, so the signed sum cancels.
  LinMap top = compose(edge_map(c, "1*", aps), edge_map(c, "*0", aps));
  LinMap bottom = compose(edge_map(c, "*1", aps), edge_map(c, "0*", aps));
  CHECK(equal(top, bottom));
  CHECK(check_d_squared(c, aps).zero);
}

TEST_CASE("IT partial pair breaks d^2 = 0", "[cube]") {
  auto r = check_d_squared(cube_file("chain_essential.json"), build_it());
  CHECK_FALSE(r.zero);
  CHECK_FALSE(r.witness.empty());
}

TEST_CASE("homology examples", "[cube]") {
  auto aps = build_aps();
  CHECK(bettis(homology(cube_file("merge1.json"), aps, Coefficients::integers_mod_2)) == std::vector<std::size_t>{2, 0});
  // Delta_A is injective of rank 2 into a rank-4 module.
  CHECK(bettis(homology(cube_file("split1.json"), aps, Coefficients::rationals)) == std::vector<std::size_t>{0, 2});

  StateCube point;
  point.vertices[""] = {Sort::A};
  CHECK(bettis(homology(point, aps, Coefficients::rationals)) == std::vector<std::size_t>{2});

  CHECK_THROWS_WITH(homology(cube_file("split1.json"), build_universal(), Coefficients::rationals),
                    ContainsSubstring("specialize first"));
  CHECK_THROWS_WITH(homology(cube_file("split1.json"), tt_at_one(), Coefficients::rationals),
                    ContainsSubstring("only z2"));
  CHECK(bettis(homology(cube_file("chain_essential.json"), aps, Coefficients::rationals)) ==
        std::vector<std::size_t>{6, 4, 0});
}

TEST_CASE("integer homology", "[cube]") {
  auto aps = build_aps();
  auto h = homology(cube_file("split1.json"), aps, Coefficients::integers);
  CHECK(bettis(h) == std::vector<std::size_t>{0, 2});
  CHECK(h.degrees[1].torsion.empty());

  // mu_A on APS: 1⊗1 -> 1 only, X⊗X -> 0; kernel rank 2, onto.
  auto m = homology(cube_file("merge1.json"), aps, Coefficients::integers);
  CHECK(bettis(m) == std::vector<std::size_t>{2, 0});
}

TEST_CASE("Smith normal form examples", "[cube]") {
  auto f = smith_normal_form({{2, 0}, {0, 3}});
  CHECK(f.D == IntMatrix{{1, 0}, {0, 6}});

  IntMatrix zero(2, std::vector<mpz_class>(3));
  auto z = smith_normal_form(zero);
  CHECK(z.D == zero);
  CHECK(z.U == identity_matrix(2));
  CHECK(z.V == identity_matrix(3));

  CHECK(smith_normal_form(identity_matrix(3)).D == identity_matrix(3));
  CHECK(parse_int_matrix("2 0\n0 3\n") == IntMatrix{{2, 0}, {0, 3}});
  CHECK(parse_int_matrix("[[1,2],[3,4]]") == IntMatrix{{1, 2}, {3, 4}});
  CHECK_THROWS(parse_int_matrix("1 2\n3\n"));
  CHECK(determinant({{1, 2}, {3, 4}}) == -2);
}

TEST_CASE("Smith normal form properties", "[cube][property]") {
  auto g = fptest::rng(70);
  for (int k = 0; k < 500; ++k) {
    IntMatrix m = random_matrix(g);
    auto f = smith_normal_form(m);
    REQUIRE(multiply(multiply(f.U, m), f.V) == f.D);
    if (!m.empty()) REQUIRE(abs(determinant(f.U)) == 1);
    if (!m.empty() && !m[0].empty()) REQUIRE(abs(determinant(f.V)) == 1);
    std::size_t n = std::min(m.size(), m.empty() ? 0 : m[0].size());
    for (std::size_t r = 0; r < f.D.size(); ++r)
      for (std::size_t c = 0; c < f.D[r].size(); ++c)
        if (r != c) REQUIRE(f.D[r][c] == 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      REQUIRE(f.D[i][i] >= 0);
      if (f.D[i][i] == 0) REQUIRE(f.D[i + 1][i + 1] == 0);
      else REQUIRE(f.D[i + 1][i + 1] % f.D[i][i] == 0);
    }
  }
}

TEST_CASE("random cubes", "[cube][property]") {
  auto g = fptest::rng(71);
  auto aps = build_aps();
  auto tt1 = tt_at_one();
  std::vector<FrobeniusPair> symbolic{build_tt(), build_laurent_sqrt(),
                                      build_rank2(Rank2Params::parse("a=1,cYZ=1,dYZ=1,eY=1,eZ=1,fY=1,fZ=1",
                                                                     Ring::make(CoefficientDomain::integers)))};
  int made = 0;
  for (int k = 0; k < 60; ++k) {
    RandomCubeOptions opt;
    opt.crossings = 1 + static_cast<std::size_t>(k % 3);
    opt.max_circles = 4;
    auto c = random_cube(g, opt);
    if (!c) continue;
    ++made;
    INFO(save_cube_string(*c));
    REQUIRE_FALSE(validate_cube(*c));
    REQUIRE(check_d_squared(*c, aps).zero);
    for (const auto& p : symbolic) REQUIRE(check_d_squared(*c, p).zero);

    auto hq = homology(*c, aps, Coefficients::rationals);
    REQUIRE(euler_of_homology(hq) == euler_of_vertices(*c, aps.basis()));
    auto h2 = homology(*c, aps, Coefficients::integers_mod_2);
    REQUIRE(euler_of_homology(h2) == euler_of_vertices(*c, aps.basis()));
    REQUIRE(euler_of_homology(homology(*c, tt1, Coefficients::integers_mod_2)) == euler_of_vertices(*c, tt1.basis()));

    // Sign conventions give isomorphic complexes.
    REQUIRE(bettis(homology(*c, aps, Coefficients::rationals, SignRule::ones_after)) == bettis(hq));

    // Universal coefficients: Z/2 betti = rank + even torsion in this and the previous degree.
    auto hz = homology(*c, aps, Coefficients::integers);
    REQUIRE(bettis(hz) == bettis(hq));
    std::size_t prev_even = 0;
    for (std::size_t i = 0; i < hz.degrees.size(); ++i) {
      std::size_t even = 0;
      for (const auto& t : hz.degrees[i].torsion) even += t % 2 == 0;
      REQUIRE(h2.degrees[i].betti == hz.degrees[i].betti + even + prev_even);
      prev_even = even;
    }
  }
  CHECK(made >= 40);
}
