#pragma once

#ifdef FROBPAIR_CATCH_AMALGAMATED
#include <catch_amalgamated.hpp>
#else
#include <catch2/catch_all.hpp>
#endif

#include "frobpair/ring.hpp"

#include <random>
#include <string>

namespace fptest {

inline std::string data_path(const std::string& rel) { return std::string(FROBPAIR_TEST_DATA) + "/" + rel; }

/// Fixed seed per test so failures reproduce.
inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed0000 + salt); }

/// A few terms with small exponents; negative ones only on invertible variables.
inline frobpair::RingElem random_elem(std::mt19937_64& g, const frobpair::RingPtr& ring, int max_terms = 4) {
  using namespace frobpair;
  std::uniform_int_distribution<int> nterms(0, max_terms), coeff(-5, 5), den(1, 3);
  RingElem x(ring);
  int n = nterms(g);
  for (int k = 0; k < n; ++k) {
    Monomial m(ring->vars().size());
    for (std::size_t v = 0; v < m.size(); ++v) {
      int lo = ring->vars()[v].invertible ? -2 : 0;
      m[v] = std::uniform_int_distribution<int>(lo, 2)(g);
    }
    mpq_class c(coeff(g));
    if (ring->domain() == CoefficientDomain::rationals) c /= den(g);
    if (ring->domain() == CoefficientDomain::integers_mod_2) c = mpq_class(std::abs(coeff(g)) % 2);
    c.canonicalize();
    x += RingElem::monomial(ring, m, c);
  }
  return x;
}

}  // namespace fptest
