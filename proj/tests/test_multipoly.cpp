#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"

using namespace tameforge;
using namespace tameforge::testing_support;

TEST(MultiPoly, Arithmetic) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  EXPECT_EQ(P("(X+Y)*(X-Y)", f), P("X^2 - Y^2", f));
  auto g = make_frame(parse_ring("Q[a]/(a^2)"), {"X", "Y"});
  EXPECT_EQ(pow(P("X + a*Y", g), 2), P("X^2 + 2*a*X*Y", g));
  auto h = make_frame(parse_ring("Q[T]"), {"X"});
  EXPECT_EQ(P("(1+T)*X", h) + P("(-T)*X", h), P("X", h));
}

TEST(MultiPoly, PrintingIsCanonicalAndRoundTrips) {
  auto f = make_frame(parse_ring("Q[T]"), {"X1", "X2", "Z1"});
  MultiPoly p = P("3/2*X1^2*Z1 - T*X2", f);
  EXPECT_EQ(p.str(), "3/2*X1^2*Z1 - T*X2");
  auto g = make_frame(parse_ring("loc(Q[t], t)"), {"X", "Y"});
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    MultiPoly q = random_poly(rng, g, {0, 1}, 4, 5);
    q = q + P("(t^2 + 1)/t*X*Y - 1/t^3", g) * q;
    EXPECT_EQ(P(q.str(), g), q);
    EXPECT_EQ(P(q.str(), g).str(), q.str());
  }
}

TEST(MultiPoly, Substitute) {
  auto f = make_frame(parse_ring("Q[t]"), {"X", "Z"});
  EXPECT_EQ(substitute(P("X^2", f), {P("X + t*Z", f), P("Z", f)}), P("X^2 + 2*t*X*Z + t^2*Z^2", f));
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    MultiPoly p = random_poly(rng, f, {0, 1}, 4, 4), q = random_poly(rng, f, {0, 1}, 4, 4);
    std::vector<MultiPoly> im{random_poly(rng, f, {0, 1}, 2, 3), random_poly(rng, f, {0, 1}, 2, 3)};
    EXPECT_EQ(substitute(p + q, im), substitute(p, im) + substitute(q, im));
    EXPECT_EQ(substitute(p * q, im), substitute(p, im) * substitute(q, im));
    EXPECT_EQ(substitute(p, {P("X", f), P("Z", f)}), p);
  }
}

TEST(MultiPoly, NagataInvariantGolden) {
  PolyMap n = load_map("nagata.map");
  MultiPoly s = P("a*Y + X^2", n.frame());
  std::ifstream in(fixture("nagata_invariant.golden"));
  std::string golden;
  std::getline(in, golden);
  EXPECT_EQ(apply(s, n).str(), golden);
}

TEST(MultiPoly, Derivatives) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  EXPECT_EQ(partial_derivative(P("X^3*Y", f), 0), P("3*X^2*Y", f));
  EXPECT_TRUE(partial_derivative(P("X^3", f), 1).is_zero());
  auto g = make_frame(parse_ring("Q[a]/(a^2)"), {"X", "Y"});
  EXPECT_EQ(partial_derivative(P("a*X^2", g), 0), P("2*a*X", g));
  EXPECT_EQ(antiderivative(P("X^2", f), 0), P("X^3/3", f));
  EXPECT_EQ(antiderivative(P("2*a*X*Y", g), 1), P("a*X*Y^2", g));
  auto z = make_frame(parse_ring("Z"), {"X"});
  EXPECT_THROW(antiderivative(P("X", z), 0), TameError);
  std::mt19937 rng(9);
  for (int i = 0; i < 200; ++i) {
    MultiPoly p = random_poly(rng, f, {0, 1}, 5, 5), q = random_poly(rng, f, {0, 1}, 5, 5);
    EXPECT_EQ(partial_derivative(antiderivative(p, 0), 0), p);
    EXPECT_EQ(partial_derivative(p * q, 1), p * partial_derivative(q, 1) + q * partial_derivative(p, 1));
  }
}

TEST(MultiPoly, HomogeneousComponents) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  auto comps = homogeneous_components(P("X + X^2*Y", f));
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_EQ(comps.at(1), P("X", f));
  EXPECT_EQ(comps.at(3), P("X^2*Y", f));
  EXPECT_TRUE(homogeneous_components(MultiPoly(f)).empty());
  std::mt19937 rng(13);
  for (int i = 0; i < 500; ++i) {
    MultiPoly p = random_poly(rng, f, {0, 1}, 6, 6);
    MultiPoly sum(f);
    for (const auto& [d, c] : homogeneous_components(p)) {
      EXPECT_EQ(c.total_degree(), int(d));
      sum += c;
    }
    EXPECT_EQ(sum, p);
  }
}

namespace {

/// Independent oracle: expand sum_j c_j (X + a_j Y)^k term by term with binomials.
bool vandermonde_reassembles(unsigned n, unsigned m) {
  unsigned k = n + m;
  auto nodes = vandermonde_decompose(n, m);
  for (unsigned i = 0; i <= k; ++i) {
    mpq_class coeff = 0;
    for (const auto& [a, c] : nodes) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), k, i);
      mpq_class ai = 1;
      for (unsigned e = 0; e < i; ++e) ai *= a;
      coeff += c * binom * ai;
    }
    if (coeff != (i == m ? 1 : 0)) return false;
  }
  return true;
}

}  // namespace

TEST(MultiPoly, Vandermonde) {
  auto one = vandermonde_decompose(1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].first, 0);
  EXPECT_EQ(one[0].second, 1);
  // XY = -1/2 X^2 + ... : frozen solver output for (1,1): nodes 0,1,2.
  auto xy = vandermonde_decompose(1, 1);
  ASSERT_EQ(xy.size(), 3u);
  EXPECT_EQ(xy[0].second, mpq_class(-3, 4));
  EXPECT_EQ(xy[1].second, mpq_class(1));
  EXPECT_EQ(xy[2].second, mpq_class(-1, 4));
  for (unsigned k = 1; k <= 8; ++k)
    for (unsigned m = 0; m <= k; ++m) EXPECT_TRUE(vandermonde_reassembles(k - m, m)) << k - m << "," << m;
  // Polynomial-level check through MultiPoly arithmetic.
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  for (unsigned n = 0; n <= 3; ++n)
    for (unsigned m = 0; m + n <= 6 && m <= 3; ++m) {
      if (n + m == 0) continue;
      MultiPoly sum(f);
      for (const auto& [a, c] : vandermonde_decompose(n, m))
        sum += f->ring()->from_mpq(c) * pow(P("X", f) + f->ring()->from_mpq(a) * P("Y", f), n + m);
      EXPECT_EQ(sum, pow(P("X", f), n) * pow(P("Y", f), m));
    }
}
