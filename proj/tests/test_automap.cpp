#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tameforge;
using namespace tameforge::testing_support;

namespace {

PolyMap elem_map(const FramePtr& f, std::size_t dim, std::size_t i, const MultiPoly& g) {
  return gen_to_map(make_elementary(dim, i, g), f, dim);
}

PolyMap map_of(const FramePtr& f, std::size_t dim, const std::vector<std::string>& coords) {
  std::vector<MultiPoly> c;
  for (const auto& s : coords) c.push_back(P(s, f));
  return PolyMap(f, dim, c);
}

}  // namespace

TEST(AutoMap, NagataComposesWithInverseToIdentity) {
  PolyMap n = load_map("nagata.map"), ni = load_map("nagata_inverse.map");
  EXPECT_TRUE(compose(n, ni).is_identity());
  EXPECT_TRUE(compose(ni, n).is_identity());
  EXPECT_EQ(jacobian_det(n), MultiPoly::constant(n.frame(), 1));
  EXPECT_EQ(compose(n, PolyMap::identity(n.frame(), 2)), n);
}

TEST(AutoMap, ElementaryAdditivity) {
  auto f = make_frame(parse_ring("Q[a]"), {"X1", "X2", "X3"});
  std::mt19937 rng(21);
  for (int k = 0; k < 50; ++k) {
    MultiPoly g = random_poly(rng, f, {1, 2}, 3, 3), h = random_poly(rng, f, {1, 2}, 3, 3);
    EXPECT_EQ(compose(elem_map(f, 3, 0, g), elem_map(f, 3, 0, h)), elem_map(f, 3, 0, g + h));
    EXPECT_EQ(jacobian_det(elem_map(f, 3, 0, g)), MultiPoly::constant(f, 1));
  }
  EXPECT_THROW(make_elementary(3, 0, P("X1*X2", f)), TameError);
}

TEST(AutoMap, RandomWordsBothEvaluationStrategiesAgree) {
  auto f = make_frame(parse_ring("Q[t]"), {"X1", "X2", "X3"});
  std::mt19937 rng(1234);
  for (int k = 0; k < 200; ++k) {
    TameWord w = random_word(rng, f, 3, 1 + rng() % 5, 2);
    PolyMap a = evaluate_word(w), b = evaluate_word_leftfold(w);
    ASSERT_EQ(a, b) << k;
    PolyMap inc = PolyMap::identity(f, 3);
    for (const auto& g : w.gens()) inc = compose(inc, gen_to_map(g, f, 3));
    EXPECT_EQ(inc, a);
  }
}

TEST(AutoMap, InverseWordAndGroupLaws) {
  auto f = make_frame(parse_ring("Z"), {"X", "Y", "Z"});
  TameWord empty(f, 3);
  EXPECT_TRUE(evaluate_word(empty).is_identity());
  EXPECT_TRUE(inverse_word(empty).empty());
  TameWord single(f, 3);
  single.push_elementary(0, P("Y^2 - Z", f));
  auto inv = inverse_word(single);
  ASSERT_EQ(inv.size(), 1u);
  EXPECT_EQ(std::get<Elementary>(inv.gens()[0]).f, P("-Y^2 + Z", f));

  std::mt19937 rng(77);
  for (int k = 0; k < 60; ++k) {
    TameWord a = random_word(rng, f, 3, 3, 2), b = random_word(rng, f, 3, 3, 2), c = random_word(rng, f, 3, 2, 2);
    PolyMap pa = evaluate_word(a), pb = evaluate_word(b), pc = evaluate_word(c);
    EXPECT_TRUE(compose(pa, evaluate_word(inverse_word(a))).is_identity());
    EXPECT_EQ(compose(compose(pa, pb), pc), compose(pa, compose(pb, pc)));
    EXPECT_EQ(evaluate_word(concat(a, b)), compose(pa, pb));
    // chain rule for Jacobians
    EXPECT_EQ(jacobian_det(compose(pa, pb)), apply(jacobian_det(pa), pb) * jacobian_det(pb));
  }
}

TEST(AutoMap, LinearGenerators) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  PolyMatrix a{{P("2", f), P("1", f)}, {P("1", f), P("1", f)}};
  PolyMatrix ai{{P("1", f), P("-1", f)}, {P("-1", f), P("2", f)}};
  TameWord w(f, 2);
  w.push(make_linear(2, a, ai));
  w.push(make_linear(2, ai, a));
  EXPECT_TRUE(evaluate_word(w).is_identity());
  EXPECT_EQ(gen_to_map(make_linear(2, a, ai), f, 2), map_of(f, 2, {"2*X + Y", "X + Y"}));
  EXPECT_THROW(make_linear(2, a, a), TameError);
}

TEST(AutoMap, AffineConjugationLaw) {
  auto f = make_frame(parse_ring("Q[s]"), {"X1", "X2", "X3"});
  std::mt19937 rng(8);
  for (int k = 0; k < 40; ++k) {
    // random unimodular alpha as a product of elementary matrices
    PolyMatrix a = identity_matrix(f, 3), ai = identity_matrix(f, 3);
    for (int e = 0; e < 4; ++e) {
      std::size_t r = rng() % 3, c = rng() % 3;
      if (r == c) continue;
      MultiPoly x = random_poly(rng, f, {3}, 2, 2);
      PolyMatrix m = identity_matrix(f, 3), mi = identity_matrix(f, 3);
      m[r][c] = x;
      mi[r][c] = -x;
      a = matrix_product(a, m);
      ai = matrix_product(mi, ai);
    }
    Translation t;
    for (int i = 0; i < 3; ++i) t.v.push_back(random_poly(rng, f, {3}, 2, 2));
    TameWord w(f, 3);
    w.push(make_linear(3, a, ai));
    w.push(t);
    w.push(make_linear(3, ai, a));
    Translation expected;
    for (int i = 0; i < 3; ++i) {
      MultiPoly s(f);
      for (int j = 0; j < 3; ++j) s += a[i][j] * t.v[j];
      expected.v.push_back(s);
    }
    EXPECT_EQ(evaluate_word(w), gen_to_map(expected, f, 3));
    EXPECT_EQ(evaluate_word(translations_to_elementaries(w)), evaluate_word(w));
  }
}

TEST(AutoMap, StabilizeIsHomomorphism) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  EXPECT_TRUE(stabilize(PolyMap::identity(f, 2), 3).is_identity());
  EXPECT_EQ(stabilize(PolyMap::identity(f, 2), 3).dim(), 5u);
  std::mt19937 rng(4);
  for (int k = 0; k < 40; ++k) {
    PolyMap a = evaluate_word(random_word(rng, f, 2, 3, 3)), b = evaluate_word(random_word(rng, f, 2, 3, 3));
    EXPECT_EQ(stabilize(a, 0), a);
    PolyMap sa = stabilize(a, 2);
    PolyMap sb = stabilize_into(b, sa.frame(), 2);
    EXPECT_EQ(stabilize_into(compose(a, b), sa.frame(), 2), compose(sa, sb));
  }
}

TEST(AutoMap, ScalarAction) {
  auto f = make_frame(parse_ring("Q[s][t]"), {"X", "Y"});
  RingPtr r = f->ring();
  PolyMap n = map_of(f, 2, {"X + Y^2 + X^3", "Y - 2*X*Y"});
  EXPECT_EQ(scalar_action(n, r->one()), n);
  EXPECT_EQ(scalar_action(n, r->zero()), map_of(f, 2, {"X", "Y"}));
  EXPECT_EQ(scalar_action(n, parse_elem("t", r)), map_of(f, 2, {"X + t*Y^2 + t^2*X^3", "Y - 2*t*X*Y"}));
  EXPECT_THROW(scalar_action(map_of(f, 2, {"X + 1", "Y"}), r->one()), TameError);

  std::mt19937 rng(31);
  RingElem s = parse_elem("s", r), t = parse_elem("t", r);
  for (int k = 0; k < 30; ++k) {
    TameWord wa = random_word(rng, f, 2, 3, 2, false), wb = random_word(rng, f, 2, 3, 2, false);
    // make origin preserving by composing with the translation back
    auto fix = [&](const PolyMap& m) {
      Translation tr;
      for (const auto& c : m.coords()) tr.v.push_back(-MultiPoly::constant(f, c.constant_term()));
      return compose(gen_to_map(tr, f, 2), m);
    };
    PolyMap a = fix(evaluate_word(wa)), b = fix(evaluate_word(wb));
    EXPECT_EQ(scalar_action(compose(a, b), t), compose(scalar_action(a, t), scalar_action(b, t)));
    EXPECT_EQ(scalar_action(scalar_action(a, s), t), scalar_action(a, s * t));
  }
  // unit scalar: conjugation by the homothety
  auto q = make_frame(parse_ring("Q"), {"X", "Y"});
  PolyMap m = map_of(q, 2, {"X + Y^2 + X^3", "Y - 2*X*Y + X^2*Y^2"});
  PolyMatrix h{{P("3", q), P("0", q)}, {P("0", q), P("3", q)}};
  PolyMatrix hi{{P("1/3", q), P("0", q)}, {P("0", q), P("1/3", q)}};
  PolyMap tau = gen_to_map(make_linear(2, h, hi), q, 2), taui = gen_to_map(make_linear(2, hi, h), q, 2);
  EXPECT_EQ(scalar_action(m, q->ring()->from_int(3)), compose(taui, compose(m, tau)));
}

TEST(AutoMap, BaseChange) {
  PolyMap n = load_map("nagata.map");
  RingPtr q = parse_ring("Q[a]/(a^2)");
  PolyMap nq = base_change(n, q);
  auto fq = nq.frame();
  // (X + a^2 Y + a X^2, Y - 2aXY - 2X^3 - a X^4) reduced mod a^2
  EXPECT_EQ(nq, map_of(fq, 2, {"X + a*X^2", "Y - 2*a*X*Y - 2*X^3 - a*X^4"}));
  std::mt19937 rng(12);
  auto f = make_frame(parse_ring("Z[a]"), {"X", "Y"});
  RingPtr target = parse_ring("Z/5[a]/(a^3)");
  for (int k = 0; k < 30; ++k) {
    PolyMap a = evaluate_word(random_word(rng, f, 2, 3, 2)), b = evaluate_word(random_word(rng, f, 2, 3, 2));
    EXPECT_EQ(base_change(compose(a, b), target), compose(base_change(a, target), base_change(b, target)));
  }
}

TEST(AutoMap, ZVanishing) {
  auto f = make_frame(parse_ring("Q"), {"X1", "X2", "Z"});
  EXPECT_TRUE(is_z_vanishing(PolyMap::identity(f, 2), 2));
  EXPECT_TRUE(is_z_vanishing(elem_map(f, 2, 0, P("Z*X2", f)), 2));
  EXPECT_FALSE(is_z_vanishing(elem_map(f, 2, 0, P("X2", f)), 2));
  // specializing the parameter Z to 0 of a Z-vanishing map gives the identity
  PolyMap m = elem_map(f, 2, 1, P("Z*X1^2 + Z^2", f));
  EXPECT_TRUE(substitute_params(m, {{2, MultiPoly(f)}}).is_identity());
}

TEST(AutoMap, ProductOfRingsProjections) {
  // Q x Q realized as Q[e]/(e^2 - e); projections are e -> 1 and e -> 0.
  auto f = make_frame(parse_ring("Q[e]/(e^2 - e)"), {"X", "Y"});
  std::mt19937 rng(99);
  for (int k = 0; k < 30; ++k) {
    TameWord w = random_word(rng, f, 2, 4, 2);
    PolyMap target = evaluate_word(w);
    if (k % 2) target = compose(target, elem_map(f, 2, 0, P("e*Y^2", f)));
    bool whole = evaluate_word(w) == target;
    bool both = true;
    for (int v : {0, 1}) {
      RingElem val = f->ring()->base()->from_int(v);
      both = both && specialize_map(evaluate_word(w), "e", val) == specialize_map(target, "e", val);
    }
    EXPECT_EQ(whole, both);
  }
}

TEST(AutoMap, CertificateVerdicts) {
  auto f = make_frame(parse_ring("Q"), {"X", "Y"});
  Certificate trivial{PolyMap::identity(f, 2), 0, TameWord(f, 2)};
  EXPECT_TRUE(verify_certificate(trivial).pass);

  PolyMap n = load_map("nagata.map");
  // A stabilized-dimension certificate: target n with stabilizeBy 1, word = stabilized elementary pieces.
  auto fq = make_frame(parse_ring("Q"), {"X", "Y"});
  TameWord w(fq, 2);
  w.push_elementary(0, P("Y^2", fq));
  w.push_elementary(1, P("X^3", fq));
  Certificate c{evaluate_word(w), 0, w};
  EXPECT_TRUE(verify_certificate(c).pass);
  Certificate mutated = c;
  mutated.word.mutable_gens().pop_back();
  Verdict v = verify_certificate(mutated);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.coordinate.has_value());
  EXPECT_EQ(*v.coordinate, 0u);
  EXPECT_FALSE(v.monomial.empty());

  Certificate stab{evaluate_word(w), 1, stabilize_word(w, 1)};
  EXPECT_TRUE(verify_certificate(stab).pass);
  (void)n;
}

TEST(AutoMap, CertificateJsonRoundTrip) {
  auto f = make_frame(parse_ring("Q[T]"), {"X", "Y"});
  std::mt19937 rng(2024);
  for (int k = 0; k < 20; ++k) {
    TameWord w = random_word(rng, f, 2, 5, 2);
    w.push(Translation{{P("T", f), P("-1/2", f)}});
    w.label(0, "random");
    Certificate c{evaluate_word(w), 1, stabilize_word(w, 1)};
    c.word.label(0, "stabilized");
    auto doc = certificate_to_json(c);
    std::string text = dump_json(doc);
    Certificate back = certificate_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(dump_json(certificate_to_json(back)), text);
    EXPECT_TRUE(verify_certificate(back).pass);
    EXPECT_EQ(back.target, c.target);
  }
  PolyMap n = load_map("nagata.map");
  EXPECT_EQ(map_from_json(map_to_json(n)), n);
}
