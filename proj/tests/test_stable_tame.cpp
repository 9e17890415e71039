#include <gtest/gtest.h>

#include <chrono>

#include "tameforge/stable_tame.hpp"
#include "test_support.hpp"

using namespace tameforge;
using namespace tameforge::testing_support;

namespace {

PolyMap map_of(const FramePtr& f, std::size_t dim, const std::vector<std::string>& coords) {
  std::vector<MultiPoly> c;
  for (const auto& s : coords) c.push_back(P(s, f));
  return PolyMap(f, dim, c);
}

TameWord word_of(const FramePtr& f, std::size_t dim, const std::vector<std::pair<std::size_t, std::string>>& gens) {
  TameWord w(f, dim);
  for (const auto& [i, s] : gens) w.push_elementary(i, P(s, f));
  return w;
}

Linear diag2(const FramePtr& f, const std::string& a, const std::string& ainv) {
  PolyMatrix m = identity_matrix(f, 2), inv = identity_matrix(f, 2);
  m[1][1] = P(a, f);
  inv[1][1] = P(ainv, f);
  return Linear{m, inv};
}

/// Random plane word over Q whose composed degree stays at most max_degree.
TameWord random_plane_word(std::mt19937& rng, const FramePtr& f, unsigned max_degree) {
  TameWord w(f, 2);
  unsigned budget = max_degree, steps = 2 + rng() % 5;
  std::size_t last = rng() % 2;
  for (unsigned k = 0; k < steps; ++k) {
    if (rng() % 3 == 0) {
      PolyMatrix m = identity_matrix(f, 2), inv = identity_matrix(f, 2);
      int c = int(rng() % 5) - 2;
      m[0][1] = MultiPoly::constant(f, c);
      inv[0][1] = MultiPoly::constant(f, -c);
      w.push(Linear{m, inv});
      continue;
    }
    unsigned d = 1 + rng() % std::max(1u, budget);
    if (d > budget) d = budget;
    if (d == 0) break;
    budget /= d;
    last = 1 - last;
    MultiPoly p = random_poly(rng, f, {1 - last}, d, 3);
    p += MultiPoly::constant(f, 1) * pow(MultiPoly::var(f, 1 - last), d);
    w.push_elementary(last, p);
    if (budget <= 1) break;
  }
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Degree reduction in the plane

TEST(Jvdk, TriangularMapIsOneElementary) {
  auto f = make_frame(Ring::rationals(), {"X", "Y"});
  TameWord w = jvdk_factor(map_of(f, 2, {"X + Y^3", "Y"}));
  ASSERT_GE(w.size(), 1u);
  EXPECT_EQ(evaluate_word(w), map_of(f, 2, {"X + Y^3", "Y"}));
  std::size_t nontrivial = 0;
  for (const auto& g : w.gens()) nontrivial += is_identity_gen(g) ? 0 : 1;
  EXPECT_EQ(nontrivial, 1u);
}

TEST(Jvdk, ScrambledTwoStepMap) {
  auto f = make_frame(Ring::rationals(), {"X", "Y"});
  PolyMap inner = map_of(f, 2, {"X + Y^2", "Y + (X + Y^2)^3"});
  PolyMap lin = map_of(f, 2, {"X + 2*Y", "X + 3*Y"});
  PolyMap phi = compose(lin, inner);
  TameWord w = jvdk_factor(phi);
  EXPECT_EQ(evaluate_word(w), phi);
}

TEST(Jvdk, RoundTripRandomWords) {
  std::mt19937 rng(20261016);
  auto f = make_frame(Ring::rationals(), {"X", "Y"});
  for (int k = 0; k < 100; ++k) {
    PolyMap phi = evaluate_word(random_plane_word(rng, f, 10));
    TameWord w = jvdk_factor(phi);
    ASSERT_EQ(evaluate_word(w), phi) << phi.str();
  }
}

TEST(Jvdk, FiniteFieldAndRejections) {
  auto f = make_frame(parse_ring("Z/5"), {"X", "Y"});
  PolyMap phi = map_of(f, 2, {"X + 2*Y^4", "Y + 3*(X + 2*Y^4)^2"});
  EXPECT_EQ(evaluate_word(jvdk_factor(phi)), phi);

  auto q = make_frame(Ring::rationals(), {"X", "Y"});
  try {
    jvdk_factor(map_of(q, 2, {"X^2", "Y"}));
    FAIL() << "expected NotAnAutomorphism";
  } catch (const TameError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnAutomorphism);
  }
  EXPECT_THROW(jvdk_factor(map_of(q, 2, {"X + Y^2", "Y + X^2"})), TameError);
}

// ---------------------------------------------------------------------------------------------
// Lifting through nilpotents

TEST(Modnil, NagataOverSquareZeroAndCubeZero) {
  for (const char* ring : {"Q[a]/(a^2)", "Q[a]/(a^3)"}) {
    auto start = std::chrono::steady_clock::now();
    PolyMap nag = base_change(load_map("nagata.map"), parse_ring(ring));
    PipelineReport rep = artinian_factor(nag);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(rep.added_dims, 0u) << ring;
    EXPECT_EQ(rep.status, PipelineStatus::Complete);
    EXPECT_TRUE(all_elementary(rep.certificate.word));
    EXPECT_TRUE(verify_certificate(rep.certificate).pass) << ring;
    EXPECT_LT(secs, 5.0) << ring;
  }
}

TEST(Modnil, IdentityGivesEmptyWord) {
  RingPtr a = parse_ring("Q[a]/(a^3)");
  auto f = make_frame(a, {"X", "Y"});
  PolyMap id = map_of(f, 2, {"X", "Y"});
  PipelineReport rep = modnil_factor(id, parse_elem("a", a), field_base_factor);
  EXPECT_TRUE(evaluate_word(rep.certificate.word).is_identity());
  EXPECT_EQ(rep.added_dims, 0u);
  EXPECT_TRUE(verify_report(rep).pass);
}

TEST(Modnil, IntegersModFourUseOneExtraDimension) {
  RingPtr z4 = parse_ring("Z/4");
  auto f = make_frame(z4, {"X", "Y"});
  PolyMap phi = map_of(f, 2, {"X + 2*X^2", "Y"});
  PipelineReport rep = modnil_factor(phi, z4->from_int(2), field_base_factor);
  EXPECT_LE(rep.added_dims, 1u);
  EXPECT_TRUE(verify_certificate(rep.certificate).pass);
}

TEST(Modnil, LayerCountsLinearAndHalving) {
  RingPtr a = parse_ring("Z/3[T]/(T^8)");
  auto f = make_frame(a, {"X", "Y"});
  PolyMap phi = evaluate_word(word_of(f, 2, {{0, "T*Y^2"}, {1, "T*X^2"}}));
  RingElem t = parse_elem("T", a);
  PipelineReport lin = modnil_factor(phi, t, field_base_factor, ModnilStrategy::Linear);
  PipelineReport half = modnil_factor(phi, t, field_base_factor, ModnilStrategy::Halving);
  EXPECT_EQ(lin.layers, 7u);
  EXPECT_EQ(half.layers, 3u);
  EXPECT_EQ(lin.added_dims, 7u);
  EXPECT_EQ(half.added_dims, 3u);
  EXPECT_TRUE(verify_certificate(lin.certificate).pass);
  EXPECT_TRUE(verify_certificate(half.certificate).pass);
}

TEST(Modnil, RejectsJacobianOtherThanOne) {
  RingPtr a = parse_ring("Q[a]/(a^2)");
  auto f = make_frame(a, {"X", "Y"});
  try {
    modnil_factor(map_of(f, 2, {"2*X", "Y"}), parse_elem("a", a), field_base_factor);
    FAIL() << "expected JacobianNotOne";
  } catch (const TameError& e) {
    EXPECT_EQ(e.code(), ErrorCode::JacobianNotOne);
  }
}

TEST(Artinian, ProductsOfFields) {
  for (const char* ring : {"Z/6", "Q[T]/(T^2 - T)", "Z/15"}) {
    RingPtr a = parse_ring(ring);
    auto f = make_frame(a, {"X", "Y"});
    PolyMap phi = evaluate_word(word_of(f, 2, {{0, "Y^2"}, {1, "X^3 + X"}, {0, "2*Y"}}));
    PipelineReport rep = artinian_factor(phi);
    EXPECT_TRUE(verify_certificate(rep.certificate).pass) << ring;
    EXPECT_TRUE(all_elementary(rep.certificate.word)) << ring;
  }
}

TEST(Artinian, CubeZeroQAlgebraNeedsNoDimensions) {
  RingPtr a = parse_ring("Q[T]/(T^3)");
  auto f = make_frame(a, {"X", "Y"});
  PolyMap phi = map_of(f, 2, {"X + T*(T*Y + X^2)", "Y - 2*X*(T*Y + X^2) - T*(T*Y + X^2)^2"});
  PipelineReport rep = artinian_factor(phi);
  EXPECT_EQ(rep.added_dims, 0u);
  EXPECT_TRUE(verify_certificate(rep.certificate).pass);
}

TEST(Artinian, FieldDelegatesToDegreeReduction) {
  auto f = make_frame(Ring::rationals(), {"X", "Y"});
  PolyMap phi = map_of(f, 2, {"X + Y^3", "Y"});
  PipelineReport rep = artinian_factor(phi);
  EXPECT_EQ(rep.added_dims, 0u);
  EXPECT_TRUE(verify_certificate(rep.certificate).pass);
}

// ---------------------------------------------------------------------------------------------
// Localization sweep

namespace {

struct NagataSetup {
  PolyMap phi;
  RingElem t;
  TameWord word_rt;
  TameWord stable_word;  ///< elementary word over R for phi stabilized by one coordinate
};

NagataSetup nagata_setup() {
  NagataSetup s{load_map("nagata_T.map"), RingElem(), load_word("nagata_rt.word"), load_word("nagata_stable.word")};
  s.t = parse_elem("T", s.phi.ring());
  return s;
}

}  // namespace

TEST(Locmod, NagataReachesIntegralResidual) {
  NagataSetup s = nagata_setup();
  ASSERT_EQ(evaluate_word(s.stable_word), stabilize(s.phi, 1, {"S"}));
  ASSERT_EQ(evaluate_word(s.word_rt), localize_map(s.phi, s.word_rt.ring()));
  RingPtr r = s.phi.ring();
  ModularFactor mod = [&](unsigned n) { return base_change_word(s.stable_word, Ring::quotient(r, pow(s.t, n))); };
  PipelineReport rep = locmod_sweep(s.phi, s.t, s.word_rt, mod);
  EXPECT_EQ(rep.status, PipelineStatus::Reduced);
  ASSERT_TRUE(rep.reduction.has_value());
  for (const auto& q : rep.reduction->tau) EXPECT_TRUE(q.frame()->ring() == r);
  EXPECT_TRUE(verify_report(rep).pass);
  bool raised = false;
  for (const auto& e : rep.trace) raised = raised || e.lemma == "raise N";
  EXPECT_TRUE(raised);
  EXPECT_EQ(rep.added_dims, 5u);
}

TEST(Locmod, NagataTypeMapWithinThreeDimensions) {
  // e_2(-X^2/T) e_1(T^6 Y) e_2(X^2/T) is the identity modulo T^3, so the modular word is empty.
  RingPtr r = parse_ring("Q[T]");
  RingElem t = parse_elem("T", r);
  RingPtr rt = Ring::localization(r, t);
  auto f = make_frame(rt, {"X", "Y"});
  TameWord w(f, 2);
  w.push(diag2(f, "1/T", "T"));
  w.push_elementary(1, P("-X^2", f));
  w.push_elementary(0, P("T^5*Y", f));
  w.push_elementary(1, P("X^2", f));
  w.push(diag2(f, "T", "1/T"));
  auto fr = make_frame(r, {"X", "Y"});
  PolyMap phi(fr, 2, {delocalize_poly(evaluate_word(w)[0], fr), delocalize_poly(evaluate_word(w)[1], fr)});
  PipelineReport rep = locmod_sweep(phi, t, w, artinian_modular_factor(phi, t));
  EXPECT_LE(rep.added_dims, 3u);
  EXPECT_TRUE(verify_report(rep).pass);
  if (rep.reduction)
    for (const auto& q : rep.reduction->tau) EXPECT_TRUE(is_integral(localize_poly(q, make_frame(rt, q.frame()->names()))));
}

TEST(Locmod, IntegralWordCompletes) {
  RingPtr r = parse_ring("Q[T]");
  RingElem t = parse_elem("T", r);
  RingPtr rt = Ring::localization(r, t);
  auto fr = make_frame(r, {"X", "Y"});
  PolyMap phi = evaluate_word(word_of(fr, 2, {{0, "T*Y^2"}, {1, "X"}}));
  TameWord w = localize_word(word_of(fr, 2, {{0, "T*Y^2"}, {1, "X"}}), rt);
  PipelineReport rep = locmod_sweep(phi, t, w, artinian_modular_factor(phi, t));
  EXPECT_EQ(rep.status, PipelineStatus::Complete);
  EXPECT_TRUE(verify_certificate(rep.certificate).pass);
}

TEST(Locmod, IdentityCompletes) {
  RingPtr r = parse_ring("Q[T]");
  RingElem t = parse_elem("T", r);
  RingPtr rt = Ring::localization(r, t);
  auto fr = make_frame(r, {"X", "Y"});
  PolyMap id = map_of(fr, 2, {"X", "Y"});
  PipelineReport rep = locmod_sweep(id, t, TameWord(make_frame(rt, {"X", "Y"}), 2), artinian_modular_factor(id, t));
  EXPECT_EQ(rep.status, PipelineStatus::Complete);
  EXPECT_TRUE(verify_certificate(rep.certificate).pass);
}

TEST(Locmod, WrongModularWordIsRejected) {
  NagataSetup s = nagata_setup();
  RingPtr r = s.phi.ring();
  ModularFactor bad = [&](unsigned n) {
    RingPtr q = Ring::quotient(r, pow(s.t, n));
    return word_of(make_frame(q, {"X", "Y"}), 2, {{1, "X^3"}});
  };
  try {
    locmod_sweep(s.phi, s.t, s.word_rt, bad);
    FAIL() << "expected LiftMismatch";
  } catch (const TameError& e) {
    EXPECT_EQ(e.code(), ErrorCode::LiftMismatch);
  }
}

// ---------------------------------------------------------------------------------------------
// Localization lemmas

namespace {

FramePtr local_frame() {
  RingPtr r = parse_ring("Q[t]");
  RingPtr rt = Ring::localization(r, parse_elem("t", r));
  return make_frame(rt, {"X1", "X2", "Z"});
}

}  // namespace

TEST(ZSplit, Examples) {
  auto f = make_frame(parse_ring("Q[t]"), {"X1", "X2", "W", "Z"});
  ZSplit a = z_split(Elementary{0, P("W^2 + X2", f)}, 3, 2);
  EXPECT_TRUE(a.eps.f.is_zero());
  ZSplit b = z_split(Elementary{0, P("W + Z*X2", f)}, 3, 2);
  EXPECT_EQ(b.sigma.f, P("W", f));
  EXPECT_EQ(b.eps.f, P("Z*X2", f));
  std::mt19937 rng(7);
  for (int k = 0; k < 20; ++k) {
    Elementary rho{1, random_poly(rng, f, {0, 2, 3}, 4, 5)};
    ZSplit s = z_split(rho, 3, 2);
    EXPECT_EQ(compose(gen_to_map(s.sigma, f, 2), gen_to_map(s.eps, f, 2)), gen_to_map(rho, f, 2));
    EXPECT_TRUE(is_z_vanishing(gen_to_map(s.eps, f, 2), 3));
  }
}

TEST(ConjFact, TelescopedProducts) {
  FramePtr f = local_frame();
  Elementary e1{0, P("Z*X2^2", f)}, e2{1, P("Z^2*X1/t", f)}, e3{0, P("t*Z*X2", f)};
  TameWord id(f, 2);
  auto one = conjfact_telescope({id}, {e1});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(evaluate_word(one[0]), gen_to_map(e1, f, 2));

  std::mt19937 rng(11);
  TameWord t1 = random_word(rng, f, 2, 3, 2, false);
  auto two = conjfact_telescope({t1, inverse_word(t1)}, {e1, e2});
  EXPECT_EQ(two.size(), 2u);

  TameWord a = word_of(f, 2, {{0, "X2^2/t"}}), b = word_of(f, 2, {{1, "t*X1"}});
  TameWord c = inverse_word(concat(a, b));
  auto three = conjfact_telescope({a, b, c}, {e1, e2, e3});
  EXPECT_EQ(three.size(), 3u);

  try {
    conjfact_telescope({a, b}, {e1, e2});
    FAIL() << "expected ProductNotIdentity";
  } catch (const TameError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProductNotIdentity);
  }
}

TEST(FinalLift, EmptyTau) {
  FramePtr f = local_frame();
  FinalLift fl = final_lift(TameWord(f, 2), Elementary{0, P("Z*X2^2", f)}, 2);
  EXPECT_EQ(fl.n_exp, 0u);
  EXPECT_EQ(fl.added, 0u);
  EXPECT_EQ(fl.word.size(), 1u);
}

TEST(FinalLift, LinearConjugateNeedsOneDimension) {
  FramePtr f = local_frame();
  TameWord tau(f, 2);
  tau.push(diag2(f, "t", "1/t"));
  FinalLift fl = final_lift(tau, Elementary{0, P("Z*X2", f)}, 2);
  EXPECT_EQ(fl.added, 1u);
  EXPECT_EQ(fl.n_exp, 1u);
  EXPECT_TRUE(is_integral(localize_word(fl.word, f->ring())));
}

TEST(FinalLift, MixedDepthTwo) {
  FramePtr f = local_frame();
  TameWord tau(f, 2);
  tau.push(diag2(f, "t", "1/t"));
  tau.push_elementary(1, P("X1^2/t", f));
  FinalLift fl = final_lift(tau, Elementary{0, P("Z*X2", f)}, 2);
  EXPECT_EQ(fl.added, 2u);
  // Setting Z = 0 gives the identity.
  std::size_t z = 2 + fl.added;
  EXPECT_EQ(fl.word.frame()->names()[z], "Z");
  TameWord at_zero = substitute_params_word(fl.word, {{z, MultiPoly(fl.word.frame())}});
  EXPECT_TRUE(evaluate_word(at_zero).is_identity());
}

TEST(FinalLift, DepthCap) {
  FramePtr f = local_frame();
  TameWord tau = word_of(f, 2, {{0, "X2/t"}, {1, "X1"}, {0, "X2"}, {1, "t*X1"}});
  try {
    final_lift(tau, Elementary{0, P("Z*X2", f)}, 2);
    FAIL() << "expected DepthCapExceeded";
  } catch (const TameError& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthCapExceeded);
  }
}
