#include <algorithm>

#include "tameforge/stable_tame.hpp"

namespace tameforge {

namespace {

/// The quotients A/(t^k), 1 <= k <= D, of a ring with nilpotent t.
struct Tower {
  RingPtr a;
  RingElem t;
  unsigned depth = 0;
  std::function<RingPtr(unsigned)> level;
};

Tower make_tower(const RingPtr& a, const RingElem& t) {
  Tower tw{a, t, 0, {}};
  auto d = nilpotency_index(t);
  if (!d) fail(ErrorCode::SpecMismatch, t.str() + " is not nilpotent in " + a->str());
  tw.depth = *d;
  if (a->kind() == RingKind::Modular) {
    mpz_class n = a->modulus(), tz = t.z();
    tw.level = [n, tz, a, d = *d](unsigned k) -> RingPtr {
      if (k >= d) return a;
      mpz_class tk, g;
      mpz_pow_ui(tk.get_mpz_t(), tz.get_mpz_t(), k);
      mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), tk.get_mpz_t());
      return Ring::modular(g);
    };
    return tw;
  }
  if (a->kind() == RingKind::Quotient) {
    const RingPtr& poly = a->base();
    RingElem g = convert(t, poly);
    const auto& gc = g.coeffs();
    if (gc.empty()) fail(ErrorCode::SpecMismatch, "t is zero");
    auto lead_inv = unit_inverse(gc.back());
    if (!lead_inv) fail(ErrorCode::SpecMismatch, "t has a non-unit leading coefficient");
    RingElem gm = poly->embed(*lead_inv) * g;
    RingElem modulus(poly, a->quotient_modulus());
    if (!(pow(gm, *d) == modulus))
      fail(ErrorCode::SpecMismatch, "modulus of " + a->str() + " is not a power of " + t.str());
    tw.level = [poly, gm, a, d = *d](unsigned k) -> RingPtr {
      if (k >= d) return a;
      return Ring::quotient(poly, pow(gm, k));
    };
    return tw;
  }
  fail(ErrorCode::SpecMismatch, "no quotient tower for " + a->str());
}

std::vector<unsigned> schedule(unsigned depth, ModnilStrategy strategy) {
  std::vector<unsigned> out;
  if (strategy == ModnilStrategy::Linear) {
    for (unsigned k = 1; k <= depth; ++k) out.push_back(k);
    return out;
  }
  for (unsigned k = depth; k > 1; k = (k + 1) / 2) out.push_back(k);
  out.push_back(1);
  std::reverse(out.begin(), out.end());
  return out;
}

/// Coordinates of rho minus the identity.
std::vector<MultiPoly> displacement(const PolyMap& rho) {
  std::vector<MultiPoly> h;
  for (std::size_t i = 0; i < rho.dim(); ++i) h.push_back(rho[i] - MultiPoly::var(rho.frame(), i));
  return h;
}

/// Moves a factorization of one component into the product ring, acting trivially on the others.
TameWord embed_component(const TameWord& w, const FramePtr& target, const RingElem& idem) {
  const RingPtr& a = target->ring();
  TameWord mapped = map_word_coefficients(w, target, [&](const RingElem& c) { return idem * convert(c, a); });
  TameWord out(target, mapped.dim());
  RingElem rest = a->one() - idem;
  for (auto g : mapped.gens()) {
    if (auto l = std::get_if<Linear>(&g)) {
      for (std::size_t r = 0; r < l->matrix.size(); ++r) {
        l->matrix[r][r] += MultiPoly::constant(target, rest);
        l->inverse[r][r] += MultiPoly::constant(target, rest);
      }
    }
    out.push(std::move(g));
  }
  return out;
}

struct Component {
  RingPtr ring;
  std::optional<RingElem> t;  ///< nilpotent generator of the maximal ideal, absent for fields
  RingElem idempotent;        ///< in the product ring
};

std::vector<std::pair<mpz_class, unsigned>> factor_integer(mpz_class n) {
  std::vector<std::pair<mpz_class, unsigned>> out;
  for (mpz_class p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Roots of a monic polynomial over Q or Z/p, with multiplicities; nullopt unless it splits.
std::optional<std::vector<std::pair<RingElem, unsigned>>> split_roots(const RingElem& m) {
  const RingPtr& poly = m.ring();
  const RingPtr& k = poly->base();
  RingElem rest = m;
  std::vector<std::pair<RingElem, unsigned>> out;
  auto value_at = [&](const RingElem& p, const RingElem& c) {
    RingElem v = k->zero();
    for (std::size_t i = p.coeffs().size(); i-- > 0;) v = v * c + p.coeffs()[i];
    return v;
  };
  auto take = [&](const RingElem& c) {
    RingElem lin = poly->variable(poly->var()) - poly->embed(c);
    unsigned e = 0;
    while (rest.coeffs().size() > 1 && value_at(rest, c).is_zero()) {
      rest = *exact_divide(rest, lin);
      ++e;
    }
    if (e) out.emplace_back(c, e);
  };
  std::vector<RingElem> candidates;
  if (k->kind() == RingKind::Modular) {
    if (k->modulus() > 100000) return std::nullopt;
    for (long c = 0; c < k->modulus().get_si(); ++c) candidates.push_back(k->from_int(c));
  } else if (k->kind() == RingKind::Rationals) {
    take(k->zero());
    if (rest.coeffs().size() > 1) {
      // Rational root test on the primitive integer multiple.
      mpz_class den = 1;
      for (const auto& c : rest.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.q().get_den_mpz_t());
      mpz_class a0 = abs(mpz_class(rest.coeffs().front().q() * den));
      mpz_class an = abs(mpz_class(rest.coeffs().back().q() * den));
      if (a0 > 1000000 || an > 1000000) return std::nullopt;
      for (mpz_class p = 1; p <= a0; ++p) {
        if (a0 % p != 0) continue;
        for (mpz_class q = 1; q <= an; ++q) {
          if (an % q != 0) continue;
          candidates.push_back(k->from_mpq(mpq_class(p, q)));
          candidates.push_back(k->from_mpq(mpq_class(-p, q)));
        }
      }
    }
  } else {
    return std::nullopt;
  }
  for (const auto& c : candidates) take(c);
  if (rest.coeffs().size() > 1) return std::nullopt;
  return out;
}

std::vector<Component> decompose(const RingPtr& a) {
  if (a->is_field()) return {{a, std::nullopt, a->one()}};
  if (a->kind() == RingKind::Modular) {
    std::vector<Component> out;
    mpz_class n = a->modulus();
    for (const auto& [p, e] : factor_integer(n)) {
      mpz_class q;
      mpz_pow_ui(q.get_mpz_t(), p.get_mpz_t(), e);
      mpz_class m = n / q, inv;
      mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), q.get_mpz_t());
      RingPtr c = Ring::modular(q);
      std::optional<RingElem> t;
      if (e > 1) t = c->from_mpz(p);
      out.push_back({c, t, a->from_mpz(m * inv)});
    }
    return out;
  }
  if (a->kind() == RingKind::Quotient && a->base()->base()->is_field()) {
    const RingPtr& poly = a->base();
    RingElem modulus(poly, a->quotient_modulus());
    auto roots = split_roots(modulus);
    if (!roots) fail(ErrorCode::NotArtinianSupported, "modulus of " + a->str() + " does not split over the base field");
    RingElem x = poly->variable(poly->var());
    std::vector<Component> out;
    for (const auto& [c, e] : *roots) {
      RingElem lin = x - poly->embed(c);
      RingElem local = pow(lin, e);
      RingPtr ring = roots->size() == 1 ? a : Ring::quotient(poly, local);
      RingElem cofactor = *exact_divide(modulus, local);
      auto inv = unit_inverse(convert(cofactor, ring));
      RingElem idem = convert(cofactor, a) * convert(*inv, a);
      std::optional<RingElem> t;
      if (e > 1) t = convert(lin, ring);
      out.push_back({ring, t, idem});
    }
    return out;
  }
  fail(ErrorCode::NotArtinianSupported, a->str() + " is not a supported Artinian ring");
}

}  // namespace

PipelineReport modnil_factor(const PolyMap& phi, const RingElem& t, const BaseFactor& base, ModnilStrategy strategy) {
  const RingPtr& a = phi.ring();
  std::size_t n = phi.dim();
  MultiPoly jac = jacobian_det(phi);
  if (jac != MultiPoly::constant(phi.frame(), 1)) fail(ErrorCode::JacobianNotOne, "Jacobian determinant is " + jac.str());
  Tower tw = make_tower(a, convert(t, a));
  std::vector<unsigned> levels = schedule(tw.depth, strategy);
  bool q_alg = a->q_algebra();

  PipelineReport rep;
  RingPtr r1 = tw.level(levels.front());
  PolyMap phi1 = base_change(phi, r1);
  TameWord w;
  try {
    w = translations_to_elementaries(base(phi1));
  } catch (const TameError& e) {
    fail(ErrorCode::BaseFactorFailed, std::string("base factorization: ") + e.what());
  }
  if (!all_elementary(w) || w.dim() < n || !same_ring(w.ring(), r1))
    fail(ErrorCode::BaseFactorFailed, "base factorization is not an elementary word over " + r1->str());
  std::size_t r = w.dim() - n;
  Verdict bv = compare_maps(stabilize_into(phi1, make_frame(r1, w.frame()->names()), r), evaluate_word(w));
  if (!bv.pass) fail(ErrorCode::BaseFactorFailed, "base factorization does not reduce the map: " + bv.message);
  rep.trace.push_back({"base", "factor over " + r1->str() + ", " + std::to_string(w.size()) + " generators", {}});

  for (std::size_t li = 1; li < levels.size(); ++li) {
    RingPtr ak = tw.level(levels[li]);
    RingPtr prev = tw.level(levels[li - 1]);
    FramePtr fk = make_frame(ak, w.frame()->names());
    TameWord lifted = map_word_coefficients(w, fk, [&](const RingElem& c) { return convert(c, ak); });
    PolyMap target = stabilize_into(base_change(phi, ak), fk, r);
    TameWord undo = inverse_word(lifted);
    std::vector<MultiPoly> c = target.coords();
    for (auto it = undo.gens().rbegin(); it != undo.gens().rend(); ++it) {
      const auto& e = std::get<Elementary>(*it);
      std::vector<MultiPoly> images = c;
      for (std::size_t j = c.size(); j < fk->size(); ++j) images.push_back(MultiPoly::var(fk, j));
      c[e.i] += substitute(e.f, images);
    }
    PolyMap rho(fk, n + r, c);
    std::vector<MultiPoly> h = displacement(rho);
    for (const auto& hi : h)
      for (const auto& [e, c] : hi.terms())
        if (!convert(c, prev).is_zero())
          fail(ErrorCode::IdentityFailed, "lifted word does not agree with the map modulo t^" +
                                              std::to_string(levels[li - 1]));
    std::string detail = "A/(t^" + std::to_string(levels[li - 1]) + ") -> A/(t^" + std::to_string(levels[li]) + ")";
    if (q_alg) {
      TameWord q = nilslice_q_factor(h, n + r);
      w = concat(lifted, q);
      rep.trace.push_back({"square-zero slice over a Q-algebra", detail, {}});
    } else {
      StabFactor st = nilslice_stab_factor(h, n + r);
      require_equal_maps(stabilize_into(rho, st.word.frame(), 1), st.target, "stabilized slice target");
      w = concat(stabilize_word_into(lifted, st.word.frame(), 1), st.word);
      ++r;
      rep.trace.push_back({"stabilized square-zero slice", detail, {}});
    }
    ++rep.layers;
  }
  rep.certificate = Certificate{phi, r, w};
  rep.added_dims = r;
  Verdict v = verify_certificate(rep.certificate);
  if (!v.pass) fail(ErrorCode::IdentityFailed, "nilpotent lifting certificate: " + v.message);
  return rep;
}

PipelineReport artinian_factor(const PolyMap& phi, ModnilStrategy strategy) {
  if (phi.dim() != 2) fail(ErrorCode::DimensionMismatch, "artinian_factor works on plane maps");
  MultiPoly jac = jacobian_det(phi);
  if (jac != MultiPoly::constant(phi.frame(), 1)) fail(ErrorCode::JacobianNotOne, "Jacobian determinant is " + jac.str());
  const RingPtr& a = phi.ring();
  std::vector<Component> comps = decompose(a);

  auto factor_local = [&](const PolyMap& m, const Component& c) {
    if (!c.t) {
      PipelineReport rep;
      TameWord w = field_base_factor(m);
      rep.certificate = Certificate{m, 0, w};
      rep.trace.push_back({"plane degree reduction", "over " + c.ring->str(), {}});
      return rep;
    }
    return modnil_factor(m, *c.t, field_base_factor, strategy);
  };
  if (comps.size() == 1) return factor_local(phi, comps.front());

  std::vector<PipelineReport> parts;
  std::size_t m = 0;
  for (const auto& c : comps) {
    parts.push_back(factor_local(base_change(phi, c.ring), c));
    m = std::max(m, parts.back().certificate.stabilize_by);
  }
  PipelineReport rep;
  FramePtr target = stabilized_frame(phi.frame(), 2, m, fresh_names(*phi.frame(), "S", m));
  TameWord w(target, 2 + m);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Certificate& c = parts[k].certificate;
    TameWord padded = stabilize_word(c.word, m - c.stabilize_by);
    w.append(embed_component(padded, target, comps[k].idempotent), "component " + comps[k].ring->str());
    rep.layers = std::max(rep.layers, parts[k].layers);
    for (const auto& e : parts[k].trace) rep.trace.push_back({e.lemma, comps[k].ring->str() + ": " + e.detail, e.n_values});
  }
  rep.trace.push_back({"idempotent recombination", std::to_string(comps.size()) + " components", {}});
  rep.certificate = Certificate{phi, m, w};
  rep.added_dims = m;
  Verdict v = verify_certificate(rep.certificate);
  if (!v.pass) fail(ErrorCode::IdentityFailed, "recombined certificate: " + v.message);
  return rep;
}

ModularFactor artinian_modular_factor(const PolyMap& phi, const RingElem& t) {
  return [phi, t](unsigned n_exp) {
    const RingPtr& r = phi.ring();
    RingPtr quot;
    if (r->kind() == RingKind::Integers) {
      mpz_class q;
      mpz_pow_ui(q.get_mpz_t(), t.z().get_mpz_t(), n_exp);
      quot = Ring::modular(abs(q));
    } else if (r->kind() == RingKind::Poly) {
      quot = Ring::quotient(r, pow(t, n_exp));
    } else {
      fail(ErrorCode::SpecMismatch, "no modular reduction for " + r->str());
    }
    PolyMap bar = base_change(phi, quot);
    PipelineReport rep = phi.dim() == 2 ? artinian_factor(bar)
                                        : modnil_factor(bar, convert(t, quot), field_base_factor);
    return rep.certificate.word;
  };
}

}  // namespace tameforge
