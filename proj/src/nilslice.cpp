#include "tameforge/factor_core.hpp"

namespace tameforge {

namespace {

/// Frame [X, Z] over `ring` with names avoiding the ring's tower variables.
FramePtr monomial_frame(const RingPtr& ring) {
  Frame probe(ring, {});
  std::string x = fresh_name(probe, "X");
  std::string z = fresh_name(probe, "Z", {x});
  return make_frame(ring, {x, z});
}

/// Part of p with X_i-exponent a and X_j-exponent b, with those exponents cleared.
std::map<std::pair<unsigned, unsigned>, MultiPoly> split_by_two(const MultiPoly& p, std::size_t i, std::size_t j) {
  std::map<std::pair<unsigned, unsigned>, MultiPoly> out;
  for (const auto& [e, c] : p.terms()) {
    std::pair<unsigned, unsigned> key{e[i], e[j]};
    Exponent rest = e;
    rest[i] = 0;
    rest[j] = 0;
    auto it = out.try_emplace(key, MultiPoly(p.frame())).first;
    it->second.add_term(rest, c);
  }
  return out;
}

/// X + g delta_i + h delta_j as elementaries, for g, h with dg/dX_i + dh/dX_j = 0 and square-zero coefficients.
TameWord divergence_free_pair(const FramePtr& frame, std::size_t dim, std::size_t i, std::size_t j,
                              const MultiPoly& g, const MultiPoly& h) {
  std::map<std::size_t, MultiPoly> zero_j{{j, MultiPoly(frame)}};
  MultiPoly p = antiderivative(g, j) - antiderivative(substitute_some(h, zero_j), i);
  if (partial_derivative(p, j) != g || -partial_derivative(p, i) != h)
    fail(ErrorCode::JacobianNotOne, "pair (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                        ") is not divergence free");
  TameWord w(frame, dim);
  const RingPtr& ring = frame->ring();
  MultiPoly xi = MultiPoly::var(frame, i), xj = MultiPoly::var(frame, j);
  for (const auto& [key, r] : split_by_two(p, i, j)) {
    unsigned k = key.first + key.second;
    if (k == 0) continue;  // constants do not contribute to the vector field
    for (const auto& [a, c] : vandermonde_decompose(key.first, key.second)) {
      RingElem ar = ring->from_mpq(a);
      RingElem beta_c = ring->from_mpq(-c * k);
      w.push(Elementary{i, -(ar * xj)});
      w.push(Elementary{j, beta_c * (r * pow(xi, k - 1))});
      w.push(Elementary{i, ar * xj});
    }
  }
  return w;
}

}  // namespace

bool square_zero(const std::vector<MultiPoly>& polys) {
  std::vector<RingElem> cs;
  for (const auto& p : polys)
    for (const auto& [e, c] : p.terms()) {
      bool seen = false;
      for (const auto& d : cs) seen = seen || d == c;
      if (!seen) cs.push_back(c);
    }
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a; b < cs.size(); ++b)
      if (!(cs[a] * cs[b]).is_zero()) return false;
  return true;
}

PolyMap sumcomp_merge(const std::vector<MultiPoly>& g, const std::vector<MultiPoly>& h, std::size_t dim) {
  if (g.size() != dim || h.size() != dim) fail(ErrorCode::DimensionMismatch, "sumcomp_merge");
  const FramePtr& frame = g.front().frame();
  std::vector<MultiPoly> cg, ch, cs;
  for (std::size_t i = 0; i < dim; ++i) {
    require_same_frame(frame, h[i].frame(), "sumcomp_merge");
    cg.push_back(MultiPoly::var(frame, i) + g[i]);
    ch.push_back(MultiPoly::var(frame, i) + h[i]);
    cs.push_back(MultiPoly::var(frame, i) + g[i] + h[i]);
  }
  PolyMap sum(frame, dim, cs);
  PolyMap comp = compose(PolyMap(frame, dim, cg), PolyMap(frame, dim, ch));
  Verdict v = compare_maps(sum, comp);
  if (!v.pass) fail(ErrorCode::IdealSquareNonzero, "composition differs from the sum: " + v.message);
  return sum;
}

TameWord monomial_factor_in(const FramePtr& frame, std::size_t dim, std::size_t x, std::size_t z, const MultiPoly& a,
                            unsigned m) {
  if (a.uses_var(x) || a.uses_var(z)) fail(ErrorCode::SpecMismatch, "monomial coefficient must be free of X and Z");
  if (!square_zero({a})) fail(ErrorCode::NotSquareZero, "coefficient " + a.str() + " has nonzero square");
  TameWord w(frame, dim);
  if (a.is_zero()) return w;
  MultiPoly X = MultiPoly::var(frame, x), Z = MultiPoly::var(frame, z);
  MultiPoly xm = pow(X, m);
  w.push(Elementary{x, -(a * Z)});
  w.push(Elementary{z, -xm});
  w.push(Elementary{x, a * Z});
  w.push(Elementary{z, xm});
  // Kept even when it vanishes so the word always has the five generators of the construction.
  w.mutable_gens().push_back(Elementary{z, pow(X + a * xm, m) - xm});
  return w;
}

PolyMap monomial_target(const RingElem& a, unsigned m) {
  FramePtr frame = monomial_frame(a.ring());
  MultiPoly X = MultiPoly::var(frame, 0), Z = MultiPoly::var(frame, 1);
  MultiPoly ac = MultiPoly::constant(frame, a);
  MultiPoly one = MultiPoly::constant(frame, 1);
  MultiPoly d = m == 0 ? one : one - a.ring()->from_int(m) * (ac * pow(X, m - 1));
  return PolyMap(frame, 2, {X + ac * pow(X, m), d * Z});
}

TameWord monomial_factor(const RingElem& a, unsigned m) {
  FramePtr frame = monomial_frame(a.ring());
  return monomial_factor_in(frame, 2, 0, 1, MultiPoly::constant(frame, a), m);
}

StabFactor nilslice_stab_factor(const std::vector<MultiPoly>& h, std::size_t dim, const std::string& z_name) {
  if (h.size() != dim || dim == 0) fail(ErrorCode::DimensionMismatch, "nilslice_stab_factor");
  if (!square_zero(h)) fail(ErrorCode::NotSquareZero, "coefficients of H have a nonzero product");
  const FramePtr& frame = h.front().frame();
  std::string z = z_name.empty() ? fresh_name(*frame, "Z") : z_name;
  FramePtr wf = stabilized_frame(frame, dim, 1, {z});
  std::vector<std::size_t> vm(frame->size());
  for (std::size_t j = 0; j < vm.size(); ++j) vm[j] = j < dim ? j : j + 1;

  StabFactor out{TameWord(wf, dim + 1), PolyMap()};
  std::vector<MultiPoly> hs;
  for (std::size_t i = 0; i < dim; ++i) {
    hs.push_back(remap(h[i], wf, vm));
    for (const auto& [k, c] : collect(hs.back(), i)) {
      if (k == 0) {
        out.word.push(Elementary{i, c});
      } else {
        out.word.append(monomial_factor_in(wf, dim + 1, i, dim, c, k));
      }
    }
  }
  std::vector<MultiPoly> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back(MultiPoly::var(wf, i) + hs[i]);
  MultiPoly d = jacobian_det(PolyMap(frame, dim, [&] {
    std::vector<MultiPoly> c;
    for (std::size_t i = 0; i < dim; ++i) c.push_back(MultiPoly::var(frame, i) + h[i]);
    return c;
  }()));
  MultiPoly dinv = MultiPoly::constant(wf, 2) - remap(d, wf, vm);
  coords.push_back(dinv * MultiPoly::var(wf, dim));
  out.target = PolyMap(wf, dim + 1, std::move(coords));
  require_equal_maps(out.target, evaluate_word(out.word), "stabilized square-zero factorization");
  return out;
}

TameWord nilslice_q_factor(const std::vector<MultiPoly>& h, std::size_t dim) {
  if (h.size() != dim || dim == 0) fail(ErrorCode::DimensionMismatch, "nilslice_q_factor");
  const FramePtr& frame = h.front().frame();
  if (!frame->ring()->q_algebra()) fail(ErrorCode::NotQAlgebra, frame->ring()->str() + " is not a Q-algebra");
  if (!square_zero(h)) fail(ErrorCode::NotSquareZero, "coefficients of H have a nonzero product");
  std::vector<MultiPoly> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back(MultiPoly::var(frame, i) + h[i]);
  PolyMap target(frame, dim, coords);
  MultiPoly det = jacobian_det(target);
  if (det != MultiPoly::constant(frame, 1)) fail(ErrorCode::JacobianNotOne, "Jacobian determinant is " + det.str());

  TameWord w(frame, dim);
  if (dim == 1) {
    w.push(Elementary{0, h[0]});
  } else if (dim == 2) {
    w.append(divergence_free_pair(frame, dim, 0, 1, h[0], h[1]));
  } else {
    std::size_t last = dim - 1;
    MultiPoly rest = h[last];
    for (std::size_t i = 0; i < last; ++i) {
      MultiPoly pi = antiderivative(h[i], last);
      MultiPoly dpi = partial_derivative(pi, i);
      w.append(divergence_free_pair(frame, dim, i, last, h[i], -dpi));
      rest += dpi;
    }
    if (rest.uses_var(last)) fail(ErrorCode::JacobianNotOne, "last component depends on its own coordinate");
    w.push(Elementary{last, rest});
  }
  require_equal_maps(target, evaluate_word(w), "square-zero factorization over a Q-algebra");
  return w;
}

}  // namespace tameforge
