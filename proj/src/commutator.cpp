#include <algorithm>

#include "tameforge/factor_core.hpp"

namespace tameforge {

namespace {

struct Extended {
  FramePtr frame;
  std::vector<std::size_t> vm;
  MultiPoly y;
};

/// Frame with one new coordinate after the first dim variables.
Extended extend_by_one(const FramePtr& frame, std::size_t dim, const std::string& y_name) {
  Extended e;
  std::string y = y_name.empty() ? fresh_name(*frame, "Y") : y_name;
  e.frame = stabilized_frame(frame, dim, 1, {y});
  e.vm.resize(frame->size());
  for (std::size_t j = 0; j < frame->size(); ++j) e.vm[j] = j < dim ? j : j + 1;
  e.y = MultiPoly::var(e.frame, dim);
  return e;
}

PolyMap conjugate_target(const PolyMap& outer, const PolyMap& inner, const PolyMap& outer_inv, const FramePtr& target) {
  return stabilize_into(compose(compose(outer, inner), outer_inv), target, 1);
}

/// p / X_j for a polynomial divisible by the variable.
MultiPoly divide_by_var(const MultiPoly& p, std::size_t j) {
  MultiPoly out(p.frame());
  for (const auto& [e, c] : p.terms()) {
    if (e[j] == 0) fail(ErrorCode::IdentityFailed, "polynomial not divisible by " + p.frame()->names()[j]);
    Exponent e2 = e;
    --e2[j];
    out.add_term(e2, c);
  }
  return out;
}

}  // namespace

Commutator first_commutator(const Linear& alpha, std::size_t i, const MultiPoly& b, const MultiPoly& f,
                            std::size_t dim, const std::string& y_name) {
  const FramePtr& w = f.frame();
  if (!params_only(b, dim)) fail(ErrorCode::SpecMismatch, "first_commutator: b must be a scalar");
  Elementary inner = make_elementary(dim, i, b * f);
  Extended ex = extend_by_one(w, dim, y_name);
  auto rm = [&](const MultiPoly& p) { return remap(p, ex.frame, ex.vm); };
  MultiPoly b1 = rm(b), f1 = rm(f);

  Commutator out{TameWord(ex.frame, dim + 1), TameWord(ex.frame, dim + 1), TameWord(ex.frame, dim + 1), PolyMap()};
  if ((b * f).is_zero()) {
    out.target = PolyMap::identity(ex.frame, dim + 1);
    return out;
  }
  for (std::size_t j = 0; j < dim; ++j) out.left.push(Elementary{j, rm(alpha.matrix[j][i]) * b1 * ex.y});
  std::vector<MultiPoly> images;
  for (std::size_t j = 0; j < ex.frame->size(); ++j) {
    if (j < dim) {
      MultiPoly im(ex.frame);
      for (std::size_t k = 0; k < dim; ++k) im += rm(alpha.inverse[j][k]) * MultiPoly::var(ex.frame, k);
      images.push_back(im);
    } else {
      images.push_back(MultiPoly::var(ex.frame, j));
    }
  }
  out.right.push(Elementary{dim, substitute(f1, images)});
  out.word.append(out.left);
  out.word.append(out.right);
  out.word.append(inverse_word(out.left));
  out.word.append(inverse_word(out.right));
  out.target = conjugate_target(gen_to_map(alpha, w, dim), gen_to_map(inner, w, dim),
                                gen_to_map(inverse_gen(alpha), w, dim), ex.frame);
  require_equal_maps(out.target, evaluate_word(out.word), "first commutator formula");
  return out;
}

Commutator second_commutator(const MultiPoly& f, std::size_t p, const MultiPoly& b, const MultiPoly& g, std::size_t q,
                             std::size_t dim, const std::string& y_name) {
  const FramePtr& w = f.frame();
  if (p == q || p >= dim || q >= dim) fail(ErrorCode::SpecMismatch, "second_commutator: positions must differ");
  if (!params_only(b, dim)) fail(ErrorCode::SpecMismatch, "second_commutator: b must be a scalar");
  Elementary outer = make_elementary(dim, p, f);
  Elementary inner = make_elementary(dim, q, b * g);
  Extended ex = extend_by_one(w, dim, y_name);
  auto rm = [&](const MultiPoly& x) { return remap(x, ex.frame, ex.vm); };
  MultiPoly f1 = rm(f), g1 = rm(g), b1 = rm(b);
  MultiPoly xp = MultiPoly::var(ex.frame, p), xq = MultiPoly::var(ex.frame, q);

  Commutator out{TameWord(ex.frame, dim + 1), TameWord(ex.frame, dim + 1), TameWord(ex.frame, dim + 1), PolyMap()};
  out.left.push(Elementary{p, f1 - substitute_some(f1, {{q, xq - b1 * ex.y}})});
  out.left.push(Elementary{q, b1 * ex.y});
  out.right.push(Elementary{dim, substitute_some(g1, {{p, xp - f1}})});
  out.word.append(out.left);
  out.word.append(out.right);
  out.word.append(inverse_word(out.left));
  out.word.append(inverse_word(out.right));
  PolyMap outer_map = gen_to_map(outer, w, dim), outer_inv = gen_to_map(inverse_gen(outer), w, dim);
  out.target = conjugate_target(outer_map, gen_to_map(inner, w, dim), outer_inv, ex.frame);

  // Chain check: the word is psi [delta, omega0] psi^-1 with psi = e_p(f), so it suffices that
  // [delta, omega0] = e_q(b g) and that left and right are the psi-conjugates of delta and omega0.
  // Composing the whole word directly swells to degree deg(f)^2 deg(g) in every intermediate step.
  Elementary delta{q, b1 * ex.y}, omega0{dim, g1};
  TameWord core(ex.frame, dim + 1);
  core.push(delta);
  core.push(omega0);
  core.push(inverse_gen(delta));
  core.push(inverse_gen(omega0));
  require_equal_maps(stabilize_into(gen_to_map(inner, w, dim), ex.frame, 1), evaluate_word(core),
                     "second commutator core");
  PolyMap psi = stabilize_into(outer_map, ex.frame, 1), psi_inv = stabilize_into(outer_inv, ex.frame, 1);
  auto conj = [&](const Elementary& e) { return compose(compose(psi, gen_to_map(e, ex.frame, dim + 1)), psi_inv); };
  require_equal_maps(conj(delta), evaluate_word(out.left), "second commutator left factor");
  require_equal_maps(conj(omega0), evaluate_word(out.right), "second commutator right factor");
  int df = std::max(1, f.total_degree()), dg = std::max(1, g.total_degree());
  if (df * df * dg <= 8)
    require_equal_maps(out.target, evaluate_word(out.word), "second commutator formula");
  return out;
}

IntegralConjugate integral_conjugate(const Linear& alpha, const Elementary& eps, unsigned m, std::size_t dim,
                                     const std::string& y_name) {
  const FramePtr& w = eps.f.frame();
  const RingPtr& rt = w->ring();
  if (rt->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "integral_conjugate works over R_t");
  unsigned om = std::max(t_order(alpha.matrix), t_order(alpha.inverse));
  if (om > m)
    fail(ErrorCode::OrderBoundViolated, "t-order of the linear map is " + std::to_string(om) + " > " + std::to_string(m));
  unsigned d = 0;
  for (const auto& [e, c] : eps.f.terms()) {
    unsigned k = 0;
    for (std::size_t j = 0; j < dim; ++j) k += e[j];
    d = std::max(d, k);
  }
  RingElem tinv = *unit_inverse(rt->embed(rt->loc_t()));
  MultiPoly scaled = pow(tinv, m * (1 + d)) * eps.f;
  if (!is_integral(scaled))
    fail(ErrorCode::OrderBoundViolated, "g is not divisible by t^" + std::to_string(m * (1 + d)));
  MultiPoly b = MultiPoly::constant(w, pow(rt->embed(rt->loc_t()), m));
  MultiPoly f = pow(tinv, m) * eps.f;
  Commutator c = first_commutator(alpha, eps.i, b, f, dim, y_name);
  IntegralConjugate out;
  out.word = delocalize_word(c.word);
  out.m = m;
  out.degree = d;
  return out;
}

TaggedWord lin_elem_conj(const TameGen& psi, const Elementary& eps, std::size_t z_index, std::size_t dim,
                         const std::string& t_name, const std::string& y_name) {
  const FramePtr& w = eps.f.frame();
  if (z_index < dim || z_index >= w->size()) fail(ErrorCode::SpecMismatch, "lin_elem_conj: Z must be a parameter");
  PolyMap emap = gen_to_map(eps, w, dim);
  if (!is_z_vanishing(emap, z_index) || !is_origin_preserving(emap))
    fail(ErrorCode::HypothesisFailed, "elementary factor must be Z-vanishing and origin preserving");
  if (!is_origin_preserving(gen_to_map(psi, w, dim)))
    fail(ErrorCode::NotOriginPreserving, "conjugating generator moves the origin");
  if (std::holds_alternative<Translation>(psi)) fail(ErrorCode::NotOriginPreserving, "translation generator");

  std::string tn = t_name.empty() ? fresh_name(*w, "T") : t_name;
  std::vector<std::string> names = w->names();
  names.push_back(tn);
  FramePtr wt = make_frame(w->ring(), names);
  std::size_t t_index = names.size() - 1;
  std::vector<std::size_t> vm(w->size());
  for (std::size_t j = 0; j < vm.size(); ++j) vm[j] = j;
  MultiPoly tv = MultiPoly::var(wt, t_index), zv = MultiPoly::var(wt, z_index);
  MultiPoly eps_tz = substitute_some(remap(eps.f, wt, vm), {{z_index, tv * zv}});
  MultiPoly f_lemma = divide_by_var(eps_tz, t_index);

  Commutator c;
  TaggedWord out;
  if (auto l = std::get_if<Linear>(&psi)) {
    Linear lt;
    for (const auto& row : l->matrix) {
      lt.matrix.emplace_back();
      for (const auto& x : row) lt.matrix.back().push_back(remap(x, wt, vm));
    }
    for (const auto& row : l->inverse) {
      lt.inverse.emplace_back();
      for (const auto& x : row) lt.inverse.back().push_back(remap(x, wt, vm));
    }
    c = first_commutator(lt, eps.i, tv, f_lemma, dim, y_name);
  } else {
    const auto& e = std::get<Elementary>(psi);
    if (e.i == eps.i) {
      Extended ex = extend_by_one(wt, dim, y_name);
      c.word = TameWord(ex.frame, dim + 1);
      c.word.push(Elementary{eps.i, remap(eps_tz, ex.frame, ex.vm)});
      Elementary outer{e.i, remap(e.f, wt, vm)};
      c.target = conjugate_target(gen_to_map(outer, wt, dim), gen_to_map(Elementary{eps.i, eps_tz}, wt, dim),
                                  gen_to_map(inverse_gen(outer), wt, dim), ex.frame);
      require_equal_maps(c.target, evaluate_word(c.word), "same-position conjugate");
    } else {
      c = second_commutator(remap(e.f, wt, vm), e.i, tv, f_lemma, eps.i, dim, y_name);
    }
  }
  out.word = c.word;
  out.target = c.target;
  out.z_index = z_index + 1;
  out.t_index = t_index + 1;
  for (const auto& g : out.word.gens()) {
    PolyMap gm = gen_to_map(g, out.word.frame(), dim + 1);
    if (is_z_vanishing(gm, out.z_index)) {
      out.tags.push_back(VanishTag::Z);
    } else if (is_z_vanishing(gm, out.t_index)) {
      out.tags.push_back(VanishTag::T);
    } else {
      fail(ErrorCode::IdentityFailed, "generator " + gen_str(g) + " vanishes at neither Z nor T");
    }
  }
  return out;
}

}  // namespace tameforge
