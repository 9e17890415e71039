#include <algorithm>
#include <optional>

#include "tameforge/stable_tame.hpp"

namespace tameforge {

namespace {

struct Pair {
  Linear alpha;
  Elementary eps;
};

/// Groups a word over R_t as alpha_1 eps_1 ... alpha_r eps_r (identity alphas inserted, linears merged).
std::vector<Pair> pair_up(const TameWord& w) {
  const FramePtr& f = w.frame();
  std::size_t n = w.dim();
  TameWord e = translations_to_elementaries(w);
  Linear acc{identity_matrix(f, n), identity_matrix(f, n)};
  std::vector<Pair> out;
  for (const auto& g : e.gens()) {
    if (auto l = std::get_if<Linear>(&g)) {
      acc = Linear{matrix_product(acc.matrix, l->matrix), matrix_product(l->inverse, acc.inverse)};
    } else {
      out.push_back({acc, std::get<Elementary>(g)});
      acc = Linear{identity_matrix(f, n), identity_matrix(f, n)};
    }
  }
  if (!is_identity_matrix(acc.matrix)) out.push_back({acc, Elementary{0, MultiPoly(f)}});
  return out;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = k;
  return v;
}

PolyMap compose3(const PolyMap& a, const PolyMap& b, const PolyMap& c) { return compose(compose(a, b), c); }

/// (X, Z, Y) -> (X, g(X) Z, Y) as elementaries, by row operations with unit pivots in R; nullopt when
/// some column has no unit pivot.
std::optional<TameWord> eliminate_over_rx(const PolyMatrix& g, const FramePtr& big, std::size_t n, std::size_t nb) {
  PolyMatrix a = g;
  auto unit = [](const MultiPoly& x) { return x.is_constant() && is_unit(x.constant_term()); };
  struct RowOp {
    std::size_t target, source;
    MultiPoly lambda;
  };
  std::vector<RowOp> ops;
  auto apply_op = [&](const RowOp& op) {
    for (std::size_t c = 0; c < n; ++c) a[op.target][c] += op.lambda * a[op.source][c];
    ops.push_back(op);
  };
  for (std::size_t c = 0; c < n; ++c) {
    if (!unit(a[c][c])) {
      std::size_t k = c + 1;
      while (k < n && !unit(a[k][c])) ++k;
      if (k == n) return std::nullopt;
      RingElem uinv = *unit_inverse(a[k][c].constant_term());
      apply_op({c, k, uinv * (MultiPoly::constant(big, 1) - a[c][c])});
    }
    RingElem inv = *unit_inverse(a[c][c].constant_term());
    for (std::size_t row = 0; row < n; ++row) {
      if (row == c || a[row][c].is_zero()) continue;
      apply_op({row, c, -(inv * a[row][c])});
    }
  }
  TameWord w(big, nb);
  for (const auto& op : ops) w.push(Elementary{n + op.target, -op.lambda * MultiPoly::var(big, n + op.source)});
  RingElem acc = big->ring()->one();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    acc = acc * a[k][k].constant_term();
    w.append(whitehead_diagonal(big, nb, n + k, n + k + 1, acc));
  }
  acc = acc * a[n - 1][n - 1].constant_term();
  if (!acc.is_one()) {
    PolyMatrix d = identity_matrix(big, nb), dinv = identity_matrix(big, nb);
    d[2 * n - 1][2 * n - 1] = MultiPoly::constant(big, acc);
    dinv[2 * n - 1][2 * n - 1] = MultiPoly::constant(big, *unit_inverse(acc));
    w.push(Linear{d, dinv});
  }
  std::vector<MultiPoly> coords;
  for (std::size_t j = 0; j < nb; ++j) coords.push_back(MultiPoly::var(big, j));
  for (std::size_t i = 0; i < n; ++i) {
    coords[n + i] = MultiPoly(big);
    for (std::size_t j = 0; j < n; ++j) coords[n + i] += g[i][j] * MultiPoly::var(big, n + j);
  }
  require_equal_maps(PolyMap(big, nb, coords), evaluate_word(w), "elimination over R[X]");
  return w;
}

/// One pass of the sweep at a fixed N; throws NInsufficientError when a shortening step needs more.
PipelineReport sweep_at(const PolyMap& phi, const RingElem& t, const TameWord& word_rt, const ModularFactor& modular,
                        unsigned n_exp) {
  const RingPtr& r = phi.ring();
  RingPtr rt = word_rt.ring();
  std::size_t n0 = phi.dim();
  PipelineReport rep;

  TameWord bar = translations_to_elementaries(modular(n_exp));
  if (!all_elementary(bar) || bar.dim() < n0)
    fail(ErrorCode::LiftMismatch, "modular factorization is not an elementary word");
  std::size_t n = bar.dim(), p = n - n0;
  FramePtr fr = make_frame(r, bar.frame()->names());
  PolyMap phis = stabilize_into(phi, fr, p);
  Verdict vb = compare_maps(base_change(phis, bar.ring()), evaluate_word(bar));
  if (!vb.pass) fail(ErrorCode::LiftMismatch, "modular word does not reduce the map: " + vb.message);
  TameWord rho = base_change_word(inverse_word(bar), r);
  PolyMap phi1 = compose(phis, evaluate_word(rho));
  RingElem s = pow(t, n_exp);
  for (std::size_t i = 0; i < n; ++i)
    if (!try_divide_scalar(phi1[i] - MultiPoly::var(fr, i), s))
      fail(ErrorCode::LiftMismatch, "map times the lifted inverse is not the identity modulo t^" + std::to_string(n_exp));
  rep.trace.push_back({"lift inverse modulo t^N", std::to_string(rho.size()) + " elementaries", {n_exp}});

  PsiConjugation pc = psi_conjugation_words(phi1, s);
  if (!pc.left_over_r) fail(ErrorCode::IdentityFailed, "conjugating words are not integral");
  rep.trace.push_back({"Psi conjugation", "phi^[n] = sigma^-1 Psi(phi) sigma omega^-1", {n_exp}});
  SweepLeft sw = sweep_left(rho, t, n_exp);
  rep.trace.push_back({"sweep left", "Psi(rho) = tau rho~", {n_exp}});

  FramePtr frame_t = make_frame(rt, fr->names());
  std::vector<Pair> pairs = pair_up(stabilize_word_into(word_rt, frame_t, p));
  FramePtr dt = psi_frame(frame_t, n);
  SweepResidue res{sw.tau, Linear{identity_matrix(dt, n), identity_matrix(dt, n)}, {}};
  std::vector<TameWord> zetas(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    ShortenStep st = shorten_step(pairs[k].alpha, pairs[k].eps, res, n_exp, frame_t, n);
    zetas[k] = st.zeta;
    res = SweepResidue{st.tau_tilde, st.gamma_tilde, {}};
    rep.trace.push_back({"shorten", "factor " + std::to_string(k + 1) + " of " + std::to_string(pairs.size()),
                         {n_exp, st.n_required}});
  }

  // tau_1 gamma_1 must be integral.
  FramePtr dr = psi_frame(fr, n);
  RingElem tinv = *unit_inverse(pow(convert(t, rt), n_exp));
  std::vector<MultiPoly> q;
  for (const auto& pj : res.tau.p) {
    MultiPoly qj = tinv * localize_poly(pj, dt);
    if (!is_integral(qj)) fail(ErrorCode::IdentityFailed, "tau_1 has a pole: " + qj.str());
    q.push_back(delocalize_poly(qj, dr));
  }
  PolyMatrix g(n), ginv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const MultiPoly& a = res.gamma.matrix[i][j];
      const MultiPoly& b = res.gamma.inverse[i][j];
      if (!is_integral(a) || !is_integral(b)) fail(ErrorCode::IdentityFailed, "gamma_1 is not integral");
      g[i].push_back(delocalize_poly(a, dr));
      ginv[i].push_back(delocalize_poly(b, dr));
    }
  rep.trace.push_back({"residual", "tau_1 and gamma_1 integral over R[X]", {n_exp}});

  // Common frame [X, Z, Y, params] over R.
  std::string y = fresh_name(*dt, "Y");
  std::vector<std::string> names(fr->names().begin(), fr->names().begin() + static_cast<long>(n));
  for (std::size_t j = 0; j < n; ++j) names.push_back(dr->names()[j]);
  names.push_back(y);
  names.insert(names.end(), fr->names().begin() + static_cast<long>(n), fr->names().end());
  FramePtr big = make_frame(r, names);
  std::size_t nb = 2 * n + 1, np = fr->size() - n;
  std::vector<std::size_t> from_psi(dr->size()), from_zeta(dr->size() + 1), from_x(fr->size()), from_pc(2 * n + np);
  for (std::size_t j = 0; j < n; ++j) {
    from_psi[j] = n + j;
    from_psi[n + j] = j;
    from_zeta[j] = n + j;
    from_zeta[n + 1 + j] = j;
    from_x[j] = j;
    from_pc[j] = j;
    from_pc[n + j] = n + j;
  }
  from_zeta[n] = 2 * n;
  for (std::size_t k = 0; k < np; ++k) {
    from_psi[2 * n + k] = nb + k;
    from_zeta[2 * n + 1 + k] = nb + k;
    from_x[n + k] = nb + k;
    from_pc[2 * n + k] = nb + k;
  }
  TameWord left = move_word(*pc.left_over_r, big, nb, from_pc);
  TameWord right(big, nb);
  for (std::size_t k = 0; k < zetas.size(); ++k)
    right.append(move_word(zetas[k], big, nb, from_zeta), "conjugated tail " + std::to_string(k + 1));
  right.append(move_word(sw.rho_tilde, big, nb, from_psi), "swept lift");
  right.append(move_word(*pc.right_over_r, big, nb, from_pc), "conjugation");
  right.append(move_word(inverse_word(rho), big, nb, from_x), "inverse lift");

  std::vector<MultiPoly> coords;
  for (std::size_t j = 0; j < n; ++j) coords.push_back(MultiPoly::var(big, j));
  PolyMatrix gb(n), gbinv(n);
  std::vector<MultiPoly> qb;
  for (std::size_t i = 0; i < n; ++i) {
    qb.push_back(remap(q[i], big, from_psi));
    MultiPoly zi = qb.back();
    for (std::size_t j = 0; j < n; ++j) {
      gb[i].push_back(remap(g[i][j], big, from_psi));
      gbinv[i].push_back(remap(ginv[i][j], big, from_psi));
      zi += gb[i][j] * MultiPoly::var(big, n + j);
    }
    coords.push_back(zi);
  }
  coords.push_back(MultiPoly::var(big, 2 * n));
  PolyMap residual(big, nb, coords);

  std::size_t stab = p + n + 1;
  PolyMap target = stabilize_into(phi, big, stab);
  require_equal_maps(target, compose3(evaluate_word(left), residual, evaluate_word(right)),
                     "phi^[n+1] = sigma^-1 (tau_1 gamma_1) zeta rho~ sigma omega^-1 rho^-1");
  rep.trace.push_back({"assembled identity", "verified by composition", {n_exp}});
  rep.added_dims = stab;
  rep.layers = pairs.size();

  // Dispose of gamma_1 when it is the identity, a constant matrix over a field or local ring, or
  // reducible over R[X] by row operations with unit pivots.
  std::optional<TameWord> middle;
  bool x_free = true;
  for (const auto& row : gb)
    for (const auto& e : row) x_free = x_free && e.is_constant();
  if (is_identity_matrix(g)) {
    middle = TameWord(big, nb);
  } else if (x_free && (r->is_field() || r->is_local())) {
    PolyMatrix full = identity_matrix(big, nb), full_inv = identity_matrix(big, nb);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        full[n + i][n + j] = gb[i][j];
        full_inv[n + i][n + j] = gbinv[i][j];
      }
    middle = gauss_factor(Linear{full, full_inv}, nb);
  } else {
    middle = eliminate_over_rx(gb, big, n, nb);
  }
  if (middle) {
    TameWord w = left;
    TameWord tr(big, nb);
    for (std::size_t i = 0; i < n; ++i) tr.push(Elementary{n + i, qb[i]});
    w.append(tr, "residual translation");
    w.append(*middle, "residual linear part");
    w.append(right);
    rep.status = PipelineStatus::Complete;
    rep.certificate = Certificate{phi, stab, w};
    Verdict v = verify_certificate(rep.certificate);
    if (!v.pass) fail(ErrorCode::IdentityFailed, "completed sweep certificate: " + v.message);
    return rep;
  }
  rep.status = PipelineStatus::Reduced;
  rep.certificate = Certificate{phi, stab, TameWord(big, nb)};
  rep.reduction = SweepReduction{big, qb, Linear{gb, gbinv}, residual, left, right};
  return rep;
}

}  // namespace

Verdict verify_report(const PipelineReport& report) {
  if (report.status == PipelineStatus::Complete) return verify_certificate(report.certificate);
  Verdict v;
  if (!report.reduction) {
    v.message = "reduced report without a residual";
    return v;
  }
  const SweepReduction& red = *report.reduction;
  const Certificate& c = report.certificate;
  if (red.frame->size() != c.target.frame()->size() + c.stabilize_by) {
    v.message = "residual frame does not match target dimension plus stabilization";
    return v;
  }
  PolyMap expected = stabilize_into(c.target, red.frame, c.stabilize_by);
  return compare_maps(expected, compose3(evaluate_word(red.left), red.residual, evaluate_word(red.right)));
}

PipelineReport locmod_sweep(const PolyMap& phi, const RingElem& t, const TameWord& word_rt,
                            const ModularFactor& modular, const LocmodOptions& options) {
  const RingPtr& r = phi.ring();
  if (!r->is_domain()) fail(ErrorCode::NotADomain, r->str() + " is not a domain");
  RingPtr rt = Ring::localization(r, convert(t, r));
  TameWord wt = localize_word(word_rt, rt);
  if (wt.dim() != phi.dim()) fail(ErrorCode::DimensionMismatch, "R_t word dimension");
  Verdict vw = compare_maps(localize_map(phi, rt), evaluate_word(wt));
  if (!vw.pass) fail(ErrorCode::LiftMismatch, "R_t word does not evaluate to the map: " + vw.message);

  unsigned n_exp = std::max(1u, options.initial_n);
  std::vector<TraceEntry> attempts;
  for (unsigned round = 0; round < options.max_rounds; ++round) {
    try {
      PipelineReport rep = sweep_at(phi, t, wt, modular, n_exp);
      attempts.insert(attempts.end(), rep.trace.begin(), rep.trace.end());
      rep.trace = std::move(attempts);
      return rep;
    } catch (const NInsufficientError& e) {
      attempts.push_back({"raise N", e.what(), {n_exp, e.required()}});
      n_exp = std::max(e.required(), n_exp + 1);
    }
  }
  throw NInsufficientError(n_exp, "no accepted N within " + std::to_string(options.max_rounds) + " rounds, next candidate " +
                                      std::to_string(n_exp));
}

// ---------------------------------------------------------------------------------------------

ZSplit z_split(const Elementary& rho, std::size_t z_index, std::size_t dim) {
  const FramePtr& f = rho.f.frame();
  if (z_index < dim || z_index >= f->size()) fail(ErrorCode::SpecMismatch, "z_split: Z must be a parameter");
  MultiPoly g = substitute_some(rho.f, {{z_index, MultiPoly(f)}});
  ZSplit out{Elementary{rho.i, g}, Elementary{rho.i, rho.f - g}};
  require_equal_maps(gen_to_map(rho, f, dim), compose(gen_to_map(out.sigma, f, dim), gen_to_map(out.eps, f, dim)),
                     "rho = sigma eps");
  if (!is_z_vanishing(gen_to_map(out.eps, f, dim), z_index))
    fail(ErrorCode::IdentityFailed, "split part does not vanish at Z");
  return out;
}

std::vector<TameWord> conjfact_telescope(const std::vector<TameWord>& taus, const std::vector<Elementary>& epsilons) {
  if (taus.empty() || taus.size() != epsilons.size()) fail(ErrorCode::DimensionMismatch, "conjfact_telescope");
  const FramePtr& f = taus.front().frame();
  std::size_t n = taus.front().dim();
  TameWord prefix(f, n), interleaved(f, n);
  std::vector<TameWord> out;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    prefix.append(taus[k]);
    interleaved.append(taus[k]);
    interleaved.push(epsilons[k]);
    TameWord c = prefix;
    c.push(epsilons[k]);
    c.append(inverse_word(prefix));
    out.push_back(std::move(c));
  }
  if (!evaluate_word(prefix).is_identity())
    fail(ErrorCode::ProductNotIdentity, "tau_1 ... tau_r is not the identity");
  TameWord product(f, n);
  for (const auto& c : out) product.append(c);
  require_equal_maps(evaluate_word(interleaved), evaluate_word(product), "telescoped conjugates");
  return out;
}

namespace {

/// Least N with e_i(f(t^N V)) integral, f vanishing at V.
unsigned integral_exponent(const MultiPoly& f, std::size_t v) {
  unsigned need = 0;
  for (const auto& [e, c] : f.terms()) {
    if (e[v] == 0) fail(ErrorCode::HypothesisFailed, "elementary does not vanish at " + f.frame()->names()[v]);
    unsigned o = elem_t_order(c);
    need = std::max(need, (o + e[v] - 1) / e[v]);
  }
  return need;
}

/// e_i(f) with the parameter v scaled by c.
Elementary scale_param(const Elementary& e, std::size_t v, const MultiPoly& image) {
  return Elementary{e.i, substitute_some(e.f, {{v, image}})};
}

FinalLift lift_rec(const TameWord& tau, const Elementary& eps, std::size_t v) {
  const FramePtr& f = tau.frame();
  const RingPtr& rt = f->ring();
  std::size_t n = tau.dim();
  RingElem t = rt->embed(rt->loc_t());
  FinalLift out;
  if (tau.empty()) {
    out.n_exp = integral_exponent(eps.f, v);
    Elementary scaled = scale_param(eps, v, pow(t, out.n_exp) * MultiPoly::var(f, v));
    TameWord w(f, n);
    w.push(scaled);
    out.word = delocalize_word(w);
    out.trace.push_back({"integral rescaling", f->names()[v], {out.n_exp}});
    return out;
  }
  TameWord prefix(f, n);
  for (std::size_t k = 0; k + 1 < tau.size(); ++k) prefix.push(tau.gens()[k]);
  TaggedWord tw = lin_elem_conj(tau.gens().back(), eps, v, n);
  const FramePtr& f1 = tw.word.frame();
  std::vector<std::size_t> vm(f->size());
  for (std::size_t j = 0; j < vm.size(); ++j) vm[j] = j < n ? j : j + 1;
  TameWord prefix1 = move_word(prefix, f1, n + 1, vm);

  std::vector<FinalLift> subs;
  unsigned a = 0, b = 0;
  for (std::size_t k = 0; k < tw.word.size(); ++k) {
    const auto& om = std::get<Elementary>(tw.word.gens()[k]);
    bool t_tag = tw.tags[k] == VanishTag::T;
    subs.push_back(lift_rec(prefix1, om, t_tag ? tw.t_index : tw.z_index));
    (t_tag ? a : b) = std::max(t_tag ? a : b, subs.back().n_exp);
  }
  std::size_t p_sub = 0;
  for (const auto& s : subs) p_sub = std::max(p_sub, s.added);
  FramePtr g = stabilized_frame(make_frame(rt->base(), f1->names()), n + 1, p_sub, fresh_names(*f1, "S", p_sub));
  std::size_t zi = tw.z_index + p_sub, ti = tw.t_index + p_sub;
  MultiPoly zv = MultiPoly::var(g, zi);
  RingElem tr = rt->loc_t();
  TameWord combined(g, n + 1 + p_sub);
  for (std::size_t k = 0; k < subs.size(); ++k) {
    TameWord w = stabilize_word(subs[k].word, p_sub - subs[k].added);
    w = move_word(w, g, n + 1 + p_sub, iota(g->size()));
    bool t_tag = tw.tags[k] == VanishTag::T;
    unsigned ze = t_tag ? b : b - subs[k].n_exp;
    unsigned te = t_tag ? a - subs[k].n_exp : a;
    std::map<std::size_t, MultiPoly> images{{zi, pow(tr, ze) * zv},
                                            {ti, pow(tr, te) * MultiPoly::var(g, ti)}};
    combined.append(substitute_params_word(w, images));
    for (const auto& e : subs[k].trace) out.trace.push_back(e);
  }
  // Set T = 1 and drop it from the frame (it is the last variable).
  std::vector<std::string> names = g->names();
  names.pop_back();
  FramePtr gf = make_frame(g->ring(), names);
  TameWord at_one = substitute_params_word(combined, {{ti, MultiPoly::constant(g, 1)}});
  std::vector<std::size_t> drop = iota(g->size());
  drop.back() = 0;
  out.word = move_word(at_one, gf, n + 1 + p_sub, drop);
  out.n_exp = a + b;
  out.added = 1 + p_sub;
  out.trace.push_back({"conjugate split", std::to_string(tw.word.size()) + " vanishing factors", {a, b}});
  return out;
}

}  // namespace

FinalLift final_lift(const TameWord& tau, const Elementary& eps, std::size_t z_index, unsigned depth_cap) {
  const FramePtr& f = tau.frame();
  const RingPtr& rt = f->ring();
  std::size_t n = tau.dim();
  if (rt->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "final_lift works over R_t");
  if (tau.size() > depth_cap)
    fail(ErrorCode::DepthCapExceeded, "tau has " + std::to_string(tau.size()) + " generators, cap " +
                                          std::to_string(depth_cap));
  PolyMap em = gen_to_map(eps, f, n);
  if (!is_z_vanishing(em, z_index) || !is_origin_preserving(em))
    fail(ErrorCode::HypothesisFailed, "elementary factor must be Z-vanishing and origin preserving");
  for (const auto& g : tau.gens()) {
    if (std::holds_alternative<Translation>(g) || !is_origin_preserving(gen_to_map(g, f, n)))
      fail(ErrorCode::NotOriginPreserving, "generator " + gen_str(g) + " moves the origin");
  }
  FinalLift out = lift_rec(tau, eps, z_index);

  // Check over R_t: the localized word equals (tau eps(t^N Z) tau^-1)^[p].
  RingElem t = rt->embed(rt->loc_t());
  Elementary scaled = scale_param(eps, z_index, pow(t, out.n_exp) * MultiPoly::var(f, z_index));
  PolyMap conj = compose3(evaluate_word(tau), gen_to_map(scaled, f, n), evaluate_word(inverse_word(tau)));
  TameWord lw = localize_word(out.word, rt);
  require_equal_maps(stabilize_into(conj, lw.frame(), out.added), evaluate_word(lw), "lifted conjugate");
  if (!evaluate_word(substitute_params_word(out.word, {{z_index + out.added, MultiPoly(out.word.frame())}}))
           .is_identity())
    fail(ErrorCode::IdentityFailed, "lift does not vanish at Z");
  return out;
}

}  // namespace tameforge
