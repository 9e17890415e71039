#include <algorithm>

#include "tameforge/factor_core.hpp"

namespace tameforge {

namespace {

RingElem require_unit(const RingElem& s, const char* where) {
  auto inv = unit_inverse(s);
  if (!inv) fail(ErrorCode::SpecMismatch, std::string(where) + ": " + s.str() + " is not a unit");
  return *inv;
}

/// Localization of r at t, reusing r when it already inverts t.
RingPtr localize_at(const RingPtr& r, const RingElem& t) {
  if (r->kind() == RingKind::Localization && r->loc_t() == t) return r;
  return Ring::localization(r, t);
}

std::vector<std::size_t> psi_var_map(std::size_t nvars, std::size_t dim) {
  std::vector<std::size_t> vm(nvars);
  for (std::size_t j = 0; j < nvars; ++j) vm[j] = dim + j;
  return vm;
}

/// Images X_j -> X_j + shift_j + s Z_j in a psi frame (shift may be empty).
std::vector<MultiPoly> shifted_images(const FramePtr& d, std::size_t dim, std::size_t nvars,
                                      const std::vector<MultiPoly>& shift, const RingElem* s) {
  std::vector<MultiPoly> images;
  for (std::size_t j = 0; j < nvars; ++j) {
    MultiPoly im = MultiPoly::var(d, dim + j);
    if (j < dim) {
      if (!shift.empty()) im += shift[j];
      if (s) im += *s * MultiPoly::var(d, j);
    }
    images.push_back(im);
  }
  return images;
}

/// Drops the symbolic variable from coefficients that do not involve it.
MultiPoly symbol_free(const MultiPoly& p, const FramePtr& target) {
  return map_coefficients(p, target, [&](const RingElem& c) {
    if (c.coeffs().size() > 1) fail(ErrorCode::IdentityFailed, "component still depends on the symbolic variable");
    return c.coeffs().empty() ? target->ring()->zero() : c.coeffs().front();
  });
}

/// Signed t-adic valuation of a nonzero element of R_t (R a domain).
long t_valuation(const RingElem& c) {
  unsigned o = t_order(c);
  if (o > 0) return -static_cast<long>(o);
  const RingPtr& r = c.ring();
  RingElem num = c.numerator();
  long v = 0;
  unsigned bound = RingConfig::power_search_bound.load();
  while (v < static_cast<long>(bound)) {
    auto q = exact_divide(num, r->loc_t());
    if (!q) break;
    num = *q;
    ++v;
  }
  return v;
}

long ceil_div(long a, long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

}  // namespace

FramePtr psi_frame(const FramePtr& frame, std::size_t dim) {
  std::vector<std::string> names = fresh_names(*frame, "Z", dim);
  names.insert(names.end(), frame->names().begin(), frame->names().end());
  return make_frame(frame->ring(), names);
}

std::vector<std::size_t> psi_param_map(const FramePtr& frame, std::size_t dim) {
  return psi_var_map(frame->size(), dim);
}

PolyMap psi_map(const PolyMap& phi, const RingElem& s) {
  RingElem sinv = require_unit(s, "psi_map");
  std::size_t n = phi.dim();
  const FramePtr& f = phi.frame();
  FramePtr d = psi_frame(f, n);
  auto images = shifted_images(d, n, f->size(), {}, &s);
  std::vector<MultiPoly> coords;
  for (std::size_t j = 0; j < n; ++j) {
    MultiPoly fj = phi[j] - MultiPoly::var(f, j);
    coords.push_back(MultiPoly::var(d, j) + sinv * substitute(fj, images));
  }
  return PolyMap(d, n, std::move(coords));
}

TameWord psi_word(const TameWord& w, const RingElem& s) {
  RingElem sinv = require_unit(s, "psi_word");
  std::size_t n = w.dim();
  const FramePtr& f = w.frame();
  FramePtr d = psi_frame(f, n);
  auto vm = psi_var_map(f->size(), n);
  auto images = shifted_images(d, n, f->size(), {}, &s);
  TameWord out(d, n);
  for (const auto& g : w.gens()) {
    if (auto e = std::get_if<Elementary>(&g)) {
      out.push(Elementary{e->i, sinv * substitute(e->f, images)});
    } else if (auto l = std::get_if<Linear>(&g)) {
      Translation tr;
      PolyMatrix a(n), ainv(n);
      for (std::size_t r = 0; r < n; ++r) {
        MultiPoly v(d);
        for (std::size_t c = 0; c < n; ++c) {
          a[r].push_back(remap(l->matrix[r][c], d, vm));
          ainv[r].push_back(remap(l->inverse[r][c], d, vm));
          MultiPoly m = a[r][c];
          if (r == c) m -= MultiPoly::constant(d, 1);
          v += m * MultiPoly::var(d, n + c);
        }
        tr.v.push_back(sinv * v);
      }
      out.push(tr);
      out.push(Linear{std::move(a), std::move(ainv)});
    } else {
      Translation tr;
      for (const auto& x : std::get<Translation>(g).v) tr.v.push_back(sinv * remap(x, d, vm));
      out.push(tr);
    }
  }
  return out;
}

PsiConjugation psi_conjugation_words(const PolyMap& phi, const RingElem& s) {
  const RingPtr& r = phi.ring();
  std::size_t n = phi.dim();
  bool s_unit = unit_inverse(s).has_value();
  RingPtr rt = s_unit ? r : localize_at(r, s);
  PolyMap phit = localize_map(phi, rt);
  RingElem st = convert(s, rt), sinv = *unit_inverse(st);

  std::vector<std::string> zn = fresh_names(*phi.frame(), "Z", n);
  std::vector<std::string> names(phi.frame()->names().begin(), phi.frame()->names().begin() + static_cast<long>(n));
  names.insert(names.end(), zn.begin(), zn.end());
  names.insert(names.end(), phi.frame()->names().begin() + static_cast<long>(n), phi.frame()->names().end());
  FramePtr c = make_frame(rt, names);
  std::vector<std::size_t> vm(phi.frame()->size());
  for (std::size_t j = 0; j < vm.size(); ++j) vm[j] = j < n ? j : j + n;

  PsiConjugation out;
  out.frame = c;
  out.stabilized = move_map(phit, c, 2 * n, vm);
  out.sigma = TameWord(c, 2 * n);
  out.eta = TameWord(c, 2 * n);
  out.omega = TameWord(c, 2 * n);
  std::vector<MultiPoly> psi_coords, images;
  for (std::size_t j = 0; j < c->size(); ++j) {
    MultiPoly im = MultiPoly::var(c, j);
    if (j < n) im += st * MultiPoly::var(c, n + j);
    images.push_back(im);
  }
  for (std::size_t j = 0; j < n; ++j) psi_coords.push_back(MultiPoly::var(c, j));
  for (std::size_t j = 0; j < n; ++j) {
    MultiPoly x = MultiPoly::var(c, j), z = MultiPoly::var(c, n + j);
    MultiPoly fj = out.stabilized[j] - x;
    out.sigma.push(Elementary{j, -(st * z)});
    out.eta.push(Elementary{n + j, sinv * x});
    out.omega.push(Elementary{n + j, sinv * fj});
    psi_coords.push_back(z + sinv * substitute_some(fj, [&] {
      std::map<std::size_t, MultiPoly> m;
      for (std::size_t k = 0; k < n; ++k) m.emplace(k, images[k]);
      return m;
    }()));
  }
  out.psi = PolyMap(c, 2 * n, psi_coords);

  PolyMap sig = evaluate_word(out.sigma), sig_inv = evaluate_word(inverse_word(out.sigma));
  PolyMap eta = evaluate_word(out.eta), eta_inv = evaluate_word(inverse_word(out.eta));
  PolyMap om = evaluate_word(out.omega);
  require_equal_maps(out.psi, compose(compose(compose(sig, eta), out.stabilized), compose(eta_inv, sig_inv)),
                     "Psi = sigma eta phi eta^-1 sigma^-1");
  require_equal_maps(out.psi, compose(compose(sig, out.stabilized), compose(om, sig_inv)),
                     "Psi = sigma phi omega sigma^-1");

  bool integral = true;
  for (const auto& g : out.omega.gens()) integral = integral && is_integral(std::get<Elementary>(g).f);
  out.omega_integral = integral;
  if (integral) {
    TameWord left = inverse_word(out.sigma);
    TameWord right = concat(out.sigma, inverse_word(out.omega));
    PolyMap psi_r = out.psi, stab_r = out.stabilized;
    if (!s_unit) {
      left = delocalize_word(left);
      right = delocalize_word(right);
      FramePtr cr = make_frame(r, names);
      auto delocalize_map = [&](const PolyMap& m) {
        std::vector<MultiPoly> cs;
        for (const auto& x : m.coords()) cs.push_back(delocalize_poly(x, cr));
        return PolyMap(cr, m.dim(), cs);
      };
      psi_r = delocalize_map(out.psi);
      stab_r = delocalize_map(out.stabilized);
    }
    require_equal_maps(stab_r, compose(compose(evaluate_word(left), psi_r), evaluate_word(right)),
                       "phi^[n] = sigma^-1 Psi sigma omega^-1");
    out.left_over_r = left;
    out.right_over_r = right;
    out.psi_over_r = psi_r;
  }
  return out;
}

PolyMap pole_translation_map(const PoleTranslation& tau, const RingElem& t) {
  if (tau.p.empty()) fail(ErrorCode::DimensionMismatch, "empty translation");
  const FramePtr& f = tau.p.front().frame();
  RingPtr base = f->ring();
  RingElem tb = t;
  if (!same_ring(t.ring(), base)) tb = convert(t, base);
  RingPtr rt = unit_inverse(tb).has_value() ? base : localize_at(base, tb);
  FramePtr ft = same_ring(rt, base) ? f : make_frame(rt, f->names());
  RingElem inv = *unit_inverse(pow(convert(tb, rt), tau.n_exp));
  std::vector<MultiPoly> coords;
  for (std::size_t j = 0; j < tau.p.size(); ++j)
    coords.push_back(MultiPoly::var(ft, j) + inv * localize_poly(tau.p[j], ft));
  return PolyMap(ft, tau.p.size(), std::move(coords));
}

SweepLeft sweep_left(const TameWord& rho, const RingElem& t, unsigned n_exp) {
  if (!all_elementary(rho)) fail(ErrorCode::SpecMismatch, "sweep_left needs an elementary word");
  std::size_t n = rho.dim();
  const FramePtr& f = rho.frame();
  FramePtr d = psi_frame(f, n);
  RingElem s = pow(t, n_exp);
  std::vector<MultiPoly> q(n, MultiPoly(d));
  std::vector<TameGen> tilde;
  for (std::size_t k = rho.size(); k-- > 0;) {
    const auto& e = std::get<Elementary>(rho.gens()[k]);
    MultiPoly with_z = substitute(e.f, shifted_images(d, n, f->size(), q, &s));
    MultiPoly without_z = substitute(e.f, shifted_images(d, n, f->size(), q, nullptr));
    tilde.push_back(Elementary{e.i, divide_scalar(with_z - without_z, s)});
    q[e.i] += without_z;
  }
  SweepLeft out;
  out.tau = PoleTranslation{q, n_exp};
  out.rho_tilde = TameWord(d, n);
  for (auto it = tilde.rbegin(); it != tilde.rend(); ++it) out.rho_tilde.push(*it);

  RingPtr rt = localize_at(f->ring(), t);
  PolyMap lhs = psi_map(localize_map(evaluate_word(rho), rt), pow(convert(t, rt), n_exp));
  PolyMap rhs = compose(pole_translation_map(out.tau, t), localize_map(evaluate_word(out.rho_tilde), rt));
  require_equal_maps(lhs, rhs, "Psi(rho) = tau rho~");
  return out;
}

ElemSweep elem_sweep(const std::vector<MultiPoly>& x, const std::vector<MultiPoly>& u, const MultiPoly& f,
                     std::size_t i, std::size_t dim, const std::string& t_name) {
  const FramePtr& w = f.frame();
  if (x.size() != dim || u.size() != dim || i >= dim) fail(ErrorCode::DimensionMismatch, "elem_sweep");
  if (f.uses_var(i)) fail(ErrorCode::SpecMismatch, "elem_sweep: f depends on its own coordinate");
  for (std::size_t j = 0; j < dim; ++j) {
    if (!params_only(x[j], dim) || !params_only(u[j], dim))
      fail(ErrorCode::SpecMismatch, "elem_sweep: x and u must be free of the coordinates");
  }
  const RingPtr& rt = w->ring();
  std::string tn = t_name.empty() ? fresh_name(*w, "T") : t_name;
  RingPtr rtt = Ring::poly(rt, tn);
  RingPtr tl = Ring::localization(rtt, rtt->variable(tn));
  FramePtr wt = make_frame(rtt, w->names()), wl = make_frame(tl, w->names());
  auto lift = [&](const MultiPoly& p) { return localize_poly(p, wt); };
  MultiPoly tv = MultiPoly::constant(wt, rtt->variable(tn));

  std::vector<MultiPoly> images;
  for (std::size_t j = 0; j < w->size(); ++j) {
    MultiPoly im = MultiPoly::var(wt, j);
    if (j < dim) im = lift(x[j]) + lift(u[j]) + tv * im;
    images.push_back(im);
  }
  std::vector<bool> mask(w->size(), false);
  for (std::size_t j = 0; j < dim; ++j) mask[j] = true;
  auto comps = homogeneous_components(substitute(lift(f), images), mask);

  ElemSweep out;
  out.t_ring = tl;
  MultiPoly c0 = comps.count(0) ? symbol_free(comps[0], w) : MultiPoly(w);
  MultiPoly c1 = comps.count(1) ? symbol_free(divide_scalar(comps[1], tv.constant_term()), w) : MultiPoly(w);
  out.g = MultiPoly(wt);
  RingElem t2 = pow(rtt->variable(tn), 2);
  for (const auto& [deg, comp] : comps)
    if (deg >= 2) out.g += divide_scalar(comp, t2);
  out.w = u;
  out.w[i] += c0;
  out.omega = Elementary{i, c1};
  out.order_w = t_order(out.w);
  out.order_omega = t_order(out.omega.f);
  out.order_g = t_order(out.g);

  // Symbolic check of eps sigma = nu omega xi over loc(R_t[T], T).
  RingElem tinv = *unit_inverse(tl->variable(tn));
  MultiPoly tlv = MultiPoly::constant(wl, tl->variable(tn));
  std::vector<MultiPoly> limages;
  for (std::size_t j = 0; j < w->size(); ++j) {
    MultiPoly im = MultiPoly::var(wl, j);
    if (j < dim) im = localize_poly(x[j], wl) + tlv * im;
    limages.push_back(im);
  }
  Elementary eps{i, tinv * substitute(localize_poly(f, wl), limages)};
  Translation sigma, nu;
  for (std::size_t j = 0; j < dim; ++j) {
    sigma.v.push_back(tinv * localize_poly(u[j], wl));
    nu.v.push_back(tinv * localize_poly(out.w[j], wl));
  }
  Elementary om{i, localize_poly(out.omega.f, wl)};
  Elementary xi{i, tlv * localize_poly(out.g, wl)};
  PolyMap lhs = compose(gen_to_map(eps, wl, dim), gen_to_map(sigma, wl, dim));
  PolyMap rhs = compose(gen_to_map(nu, wl, dim), compose(gen_to_map(om, wl, dim), gen_to_map(xi, wl, dim)));
  require_equal_maps(lhs, rhs, "eps sigma = nu omega xi");
  return out;
}

ShortenStep shorten_step(const Linear& alpha, const Elementary& eps, const SweepResidue& residue, unsigned n_exp,
                         const FramePtr& original_frame, std::size_t dim) {
  const RingPtr& rt = original_frame->ring();
  if (rt->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "shorten_step works over R_t");
  std::size_t n = dim;
  FramePtr d = psi_frame(original_frame, n);
  auto vm = [&] {
    std::vector<std::size_t> m(original_frame->size());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = j < n ? j : j + n;
    return m;
  }();
  RingElem t = rt->embed(rt->loc_t());
  RingElem s = pow(t, n_exp);

  std::vector<MultiPoly> x;
  for (std::size_t j = 0; j < n; ++j) x.push_back(MultiPoly::var(d, n + j));
  std::vector<MultiPoly> p;
  for (const auto& pj : residue.tau.p) p.push_back(localize_poly(pj, d));
  ShortenStep out;
  out.sweep = elem_sweep(x, p, remap(eps.f, d, vm), eps.i, n);

  PolyMatrix a(n), ainv(n), wm = identity_matrix(d, n), wminv = identity_matrix(d, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      a[r].push_back(remap(alpha.matrix[r][c], d, vm));
      ainv[r].push_back(remap(alpha.inverse[r][c], d, vm));
    }
  for (std::size_t c = 0; c < n; ++c) {
    MultiPoly coef = partial_derivative(out.sweep.omega.f, c);
    wm[eps.i][c] += coef;
    wminv[eps.i][c] -= coef;
  }
  std::vector<MultiPoly> pt(n, MultiPoly(d));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      MultiPoly m = a[r][c];
      if (r == c) m -= MultiPoly::constant(d, 1);
      pt[r] += a[r][c] * out.sweep.w[c] + m * x[c];
    }
  out.tau_tilde = PoleTranslation{pt, n_exp};
  const PolyMatrix& g = residue.gamma.matrix;
  const PolyMatrix& ginv = residue.gamma.inverse;
  out.gamma_tilde = Linear{matrix_product(matrix_product(a, wm), g), matrix_product(matrix_product(ginv, wminv), ainv)};

  // Least N for which the conjugated tail passes the integrality hypothesis.
  out.order_gamma = std::max(t_order(g), t_order(ginv));
  unsigned deg = 0;
  for (const auto& [e, c] : out.sweep.g.terms()) {
    unsigned k = 0;
    for (std::size_t j = 0; j < n; ++j) k += e[j];
    deg = std::max(deg, k);
  }
  out.degree = deg;
  long need = 0;
  long target = static_cast<long>(out.order_gamma) * (1 + deg);
  for (const auto& [e, c] : out.sweep.g.terms()) {
    const auto& cs = c.coeffs();
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].is_zero()) continue;
      need = std::max(need, ceil_div(target - t_valuation(cs[k]), static_cast<long>(k + 1)));
    }
  }
  out.n_required = static_cast<unsigned>(need);
  if (n_exp < out.n_required)
    throw NInsufficientError(out.n_required, "N = " + std::to_string(n_exp) + " is below the required " +
                                                 std::to_string(out.n_required));

  std::string tn = out.sweep.t_ring->base()->var();
  MultiPoly h = s * map_coefficients(out.sweep.g, d, [&](const RingElem& c) { return specialize(c, tn, s); });
  Elementary xi{eps.i, h};
  Linear gamma_inv{ginv, g};
  std::string y = fresh_name(*d, "Y");
  IntegralConjugate ic = integral_conjugate(gamma_inv, xi, out.order_gamma, n, y);
  out.zeta = ic.word;

  PolyMap lhs = compose(compose(psi_map(gen_to_map(alpha, original_frame, n), s),
                                psi_map(gen_to_map(eps, original_frame, n), s)),
                        compose(pole_translation_map(residue.tau, t), gen_to_map(residue.gamma, d, n)));
  PolyMap tail = compose(compose(gen_to_map(gamma_inv, d, n), gen_to_map(xi, d, n)), gen_to_map(residue.gamma, d, n));
  PolyMap rhs = compose(compose(pole_translation_map(out.tau_tilde, t), gen_to_map(out.gamma_tilde, d, n)), tail);
  require_equal_maps(lhs, rhs, "shortening identity");
  return out;
}

}  // namespace tameforge
