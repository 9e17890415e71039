#include "tameforge/stable_tame.hpp"

namespace tameforge {

namespace {

MultiPoly leading_form(const MultiPoly& p) {
  auto comps = homogeneous_components(p);
  return comps.rbegin()->second;
}

/// Affine map A X + b as [e_1(b_1), e_2(b_2), gauss(A)].
TameWord factor_affine(const PolyMap& phi) {
  const FramePtr& f = phi.frame();
  std::size_t n = phi.dim();
  TameWord w(f, n);
  PolyMatrix a(n), ainv;
  for (std::size_t i = 0; i < n; ++i) {
    Exponent zero(f->size(), 0);
    w.push(Elementary{i, MultiPoly::constant(f, phi[i].coeff(zero))});
    for (std::size_t j = 0; j < n; ++j) {
      Exponent e = zero;
      e[j] = 1;
      a[i].push_back(MultiPoly::constant(f, phi[i].coeff(e)));
    }
  }
  MultiPoly det = determinant(a);
  if (det.is_zero() || !is_unit(det.constant_term()))
    fail(ErrorCode::NotAnAutomorphism, "linear part is singular");
  RingElem dinv = *unit_inverse(det.constant_term());
  ainv = {{dinv * a[1][1], -dinv * a[0][1]}, {-dinv * a[1][0], dinv * a[0][0]}};
  w.append(gauss_factor(Linear{a, ainv}, n));
  return w;
}

}  // namespace

TameWord jvdk_factor(const PolyMap& phi) {
  if (phi.dim() != 2 || phi.nparams() != 0) fail(ErrorCode::DimensionMismatch, "jvdk_factor works on plane maps");
  const FramePtr& f = phi.frame();
  if (!f->ring()->is_field()) fail(ErrorCode::NotLocalOrField, f->ring()->str() + " is not a field");
  MultiPoly jac = jacobian_det(phi);
  if (!jac.is_constant() || jac.is_zero())
    fail(ErrorCode::NotAnAutomorphism, "Jacobian determinant " + jac.str() + " is not a nonzero constant");

  PolyMap cur = phi;
  TameWord w(f, 2);
  while (true) {
    int d1 = cur[0].total_degree(), d2 = cur[1].total_degree();
    if (d1 <= 1 && d2 <= 1) break;
    // Ties reduce the second coordinate.
    std::size_t hi = d1 > d2 ? 0 : 1, lo = 1 - hi;
    int dh = cur[hi].total_degree(), dl = cur[lo].total_degree();
    if (dl < 1 || dh % dl != 0)
      fail(ErrorCode::NotAnAutomorphism, "degree " + std::to_string(dh) + " is not a multiple of " + std::to_string(dl));
    unsigned k = static_cast<unsigned>(dh / dl);
    MultiPoly lh = leading_form(cur[hi]), power = pow(leading_form(cur[lo]), k);
    const auto& [mono, pc] = *power.terms().begin();
    auto pinv = unit_inverse(pc);
    RingElem c = lh.coeff(mono) * *pinv;
    if (lh != c * power) fail(ErrorCode::NotAnAutomorphism, "leading forms are not proportional");
    Elementary e{hi, c * pow(MultiPoly::var(f, lo), k)};
    cur = compose(gen_to_map(inverse_gen(e), f, 2), cur);
    if (cur[hi].total_degree() >= dh) fail(ErrorCode::NotAnAutomorphism, "degree reduction stalled");
    w.push(e);
  }
  w.append(factor_affine(cur));
  require_equal_maps(phi, evaluate_word(w), "plane degree reduction");
  return w;
}

TameWord field_base_factor(const PolyMap& phi) {
  const FramePtr& f = phi.frame();
  TameWord w(f, phi.dim());
  if (phi.is_identity()) return w;
  if (phi.dim() == 1) {
    MultiPoly x = MultiPoly::var(f, 0);
    MultiPoly c = phi[0] - x;
    if (c.uses_var(0)) fail(ErrorCode::BaseFactorFailed, "line map " + phi.str() + " is not a translation");
    w.push(Elementary{0, c});
    return w;
  }
  if (phi.dim() == 2) {
    TameWord j = jvdk_factor(phi);
    if (!all_elementary(j)) fail(ErrorCode::BaseFactorFailed, "plane map has Jacobian other than 1");
    return j;
  }
  fail(ErrorCode::BaseFactorFailed, "no field factorization in dimension " + std::to_string(phi.dim()));
}

}  // namespace tameforge
