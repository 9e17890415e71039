#include <algorithm>

#include "tameforge/factor_core.hpp"

namespace tameforge {

unsigned elem_t_order(const RingElem& a) {
  if (a.is_zero()) return 0;
  const RingPtr& r = a.ring();
  switch (r->kind()) {
    case RingKind::Localization: return t_order(a);
    case RingKind::Poly: {
      unsigned m = 0;
      for (const auto& c : a.coeffs()) m = std::max(m, elem_t_order(c));
      return m;
    }
    default: return 0;
  }
}

unsigned t_order(const MultiPoly& p) {
  unsigned m = 0;
  for (const auto& [e, c] : p.terms()) m = std::max(m, elem_t_order(c));
  return m;
}

unsigned t_order(const std::vector<MultiPoly>& v) {
  unsigned m = 0;
  for (const auto& p : v) m = std::max(m, t_order(p));
  return m;
}

unsigned t_order(const PolyMatrix& mat) {
  unsigned m = 0;
  for (const auto& row : mat) m = std::max(m, t_order(row));
  return m;
}

PolyMap localize_map(const PolyMap& phi, const RingPtr& rt) {
  if (same_ring(phi.ring(), rt)) return phi;
  return base_change(phi, rt);
}

TameWord localize_word(const TameWord& w, const RingPtr& rt) {
  if (same_ring(w.ring(), rt)) return w;
  return base_change_word(w, rt);
}

MultiPoly localize_poly(const MultiPoly& p, const FramePtr& target) {
  if (same_frame(p.frame(), target)) return p;
  RingPtr r = target->ring();
  return map_coefficients(p, target, [&](const RingElem& c) { return convert(c, r); });
}

MultiPoly delocalize_poly(const MultiPoly& p, const FramePtr& target) {
  return map_coefficients(p, target, [](const RingElem& c) { return delocalize(c); });
}

TameWord delocalize_word(const TameWord& w) {
  const RingPtr& r = w.ring();
  if (r->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "delocalize_word needs a localized word");
  FramePtr target = make_frame(r->base(), w.frame()->names());
  return map_word_coefficients(w, target, [](const RingElem& c) { return delocalize(c); });
}

bool is_integral(const MultiPoly& p) {
  if (p.ring()->kind() != RingKind::Localization) return true;
  for (const auto& [e, c] : p.terms()) {
    if (c.denominator_exponent() == 0) continue;
    if (!exact_divide(c.numerator(), pow(p.ring()->loc_t(), c.denominator_exponent()))) return false;
  }
  return true;
}

bool is_integral(const TameWord& w) {
  auto ok_matrix = [](const PolyMatrix& m) {
    for (const auto& row : m)
      for (const auto& x : row)
        if (!is_integral(x)) return false;
    return true;
  };
  for (const auto& g : w.gens()) {
    if (auto e = std::get_if<Elementary>(&g)) {
      if (!is_integral(e->f)) return false;
    } else if (auto l = std::get_if<Linear>(&g)) {
      if (!ok_matrix(l->matrix) || !ok_matrix(l->inverse)) return false;
    } else {
      for (const auto& x : std::get<Translation>(g).v)
        if (!is_integral(x)) return false;
    }
  }
  return true;
}

void require_equal_maps(const PolyMap& expected, const PolyMap& actual, const std::string& what) {
  Verdict v = compare_maps(expected, actual);
  if (!v.pass) fail(ErrorCode::IdentityFailed, what + ": " + v.message);
}

std::vector<std::string> fresh_names(const Frame& frame, const std::string& base, std::size_t n,
                                     const std::vector<std::string>& taken) {
  std::vector<std::string> used = taken, out;
  for (std::size_t k = 1; k <= n; ++k) {
    std::string name = fresh_name(frame, base + std::to_string(k), used);
    used.push_back(name);
    out.push_back(name);
  }
  return out;
}

}  // namespace tameforge
