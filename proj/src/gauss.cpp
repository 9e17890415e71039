#include <algorithm>

#include "tameforge/factor_core.hpp"

namespace tameforge {

TameWord whitehead_diagonal(const FramePtr& frame, std::size_t dim, std::size_t i, std::size_t j, const RingElem& u) {
  TameWord w(frame, dim);
  if (u.is_one()) return w;
  auto inv = unit_inverse(u);
  if (!inv) fail(ErrorCode::SingularMatrix, u.str() + " is not a unit");
  const RingPtr& r = frame->ring();
  MultiPoly xi = MultiPoly::var(frame, i), xj = MultiPoly::var(frame, j);
  RingElem one = r->one();
  w.push(Elementary{j, (-(u - one) * *inv * *inv) * xi});
  w.push(Elementary{i, u * xj});
  w.push(Elementary{j, (one - *inv) * xi});
  w.push(Elementary{i, -one * xj});
  return w;
}

TameWord gauss_factor(const Linear& alpha, std::size_t dim) {
  if (alpha.matrix.size() != dim || dim == 0) fail(ErrorCode::DimensionMismatch, "gauss_factor");
  const FramePtr& frame = alpha.matrix.front().front().frame();
  const RingPtr& r = frame->ring();
  if (!r->is_field() && !r->is_local()) fail(ErrorCode::NotLocalOrField, r->str() + " is neither a field nor local");
  std::vector<std::vector<RingElem>> a(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const MultiPoly& x = alpha.matrix[i][j];
      if (!x.is_constant()) fail(ErrorCode::NotLocalOrField, "entry " + x.str() + " is not a constant");
      a[i].push_back(x.constant_term());
    }

  // Row operation (target, source, lambda): row_target += lambda * row_source.
  struct RowOp {
    std::size_t target, source;
    RingElem lambda;
  };
  std::vector<RowOp> ops;
  auto apply_op = [&](const RowOp& op) {
    for (std::size_t c = 0; c < dim; ++c) a[op.target][c] += op.lambda * a[op.source][c];
    ops.push_back(op);
  };
  for (std::size_t c = 0; c < dim; ++c) {
    if (!is_unit(a[c][c])) {
      std::size_t k = c + 1;
      while (k < dim && !is_unit(a[k][c])) ++k;
      if (k == dim) {
        // A sum of non-units may still be a unit over a field, never over a local ring.
        fail(ErrorCode::SingularMatrix, "no unit pivot in column " + std::to_string(c + 1));
      }
      apply_op({c, k, r->one()});
    }
    RingElem inv = *unit_inverse(a[c][c]);
    for (std::size_t row = 0; row < dim; ++row) {
      if (row == c || a[row][c].is_zero()) continue;
      apply_op({row, c, -(a[row][c] * inv)});
    }
  }

  TameWord w(frame, dim);
  for (const auto& op : ops)
    w.push(Elementary{op.target, -op.lambda * MultiPoly::var(frame, op.source)});
  RingElem acc = r->one();
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    acc = acc * a[k][k];
    w.append(whitehead_diagonal(frame, dim, k, k + 1, acc));
  }
  acc = acc * a[dim - 1][dim - 1];
  if (!acc.is_one()) {
    PolyMatrix d = identity_matrix(frame, dim), dinv = identity_matrix(frame, dim);
    d[dim - 1][dim - 1] = MultiPoly::constant(frame, acc);
    dinv[dim - 1][dim - 1] = MultiPoly::constant(frame, *unit_inverse(acc));
    w.push(Linear{d, dinv});
  }
  require_equal_maps(gen_to_map(alpha, frame, dim), evaluate_word(w), "Gaussian factorization");
  return w;
}

unsigned kill_torsion_exponent(const PolyMap& psi, const PolyMap& phi, std::size_t z_index, const RingElem& t) {
  require_same_frame(psi.frame(), phi.frame(), "kill_torsion");
  if (!is_z_vanishing(psi, z_index) || !is_z_vanishing(phi, z_index))
    fail(ErrorCode::HypothesisFailed, "maps must be Z-vanishing");
  const RingPtr& r = psi.ring();
  RingPtr rt = Ring::localization(r, t);
  unsigned bound = RingConfig::annihilator_bound.load();
  unsigned need = 0;
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    MultiPoly diff = psi[i] - phi[i];
    for (const auto& [e, c] : diff.terms()) {
      if (!convert(c, rt).is_zero()) fail(ErrorCode::HypothesisFailed, "maps differ over the localization at " + t.str());
      unsigned k = 0;
      RingElem cur = c;
      while (!cur.is_zero()) {
        if (++k > bound) fail(ErrorCode::BoundExceeded, "annihilating power of " + t.str() + " beyond the bound");
        cur = cur * t;
      }
      unsigned ez = e[z_index];
      need = std::max(need, (k + ez - 1) / ez);
    }
  }
  if (need > bound) fail(ErrorCode::BoundExceeded, "torsion exponent beyond the bound");
  RingElem s = pow(t, need);
  MultiPoly sz = s * MultiPoly::var(psi.frame(), z_index);
  if (substitute_params(psi, {{z_index, sz}}) != substitute_params(phi, {{z_index, sz}}))
    fail(ErrorCode::IdentityFailed, "torsion exponent check");
  return need;
}

}  // namespace tameforge
