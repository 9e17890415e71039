#include "tameforge/automap.hpp"

#include <algorithm>
#include <unordered_map>

namespace tameforge {

PolyMap::PolyMap(FramePtr frame, std::size_t dim, std::vector<MultiPoly> coords)
    : frame_(std::move(frame)), dim_(dim), coords_(std::move(coords)) {
  if (dim_ > frame_->size()) fail(ErrorCode::DimensionMismatch, "map dimension exceeds frame size");
  if (coords_.size() != dim_) fail(ErrorCode::DimensionMismatch, "coordinate count differs from dimension");
  for (const auto& c : coords_) require_same_frame(frame_, c.frame(), "PolyMap");
}

PolyMap PolyMap::identity(const FramePtr& frame, std::size_t dim) {
  std::vector<MultiPoly> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back(MultiPoly::var(frame, i));
  return PolyMap(frame, dim, std::move(coords));
}

bool PolyMap::is_identity() const {
  for (std::size_t i = 0; i < dim_; ++i)
    if (coords_[i] != MultiPoly::var(frame_, i)) return false;
  return true;
}

std::string PolyMap::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < dim_; ++i) s += (i ? ", " : "") + coords_[i].str();
  return s + ")";
}

bool operator==(const PolyMap& a, const PolyMap& b) {
  if (a.dim() != b.dim() || a.frame()->size() != b.frame()->size()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

MultiPoly apply(const MultiPoly& p, const PolyMap& psi) {
  require_same_frame(p.frame(), psi.frame(), "apply");
  std::vector<MultiPoly> images = psi.coords();
  for (std::size_t j = psi.dim(); j < psi.frame()->size(); ++j) images.push_back(MultiPoly::var(psi.frame(), j));
  return substitute(p, images);
}

PolyMap compose(const PolyMap& phi, const PolyMap& psi) {
  if (phi.dim() != psi.dim()) fail(ErrorCode::DimensionMismatch, "compose: dimensions differ");
  require_same_frame(phi.frame(), psi.frame(), "compose");
  std::vector<MultiPoly> images = psi.coords();
  for (std::size_t j = psi.dim(); j < psi.frame()->size(); ++j) images.push_back(MultiPoly::var(psi.frame(), j));
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords()) coords.push_back(substitute(c, images));
  return PolyMap(phi.frame(), phi.dim(), std::move(coords));
}

PolyMatrix jacobian_matrix(const PolyMap& phi) {
  PolyMatrix j(phi.dim());
  for (std::size_t r = 0; r < phi.dim(); ++r)
    for (std::size_t c = 0; c < phi.dim(); ++c) j[r].push_back(partial_derivative(phi[r], c));
  return j;
}

MultiPoly determinant(const PolyMatrix& m) {
  std::size_t n = m.size();
  if (n == 0) fail(ErrorCode::DimensionMismatch, "determinant of empty matrix");
  if (n > 20) fail(ErrorCode::DimensionMismatch, "determinant size too large");
  const FramePtr& frame = m[0][0].frame();
  // minor(S) = determinant of rows n-|S|.. with column set S, expanded along its first row.
  std::unordered_map<std::uint32_t, MultiPoly> memo;
  std::function<MultiPoly(std::uint32_t)> minor = [&](std::uint32_t cols) -> MultiPoly {
    if (cols == 0) return MultiPoly::constant(frame, 1);
    auto it = memo.find(cols);
    if (it != memo.end()) return it->second;
    std::size_t row = n - static_cast<std::size_t>(__builtin_popcount(cols));
    MultiPoly acc(frame);
    int pos = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(cols & (1U << c))) continue;
      const MultiPoly& a = m[row][c];
      if (!a.is_zero()) {
        MultiPoly term = a * minor(cols & ~(1U << c));
        if (pos % 2 == 0) acc += term;
        else acc -= term;
      }
      ++pos;
    }
    memo.emplace(cols, acc);
    return acc;
  };
  return minor((n == 32 ? 0U : (1U << n)) - 1U);
}

MultiPoly jacobian_det(const PolyMap& phi) { return determinant(jacobian_matrix(phi)); }

FramePtr stabilized_frame(const FramePtr& frame, std::size_t dim, std::size_t m,
                          const std::vector<std::string>& names) {
  std::vector<std::string> out(frame->names().begin(), frame->names().begin() + static_cast<long>(dim));
  std::vector<std::string> added;
  for (std::size_t k = 0; k < m; ++k) {
    if (k < names.size()) {
      added.push_back(names[k]);
    } else {
      added.push_back(fresh_name(*frame, "Y", added));
    }
  }
  out.insert(out.end(), added.begin(), added.end());
  out.insert(out.end(), frame->names().begin() + static_cast<long>(dim), frame->names().end());
  return make_frame(frame->ring(), out);
}

namespace {

std::vector<std::size_t> stabilizing_var_map(std::size_t nvars, std::size_t dim, std::size_t m) {
  std::vector<std::size_t> vm(nvars);
  for (std::size_t j = 0; j < nvars; ++j) vm[j] = j < dim ? j : j + m;
  return vm;
}

}  // namespace

PolyMap stabilize_into(const PolyMap& phi, const FramePtr& target, std::size_t m) {
  if (target->size() != phi.frame()->size() + m) fail(ErrorCode::FrameMismatch, "stabilize: target frame size");
  require_same_ring(phi.ring(), target->ring(), "stabilize");
  auto vm = stabilizing_var_map(phi.frame()->size(), phi.dim(), m);
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords()) coords.push_back(remap(c, target, vm));
  for (std::size_t k = 0; k < m; ++k) coords.push_back(MultiPoly::var(target, phi.dim() + k));
  return PolyMap(target, phi.dim() + m, std::move(coords));
}

PolyMap stabilize(const PolyMap& phi, std::size_t m, const std::vector<std::string>& names) {
  if (m == 0) return phi;
  return stabilize_into(phi, stabilized_frame(phi.frame(), phi.dim(), m, names), m);
}

bool is_origin_preserving(const PolyMap& phi) {
  std::vector<bool> mask(phi.frame()->size(), false);
  for (std::size_t i = 0; i < phi.dim(); ++i) mask[i] = true;
  for (const auto& c : phi.coords()) {
    auto comps = homogeneous_components(c, mask);
    if (comps.count(0)) return false;
  }
  return true;
}

PolyMap scalar_action(const PolyMap& phi, const MultiPoly& t) {
  require_same_frame(phi.frame(), t.frame(), "scalar_action");
  if (!params_only(t, phi.dim())) fail(ErrorCode::FrameMismatch, "scalar must not involve coordinates");
  if (!is_origin_preserving(phi)) fail(ErrorCode::NotOriginPreserving, phi.str());
  std::vector<bool> mask(phi.frame()->size(), false);
  for (std::size_t i = 0; i < phi.dim(); ++i) mask[i] = true;
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords()) {
    MultiPoly acc(phi.frame());
    for (const auto& [d, comp] : homogeneous_components(c, mask)) acc += pow(t, d - 1) * comp;
    coords.push_back(acc);
  }
  return PolyMap(phi.frame(), phi.dim(), std::move(coords));
}

PolyMap scalar_action(const PolyMap& phi, const RingElem& t) {
  return scalar_action(phi, MultiPoly::constant(phi.frame(), t));
}

PolyMap base_change(const PolyMap& phi, const RingPtr& target) {
  FramePtr f = make_frame(target, phi.frame()->names());
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords())
    coords.push_back(map_coefficients(c, f, [&](const RingElem& x) { return convert(x, target); }));
  return PolyMap(f, phi.dim(), std::move(coords));
}

PolyMap specialize_map(const PolyMap& phi, const std::string& ring_var, const RingElem& value) {
  RingPtr target = specialized_ring(phi.ring(), ring_var, value);
  FramePtr f = make_frame(target, phi.frame()->names());
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords()) {
    coords.push_back(map_coefficients(c, f, [&](const RingElem& x) {
      return convert(specialize(x, ring_var, value), target);
    }));
  }
  return PolyMap(f, phi.dim(), std::move(coords));
}

PolyMap substitute_params(const PolyMap& phi, const std::map<std::size_t, MultiPoly>& images) {
  std::vector<MultiPoly> coords;
  for (const auto& c : phi.coords()) coords.push_back(substitute_some(c, images));
  return PolyMap(phi.frame(), phi.dim(), std::move(coords));
}

bool is_z_vanishing(const PolyMap& phi, std::size_t j) {
  std::map<std::size_t, MultiPoly> zero{{j, MultiPoly(phi.frame())}};
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    MultiPoly expect = MultiPoly::var(phi.frame(), i);
    if (i == j) expect = MultiPoly(phi.frame());
    if (substitute_some(phi[i], zero) != expect) return false;
  }
  return true;
}

PolyMap move_map(const PolyMap& phi, const FramePtr& target, std::size_t dim,
                 const std::vector<std::size_t>& var_map) {
  std::vector<MultiPoly> coords;
  for (std::size_t i = 0; i < dim; ++i) coords.push_back(MultiPoly::var(target, i));
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    if (var_map[i] >= dim) fail(ErrorCode::FrameMismatch, "move_map: coordinate mapped to a parameter");
    coords[var_map[i]] = remap(phi[i], target, var_map);
  }
  return PolyMap(target, dim, std::move(coords));
}

// ---------------------------------------------------------------------------------------------

PolyMatrix identity_matrix(const FramePtr& frame, std::size_t n) {
  PolyMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m[r].push_back(MultiPoly::constant(frame, r == c ? 1 : 0));
  return m;
}

PolyMatrix matrix_product(const PolyMatrix& a, const PolyMatrix& b) {
  std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  if (n == 0 || a[0].size() != k) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
  const FramePtr& frame = a[0][0].frame();
  PolyMatrix out(n, std::vector<MultiPoly>(p, MultiPoly(frame)));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < k; ++j) {
      if (a[r][j].is_zero()) continue;
      for (std::size_t c = 0; c < p; ++c)
        if (!b[j][c].is_zero()) out[r][c] += a[r][j] * b[j][c];
    }
  return out;
}

bool is_identity_matrix(const PolyMatrix& a) {
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      if (r == c ? a[r][c] != MultiPoly::constant(a[r][c].frame(), 1) : !a[r][c].is_zero()) return false;
    }
  return true;
}

bool params_only(const MultiPoly& p, std::size_t dim) {
  for (const auto& [e, c] : p.terms())
    for (std::size_t i = 0; i < dim; ++i)
      if (e[i]) return false;
  return true;
}

Elementary make_elementary(std::size_t dim, std::size_t i, MultiPoly f) {
  if (i >= dim) fail(ErrorCode::DimensionMismatch, "elementary index out of range");
  if (f.uses_var(i)) fail(ErrorCode::SpecMismatch, "elementary e_" + std::to_string(i + 1) + " polynomial uses its own variable: " + f.str());
  return Elementary{i, std::move(f)};
}

Linear make_linear(std::size_t dim, PolyMatrix matrix, PolyMatrix inverse) {
  if (matrix.size() != dim || inverse.size() != dim) fail(ErrorCode::DimensionMismatch, "linear generator shape");
  for (const auto* m : {&matrix, &inverse})
    for (const auto& row : *m) {
      if (row.size() != dim) fail(ErrorCode::DimensionMismatch, "linear generator shape");
      for (const auto& e : row)
        if (!params_only(e, dim)) fail(ErrorCode::SpecMismatch, "linear entry involves coordinates: " + e.str());
    }
  if (!is_identity_matrix(matrix_product(matrix, inverse)) || !is_identity_matrix(matrix_product(inverse, matrix)))
    fail(ErrorCode::SingularMatrix, "inverse witness does not invert the matrix");
  return Linear{std::move(matrix), std::move(inverse)};
}

bool is_identity_gen(const TameGen& g) {
  if (auto e = std::get_if<Elementary>(&g)) return e->f.is_zero();
  if (auto l = std::get_if<Linear>(&g)) return is_identity_matrix(l->matrix);
  const auto& t = std::get<Translation>(g);
  return std::all_of(t.v.begin(), t.v.end(), [](const MultiPoly& p) { return p.is_zero(); });
}

void TameWord::push(TameGen g) {
  if (auto e = std::get_if<Elementary>(&g)) {
    require_same_frame(frame_, e->f.frame(), "push");
    if (e->i >= dim_ || e->f.uses_var(e->i)) fail(ErrorCode::SpecMismatch, "invalid elementary generator");
  } else if (auto l = std::get_if<Linear>(&g)) {
    if (l->matrix.size() != dim_) fail(ErrorCode::DimensionMismatch, "linear generator dimension");
    require_same_frame(frame_, l->matrix[0][0].frame(), "push");
  } else {
    const auto& t = std::get<Translation>(g);
    if (t.v.size() != dim_) fail(ErrorCode::DimensionMismatch, "translation dimension");
    require_same_frame(frame_, t.v[0].frame(), "push");
  }
  if (is_identity_gen(g)) return;
  gens_.push_back(std::move(g));
}

void TameWord::push_elementary(std::size_t i, MultiPoly f) { push(make_elementary(dim_, i, std::move(f))); }

void TameWord::append(const TameWord& w, const std::string& source) {
  if (w.dim_ != dim_) fail(ErrorCode::DimensionMismatch, "append: dimensions differ");
  require_same_frame(frame_, w.frame_, "append");
  std::size_t start = gens_.size();
  gens_.insert(gens_.end(), w.gens_.begin(), w.gens_.end());
  if (!source.empty()) {
    label(start, source);
  } else {
    for (const auto& s : w.provenance_) provenance_.push_back({s.start + start, s.end + start, s.source});
  }
}

void TameWord::label(std::size_t from, const std::string& source) {
  if (from < gens_.size()) provenance_.push_back({from, gens_.size(), source});
}

PolyMap gen_to_map(const TameGen& g, const FramePtr& frame, std::size_t dim) {
  PolyMap id = PolyMap::identity(frame, dim);
  std::vector<MultiPoly> coords = id.coords();
  if (auto e = std::get_if<Elementary>(&g)) {
    coords[e->i] += e->f;
  } else if (auto l = std::get_if<Linear>(&g)) {
    for (std::size_t r = 0; r < dim; ++r) {
      MultiPoly acc(frame);
      for (std::size_t c = 0; c < dim; ++c) acc += l->matrix[r][c] * MultiPoly::var(frame, c);
      coords[r] = acc;
    }
  } else {
    const auto& t = std::get<Translation>(g);
    for (std::size_t r = 0; r < dim; ++r) coords[r] += t.v[r];
  }
  return PolyMap(frame, dim, std::move(coords));
}

TameGen inverse_gen(const TameGen& g) {
  if (auto e = std::get_if<Elementary>(&g)) return Elementary{e->i, -e->f};
  if (auto l = std::get_if<Linear>(&g)) return Linear{l->inverse, l->matrix};
  Translation t = std::get<Translation>(g);
  for (auto& p : t.v) p = -p;
  return t;
}

std::string gen_str(const TameGen& g) {
  if (auto e = std::get_if<Elementary>(&g)) return "e_" + std::to_string(e->i + 1) + "(" + e->f.str() + ")";
  if (auto l = std::get_if<Linear>(&g)) {
    std::string s = "linear[";
    for (std::size_t r = 0; r < l->matrix.size(); ++r) {
      s += r ? "; " : "";
      for (std::size_t c = 0; c < l->matrix[r].size(); ++c) s += (c ? ", " : "") + l->matrix[r][c].str();
    }
    return s + "]";
  }
  const auto& t = std::get<Translation>(g);
  std::string s = "translation(";
  for (std::size_t r = 0; r < t.v.size(); ++r) s += (r ? ", " : "") + t.v[r].str();
  return s + ")";
}

namespace {

/// g o C.
void apply_gen_left(const TameGen& g, std::vector<MultiPoly>& c, const FramePtr& frame, std::size_t dim) {
  if (auto e = std::get_if<Elementary>(&g)) {
    std::vector<MultiPoly> images = c;
    for (std::size_t j = dim; j < frame->size(); ++j) images.push_back(MultiPoly::var(frame, j));
    c[e->i] += substitute(e->f, images);
  } else if (auto l = std::get_if<Linear>(&g)) {
    std::vector<MultiPoly> out;
    for (std::size_t r = 0; r < dim; ++r) {
      MultiPoly acc(frame);
      for (std::size_t k = 0; k < dim; ++k)
        if (!l->matrix[r][k].is_zero()) acc += l->matrix[r][k] * c[k];
      out.push_back(acc);
    }
    c = std::move(out);
  } else {
    const auto& t = std::get<Translation>(g);
    for (std::size_t r = 0; r < dim; ++r) c[r] += t.v[r];
  }
}

}  // namespace

PolyMap evaluate_word(const TameWord& w) {
  std::vector<MultiPoly> c = PolyMap::identity(w.frame(), w.dim()).coords();
  for (auto it = w.gens().rbegin(); it != w.gens().rend(); ++it) apply_gen_left(*it, c, w.frame(), w.dim());
  return PolyMap(w.frame(), w.dim(), std::move(c));
}

PolyMap evaluate_word_leftfold(const TameWord& w) {
  PolyMap acc = PolyMap::identity(w.frame(), w.dim());
  for (const auto& g : w.gens()) acc = compose(acc, gen_to_map(g, w.frame(), w.dim()));
  return acc;
}

std::vector<RingElem> evaluate_map_at(const PolyMap& phi, const std::vector<RingElem>& point) {
  std::vector<RingElem> out = point;
  for (std::size_t i = 0; i < phi.dim(); ++i) out[i] = evaluate_at(phi[i], point);
  return out;
}

std::vector<RingElem> evaluate_word_at(const TameWord& w, const std::vector<RingElem>& point) {
  std::vector<RingElem> x = point;
  for (auto it = w.gens().rbegin(); it != w.gens().rend(); ++it) {
    if (auto e = std::get_if<Elementary>(&*it)) {
      x[e->i] = x[e->i] + evaluate_at(e->f, x);
    } else if (auto l = std::get_if<Linear>(&*it)) {
      std::vector<RingElem> y = x;
      for (std::size_t r = 0; r < w.dim(); ++r) {
        RingElem acc = w.ring()->zero();
        for (std::size_t c = 0; c < w.dim(); ++c) acc = acc + evaluate_at(l->matrix[r][c], x) * x[c];
        y[r] = acc;
      }
      x = y;
    } else {
      const auto& t = std::get<Translation>(*it);
      std::vector<RingElem> y = x;
      for (std::size_t r = 0; r < w.dim(); ++r) y[r] = x[r] + evaluate_at(t.v[r], x);
      x = y;
    }
  }
  return x;
}

TameWord inverse_word(const TameWord& w) {
  TameWord out(w.frame(), w.dim());
  for (auto it = w.gens().rbegin(); it != w.gens().rend(); ++it) out.push(inverse_gen(*it));
  std::vector<ProvenanceSpan> spans;
  std::size_t n = w.size();
  for (auto it = w.provenance().rbegin(); it != w.provenance().rend(); ++it)
    spans.push_back({n - it->end, n - it->start, it->source + " (inverse)"});
  out.set_provenance(std::move(spans));
  return out;
}

TameWord concat(const TameWord& a, const TameWord& b) {
  TameWord out = a;
  out.append(b);
  return out;
}

TameWord move_word(const TameWord& w, const FramePtr& target, std::size_t dim, const std::vector<std::size_t>& var_map) {
  if (var_map.size() != w.frame()->size()) fail(ErrorCode::FrameMismatch, "move_word: variable map length");
  for (std::size_t i = 0; i < w.dim(); ++i)
    if (var_map[i] >= dim) fail(ErrorCode::FrameMismatch, "move_word: coordinate mapped to a parameter");
  TameWord out(target, dim);
  auto rm = [&](const MultiPoly& p) { return remap(p, target, var_map); };
  for (const auto& g : w.gens()) {
    if (auto e = std::get_if<Elementary>(&g)) {
      out.push(Elementary{var_map[e->i], rm(e->f)});
    } else if (auto l = std::get_if<Linear>(&g)) {
      PolyMatrix m = identity_matrix(target, dim), inv = identity_matrix(target, dim);
      for (std::size_t r = 0; r < w.dim(); ++r)
        for (std::size_t c = 0; c < w.dim(); ++c) {
          m[var_map[r]][var_map[c]] = rm(l->matrix[r][c]);
          inv[var_map[r]][var_map[c]] = rm(l->inverse[r][c]);
        }
      out.push(Linear{std::move(m), std::move(inv)});
    } else {
      const auto& t = std::get<Translation>(g);
      std::vector<MultiPoly> v(dim, MultiPoly(target));
      for (std::size_t r = 0; r < w.dim(); ++r) v[var_map[r]] = rm(t.v[r]);
      out.push(Translation{std::move(v)});
    }
  }
  out.set_provenance(w.provenance());
  return out;
}

TameWord stabilize_word_into(const TameWord& w, const FramePtr& target, std::size_t m) {
  if (target->size() != w.frame()->size() + m) fail(ErrorCode::FrameMismatch, "stabilize_word: target frame size");
  return move_word(w, target, w.dim() + m, stabilizing_var_map(w.frame()->size(), w.dim(), m));
}

TameWord stabilize_word(const TameWord& w, std::size_t m, const std::vector<std::string>& names) {
  if (m == 0) return w;
  return stabilize_word_into(w, stabilized_frame(w.frame(), w.dim(), m, names), m);
}

TameWord map_word_coefficients(const TameWord& w, const FramePtr& target,
                               const std::function<RingElem(const RingElem&)>& fn) {
  TameWord out(target, w.dim());
  auto mc = [&](const MultiPoly& p) { return map_coefficients(p, target, fn); };
  for (const auto& g : w.gens()) {
    if (auto e = std::get_if<Elementary>(&g)) {
      out.push(Elementary{e->i, mc(e->f)});
    } else if (auto l = std::get_if<Linear>(&g)) {
      Linear nl;
      for (const auto& row : l->matrix) {
        nl.matrix.emplace_back();
        for (const auto& x : row) nl.matrix.back().push_back(mc(x));
      }
      for (const auto& row : l->inverse) {
        nl.inverse.emplace_back();
        for (const auto& x : row) nl.inverse.back().push_back(mc(x));
      }
      out.push(std::move(nl));
    } else {
      Translation t;
      for (const auto& x : std::get<Translation>(g).v) t.v.push_back(mc(x));
      out.push(std::move(t));
    }
  }
  out.set_provenance(w.provenance());
  return out;
}

TameWord base_change_word(const TameWord& w, const RingPtr& target) {
  FramePtr f = make_frame(target, w.frame()->names());
  return map_word_coefficients(w, f, [&](const RingElem& x) { return convert(x, target); });
}

TameWord substitute_params_word(const TameWord& w, const std::map<std::size_t, MultiPoly>& images) {
  TameWord out(w.frame(), w.dim());
  auto sp = [&](const MultiPoly& p) { return substitute_some(p, images); };
  for (const auto& g : w.gens()) {
    if (auto e = std::get_if<Elementary>(&g)) {
      out.push(Elementary{e->i, sp(e->f)});
    } else if (auto l = std::get_if<Linear>(&g)) {
      Linear nl;
      for (const auto& row : l->matrix) {
        nl.matrix.emplace_back();
        for (const auto& x : row) nl.matrix.back().push_back(sp(x));
      }
      for (const auto& row : l->inverse) {
        nl.inverse.emplace_back();
        for (const auto& x : row) nl.inverse.back().push_back(sp(x));
      }
      out.push(std::move(nl));
    } else {
      Translation t;
      for (const auto& x : std::get<Translation>(g).v) t.v.push_back(sp(x));
      out.push(std::move(t));
    }
  }
  out.set_provenance(w.provenance());
  return out;
}

TameWord translations_to_elementaries(const TameWord& w) {
  TameWord out(w.frame(), w.dim());
  for (const auto& g : w.gens()) {
    if (auto t = std::get_if<Translation>(&g)) {
      for (std::size_t i = 0; i < w.dim(); ++i) out.push(Elementary{i, t->v[i]});
    } else {
      out.push(g);
    }
  }
  return out;
}

bool all_elementary(const TameWord& w) {
  return std::all_of(w.gens().begin(), w.gens().end(),
                     [](const TameGen& g) { return std::holds_alternative<Elementary>(g); });
}

// ---------------------------------------------------------------------------------------------

Verdict compare_maps(const PolyMap& expected, const PolyMap& actual) {
  Verdict v;
  if (expected.dim() != actual.dim()) {
    v.message = "dimension mismatch: " + std::to_string(expected.dim()) + " vs " + std::to_string(actual.dim());
    return v;
  }
  if (!same_ring(expected.ring(), actual.ring())) {
    v.message = "ring mismatch: " + expected.ring()->str() + " vs " + actual.ring()->str();
    return v;
  }
  if (expected.frame()->size() != actual.frame()->size()) {
    v.message = "frame mismatch: " + expected.frame()->str() + " vs " + actual.frame()->str();
    return v;
  }
  FramePtr f = actual.frame();
  for (std::size_t i = 0; i < expected.dim(); ++i) {
    MultiPoly e = remap(expected[i], f, [&] {
      std::vector<std::size_t> id(f->size());
      for (std::size_t k = 0; k < id.size(); ++k) id[k] = k;
      return id;
    }());
    MultiPoly diff = actual[i] - e;
    if (diff.is_zero()) continue;
    const Exponent& mono = diff.terms().begin()->first;
    MultiPoly m = MultiPoly::monomial(f, mono, f->ring()->one());
    v.coordinate = i;
    v.monomial = m.str();
    v.message = "coordinate " + std::to_string(i + 1) + ", monomial " + v.monomial + ": expected " +
                e.coeff(mono).str() + ", got " + actual[i].coeff(mono).str();
    return v;
  }
  v.pass = true;
  v.message = "PASS";
  return v;
}

Verdict verify_certificate(const Certificate& c) {
  const TameWord& w = c.word;
  if (w.dim() != c.target.dim() + c.stabilize_by || w.frame()->size() != c.target.frame()->size() + c.stabilize_by) {
    Verdict v;
    v.message = "word dimension does not match target dimension plus stabilization";
    return v;
  }
  if (!same_ring(w.ring(), c.target.ring())) {
    Verdict v;
    v.message = "ring mismatch: " + w.ring()->str() + " vs " + c.target.ring()->str();
    return v;
  }
  PolyMap expected = stabilize_into(c.target, make_frame(w.ring(), w.frame()->names()), c.stabilize_by);
  return compare_maps(expected, evaluate_word(w));
}

}  // namespace tameforge
