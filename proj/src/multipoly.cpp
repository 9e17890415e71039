#include "tameforge/multipoly.hpp"

#include <algorithm>
#include <numeric>

#include "expr_parser.hpp"

namespace tameforge {

Frame::Frame(RingPtr ring, std::vector<std::string> names) : ring_(std::move(ring)), names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) fail(ErrorCode::FrameMismatch, "duplicate variable " + names_[i]);
    }
    if (ring_->has_variable(names_[i]))
      fail(ErrorCode::FrameMismatch, "variable " + names_[i] + " clashes with ring " + ring_->str());
  }
}

std::optional<std::size_t> Frame::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

bool Frame::equals(const Frame& o) const { return this == &o || (same_ring(ring_, o.ring_) && names_ == o.names_); }

std::string Frame::str() const {
  std::string s = ring_->str() + "[";
  for (std::size_t i = 0; i < names_.size(); ++i) s += (i ? "," : "") + names_[i];
  return s + "]";
}

FramePtr make_frame(RingPtr ring, std::vector<std::string> names) {
  return std::make_shared<const Frame>(std::move(ring), std::move(names));
}

bool same_frame(const FramePtr& a, const FramePtr& b) { return a == b || (a && b && a->equals(*b)); }

void require_same_frame(const FramePtr& a, const FramePtr& b, const char* where) {
  if (!same_frame(a, b)) {
    fail(ErrorCode::FrameMismatch,
         std::string(where) + ": " + (a ? a->str() : "<none>") + " vs " + (b ? b->str() : "<none>"));
  }
}

std::string fresh_name(const Frame& frame, const std::string& base, const std::vector<std::string>& taken) {
  auto used = [&](const std::string& n) {
    return frame.index_of(n).has_value() || frame.ring()->has_variable(n) ||
           std::find(taken.begin(), taken.end(), n) != taken.end();
  };
  if (!used(base)) return base;
  for (unsigned k = 1;; ++k) {
    std::string cand = base + std::to_string(k);
    if (!used(cand)) return cand;
  }
}

unsigned exponent_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0U); }

bool GrlexDesc::operator()(const Exponent& a, const Exponent& b) const {
  unsigned da = exponent_degree(a), db = exponent_degree(b);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// ---------------------------------------------------------------------------------------------

MultiPoly MultiPoly::constant(const FramePtr& frame, const RingElem& c) {
  MultiPoly p(frame);
  p.add_term(Exponent(frame->size(), 0), c);
  return p;
}

MultiPoly MultiPoly::constant(const FramePtr& frame, long c) { return constant(frame, frame->ring()->from_int(c)); }

MultiPoly MultiPoly::var(const FramePtr& frame, std::size_t i) {
  Exponent e(frame->size(), 0);
  e.at(i) = 1;
  return monomial(frame, std::move(e), frame->ring()->one());
}

MultiPoly MultiPoly::monomial(const FramePtr& frame, Exponent e, const RingElem& c) {
  MultiPoly p(frame);
  p.add_term(e, c);
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && exponent_degree(terms_.begin()->first) == 0);
}

RingElem MultiPoly::constant_term() const { return coeff(Exponent(nvars(), 0)); }

RingElem MultiPoly::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? ring()->zero() : it->second;
}

int MultiPoly::total_degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(exponent_degree(terms_.begin()->first));
}

unsigned MultiPoly::degree_in(std::size_t i) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
  return d;
}

bool MultiPoly::uses_var(std::size_t i) const { return degree_in(i) > 0; }

void MultiPoly::add_term(const Exponent& e, const RingElem& c) {
  if (e.size() != nvars()) fail(ErrorCode::FrameMismatch, "exponent length does not match frame");
  require_same_ring(ring(), c.ring(), "add_term");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r(frame_);
  for (const auto& [e, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, -c);
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  require_same_frame(frame_, o.frame_, "add");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  require_same_frame(frame_, o.frame_, "sub");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r = a;
  r += b;
  return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly r = a;
  r -= b;
  return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  require_same_frame(a.frame(), b.frame(), "mul");
  MultiPoly r(a.frame());
  if (a.is_zero() || b.is_zero()) return r;
  std::size_t n = a.nvars();
  Exponent e(n);
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly operator*(const RingElem& c, const MultiPoly& p) {
  MultiPoly r(p.frame());
  for (const auto& [e, pc] : p.terms()) r.add_term(e, c * pc);
  return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars() != b.nvars() || !same_ring(a.ring(), b.ring())) return false;
  if (a.terms().size() != b.terms().size()) return false;
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  for (; ia != a.terms().end(); ++ia, ++ib) {
    if (ia->first != ib->first || !(ia->second == ib->second)) return false;
  }
  return true;
}

std::string MultiPoly::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += frame_->names()[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string cs = c.str();
    std::string term;
    if (mono.empty()) {
      term = detail::is_atomic_text(cs) ? cs : "(" + cs + ")";
    } else if (cs == "1") {
      term = mono;
    } else if (cs == "-1") {
      term = "-" + mono;
    } else if (detail::is_atomic_text(cs)) {
      term = cs + "*" + mono;
    } else {
      term = "(" + cs + ")*" + mono;
    }
    if (first) {
      out = term;
      first = false;
    } else if (term[0] == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------

MultiPoly pow(const MultiPoly& p, unsigned e) {
  MultiPoly result = MultiPoly::constant(p.frame(), 1);
  MultiPoly base = p;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e) base = base * base;
  }
  return result;
}

std::optional<MultiPoly> try_divide_scalar(const MultiPoly& p, const RingElem& c) {
  MultiPoly r(p.frame());
  for (const auto& [e, pc] : p.terms()) {
    auto q = exact_divide(pc, c);
    if (!q) return std::nullopt;
    r.add_term(e, *q);
  }
  return r;
}

MultiPoly divide_scalar(const MultiPoly& p, const RingElem& c) {
  auto r = try_divide_scalar(p, c);
  if (!r) fail(ErrorCode::NotDivisible, p.str() + " is not divisible by " + c.str());
  return *r;
}

MultiPoly substitute(const MultiPoly& p, const std::vector<MultiPoly>& images) {
  if (images.size() != p.nvars()) fail(ErrorCode::FrameMismatch, "substitute: wrong number of images");
  if (images.empty()) fail(ErrorCode::FrameMismatch, "substitute: no images");
  const FramePtr& target = images.front().frame();
  for (const auto& im : images) require_same_frame(target, im.frame(), "substitute");
  require_same_ring(p.ring(), target->ring(), "substitute");

  std::size_t n = p.nvars();
  std::vector<std::vector<MultiPoly>> powers(n);
  auto power = [&](std::size_t i, unsigned e) -> const MultiPoly& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(MultiPoly::constant(target, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * images[i]);
    return cache[e];
  };

  MultiPoly result(target);
  for (const auto& [e, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(target, c);
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      term = term * power(i, e[i]);
      if (term.is_zero()) break;
    }
    result += term;
  }
  return result;
}

RingElem evaluate_at(const MultiPoly& p, const std::vector<RingElem>& point) {
  if (point.size() != p.nvars()) fail(ErrorCode::FrameMismatch, "evaluate_at: point has wrong length");
  std::vector<std::vector<RingElem>> powers(point.size());
  RingElem acc = p.ring()->zero();
  for (const auto& [e, c] : p.terms()) {
    RingElem term = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(p.ring()->one());
      while (cache.size() <= e[i]) cache.push_back(cache.back() * point[i]);
      term = term * cache[e[i]];
    }
    acc = acc + term;
  }
  return acc;
}

MultiPoly substitute_some(const MultiPoly& p, const std::map<std::size_t, MultiPoly>& images) {
  std::vector<MultiPoly> all;
  all.reserve(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    auto it = images.find(i);
    all.push_back(it == images.end() ? MultiPoly::var(p.frame(), i) : it->second);
  }
  return substitute(p, all);
}

MultiPoly partial_derivative(const MultiPoly& p, std::size_t i) {
  MultiPoly r(p.frame());
  for (const auto& [e, c] : p.terms()) {
    if (e[i] == 0) continue;
    Exponent d = e;
    --d[i];
    r.add_term(d, p.ring()->from_int(e[i]) * c);
  }
  return r;
}

MultiPoly antiderivative(const MultiPoly& p, std::size_t i) {
  MultiPoly r(p.frame());
  for (const auto& [e, c] : p.terms()) {
    Exponent d = e;
    ++d[i];
    auto q = exact_divide(c, p.ring()->from_int(d[i]));
    if (!q) fail(ErrorCode::NotQAlgebra, "cannot divide by " + std::to_string(d[i]) + " in " + p.ring()->str());
    r.add_term(d, *q);
  }
  return r;
}

std::map<unsigned, MultiPoly> homogeneous_components(const MultiPoly& p, const std::vector<bool>& mask) {
  std::map<unsigned, MultiPoly> out;
  for (const auto& [e, c] : p.terms()) {
    unsigned d = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (mask.empty() || mask[i]) d += e[i];
    auto it = out.try_emplace(d, p.frame()).first;
    it->second.add_term(e, c);
  }
  return out;
}

std::map<unsigned, MultiPoly> collect(const MultiPoly& p, std::size_t i) {
  std::map<unsigned, MultiPoly> out;
  for (const auto& [e, c] : p.terms()) {
    Exponent rest = e;
    rest[i] = 0;
    auto it = out.try_emplace(e[i], p.frame()).first;
    it->second.add_term(rest, c);
  }
  return out;
}

MultiPoly remap(const MultiPoly& p, const FramePtr& target, const std::vector<std::size_t>& var_map) {
  if (var_map.size() != p.nvars()) fail(ErrorCode::FrameMismatch, "remap: variable map has wrong length");
  require_same_ring(p.ring(), target->ring(), "remap");
  MultiPoly r(target);
  Exponent e2(target->size());
  for (const auto& [e, c] : p.terms()) {
    std::fill(e2.begin(), e2.end(), 0);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      if (var_map[j] >= target->size()) fail(ErrorCode::FrameMismatch, "remap: index out of range");
      e2[var_map[j]] += e[j];
    }
    r.add_term(e2, c);
  }
  return r;
}

MultiPoly map_coefficients(const MultiPoly& p, const FramePtr& target,
                           const std::function<RingElem(const RingElem&)>& fn) {
  if (target->size() != p.nvars()) fail(ErrorCode::FrameMismatch, "map_coefficients: frame size differs");
  MultiPoly r(target);
  for (const auto& [e, c] : p.terms()) r.add_term(e, fn(c));
  return r;
}

namespace {

struct PolyOps {
  FramePtr frame;
  MultiPoly integer(const mpz_class& v) { return MultiPoly::constant(frame, frame->ring()->from_mpz(v)); }
  MultiPoly ident(const std::string& name) {
    if (auto i = frame->index_of(name)) return MultiPoly::var(frame, *i);
    if (frame->ring()->has_variable(name)) return MultiPoly::constant(frame, frame->ring()->variable(name));
    fail(ErrorCode::ParseError, "unknown symbol '" + name + "' in frame " + frame->str());
  }
  MultiPoly add(const MultiPoly& a, const MultiPoly& b) { return a + b; }
  MultiPoly sub(const MultiPoly& a, const MultiPoly& b) { return a - b; }
  MultiPoly mul(const MultiPoly& a, const MultiPoly& b) { return a * b; }
  MultiPoly neg(const MultiPoly& a) { return -a; }
  MultiPoly pow(const MultiPoly& a, unsigned e) { return tameforge::pow(a, e); }
  MultiPoly div(const MultiPoly& a, const MultiPoly& b) {
    if (!b.is_constant() || b.is_zero()) fail(ErrorCode::ParseError, "division by non-constant " + b.str());
    return divide_scalar(a, b.constant_term());
  }
};

}  // namespace

MultiPoly parse_poly(const std::string& text, const FramePtr& frame) {
  PolyOps ops{frame};
  return detail::ExprParser<MultiPoly, PolyOps>(text, ops).parse();
}

std::vector<std::pair<mpq_class, mpq_class>> vandermonde_decompose(unsigned n, unsigned m) {
  unsigned k = n + m;
  if (k == 0) fail(ErrorCode::SpecMismatch, "vandermonde_decompose needs n + m >= 1");
  std::size_t size = k + 1;
  // Row i: sum_j c_j * j^i = [i == m] / binom(k, m). Solve with RHS scaled by binom(k, m).
  std::vector<std::vector<mpz_class>> a(size, std::vector<mpz_class>(size + 1));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      mpz_class v;
      mpz_ui_pow_ui(v.get_mpz_t(), j, i);
      a[i][j] = v;
    }
    a[i][size] = (i == m) ? 1 : 0;
  }
  // Bareiss fraction-free elimination to upper triangular form.
  mpz_class prev = 1;
  for (std::size_t p = 0; p < size; ++p) {
    if (a[p][p] == 0) {
      std::size_t r = p + 1;
      while (r < size && a[r][p] == 0) ++r;
      std::swap(a[p], a[r]);
    }
    for (std::size_t i = p + 1; i < size; ++i) {
      for (std::size_t j = p + 1; j <= size; ++j) {
        a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
      }
      a[i][p] = 0;
    }
    prev = a[p][p];
  }
  std::vector<mpq_class> c(size);
  for (std::size_t i = size; i-- > 0;) {
    mpq_class s = a[i][size];
    for (std::size_t j = i + 1; j < size; ++j) s -= a[i][j] * c[j];
    c[i] = s / mpq_class(a[i][i]);
    c[i].canonicalize();
  }
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), k, m);
  std::vector<std::pair<mpq_class, mpq_class>> out;
  for (std::size_t j = 0; j < size; ++j) {
    mpq_class w = c[j] / mpq_class(binom);
    w.canonicalize();
    if (w != 0) out.emplace_back(mpq_class(static_cast<long>(j)), w);
  }
  return out;
}

}  // namespace tameforge
