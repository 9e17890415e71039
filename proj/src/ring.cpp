#include "tameforge/ring.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>

#include "expr_parser.hpp"

namespace tameforge {

std::atomic<unsigned> RingConfig::annihilator_bound{64};
std::atomic<unsigned> RingConfig::power_search_bound{64};

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::Undecidable: return "Undecidable";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::NotADomain: return "NotADomain";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NotQAlgebra: return "NotQAlgebra";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOriginPreserving: return "NotOriginPreserving";
    case ErrorCode::UnsupportedHom: return "UnsupportedHom";
    case ErrorCode::IdealSquareNonzero: return "IdealSquareNonzero";
    case ErrorCode::NotSquareZero: return "NotSquareZero";
    case ErrorCode::JacobianNotOne: return "JacobianNotOne";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::OrderBoundViolated: return "OrderBoundViolated";
    case ErrorCode::NInsufficient: return "NInsufficient";
    case ErrorCode::NotLocalOrField: return "NotLocalOrField";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NotAnAutomorphism: return "NotAnAutomorphism";
    case ErrorCode::BaseFactorFailed: return "BaseFactorFailed";
    case ErrorCode::NotArtinianSupported: return "NotArtinianSupported";
    case ErrorCode::LiftMismatch: return "LiftMismatch";
    case ErrorCode::DepthCapExceeded: return "DepthCapExceeded";
    case ErrorCode::ProductNotIdentity: return "ProductNotIdentity";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IdentityFailed: return "IdentityFailed";
  }
  return "Unknown";
}

namespace {

using Vec = std::vector<RingElem>;

unsigned bit_length(const mpz_class& n) {
  if (n == 0) return 0;
  return static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
}

mpz_class mod_reduce(const mpz_class& v, const mpz_class& n) {
  mpz_class r = v % n;
  if (r < 0) r += n;
  return r;
}

void trim(Vec& v) {
  while (!v.empty() && v.back().is_zero()) v.pop_back();
}

Vec vadd(const Vec& a, const Vec& b) {
  Vec r = a.size() >= b.size() ? a : b;
  std::size_t common = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < common; ++i) r[i] = a[i] + b[i];
  trim(r);
  return r;
}

Vec vneg(const Vec& a) {
  Vec r;
  r.reserve(a.size());
  for (const auto& c : a) r.push_back(-c);
  return r;
}

Vec vsub(const Vec& a, const Vec& b) { return vadd(a, vneg(b)); }

Vec vmul(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty()) return {};
  RingPtr k = a.front().ring();
  Vec r(a.size() + b.size() - 1, k->zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j].is_zero()) continue;
      r[i + j] += a[i] * b[j];
    }
  }
  trim(r);
  return r;
}

Vec vscale(const Vec& a, const RingElem& c) {
  Vec r;
  r.reserve(a.size());
  for (const auto& x : a) r.push_back(x * c);
  trim(r);
  return r;
}

/// Reduces a coefficient list modulo a monic polynomial.
Vec vreduce(Vec v, const Vec& mod) {
  std::size_t d = mod.size() - 1;
  trim(v);
  while (v.size() > d) {
    RingElem lead = v.back();
    std::size_t shift = v.size() - 1 - d;
    for (std::size_t j = 0; j < d; ++j) v[shift + j] -= lead * mod[j];
    v.pop_back();
    trim(v);
  }
  return v;
}

/// Long division over the coefficient ring; nullopt when some leading division fails.
std::optional<std::pair<Vec, Vec>> vdivmod(const Vec& a, const Vec& b) {
  if (b.empty()) return std::nullopt;
  Vec r = a;
  trim(r);
  if (r.size() < b.size()) return std::make_pair(Vec{}, r);
  RingPtr k = b.front().ring();
  Vec q(r.size() - b.size() + 1, k->zero());
  while (!r.empty() && r.size() >= b.size()) {
    auto c = exact_divide(r.back(), b.back());
    if (!c) return std::nullopt;
    std::size_t shift = r.size() - b.size();
    q[shift] = *c;
    std::size_t before = r.size();
    for (std::size_t j = 0; j < b.size(); ++j) r[shift + j] -= *c * b[j];
    trim(r);
    if (r.size() >= before) return std::nullopt;
  }
  trim(q);
  return std::make_pair(q, r);
}

std::string power_text(const std::string& base, unsigned e) {
  bool simple = std::all_of(base.begin(), base.end(),
                            [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
  std::string b = simple ? base : "(" + base + ")";
  return e == 1 ? b : b + "^" + std::to_string(e);
}

/// Prints a univariate coefficient list in the variable `var`.
std::string vec_text(const Vec& v, const std::string& var) {
  if (v.empty()) return "0";
  std::string out;
  bool first = true;
  for (std::size_t idx = v.size(); idx-- > 0;) {
    const RingElem& c = v[idx];
    if (c.is_zero()) continue;
    std::string cs = c.str();
    std::string term;
    if (idx == 0) {
      term = detail::is_atomic_text(cs) ? cs : "(" + cs + ")";
    } else {
      std::string mono = power_text(var, static_cast<unsigned>(idx));
      if (cs == "1") {
        term = mono;
      } else if (cs == "-1") {
        term = "-" + mono;
      } else if (detail::is_atomic_text(cs)) {
        term = cs + "*" + mono;
      } else {
        term = "(" + cs + ")*" + mono;
      }
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

RingElem make_modular(const RingPtr& r, const mpz_class& v) { return RingElem(r, mod_reduce(v, r->modulus())); }

RingElem make_poly(const RingPtr& r, Vec v) {
  trim(v);
  return RingElem(r, std::move(v));
}

RingElem make_quot(const RingPtr& r, Vec v) { return RingElem(r, vreduce(std::move(v), r->quotient_modulus())); }

RingElem make_loc(const RingPtr& r, RingElem num, unsigned k) {
  if (num.is_zero()) return RingElem(r, RingElem::Fraction{{num}, 0});
  if (r->base()->is_domain()) {
    while (k > 0) {
      auto q = exact_divide(num, r->loc_t());
      if (!q) break;
      num = *q;
      --k;
    }
  }
  return RingElem(r, RingElem::Fraction{{std::move(num)}, k});
}

/// Upper bound on the N needed to witness t^N x = 0, when the base makes it finite.
std::optional<unsigned> annihilator_chain_bound(const Ring& base) {
  switch (base.kind()) {
    case RingKind::Modular: return bit_length(base.modulus()) + 1;
    case RingKind::Quotient: {
      const Ring& k = *base.base()->base();
      if (k.is_field()) return static_cast<unsigned>(base.quotient_degree()) + 1;
      if (k.kind() == RingKind::Modular)
        return static_cast<unsigned>(base.quotient_degree()) * (bit_length(k.modulus()) + 1);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

/// True when t^N * x = 0 for some N (localization of a non-domain).
bool annihilated_by_power(const RingElem& x, const RingElem& t, const Ring& base) {
  if (x.is_zero()) return true;
  unsigned bound = RingConfig::annihilator_bound.load();
  RingElem cur = x;
  for (unsigned n = 1; n <= bound; ++n) {
    cur = cur * t;
    if (cur.is_zero()) return true;
  }
  auto chain = annihilator_chain_bound(base);
  if (chain && *chain <= bound) return false;
  fail(ErrorCode::Undecidable, "annihilator search exhausted bound " + std::to_string(bound));
}

}  // namespace

RingElem::RingElem(RingPtr ring, Payload payload) : ring_(std::move(ring)), payload_(std::move(payload)) {}

bool RingElem::is_zero() const {
  switch (ring_->kind()) {
    case RingKind::Rationals: return q() == 0;
    case RingKind::Integers:
    case RingKind::Modular: return z() == 0;
    case RingKind::Poly:
    case RingKind::Quotient: return coeffs().empty();
    case RingKind::Localization: {
      const RingElem& n = numerator();
      if (n.is_zero()) return true;
      if (ring_->base()->is_domain()) return false;
      return annihilated_by_power(n, ring_->loc_t(), *ring_->base());
    }
  }
  return false;
}

bool RingElem::is_one() const { return *this == ring_->one(); }

std::string RingElem::str() const {
  switch (ring_->kind()) {
    case RingKind::Rationals: return q().get_str();
    case RingKind::Integers:
    case RingKind::Modular: return z().get_str();
    case RingKind::Poly:
    case RingKind::Quotient: return vec_text(coeffs(), ring_->var());
    case RingKind::Localization: {
      unsigned k = denominator_exponent();
      std::string ns = numerator().str();
      if (k == 0) return ns;
      std::string den = power_text(ring_->loc_t().str(), k);
      if (!detail::is_atomic_text(ns)) ns = "(" + ns + ")";
      return ns + "/" + den;
    }
  }
  return "?";
}

RingElem RingElem::operator-() const {
  switch (ring_->kind()) {
    case RingKind::Rationals: return RingElem(ring_, mpq_class(-q()));
    case RingKind::Integers: return RingElem(ring_, mpz_class(-z()));
    case RingKind::Modular: return make_modular(ring_, -z());
    case RingKind::Poly:
    case RingKind::Quotient: return RingElem(ring_, vneg(coeffs()));
    case RingKind::Localization:
      return RingElem(ring_, Fraction{{-numerator()}, denominator_exponent()});
  }
  return *this;
}

RingElem& RingElem::operator+=(const RingElem& o) { return *this = *this + o; }
RingElem& RingElem::operator-=(const RingElem& o) { return *this = *this - o; }
RingElem& RingElem::operator*=(const RingElem& o) { return *this = *this * o; }

RingElem operator+(const RingElem& a, const RingElem& b) {
  require_same_ring(a.ring(), b.ring(), "add");
  const RingPtr& r = a.ring();
  switch (r->kind()) {
    case RingKind::Rationals: return RingElem(r, mpq_class(a.q() + b.q()));
    case RingKind::Integers: return RingElem(r, mpz_class(a.z() + b.z()));
    case RingKind::Modular: return make_modular(r, a.z() + b.z());
    case RingKind::Poly:
    case RingKind::Quotient: return RingElem(r, vadd(a.coeffs(), b.coeffs()));
    case RingKind::Localization: {
      unsigned ka = a.denominator_exponent(), kb = b.denominator_exponent();
      const RingElem& t = r->loc_t();
      if (ka == kb) return make_loc(r, a.numerator() + b.numerator(), ka);
      if (ka < kb) return make_loc(r, a.numerator() * pow(t, kb - ka) + b.numerator(), kb);
      return make_loc(r, a.numerator() + b.numerator() * pow(t, ka - kb), ka);
    }
  }
  return a;
}

RingElem operator-(const RingElem& a, const RingElem& b) { return a + (-b); }

RingElem operator*(const RingElem& a, const RingElem& b) {
  require_same_ring(a.ring(), b.ring(), "mul");
  const RingPtr& r = a.ring();
  switch (r->kind()) {
    case RingKind::Rationals: return RingElem(r, mpq_class(a.q() * b.q()));
    case RingKind::Integers: return RingElem(r, mpz_class(a.z() * b.z()));
    case RingKind::Modular: return make_modular(r, a.z() * b.z());
    case RingKind::Poly: return RingElem(r, vmul(a.coeffs(), b.coeffs()));
    case RingKind::Quotient: return make_quot(r, vmul(a.coeffs(), b.coeffs()));
    case RingKind::Localization:
      return make_loc(r, a.numerator() * b.numerator(), a.denominator_exponent() + b.denominator_exponent());
  }
  return a;
}

bool operator==(const RingElem& a, const RingElem& b) {
  require_same_ring(a.ring(), b.ring(), "compare");
  const RingPtr& r = a.ring();
  switch (r->kind()) {
    case RingKind::Rationals: return a.q() == b.q();
    case RingKind::Integers:
    case RingKind::Modular: return a.z() == b.z();
    case RingKind::Poly:
    case RingKind::Quotient: {
      const Vec& x = a.coeffs();
      const Vec& y = b.coeffs();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] == y[i])) return false;
      return true;
    }
    case RingKind::Localization:
      if (r->base()->is_domain()) {
        return a.denominator_exponent() == b.denominator_exponent() && a.numerator() == b.numerator();
      }
      return (a - b).is_zero();
  }
  return false;
}

// ---------------------------------------------------------------------------------------------
// Ring construction and queries

namespace {

/// Structurally equal rings share one instance, so ring checks are usually pointer compares.
RingPtr intern(std::shared_ptr<Ring> r) {
  static std::mutex mu;
  static std::map<std::string, std::weak_ptr<const Ring>> table;
  std::string key = r->str();
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(key);
  if (it != table.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  table[key] = r;
  return r;
}

}  // namespace

RingPtr Ring::rationals() {
  static RingPtr q = std::make_shared<Ring>(RingKind::Rationals);
  return q;
}

RingPtr Ring::integers() {
  static RingPtr z = std::make_shared<Ring>(RingKind::Integers);
  return z;
}

RingPtr Ring::modular(const mpz_class& n) {
  if (n <= 1) fail(ErrorCode::SpecMismatch, "modulus must exceed 1, got " + n.get_str());
  auto r = std::make_shared<Ring>(RingKind::Modular);
  r->modulus_ = n;
  return intern(r);
}

RingPtr Ring::poly(const RingPtr& base, const std::string& var) {
  if (base->has_variable(var)) fail(ErrorCode::SpecMismatch, "variable " + var + " already in ring tower");
  auto r = std::make_shared<Ring>(RingKind::Poly);
  r->base_ = base;
  r->var_ = var;
  return intern(r);
}

RingPtr Ring::quotient(const RingPtr& poly_ring, const RingElem& modulus) {
  if (poly_ring->kind() != RingKind::Poly) fail(ErrorCode::SpecMismatch, "quotient requires a polynomial ring");
  require_same_ring(poly_ring, modulus.ring(), "quotient modulus");
  Vec m = modulus.coeffs();
  if (m.size() < 2) fail(ErrorCode::SpecMismatch, "quotient modulus must have positive degree");
  auto inv = unit_inverse(m.back());
  if (!inv) fail(ErrorCode::SpecMismatch, "quotient modulus leading coefficient is not a unit");
  m = vscale(m, *inv);
  auto r = std::make_shared<Ring>(RingKind::Quotient);
  r->base_ = poly_ring;
  r->var_ = poly_ring->var();
  r->qmod_ = std::move(m);
  return intern(r);
}

RingPtr Ring::localization(const RingPtr& base, const RingElem& t) {
  require_same_ring(base, t.ring(), "localization element");
  if (t.is_zero()) fail(ErrorCode::SpecMismatch, "cannot localize at zero");
  if (base->kind() == RingKind::Localization && base->loc_t() == base->embed(t))
    fail(ErrorCode::SpecMismatch, "nested localization at the same element");
  auto r = std::make_shared<Ring>(RingKind::Localization);
  r->base_ = base;
  r->t_ = {t};
  return intern(r);
}

bool Ring::quotient_is_monomial() const {
  if (kind_ != RingKind::Quotient) return false;
  for (std::size_t i = 0; i + 1 < qmod_.size(); ++i)
    if (!qmod_[i].is_zero()) return false;
  return true;
}

bool Ring::q_algebra() const {
  switch (kind_) {
    case RingKind::Rationals: return true;
    case RingKind::Integers:
    case RingKind::Modular: return false;
    case RingKind::Poly:
    case RingKind::Localization: return base_->q_algebra();
    case RingKind::Quotient: return base_->q_algebra();
  }
  return false;
}

bool Ring::is_domain() const {
  switch (kind_) {
    case RingKind::Rationals:
    case RingKind::Integers: return true;
    case RingKind::Modular: return mpz_probab_prime_p(modulus_.get_mpz_t(), 30) > 0;
    case RingKind::Poly:
    case RingKind::Localization: return base_->is_domain();
    case RingKind::Quotient: return quotient_degree() == 1 && base_->base()->is_domain();
  }
  return false;
}

bool Ring::is_field() const {
  switch (kind_) {
    case RingKind::Rationals: return true;
    case RingKind::Integers: return false;
    case RingKind::Modular: return is_domain();
    case RingKind::Poly: return false;
    case RingKind::Quotient: return quotient_degree() == 1 && base_->base()->is_field();
    case RingKind::Localization: return base_->is_field();
  }
  return false;
}

bool Ring::is_local() const {
  if (is_field()) return true;
  switch (kind_) {
    case RingKind::Modular: {
      mpz_class n = modulus_;
      mpz_class p = 2;
      while (p * p <= n && n % p != 0) ++p;
      if (n % p != 0) return true;
      while (n % p == 0) n /= p;
      return n == 1;
    }
    case RingKind::Quotient:
      return quotient_is_monomial() && base_->base()->is_local();
    default: return false;
  }
}

std::optional<unsigned> Ring::dimension_hint() const {
  switch (kind_) {
    case RingKind::Rationals:
    case RingKind::Modular: return 0u;
    case RingKind::Integers: return 1u;
    case RingKind::Poly: {
      auto b = base_->dimension_hint();
      if (!b) return std::nullopt;
      return *b + 1;
    }
    case RingKind::Quotient: {
      auto b = base_->dimension_hint();
      if (!b || *b == 0) return std::nullopt;
      return *b - 1;
    }
    case RingKind::Localization: return base_->dimension_hint();
  }
  return std::nullopt;
}

RingElem Ring::zero() const { return from_int(0); }
RingElem Ring::one() const { return from_int(1); }
RingElem Ring::from_int(long v) const { return from_mpz(mpz_class(v)); }

RingElem Ring::from_mpz(const mpz_class& v) const {
  switch (kind_) {
    case RingKind::Rationals: return RingElem(self(), mpq_class(v));
    case RingKind::Integers: return RingElem(self(), v);
    case RingKind::Modular: return make_modular(self(), v);
    case RingKind::Poly:
    case RingKind::Quotient:
    case RingKind::Localization: return embed(base_->from_mpz(v));
  }
  return {};
}

RingElem Ring::from_mpq(const mpq_class& v) const {
  if (kind_ == RingKind::Rationals) return RingElem(self(), v);
  RingElem num = from_mpz(v.get_num());
  auto q = exact_divide(num, from_mpz(v.get_den()));
  if (!q) fail(ErrorCode::NotQAlgebra, "cannot represent " + v.get_str() + " in " + str());
  return *q;
}

RingElem Ring::embed(const RingElem& c) const {
  require_same_ring(base_, c.ring(), "embed");
  switch (kind_) {
    case RingKind::Poly: return make_poly(self(), Vec{c});
    case RingKind::Quotient: return make_quot(self(), c.coeffs());
    case RingKind::Localization: return make_loc(self(), c, 0);
    default: fail(ErrorCode::SpecMismatch, "ring " + str() + " has no base to embed from");
  }
}

bool Ring::has_variable(const std::string& name) const {
  switch (kind_) {
    case RingKind::Poly: return var_ == name || base_->has_variable(name);
    case RingKind::Quotient:
    case RingKind::Localization: return base_->has_variable(name);
    default: return false;
  }
}

RingElem Ring::variable(const std::string& name) const {
  switch (kind_) {
    case RingKind::Poly:
      if (var_ == name) return make_poly(self(), Vec{base_->zero(), base_->one()});
      return embed(base_->variable(name));
    case RingKind::Quotient:
    case RingKind::Localization: return embed(base_->variable(name));
    default: fail(ErrorCode::ParseError, "unknown symbol '" + name + "' in ring " + str());
  }
}

std::string Ring::str() const {
  switch (kind_) {
    case RingKind::Rationals: return "Q";
    case RingKind::Integers: return "Z";
    case RingKind::Modular: return "Z/" + modulus_.get_str();
    case RingKind::Poly: return base_->str() + "[" + var_ + "]";
    case RingKind::Quotient: return base_->str() + "/(" + RingElem(base_, qmod_).str() + ")";
    case RingKind::Localization: return "loc(" + base_->str() + ", " + loc_t().str() + ")";
  }
  return "?";
}

bool Ring::equals(const Ring& o) const {
  if (this == &o) return true;
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case RingKind::Rationals:
    case RingKind::Integers: return true;
    case RingKind::Modular: return modulus_ == o.modulus_;
    case RingKind::Poly: return var_ == o.var_ && base_->equals(*o.base_);
    case RingKind::Quotient: {
      if (!base_->equals(*o.base_) || qmod_.size() != o.qmod_.size()) return false;
      for (std::size_t i = 0; i < qmod_.size(); ++i)
        if (qmod_[i].str() != o.qmod_[i].str()) return false;
      return true;
    }
    case RingKind::Localization: return base_->equals(*o.base_) && loc_t().str() == o.loc_t().str();
  }
  return false;
}

bool same_ring(const RingPtr& a, const RingPtr& b) { return a == b || (a && b && a->equals(*b)); }

void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where) {
  if (!same_ring(a, b)) {
    fail(ErrorCode::SpecMismatch,
         std::string(where) + ": " + (a ? a->str() : "<none>") + " vs " + (b ? b->str() : "<none>"));
  }
}

// ---------------------------------------------------------------------------------------------
// Divisibility, units, nilpotents

RingElem pow(const RingElem& a, unsigned e) {
  RingElem result = a.ring()->one();
  RingElem base = a;
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e) base = base * base;
  }
  return result;
}

std::optional<RingElem> exact_divide(const RingElem& a, const RingElem& b) {
  require_same_ring(a.ring(), b.ring(), "divide");
  const RingPtr& r = a.ring();
  if (a.is_zero()) return r->zero();
  switch (r->kind()) {
    case RingKind::Rationals:
      if (b.q() == 0) return std::nullopt;
      return RingElem(r, mpq_class(a.q() / b.q()));
    case RingKind::Integers:
      if (b.z() == 0 || a.z() % b.z() != 0) return std::nullopt;
      return RingElem(r, mpz_class(a.z() / b.z()));
    case RingKind::Modular: {
      const mpz_class& n = r->modulus();
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), b.z().get_mpz_t(), n.get_mpz_t());
      if (a.z() % g != 0) return std::nullopt;
      mpz_class n2 = n / g, b2 = b.z() / g, inv;
      if (n2 == 1) return r->zero();
      mpz_invert(inv.get_mpz_t(), b2.get_mpz_t(), n2.get_mpz_t());
      return make_modular(r, (a.z() / g) * inv % n2);
    }
    case RingKind::Poly: {
      auto qr = vdivmod(a.coeffs(), b.coeffs());
      if (!qr || !qr->second.empty()) return std::nullopt;
      return make_poly(r, qr->first);
    }
    case RingKind::Quotient: {
      if (b.is_zero()) return std::nullopt;
      if (auto inv = unit_inverse(b)) return a * *inv;
      const Vec& bc = b.coeffs();
      const Vec& ac = a.coeffs();
      if (r->quotient_is_monomial()) {
        std::size_t v = 0;
        while (bc[v].is_zero()) ++v;
        bool low_zero = true;
        for (std::size_t i = 0; i < v && i < ac.size(); ++i) low_zero = low_zero && ac[i].is_zero();
        Vec u(bc.begin() + static_cast<long>(v), bc.end());
        if (low_zero && is_unit(u.front())) {
          Vec shifted(ac.begin() + static_cast<long>(std::min(v, ac.size())), ac.end());
          RingElem q = make_quot(r, shifted) * *unit_inverse(make_quot(r, u));
          if (q * b == a) return q;
        }
      }
      auto qr = vdivmod(ac, bc);
      if (qr && qr->second.empty()) {
        RingElem q = make_quot(r, qr->first);
        if (q * b == a) return q;
      }
      return std::nullopt;
    }
    case RingKind::Localization: {
      if (b.is_zero()) return std::nullopt;
      if (auto inv = unit_inverse(b)) return a * *inv;
      auto q = exact_divide(a.numerator(), b.numerator());
      if (!q) return std::nullopt;
      return make_loc(r, *q * pow(r->loc_t(), b.denominator_exponent()), a.denominator_exponent());
    }
  }
  return std::nullopt;
}

namespace {

/// Inverse of c0 + n where c0 is a unit and n is nilpotent (geometric series).
RingElem unipotent_inverse(const RingElem& a, const RingElem& c0_inv, const RingElem& c0) {
  const RingPtr& r = a.ring();
  RingElem n = (a - c0) * c0_inv;  // a = c0 (1 + n)
  RingElem sum = r->one();
  RingElem term = r->one();
  unsigned bound = 4 * RingConfig::power_search_bound.load();
  for (unsigned i = 0; i < bound; ++i) {
    term = term * (-n);
    if (term.is_zero()) return sum * c0_inv;
    sum = sum + term;
  }
  fail(ErrorCode::BoundExceeded, "geometric series for inverse did not terminate");
}

/// Extended Euclid over a field coefficient ring; returns s with s*a = 1 mod m, if gcd is 1.
std::optional<Vec> field_mod_inverse(const Vec& a, const Vec& m) {
  RingPtr k = m.front().ring();
  Vec r0 = m, r1 = a, s0{}, s1{k->one()};
  trim(r1);
  while (!r1.empty()) {
    auto qr = vdivmod(r0, r1);
    if (!qr) return std::nullopt;
    Vec s2 = vsub(s0, vmul(qr->first, s1));
    r0 = r1;
    r1 = qr->second;
    s0 = s1;
    s1 = s2;
  }
  if (r0.size() != 1) return std::nullopt;
  auto inv = unit_inverse(r0.front());
  return vscale(s0, *inv);
}

}  // namespace

std::optional<RingElem> unit_inverse(const RingElem& a) {
  const RingPtr& r = a.ring();
  if (a.is_zero()) return std::nullopt;
  switch (r->kind()) {
    case RingKind::Rationals: return RingElem(r, mpq_class(1 / a.q()));
    case RingKind::Integers:
      if (a.z() == 1 || a.z() == -1) return a;
      return std::nullopt;
    case RingKind::Modular: {
      mpz_class inv;
      if (mpz_invert(inv.get_mpz_t(), a.z().get_mpz_t(), r->modulus().get_mpz_t()) == 0) return std::nullopt;
      return make_modular(r, inv);
    }
    case RingKind::Poly: {
      const Vec& c = a.coeffs();
      auto c0_inv = unit_inverse(c.front());
      if (!c0_inv) return std::nullopt;
      if (c.size() == 1) return make_poly(r, Vec{*c0_inv});
      if (r->base()->is_domain()) return std::nullopt;
      for (std::size_t i = 1; i < c.size(); ++i)
        if (!nilpotency_index(c[i])) return std::nullopt;
      return unipotent_inverse(a, r->embed(*c0_inv), r->embed(c.front()));
    }
    case RingKind::Quotient: {
      const Vec& c = a.coeffs();
      if (r->quotient_is_monomial()) {
        auto c0_inv = unit_inverse(c.front());
        if (!c0_inv) return std::nullopt;
        RingElem c0 = make_quot(r, Vec{c.front()});
        return unipotent_inverse(a, make_quot(r, Vec{*c0_inv}), c0);
      }
      if (r->base()->base()->is_field()) {
        auto s = field_mod_inverse(c, r->quotient_modulus());
        if (!s) return std::nullopt;
        return make_quot(r, *s);
      }
      fail(ErrorCode::Undecidable, "unit test in " + r->str());
    }
    case RingKind::Localization: {
      const RingElem& num = a.numerator();
      const RingPtr& base = r->base();
      const RingElem& t = r->loc_t();
      std::optional<unsigned> conclusive;
      switch (base->kind()) {
        case RingKind::Rationals: conclusive = 0; break;
        case RingKind::Integers: conclusive = bit_length(num.z()) + 1; break;
        case RingKind::Modular:
        case RingKind::Quotient: conclusive = annihilator_chain_bound(*base); break;
        case RingKind::Poly:
          if (base->base()->is_field() || (base->is_domain() && t == base->variable(base->var())))
            conclusive = static_cast<unsigned>(num.coeffs().size());
          break;
        default: break;
      }
      unsigned bound = RingConfig::power_search_bound.load();
      unsigned limit = conclusive ? std::min(*conclusive, bound) : bound;
      RingElem tp = base->one();
      for (unsigned n = 0; n <= limit; ++n) {
        if (auto q = exact_divide(tp, num)) return make_loc(r, *q * pow(t, a.denominator_exponent()), n);
        tp = tp * t;
      }
      if (conclusive && *conclusive <= bound) return std::nullopt;
      fail(ErrorCode::Undecidable, "unit search in " + r->str() + " exhausted its bound");
    }
  }
  return std::nullopt;
}

std::optional<unsigned> nilpotency_index(const RingElem& a) {
  const RingPtr& r = a.ring();
  if (a.is_zero()) return 1u;
  auto search = [&](unsigned limit, bool conclusive) -> std::optional<unsigned> {
    RingElem p = a;
    for (unsigned d = 2; d <= limit; ++d) {
      p = p * a;
      if (p.is_zero()) return d;
    }
    if (conclusive) return std::nullopt;
    fail(ErrorCode::BoundExceeded, "nilpotency search for " + a.str() + " exhausted its bound");
  };
  if (r->is_domain()) return std::nullopt;
  switch (r->kind()) {
    case RingKind::Modular: return search(bit_length(r->modulus()) + 1, true);
    case RingKind::Quotient:
      if (r->quotient_is_monomial()) {
        unsigned deg = static_cast<unsigned>(r->quotient_degree());
        auto i0 = nilpotency_index(a.coeffs().front());
        if (!i0) return std::nullopt;
        if (r->base()->base()->is_domain()) {
          std::size_t v = 0;
          while (a.coeffs()[v].is_zero()) ++v;
          return static_cast<unsigned>((deg + v - 1) / v);
        }
        return search(*i0 + deg, true);
      }
      break;
    case RingKind::Poly:
      for (const auto& c : a.coeffs())
        if (!nilpotency_index(c)) return std::nullopt;
      break;
    default: break;
  }
  return search(RingConfig::power_search_bound.load(), false);
}

unsigned t_order(const RingElem& a) {
  const RingPtr& r = a.ring();
  if (r->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "t_order needs a localization");
  if (!r->base()->is_domain()) fail(ErrorCode::NotADomain, "t_order over " + r->str());
  return a.is_zero() ? 0 : a.denominator_exponent();
}

RingElem delocalize(const RingElem& a) {
  const RingPtr& r = a.ring();
  if (r->kind() != RingKind::Localization) fail(ErrorCode::SpecMismatch, "delocalize needs a localization");
  if (a.is_zero()) return r->base()->zero();
  if (a.denominator_exponent() == 0) return a.numerator();
  auto q = exact_divide(a.numerator(), pow(r->loc_t(), a.denominator_exponent()));
  if (!q) fail(ErrorCode::NotDivisible, "coefficient " + a.str() + " is not integral");
  return *q;
}

// ---------------------------------------------------------------------------------------------
// Homomorphisms

namespace {

std::optional<RingElem> try_convert(const RingElem& a, const RingPtr& target);

std::optional<RingElem> try_convert_source(const RingElem& a, const RingPtr& target) {
  const RingPtr& s = a.ring();
  switch (s->kind()) {
    case RingKind::Rationals:
      try {
        return target->from_mpq(a.q());
      } catch (const TameError&) {
        return std::nullopt;
      }
    case RingKind::Integers: return target->from_mpz(a.z());
    case RingKind::Modular:
      if (target->kind() == RingKind::Modular) {
        if (s->modulus() % target->modulus() == 0 || target->modulus() % s->modulus() == 0)
          return make_modular(target, a.z());
        return std::nullopt;
      }
      if (target->kind() == RingKind::Integers) return RingElem(target, a.z());
      return std::nullopt;
    case RingKind::Poly: {
      if (target->kind() == RingKind::Poly && target->var() == s->var()) {
        Vec out;
        for (const auto& c : a.coeffs()) {
          auto cc = try_convert(c, target->base());
          if (!cc) return std::nullopt;
          out.push_back(*cc);
        }
        return make_poly(target, out);
      }
      if (a.coeffs().size() <= 1) {
        return try_convert(a.coeffs().empty() ? s->base()->zero() : a.coeffs().front(), target);
      }
      return std::nullopt;
    }
    case RingKind::Quotient: {
      RingElem rep(s->base(), a.coeffs());
      if (target->kind() == RingKind::Quotient && target->var() == s->var()) {
        auto p = try_convert(rep, target->base());
        if (!p) return std::nullopt;
        return make_quot(target, p->coeffs());
      }
      if (target->kind() == RingKind::Poly && target->var() == s->var()) return try_convert(rep, target);
      // Evaluate at the root of a linear or monomial modulus.
      const Vec& m = s->quotient_modulus();
      RingPtr k = s->base()->base();
      std::optional<RingElem> root;
      if (s->quotient_is_monomial()) root = k->zero();
      else if (m.size() == 2) root = -m[0];
      if (!root) return std::nullopt;
      RingElem v = k->zero();
      for (std::size_t i = a.coeffs().size(); i-- > 0;) v = v * *root + a.coeffs()[i];
      return try_convert(v, target);
    }
    case RingKind::Localization: {
      if (target->kind() == RingKind::Localization) {
        auto num = try_convert(a.numerator(), target->base());
        auto t = try_convert(s->loc_t(), target->base());
        if (!num || !t || !(*t == target->loc_t())) return std::nullopt;
        return make_loc(target, *num, a.denominator_exponent());
      }
      try {
        return try_convert(delocalize(a), target);
      } catch (const TameError&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

std::optional<RingElem> try_convert(const RingElem& a, const RingPtr& target) {
  if (same_ring(a.ring(), target)) return RingElem(target, a.payload());
  const RingPtr& s = a.ring();
  // Structural maps that keep the top constructor.
  bool same_top_var = (s->kind() == RingKind::Poly || s->kind() == RingKind::Quotient) &&
                      (target->kind() == RingKind::Poly || target->kind() == RingKind::Quotient) &&
                      s->var() == target->var();
  bool loc_to_loc = s->kind() == RingKind::Localization && target->kind() == RingKind::Localization;
  if (same_top_var || loc_to_loc) {
    if (auto r = try_convert_source(a, target)) return r;
  }
  if (target->kind() == RingKind::Poly || target->kind() == RingKind::Quotient ||
      target->kind() == RingKind::Localization) {
    if (auto c = try_convert(a, target->base())) return target->embed(*c);
  }
  return try_convert_source(a, target);
}

}  // namespace

RingElem convert(const RingElem& a, const RingPtr& target) {
  auto r = try_convert(a, target);
  if (!r) fail(ErrorCode::UnsupportedHom, "cannot map " + a.str() + " from " + a.ring()->str() + " to " + target->str());
  return *r;
}

bool convertible(const RingPtr& source, const RingPtr& target) {
  return try_convert(source->one(), target).has_value();
}

RingPtr specialized_ring(const RingPtr& ring, const std::string& var, const RingElem& value) {
  return specialize(ring->one(), var, value).ring();
}

namespace {

/// Specializes `a` and returns the result together with the ring it landed in.
RingElem specialize_impl(const RingElem& a, const std::string& var, const RingElem& value) {
  const RingPtr& r = a.ring();
  switch (r->kind()) {
    case RingKind::Poly: {
      if (r->var() == var) {
        RingElem v = convert(value, r->base());
        RingElem acc = r->base()->zero();
        for (std::size_t i = a.coeffs().size(); i-- > 0;) acc = acc * v + a.coeffs()[i];
        return acc;
      }
      Vec out;
      for (const auto& c : a.coeffs()) out.push_back(specialize_impl(c, var, value));
      RingPtr sub = specialize_impl(r->base()->one(), var, value).ring();
      return make_poly(Ring::poly(sub, r->var()), out);
    }
    case RingKind::Quotient: {
      if (r->var() != var) fail(ErrorCode::UnsupportedHom, "specialization inside a quotient's coefficients");
      RingPtr k = r->base()->base();
      RingElem v = convert(value, k);
      RingElem mv = k->zero();
      const Vec& m = r->quotient_modulus();
      for (std::size_t i = m.size(); i-- > 0;) mv = mv * v + m[i];
      if (!mv.is_zero()) fail(ErrorCode::UnsupportedHom, "value " + v.str() + " is not a root of the modulus");
      RingElem acc = k->zero();
      for (std::size_t i = a.coeffs().size(); i-- > 0;) acc = acc * v + a.coeffs()[i];
      return acc;
    }
    case RingKind::Localization: {
      RingElem num = specialize_impl(a.numerator(), var, value);
      RingElem t = specialize_impl(r->loc_t(), var, value);
      auto tinv = unit_inverse(t);
      if (tinv) return num * pow(*tinv, a.denominator_exponent());
      RingPtr target = Ring::localization(t.ring(), t);
      return make_loc(target, num, a.denominator_exponent());
    }
    default: fail(ErrorCode::UnsupportedHom, "variable " + var + " not in ring " + r->str());
  }
}

}  // namespace

RingElem specialize(const RingElem& a, const std::string& var, const RingElem& value) {
  return specialize_impl(a, var, value);
}

// ---------------------------------------------------------------------------------------------
// Parsing

namespace {

struct ElemOps {
  RingPtr ring;
  RingElem integer(const mpz_class& v) { return ring->from_mpz(v); }
  RingElem ident(const std::string& name) { return ring->variable(name); }
  RingElem add(const RingElem& a, const RingElem& b) { return a + b; }
  RingElem sub(const RingElem& a, const RingElem& b) { return a - b; }
  RingElem mul(const RingElem& a, const RingElem& b) { return a * b; }
  RingElem neg(const RingElem& a) { return -a; }
  RingElem pow(const RingElem& a, unsigned e) { return tameforge::pow(a, e); }
  RingElem div(const RingElem& a, const RingElem& b) {
    auto q = exact_divide(a, b);
    if (!q) fail(ErrorCode::NotDivisible, a.str() + " / " + b.str() + " in " + ring->str());
    return *q;
  }
};

class RingParser {
 public:
  explicit RingParser(const std::string& s) : s_(s) {}

  RingPtr parse() {
    RingPtr r = ring();
    skip();
    if (pos_ != s_.size()) error("trailing input");
    return r;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, "ring spec: " + msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(const std::string& w) {
    skip();
    if (s_.compare(pos_, w.size(), w) == 0) {
      std::size_t end = pos_ + w.size();
      if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
      pos_ = end;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(s_[start]))) error("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  /// Raw text up to the closing delimiter at nesting depth zero.
  std::string balanced_until(char close_a, char close_b) {
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(') ++depth;
      if (c == ')' && depth > 0) {
        --depth;
      } else if (depth == 0 && (c == close_a || c == close_b)) {
        return s_.substr(start, pos_ - start);
      }
      ++pos_;
    }
    error("unbalanced parentheses");
  }

  RingPtr primary() {
    if (accept_word("loc")) {
      if (!accept('(')) error("expected '(' after loc");
      RingPtr base = ring();
      if (!accept(',')) error("expected ',' in loc");
      std::string t = balanced_until(')', ')');
      if (!accept(')')) error("expected ')'");
      return Ring::localization(base, parse_elem(t, base));
    }
    if (accept_word("Q")) return Ring::rationals();
    if (accept_word("Z")) {
      skip();
      if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        ++pos_;
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return Ring::modular(mpz_class(s_.substr(start, pos_ - start)));
      }
      return Ring::integers();
    }
    if (accept('(')) {
      RingPtr r = ring();
      if (!accept(')')) error("expected ')'");
      return r;
    }
    error("expected Q, Z, Z/n, loc(...) or '('");
  }

  RingPtr ring() {
    RingPtr r = primary();
    for (;;) {
      if (accept('[')) {
        std::string v = ident();
        if (!accept(']')) error("expected ']'");
        r = Ring::poly(r, v);
        continue;
      }
      skip();
      if (pos_ + 1 < s_.size() && s_[pos_] == '/' && s_[pos_ + 1] == '(') {
        pos_ += 2;
        std::string m = balanced_until(')', ')');
        if (!accept(')')) error("expected ')'");
        r = Ring::quotient(r, parse_elem(m, r));
        continue;
      }
      return r;
    }
  }
};

}  // namespace

RingPtr parse_ring(const std::string& text) { return RingParser(text).parse(); }

RingElem parse_elem(const std::string& text, const RingPtr& ring) {
  ElemOps ops{ring};
  return detail::ExprParser<RingElem, ElemOps>(text, ops).parse();
}

}  // namespace tameforge
