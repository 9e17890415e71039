#pragma once

#include <gmpxx.h>

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tameforge/errors.hpp"

namespace tameforge {

enum class RingKind { Rationals, Integers, Modular, Poly, Quotient, Localization };

class Ring;
class RingElem;
using RingPtr = std::shared_ptr<const Ring>;

/// Tunable search bounds used by the undecidable-in-general ring queries.
struct RingConfig {
  static std::atomic<unsigned> annihilator_bound;  ///< default 64
  static std::atomic<unsigned> power_search_bound;  ///< default 64
};

/**
 * @brief An exact element of a coefficient ring.
 *
 * Payload per ring kind:
 *  - Rationals: reduced mpq_class
 *  - Integers / Modular: mpz_class (residue in [0, n) for Modular)
 *  - Poly: coefficient list, low degree first, no trailing zeros
 *  - Quotient: coefficient list of the reduced representative (over the polynomial ring's base)
 *  - Localization: numerator / t^k, with k minimal when the base is a domain
 */
class RingElem {
 public:
  struct Fraction {
    std::vector<RingElem> num;  // exactly one entry
    unsigned k = 0;
  };
  using Payload = std::variant<std::monostate, mpq_class, mpz_class, std::vector<RingElem>, Fraction>;

  RingElem() = default;
  RingElem(RingPtr ring, Payload payload);

  const RingPtr& ring() const { return ring_; }
  const Payload& payload() const { return payload_; }
  bool valid() const { return ring_ != nullptr; }

  const mpq_class& q() const { return std::get<mpq_class>(payload_); }
  const mpz_class& z() const { return std::get<mpz_class>(payload_); }
  const std::vector<RingElem>& coeffs() const { return std::get<std::vector<RingElem>>(payload_); }
  const RingElem& numerator() const { return std::get<Fraction>(payload_).num.front(); }
  unsigned denominator_exponent() const { return std::get<Fraction>(payload_).k; }

  bool is_zero() const;
  bool is_one() const;
  std::string str() const;

  RingElem operator-() const;
  RingElem& operator+=(const RingElem& o);
  RingElem& operator-=(const RingElem& o);
  RingElem& operator*=(const RingElem& o);

 private:
  RingPtr ring_;
  Payload payload_;
};

RingElem operator+(const RingElem& a, const RingElem& b);
RingElem operator-(const RingElem& a, const RingElem& b);
RingElem operator*(const RingElem& a, const RingElem& b);
/// Ring equality (annihilator rule over localizations of non-domains).
bool operator==(const RingElem& a, const RingElem& b);
inline bool operator!=(const RingElem& a, const RingElem& b) { return !(a == b); }

/**
 * @brief Description of a coefficient ring, built from Q, Z, Z/n by polynomial extension,
 * principal quotient and localization at one element.
 */
class Ring : public std::enable_shared_from_this<Ring> {
 public:
  static RingPtr rationals();
  static RingPtr integers();
  static RingPtr modular(const mpz_class& n);
  static RingPtr poly(const RingPtr& base, const std::string& var);
  /// Quotient of a Poly ring by a monic (after unit scaling) univariate modulus.
  static RingPtr quotient(const RingPtr& poly_ring, const RingElem& modulus);
  static RingPtr localization(const RingPtr& base, const RingElem& t);

  RingKind kind() const { return kind_; }
  const mpz_class& modulus() const { return modulus_; }
  /// Poly: coefficient ring. Quotient: the polynomial ring. Localization: the base.
  const RingPtr& base() const { return base_; }
  /// Poly: its variable. Quotient: the variable of the polynomial ring.
  const std::string& var() const { return var_; }
  /// Quotient: monic modulus coefficients over base()->base(), low degree first.
  const std::vector<RingElem>& quotient_modulus() const { return qmod_; }
  std::size_t quotient_degree() const { return qmod_.size() - 1; }
  /// True when the quotient modulus is T^D.
  bool quotient_is_monomial() const;
  /// Localization: the inverted element (in base()).
  const RingElem& loc_t() const { return t_.front(); }

  bool q_algebra() const;
  bool is_domain() const;
  bool is_field() const;
  bool is_local() const;
  std::optional<unsigned> dimension_hint() const;

  RingElem zero() const;
  RingElem one() const;
  RingElem from_int(long v) const;
  RingElem from_mpz(const mpz_class& v) const;
  /// Image of a rational; throws NotQAlgebra when the denominator is not invertible.
  RingElem from_mpq(const mpq_class& v) const;
  /// Embeds an element of base() (Poly/Quotient/Localization only).
  RingElem embed(const RingElem& c) const;
  bool has_variable(const std::string& name) const;
  RingElem variable(const std::string& name) const;

  std::string str() const;
  bool equals(const Ring& other) const;
  RingPtr self() const { return shared_from_this(); }

  Ring(RingKind kind) : kind_(kind) {}

 private:
  RingKind kind_;
  mpz_class modulus_;
  RingPtr base_;
  std::string var_;
  std::vector<RingElem> qmod_;
  std::vector<RingElem> t_;
};

bool same_ring(const RingPtr& a, const RingPtr& b);
void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where);

RingElem pow(const RingElem& a, unsigned e);
/// q with b*q = a, if one exists.
std::optional<RingElem> exact_divide(const RingElem& a, const RingElem& b);
/// The inverse when a is a unit, nullopt when it is provably not; Undecidable otherwise.
std::optional<RingElem> unit_inverse(const RingElem& a);
inline bool is_unit(const RingElem& a) { return unit_inverse(a).has_value(); }
/// Least D with a^D = 0, or nullopt when a is not nilpotent.
std::optional<unsigned> nilpotency_index(const RingElem& a);
/// Least n with t^n a integral; requires a Localization over a domain.
unsigned t_order(const RingElem& a);
/// Numerator of an integral localization element (t_order 0); throws NotDivisible otherwise.
RingElem delocalize(const RingElem& a);

/**
 * Natural map into `target`: reductions (Z -> Z/n, Z/n -> Z/m for m | n, quotient -> smaller quotient,
 * k[T]/(T-c) and k[T]/(T^D) -> k), embeddings (into polynomial rings, quotients and localizations)
 * and representative lifts (Z/n -> Z, quotient -> polynomial ring, integral localization -> base).
 */
RingElem convert(const RingElem& a, const RingPtr& target);
bool convertible(const RingPtr& source, const RingPtr& target);

/// Ring obtained from `ring` by evaluating the tower variable `var` at `value`.
RingPtr specialized_ring(const RingPtr& ring, const std::string& var, const RingElem& value);
/// Evaluates tower variable `var` at `value` (converted into the ring where `var` is adjoined).
RingElem specialize(const RingElem& a, const std::string& var, const RingElem& value);

RingPtr parse_ring(const std::string& text);
RingElem parse_elem(const std::string& text, const RingPtr& ring);

}  // namespace tameforge
