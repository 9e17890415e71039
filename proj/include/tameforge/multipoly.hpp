#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tameforge/ring.hpp"

namespace tameforge {

/// An ordered list of variable names over a coefficient ring.
class Frame {
 public:
  Frame(RingPtr ring, std::vector<std::string> names);

  const RingPtr& ring() const { return ring_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  bool equals(const Frame& other) const;
  std::string str() const;

 private:
  RingPtr ring_;
  std::vector<std::string> names_;
};

using FramePtr = std::shared_ptr<const Frame>;

FramePtr make_frame(RingPtr ring, std::vector<std::string> names);
bool same_frame(const FramePtr& a, const FramePtr& b);
void require_same_frame(const FramePtr& a, const FramePtr& b, const char* where);
/// `base` if unused in the frame and its ring tower, else base1, base2, ...
std::string fresh_name(const Frame& frame, const std::string& base, const std::vector<std::string>& taken = {});

using Exponent = std::vector<std::uint32_t>;

unsigned exponent_degree(const Exponent& e);

/// Graded lexicographic order, larger monomials first.
struct GrlexDesc {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/**
 * @brief Sparse multivariate polynomial over a frame.
 *
 * Terms are keyed by exponent vector in graded-lex descending order; zero coefficients are never stored.
 */
class MultiPoly {
 public:
  using Terms = std::map<Exponent, RingElem, GrlexDesc>;

  MultiPoly() = default;
  explicit MultiPoly(FramePtr frame) : frame_(std::move(frame)) {}

  static MultiPoly constant(const FramePtr& frame, const RingElem& c);
  static MultiPoly constant(const FramePtr& frame, long c);
  static MultiPoly var(const FramePtr& frame, std::size_t i);
  static MultiPoly monomial(const FramePtr& frame, Exponent e, const RingElem& c);

  const FramePtr& frame() const { return frame_; }
  const RingPtr& ring() const { return frame_->ring(); }
  std::size_t nvars() const { return frame_->size(); }
  const Terms& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  RingElem constant_term() const;
  RingElem coeff(const Exponent& e) const;
  /// -1 for the zero polynomial.
  int total_degree() const;
  unsigned degree_in(std::size_t i) const;
  bool uses_var(std::size_t i) const;

  /// Adds c * X^e in place.
  void add_term(const Exponent& e, const RingElem& c);

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);

  std::string str() const;

 private:
  FramePtr frame_;
  Terms terms_;
};

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator*(const RingElem& c, const MultiPoly& p);
bool operator==(const MultiPoly& a, const MultiPoly& b);
inline bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

MultiPoly pow(const MultiPoly& p, unsigned e);
/// Divides every coefficient exactly; throws NotDivisible otherwise.
MultiPoly divide_scalar(const MultiPoly& p, const RingElem& c);
std::optional<MultiPoly> try_divide_scalar(const MultiPoly& p, const RingElem& c);

/// Replaces X_i by images[i]; images share one target frame.
MultiPoly substitute(const MultiPoly& p, const std::vector<MultiPoly>& images);
/// Value at a point of the frame's ring (one entry per frame variable).
RingElem evaluate_at(const MultiPoly& p, const std::vector<RingElem>& point);
/// Replaces only the listed variables, keeping the frame.
MultiPoly substitute_some(const MultiPoly& p, const std::map<std::size_t, MultiPoly>& images);

MultiPoly partial_derivative(const MultiPoly& p, std::size_t i);
/// Formal integral in X_i with zero constant; throws NotQAlgebra when an exponent is not invertible.
MultiPoly antiderivative(const MultiPoly& p, std::size_t i);

/// Homogeneous components by total degree, restricted to the variables flagged in `mask` if given.
std::map<unsigned, MultiPoly> homogeneous_components(const MultiPoly& p,
                                                     const std::vector<bool>& mask = {});
/// p = sum_k X_i^k * result[k], with result[k] free of X_i.
std::map<unsigned, MultiPoly> collect(const MultiPoly& p, std::size_t i);

/// Moves p to `target`, sending variable j to target variable var_map[j].
MultiPoly remap(const MultiPoly& p, const FramePtr& target, const std::vector<std::size_t>& var_map);
/// Applies fn to each coefficient; target must have the same number of variables.
MultiPoly map_coefficients(const MultiPoly& p, const FramePtr& target,
                           const std::function<RingElem(const RingElem&)>& fn);

MultiPoly parse_poly(const std::string& text, const FramePtr& frame);

/**
 * Nodes a_j in {0..n+m} and weights c_j with sum_j c_j (X + a_j Y)^(n+m) = X^n Y^m.
 * Only nonzero weights are returned.
 */
std::vector<std::pair<mpq_class, mpq_class>> vandermonde_decompose(unsigned n, unsigned m);

}  // namespace tameforge
