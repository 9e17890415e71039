#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tameforge/multipoly.hpp"

namespace tameforge {

using PolyMatrix = std::vector<std::vector<MultiPoly>>;

/**
 * @brief Polynomial endomorphism of affine space.
 *
 * The first dim() frame variables are coordinates; any remaining frame variables are parameters
 * (scalars adjoined to the coefficient ring) and are fixed by the map.
 * Composition convention: compose(phi, psi)(X) = phi(psi(X)).
 */
class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(FramePtr frame, std::size_t dim, std::vector<MultiPoly> coords);

  static PolyMap identity(const FramePtr& frame, std::size_t dim);

  const FramePtr& frame() const { return frame_; }
  const RingPtr& ring() const { return frame_->ring(); }
  std::size_t dim() const { return dim_; }
  std::size_t nparams() const { return frame_->size() - dim_; }
  const std::vector<MultiPoly>& coords() const { return coords_; }
  const MultiPoly& operator[](std::size_t i) const { return coords_[i]; }

  bool is_identity() const;
  std::string str() const;

 private:
  FramePtr frame_;
  std::size_t dim_ = 0;
  std::vector<MultiPoly> coords_;
};

bool operator==(const PolyMap& a, const PolyMap& b);
inline bool operator!=(const PolyMap& a, const PolyMap& b) { return !(a == b); }

/// p with coordinates replaced by psi's coordinates (parameters fixed).
MultiPoly apply(const MultiPoly& p, const PolyMap& psi);
PolyMap compose(const PolyMap& phi, const PolyMap& psi);

PolyMatrix jacobian_matrix(const PolyMap& phi);
/// Exact determinant by memoized cofactor expansion (no division).
MultiPoly determinant(const PolyMatrix& m);
MultiPoly jacobian_det(const PolyMap& phi);

/// Frame with m new coordinate names inserted after the first dim variables.
FramePtr stabilized_frame(const FramePtr& frame, std::size_t dim, std::size_t m,
                          const std::vector<std::string>& names = {});
/// phi^[m]: identity on m new coordinates placed after the existing ones.
PolyMap stabilize(const PolyMap& phi, std::size_t m, const std::vector<std::string>& names = {});
/// Re-expresses phi in a frame extending phi's frame by m coordinates after the first dim variables.
PolyMap stabilize_into(const PolyMap& phi, const FramePtr& target, std::size_t m);

bool is_origin_preserving(const PolyMap& phi);
/// phi^t = F_(1) + t F_(2) + t^2 F_(3) + ...; t is a polynomial in the parameters (or a constant).
PolyMap scalar_action(const PolyMap& phi, const MultiPoly& t);
PolyMap scalar_action(const PolyMap& phi, const RingElem& t);

/// Coefficient-wise image under the natural map into `target` (quotient, localization, lift).
PolyMap base_change(const PolyMap& phi, const RingPtr& target);
/// Coefficient-wise evaluation of a ring-tower variable.
PolyMap specialize_map(const PolyMap& phi, const std::string& ring_var, const RingElem& value);
/// Substitutes parameters (frame indices >= dim) by polynomials in the same frame.
PolyMap substitute_params(const PolyMap& phi, const std::map<std::size_t, MultiPoly>& images);
/// True iff setting frame variable j to zero gives the identity.
bool is_z_vanishing(const PolyMap& phi, std::size_t j);

/// Moves phi to another frame with the given variable map (coordinates must stay coordinates).
PolyMap move_map(const PolyMap& phi, const FramePtr& target, std::size_t dim, const std::vector<std::size_t>& var_map);

// ---------------------------------------------------------------------------------------------
// Generators and words

/// e_i(f): X_i -> X_i + f, f free of X_i.
struct Elementary {
  std::size_t i;
  MultiPoly f;
};

/// X -> A X with an exact inverse witness; entries are polynomials in the parameters only.
struct Linear {
  PolyMatrix matrix;
  PolyMatrix inverse;
};

/// X -> X + v; entries are polynomials in the parameters only.
struct Translation {
  std::vector<MultiPoly> v;
};

using TameGen = std::variant<Elementary, Linear, Translation>;

PolyMatrix identity_matrix(const FramePtr& frame, std::size_t n);
PolyMatrix matrix_product(const PolyMatrix& a, const PolyMatrix& b);
bool is_identity_matrix(const PolyMatrix& a);
/// True when every entry is free of the first `dim` frame variables.
bool params_only(const MultiPoly& p, std::size_t dim);

/// Validating constructors.
Elementary make_elementary(std::size_t dim, std::size_t i, MultiPoly f);
Linear make_linear(std::size_t dim, PolyMatrix matrix, PolyMatrix inverse);

struct ProvenanceSpan {
  std::size_t start;
  std::size_t end;
  std::string source;
};

/// A product g_1 g_2 ... g_k of generators acting on the first dim() frame variables.
class TameWord {
 public:
  TameWord() = default;
  TameWord(FramePtr frame, std::size_t dim) : frame_(std::move(frame)), dim_(dim) {}

  const FramePtr& frame() const { return frame_; }
  const RingPtr& ring() const { return frame_->ring(); }
  std::size_t dim() const { return dim_; }
  const std::vector<TameGen>& gens() const { return gens_; }
  const std::vector<ProvenanceSpan>& provenance() const { return provenance_; }
  std::size_t size() const { return gens_.size(); }
  bool empty() const { return gens_.empty(); }

  /// Appends g unless it is the identity.
  void push(TameGen g);
  void push_elementary(std::size_t i, MultiPoly f);
  /// Appends every generator of w, copying its provenance spans (or labelling the whole block).
  void append(const TameWord& w, const std::string& source = "");
  /// Records that generators [from, size()) came from `source`.
  void label(std::size_t from, const std::string& source);
  void set_provenance(std::vector<ProvenanceSpan> spans) { provenance_ = std::move(spans); }
  /// Direct access used by mutation tooling; skips validation.
  std::vector<TameGen>& mutable_gens() { return gens_; }

 private:
  FramePtr frame_;
  std::size_t dim_ = 0;
  std::vector<TameGen> gens_;
  std::vector<ProvenanceSpan> provenance_;
};

bool is_identity_gen(const TameGen& g);
PolyMap gen_to_map(const TameGen& g, const FramePtr& frame, std::size_t dim);
TameGen inverse_gen(const TameGen& g);
std::string gen_str(const TameGen& g);

/// Left-to-right product of the generators (computed as a right fold, g o C).
PolyMap evaluate_word(const TameWord& w);
/// Same product accumulated as C o g; independent strategy for cross-checking.
PolyMap evaluate_word_leftfold(const TameWord& w);
/// Image of a point (values for every frame variable) under the map or the word; parameters pass through.
std::vector<RingElem> evaluate_map_at(const PolyMap& phi, const std::vector<RingElem>& point);
std::vector<RingElem> evaluate_word_at(const TameWord& w, const std::vector<RingElem>& point);
TameWord inverse_word(const TameWord& w);
TameWord concat(const TameWord& a, const TameWord& b);
TameWord stabilize_word(const TameWord& w, std::size_t m, const std::vector<std::string>& names = {});
TameWord stabilize_word_into(const TameWord& w, const FramePtr& target, std::size_t m);
TameWord move_word(const TameWord& w, const FramePtr& target, std::size_t dim, const std::vector<std::size_t>& var_map);
/// Applies a coefficient map to every polynomial of the word (target frame has the same variables).
TameWord map_word_coefficients(const TameWord& w, const FramePtr& target,
                               const std::function<RingElem(const RingElem&)>& fn);
TameWord base_change_word(const TameWord& w, const RingPtr& target);
/// Substitutes parameters in every generator.
TameWord substitute_params_word(const TameWord& w, const std::map<std::size_t, MultiPoly>& images);
/// Replaces Translation generators by coordinate elementaries.
TameWord translations_to_elementaries(const TameWord& w);
bool all_elementary(const TameWord& w);

// ---------------------------------------------------------------------------------------------
// Certificates

struct Certificate {
  PolyMap target;
  std::size_t stabilize_by = 0;
  TameWord word;
};

struct Verdict {
  bool pass = false;
  std::string message;
  std::optional<std::size_t> coordinate;
  std::string monomial;
};

/// PASS iff the maps agree coefficient for coefficient; otherwise locates the first difference.
Verdict compare_maps(const PolyMap& expected, const PolyMap& actual);
Verdict verify_certificate(const Certificate& c);

}  // namespace tameforge
