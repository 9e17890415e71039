#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tameforge/automap.hpp"

namespace tameforge {

// ---------------------------------------------------------------------------------------------
// Localization helpers

/// Pole order at t of an element of R_t or of a polynomial tower over R_t (0 for elements of R).
unsigned elem_t_order(const RingElem& a);
unsigned t_order(const MultiPoly& p);
unsigned t_order(const std::vector<MultiPoly>& v);
unsigned t_order(const PolyMatrix& m);

/// Copies phi into R_t = loc(R, t) (or returns it unchanged when already there).
PolyMap localize_map(const PolyMap& phi, const RingPtr& rt);
TameWord localize_word(const TameWord& w, const RingPtr& rt);
MultiPoly localize_poly(const MultiPoly& p, const FramePtr& target);
/// Moves integral data from R_t back to R; throws NotDivisible naming the offending coefficient.
MultiPoly delocalize_poly(const MultiPoly& p, const FramePtr& target);
TameWord delocalize_word(const TameWord& w);
bool is_integral(const MultiPoly& p);
bool is_integral(const TameWord& w);

/// Throws IdentityFailed with the located discrepancy when the maps differ.
void require_equal_maps(const PolyMap& expected, const PolyMap& actual, const std::string& what);

/// Names base1..basen (or fresh variants) not used by the frame or its ring.
std::vector<std::string> fresh_names(const Frame& frame, const std::string& base, std::size_t n,
                                     const std::vector<std::string>& taken = {});

// ---------------------------------------------------------------------------------------------
// Square-zero slices

/// True when every pairwise product (squares included) of the coefficients vanishes.
bool square_zero(const std::vector<MultiPoly>& polys);

/// X+G+H, after checking that (X+G) o (X+H) equals it; throws IdealSquareNonzero.
PolyMap sumcomp_merge(const std::vector<MultiPoly>& g, const std::vector<MultiPoly>& h, std::size_t dim);

/// (X + aX^m, (1 - m a X^(m-1)) Z) in the frame [X, Z] over a's ring.
PolyMap monomial_target(const RingElem& a, unsigned m);
/// The five-generator word alpha beta alpha^-1 beta^-1 gamma; empty when a = 0. Throws NotSquareZero.
TameWord monomial_factor(const RingElem& a, unsigned m);
/// Same word acting on coordinates x and z of a larger frame; a is free of both.
TameWord monomial_factor_in(const FramePtr& frame, std::size_t dim, std::size_t x, std::size_t z, const MultiPoly& a,
                            unsigned m);

struct StabFactor {
  TameWord word;   ///< dimension n+1, new coordinate after the first n
  PolyMap target;  ///< (X+H, d^-1 Z) in the word frame
};

/// (X+H, d^-1 Z) as elementary generators; H has square-zero coefficients. Throws NotSquareZero.
StabFactor nilslice_stab_factor(const std::vector<MultiPoly>& h, std::size_t dim, const std::string& z_name = "");
/// X+H as elementary generators in dimension n; needs a Q-algebra and |J(X+H)| = 1.
TameWord nilslice_q_factor(const std::vector<MultiPoly>& h, std::size_t dim);

// ---------------------------------------------------------------------------------------------
// The homomorphism Psi_s : X + F(X) -> Z + (1/s) F(X + sZ)

/// Frame [Z1..Zn, X1..Xn, params]: the Z are the new coordinates, the old coordinates become parameters.
FramePtr psi_frame(const FramePtr& frame, std::size_t dim);
/// Variable map from an n-coordinate frame into its psi frame (X_j -> X_j, params -> params).
std::vector<std::size_t> psi_param_map(const FramePtr& frame, std::size_t dim);
/// Psi_s(phi); s must be a unit of phi's ring.
PolyMap psi_map(const PolyMap& phi, const RingElem& s);
/// Generator-wise image (elementary, linear and translation images as in the examples of the trick).
TameWord psi_word(const TameWord& w, const RingElem& s);

struct PsiConjugation {
  FramePtr frame;      ///< [X1..Xn, Z1..Zn, params] over loc(R, s), dimension 2n
  TameWord sigma;      ///< (X - sZ, Z)
  TameWord eta;        ///< (X, Z + X/s)
  TameWord omega;      ///< (X, Z + F(X)/s)
  PolyMap psi;         ///< Psi_s(phi) by restriction of scalars
  PolyMap stabilized;  ///< phi^[n]
  bool omega_integral = false;
  /// Present when F lies in sR[X]^n: words over R with left Psi right = phi^[n].
  std::optional<TameWord> left_over_r, right_over_r;
  std::optional<PolyMap> psi_over_r;
};

/// Builds sigma, eta, omega and checks both displayed identities by composition.
/// phi lives over R, s is an element of R; the computation happens over loc(R, s).
PsiConjugation psi_conjugation_words(const PolyMap& phi, const RingElem& s);

// ---------------------------------------------------------------------------------------------
// Sweeping translations with poles to the left

/// Translation Z + (1/t^N) p(X) of a psi frame; p has parameter-only entries.
struct PoleTranslation {
  std::vector<MultiPoly> p;
  unsigned n_exp = 0;
};

/// Elementary map Z + p/t^N over the localized ring of the frame of p.
PolyMap pole_translation_map(const PoleTranslation& tau, const RingElem& t);

struct SweepLeft {
  PoleTranslation tau;  ///< p integral, over R
  TameWord rho_tilde;   ///< elementary over R[X] in the psi frame
};

/// Psi_{t^N}(rho) = tau rho~ for an elementary word rho over R.
SweepLeft sweep_left(const TameWord& rho, const RingElem& t, unsigned n_exp);

struct ElemSweep {
  RingPtr t_ring;              ///< loc(R_t[T], T) used for the symbolic identity
  std::vector<MultiPoly> w;    ///< u + f(x+u) delta_i, parameter-only over R_t
  Elementary omega;            ///< e_i(sum_j df/dX_j(x+u) X_j) over R_t
  MultiPoly g;                 ///< g(T, X) over R_t[T], free of X_i
  unsigned order_w = 0, order_omega = 0, order_g = 0;
};

/// eps sigma = nu omega xi with eps = e_i(f(x+TX)/T), sigma = X + u/T, nu = X + w/T, xi = e_i(T g).
/// x and u are parameter-only vectors over R_t; the identity is checked over loc(R_t[T], T).
ElemSweep elem_sweep(const std::vector<MultiPoly>& x, const std::vector<MultiPoly>& u, const MultiPoly& f,
                     std::size_t i, std::size_t dim, const std::string& t_name = "");

// ---------------------------------------------------------------------------------------------
// Commutator formulas

struct Commutator {
  TameWord word;        ///< c d c^-1 d^-1 in dimension n+1
  TameWord left;        ///< kappa (first formula) or gamma (second formula)
  TameWord right;       ///< nu or omega
  PolyMap target;       ///< the stabilized conjugate, in the word frame
};

/// (alpha e_i(b f) alpha^-1)^[1] = kappa nu kappa^-1 nu^-1; b is parameter-only.
/// The added coordinate is named y_name (fresh "Y" when empty).
Commutator first_commutator(const Linear& alpha, std::size_t i, const MultiPoly& b, const MultiPoly& f,
                            std::size_t dim, const std::string& y_name = "");

/// (e_p(f) e_q(b g) e_p(-f))^[1] = gamma omega gamma^-1 omega^-1, with gamma split into
/// e_p(f(X_q) - f(X_q - bY)) o e_q(bY). f is free of X_p, g free of X_q, b parameter-only.
Commutator second_commutator(const MultiPoly& f, std::size_t p, const MultiPoly& b, const MultiPoly& g, std::size_t q,
                             std::size_t dim, const std::string& y_name = "");

struct IntegralConjugate {
  TameWord word;       ///< over R, dimension n+1
  unsigned m = 0;
  unsigned degree = 0;
};

/// Integral word for (alpha e_i(g) alpha^-1)^[1]; alpha over R_t with t-orders of alpha, alpha^-1 <= m
/// and g in t^(m+dm) R[X]. Throws OrderBoundViolated when a hypothesis fails.
IntegralConjugate integral_conjugate(const Linear& alpha, const Elementary& eps, unsigned m, std::size_t dim,
                                     const std::string& y_name = "");

// ---------------------------------------------------------------------------------------------
// One shortening step of the locmod sweep

/// Linear map of a psi frame with explicit inverse; entries are parameter polynomials over R_t.
struct SweepResidue {
  PoleTranslation tau;
  Linear gamma;
  std::vector<std::string> trace;
};

struct ShortenStep {
  PoleTranslation tau_tilde;  ///< Z + p~/t^N
  Linear gamma_tilde;
  TameWord zeta;              ///< over R[X], frame [Z, Y, X, params]
  unsigned n_required = 0;    ///< least N accepted by the hypothesis checker
  unsigned order_gamma = 0;   ///< max t-order of gamma and its inverse
  unsigned degree = 0;        ///< Z-degree of g
  ElemSweep sweep;
};

/// Psi frame sizes follow alpha: alpha is n x n over R_t (constant entries), eps = e_i(f) in the
/// original frame over R_t, residue in the psi frame. Throws NInsufficientError with the threshold.
ShortenStep shorten_step(const Linear& alpha, const Elementary& eps, const SweepResidue& residue, unsigned n_exp,
                         const FramePtr& original_frame, std::size_t dim);

// ---------------------------------------------------------------------------------------------
// Conjugation of Z-vanishing elementaries

enum class VanishTag { Z, T };

struct TaggedWord {
  TameWord word;               ///< dimension n+1 over R[Z, T]
  std::vector<VanishTag> tags; ///< one per generator
  std::size_t z_index = 0, t_index = 0;
  PolyMap target;              ///< (psi eps(TZ) psi^-1)^[1]
};

/// Frame extension used by lin_elem_conj: inserts Y after the coordinates and appends T.
/// eps is e_i(Z g) in a frame whose parameter z_index is Z; psi is Linear or origin-preserving Elementary.
TaggedWord lin_elem_conj(const TameGen& psi, const Elementary& eps, std::size_t z_index, std::size_t dim,
                         const std::string& t_name = "", const std::string& y_name = "");

// ---------------------------------------------------------------------------------------------
// Linear algebra over fields and local rings

/// Word of elementary row operations and at most one diagonal Linear evaluating to alpha.
/// Entries must be constants of a field or local ring. Throws NotLocalOrField, SingularMatrix.
TameWord gauss_factor(const Linear& alpha, std::size_t dim);
/// diag(u, u^-1) on coordinates (i, j) as four elementary generators.
TameWord whitehead_diagonal(const FramePtr& frame, std::size_t dim, std::size_t i, std::size_t j, const RingElem& u);

// ---------------------------------------------------------------------------------------------
// Torsion

/// Least N with psi(t^N Z) = phi(t^N Z) for Z-vanishing maps whose localizations agree.
/// Throws HypothesisFailed if some difference survives in R_t, BoundExceeded past the search bound.
unsigned kill_torsion_exponent(const PolyMap& psi, const PolyMap& phi, std::size_t z_index, const RingElem& t);

}  // namespace tameforge
