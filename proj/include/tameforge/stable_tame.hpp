#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tameforge/factor_core.hpp"

namespace tameforge {

// ---------------------------------------------------------------------------------------------
// Reports

/// One step of a pipeline: which construction ran, on what, and every N it chose.
struct TraceEntry {
  std::string lemma;
  std::string detail;
  std::vector<unsigned> n_values;
};

enum class PipelineStatus { Complete, Reduced };

/**
 * Residual of the localization sweep: the affine map (X, tau(gamma(Z))) of the frame
 * [X1..Xn, Z1..Zn, Y, params] over R, with tau a translation and gamma in GL_n(R[X]).
 * The target satisfies target^[n+1] = left o residual o right.
 */
struct SweepReduction {
  FramePtr frame;
  std::vector<MultiPoly> tau;  ///< integral translation vector, entries in R[X]
  Linear gamma;                ///< acts on Z, entries in R[X]
  PolyMap residual;            ///< (X, tau + gamma Z, Y)
  TameWord left, right;        ///< elementary words over R in the same frame
};

struct PipelineReport {
  PipelineStatus status = PipelineStatus::Complete;
  /// Complete: target and a word evaluating to target^[stabilize_by].
  /// Reduced: target and stabilize_by only; the word lives in `reduction`.
  Certificate certificate;
  std::optional<SweepReduction> reduction;
  std::size_t added_dims = 0;
  std::size_t layers = 0;
  std::vector<TraceEntry> trace;
};

/// Complete: verify_certificate. Reduced: composes left, residual and right against the stabilized target.
Verdict verify_report(const PipelineReport& report);

// ---------------------------------------------------------------------------------------------
// Degree reduction in dimension two over a field

/// Word of elementaries (and at most one diagonal Linear) evaluating to phi, a plane automorphism over a field.
/// Throws NotAnAutomorphism when the degree reduction stalls.
TameWord jvdk_factor(const PolyMap& phi);

// ---------------------------------------------------------------------------------------------
// Lifting through a nilpotent ideal

enum class ModnilStrategy { Linear, Halving };

/// Factors the image over A/(t) into elementaries, possibly stabilized: returns a word whose
/// dimension is at least the map's, evaluating to the map stabilized by the difference.
using BaseFactor = std::function<TameWord(const PolyMap&)>;

/// Default oracle: empty word for the identity, e_1(c) in dimension one, jvdk_factor in dimension two.
TameWord field_base_factor(const PolyMap& phi);

/**
 * phi^[m] as elementaries over A, where t is nilpotent in A and the image of phi over A/(t) is handled
 * by `base`. Supported towers: Z/n with t an integer, and k[T]/(g^D) with t = g. Q-algebras take no
 * extra dimensions; otherwise each lifting layer adds one. Throws JacobianNotOne, BaseFactorFailed.
 */
PipelineReport modnil_factor(const PolyMap& phi, const RingElem& t, const BaseFactor& base,
                             ModnilStrategy strategy = ModnilStrategy::Halving);

/// phi in SA_2(A) for A a field, Z/n, or k[T]/(f) with f split over k; products handled by idempotents.
/// Throws NotArtinianSupported, JacobianNotOne.
PipelineReport artinian_factor(const PolyMap& phi, ModnilStrategy strategy = ModnilStrategy::Halving);

// ---------------------------------------------------------------------------------------------
// The localization sweep

/// Elementary word over R/t^N evaluating to the reduction of the map, in dimension at least n.
using ModularFactor = std::function<TameWord(unsigned n_exp)>;

struct LocmodOptions {
  unsigned initial_n = 1;
  unsigned max_rounds = 8;  ///< restarts after NInsufficient before giving up
};

/**
 * Sweeps phi, tame over R_t by `word_rt`, to an affine residual over R[X]. Every identity of the sweep
 * is checked by composition; N is raised until every shortening step accepts it.
 * Throws LiftMismatch when the modular word does not reduce phi, NInsufficient past max_rounds.
 */
PipelineReport locmod_sweep(const PolyMap& phi, const RingElem& t, const TameWord& word_rt,
                            const ModularFactor& modular, const LocmodOptions& options = {});

/// Modular oracle built from artinian_factor over R/t^N (R = k[T] with t = T).
ModularFactor artinian_modular_factor(const PolyMap& phi, const RingElem& t);

// ---------------------------------------------------------------------------------------------
// Constructions of the localization theorem

struct ZSplit {
  Elementary sigma;  ///< e_i(f at Z = 0)
  Elementary eps;    ///< e_i(f - f at Z = 0), Z-vanishing
};

/// rho = sigma o eps with eps vanishing at the parameter z_index.
ZSplit z_split(const Elementary& rho, std::size_t z_index, std::size_t dim);

/// The conjugates (tau_1..tau_k) eps_k (tau_1..tau_k)^-1, whose product is tau_1 eps_1 ... tau_r eps_r.
/// Throws ProductNotIdentity when tau_1 ... tau_r is not the identity.
std::vector<TameWord> conjfact_telescope(const std::vector<TameWord>& taus, const std::vector<Elementary>& epsilons);

struct FinalLift {
  unsigned n_exp = 0;     ///< N with tau eps(t^N Z) tau^-1 lifted
  std::size_t added = 0;  ///< p
  TameWord word;          ///< elementary, over R, dimension n + p
  std::vector<TraceEntry> trace;
};

/// tau eps(t^N Z) tau^-1, stabilized by p, as an elementary word over R[Z]. tau is over R_t with
/// Linear or origin-preserving elementary generators; eps vanishes at the parameter z_index.
/// Throws DepthCapExceeded when tau is longer than depth_cap.
FinalLift final_lift(const TameWord& tau, const Elementary& eps, std::size_t z_index, unsigned depth_cap = 3);

}  // namespace tameforge
