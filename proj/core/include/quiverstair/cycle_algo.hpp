#pragma once

#include <cstddef>
#include <vector>

#include "quiverstair/chain_algo.hpp"
#include "quiverstair/linalg.hpp"
#include "quiverstair/quiver.hpp"

namespace quiverstair {

/// Coordinates of one cycle vertex are grouped into segments: primed levels in
/// ascending order, then the unsplit tail.
struct Segment {
  long level = 0;  // kTailLevel for the tail
  std::size_t offset = 0;
  std::size_t size = 0;
};

inline constexpr long kTailLevel = -1;

struct ShaveStep {
  long index = 0;            // step number r
  std::size_t vertex = 0;    // 1-based cycle vertex that was split
  bool compress_rows = true;  // row compression (clockwise arrow) or column compression
  std::size_t split = 0;     // size of the new primed segment
  double tau = 0.0;
};

struct SplitCertificate {
  Isomorphism transform;
  Representation split;
  double residual = 0.0;
  /// Largest spectral norm of (I + N_v)^{-1}; residual * inverse_norm bounds
  /// the distance between the transported input and the split.
  double inverse_norm = 0.0;
};

/// One evaluation of the stop rule: the new level of step `index` reaches the
/// tail one arrow further on with norm `sigma`.
struct StopTest {
  long index = 0;
  double sigma = 0.0;
  double tau = 0.0;
};

struct ShaveResult {
  /// Chain on the levels l+1 .. n+1; chain vertex k carries level l+k. When
  /// nothing is shaved (l = t+1) this is a single vertex of dimension 0.
  Representation a_prime;
  Representation a_tilde;
  long l = 0;
  long n = 0;
  /// Unitary per cycle vertex.
  std::vector<ComplexMatrix> trace;
  /// apply_isomorphism(input, trace) with the blocks declared zero set to zero.
  Representation transformed;
  std::vector<std::vector<Segment>> segments;
  std::vector<ShaveStep> steps;
  std::vector<StopTest> stop_tests;
  SplitCertificate certificate;
  /// Step at which stopping was imposed after the stop rule's own choice
  /// failed certification; 0 when the stop rule decided.
  long forced_stop = 0;
};

/// Unitary shaving of a cycle representation. The result carries its split
/// certificate. When that certificate exceeds the anchored threshold, the
/// shave is repeated stopping at the most marginal rejected stop tests (at
/// most kStopRetries of them) and the first certified repetition is returned;
/// otherwise the original. Throws ConsistencyError when the step count
/// exceeds t + 2 * (total dimension).
ShaveResult shave(const Representation& a, const TolerancePolicy& tol = {});

inline constexpr std::size_t kStopRetries = 3;

/// Chain on the levels `l`+1 .. `n`+1 whose arrows follow the cycle arrows
/// they lie over.
QuiverShape primed_chain_shape(const QuiverShape& cycle, long l, long n);

/// Glues a primed chain back onto the cycle: each vertex space is the sum of
/// the level spaces over it, ascending by level.
Representation push_down(const Representation& b, long l, long n, const QuiverShape& cycle);
/// Same gluing for per-level basis changes.
Isomorphism push_down(const Isomorphism& s, long l, long n, const QuiverShape& cycle);

/// The walk label of the interval from level `first` to level `last`,
/// normalized so that the walk starts in 1..t.
IndecomposableLabel walk_label(long first, long last, std::size_t t);

/// Non-unitary isomorphism S with S_y A = K S_x for every arrow x -> y, where
/// K = push_down(a_prime) + a_tilde. S_v = (I + N_v) U_v with U_v the shave's
/// unitary and N_v a minimum-norm least-squares correction, first restricted
/// to entries that lower the level (I + N_v unit triangular); if that does not
/// certify under the anchored `tol`, every off-diagonal entry is allowed and
/// the better of the two is returned.
SplitCertificate certify_split(const Representation& a, const ShaveResult& shaved, const TolerancePolicy& tol = {});

/// residual * inverse_norm within the threshold of `tol` (already anchored).
bool certified(const SplitCertificate& cert, const TolerancePolicy& tol);

struct Monodromy {
  ComplexMatrix product;
  std::vector<cplx> eigenvalues;  // sorted by real part, then imaginary part
};

/// Product around the cycle from vertex 1, using A_i on clockwise arrows and
/// A_i^{-1} on counterclockwise ones. Throws std::invalid_argument if the
/// representation is not regular.
Monodromy monodromy(const Representation& p, const TolerancePolicy& tol = {});

struct RegularizingDecomposition {
  /// Walk labels sorted ascending; provenance[i] is the shave pass (1 or 2)
  /// that produced summands[i].
  std::vector<IndecomposableLabel> summands;
  std::vector<int> provenance;
  Representation regular_part;
  Monodromy regular_monodromy;
  /// Unitary per cycle vertex accumulated over both passes and both chain runs.
  std::vector<ComplexMatrix> trace;
  ShaveResult first_pass;
  ShaveResult second_pass;
  ChainResult first_chain;
  ChainResult second_chain;
  /// Non-unitary isomorphism onto push_down(first) + push_down(second) +
  /// regular_part, and its residual.
  Isomorphism certificate;
  double residual = 0.0;

  std::size_t regular_dimension() const { return regular_part.dims.empty() ? 0 : regular_part.dims.front(); }
};

/// Shave, shave the transpose of the remainder, canonicalize both shaves.
/// Throws ConsistencyError if the remainder fails the regularity check.
RegularizingDecomposition regularize(const Representation& a, const TolerancePolicy& tol = {});

}  // namespace quiverstair
