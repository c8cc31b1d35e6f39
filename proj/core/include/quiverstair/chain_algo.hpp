#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "quiverstair/linalg.hpp"
#include "quiverstair/quiver.hpp"

namespace quiverstair {

/// Multiplicities of the interval summands L(i,j), 1-based.
struct ChainCanonicalForm {
  std::map<std::pair<long, long>, std::size_t> multiplicity;

  void add(long i, long j, std::size_t count);
  std::size_t count(long i, long j) const;
  /// Labels in lexicographic order, repeated by multiplicity.
  std::vector<IndecomposableLabel> labels() const;
  std::vector<std::size_t> dimension_vector(std::size_t t) const;

  friend bool operator==(const ChainCanonicalForm&, const ChainCanonicalForm&) = default;
};

/// A block of coordinates at the current vertex carrying `size` copies of a
/// chain that started at vertex `start` (1-based).
struct StripBlock {
  long start = 1;
  std::size_t size = 0;

  friend bool operator==(const StripBlock&, const StripBlock&) = default;
};

/// Record of step r, which reduces arrow r (1-based).
struct ChainStep {
  std::size_t arrow = 1;
  StripAxis axis = StripAxis::Vertical;
  std::vector<StripBlock> strips;
  std::vector<std::size_t> block_sizes;
  double tau = 0.0;
};

struct ChainTrace {
  /// Accumulated unitary per vertex; `reduced` = apply_isomorphism(input, unitaries).
  std::vector<ComplexMatrix> unitaries;
  std::vector<ChainStep> steps;
};

struct ChainResult {
  ChainCanonicalForm form;
  ChainTrace trace;
  Representation reduced;
};

/// Unitary staircase reduction of a chain representation. Throws
/// std::invalid_argument for non-chain input; NumericError messages carry the
/// failing step.
ChainResult canon_chain(const Representation& a, const TolerancePolicy& tol = {});

/// Direct sum of make_L(i,j) in lexicographic order of (i,j).
Representation assemble_canonical(const ChainCanonicalForm& form, const QuiverShape& shape);

/// Non-unitary isomorphism from the input onto assemble_canonical(form):
/// transform_v * A = C * transform_u for every arrow u -> v, up to `residual`.
struct ChainCertificate {
  Isomorphism transform;
  /// The input in replay coordinates once every arrow is split: 0/1 matrices
  /// with at most one 1 per row and column.
  Representation split;
  double residual = 0.0;
  /// Largest Frobenius norm among the transform blocks and their inverses.
  double scale = 0.0;
};

/// Replays the reduction with the recorded block sizes, normalizes every
/// staircase block to identities and carries each basis change back along the
/// already split part. Throws ConsistencyError if the replay disagrees with
/// the recorded structure.
ChainCertificate certify_chain(const Representation& a, const ChainResult& result);

}  // namespace quiverstair
