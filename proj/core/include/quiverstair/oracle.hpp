#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "quiverstair/chain_algo.hpp"
#include "quiverstair/cycle_algo.hpp"
#include "quiverstair/linalg.hpp"
#include "quiverstair/quiver.hpp"

namespace quiverstair {

/// Portable random source: std::mt19937_64 for the bits, uniform doubles from
/// the top 53 bits, normals by Box-Muller. Output depends only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double uniform();   // [0, 1)
  double normal();
  cplx complex_normal();  // E|z|^2 = 1
  std::uint64_t bits();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed of the independent stream `index` derived from `seed` (splitmix64).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal moved into Q.
ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed);

/// Invertible matrix U diag(s) V^* with s log-uniform in [1, max_condition].
ComplexMatrix random_invertible(std::size_t n, double max_condition, std::uint64_t seed);

struct PlantSpec {
  QuiverShape shape;
  std::vector<IndecomposableLabel> labels;
  std::vector<cplx> regular_eigs;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for labels of the wrong kind, labels outside
  /// the quiver, eigenvalues on chains, or an eigenvalue with |lambda| <= 1e-9.
  void validate() const;
};

struct PlantOptions {
  /// Scramble with general invertible matrices instead of unitaries.
  bool general_invertible = false;
  double max_condition = 1e3;
};

struct Plant {
  Representation rep;
  /// The spec with its labels sorted.
  PlantSpec truth;
  Representation unscrambled;
  Isomorphism scramble;
};

/// Regular cycle summand (I, ..., I, D) with D = diag(eigs) on arrow t, or
/// D^{-1} when arrow t is counterclockwise, so the monodromy is diag(eigs).
Representation regular_summand(const QuiverShape& shape, const std::vector<cplx>& eigs);

/// Direct sum of the labelled summands (and the regular summand on cycles),
/// scrambled independently at every vertex with stream_seed(seed, v).
Plant plant(const PlantSpec& spec, const PlantOptions& options = {});

/// Adds independent complex Gaussian noise of entrywise scale
/// `relative_scale * max_arrow_norm(a)`.
Representation add_noise(const Representation& a, double relative_scale, std::uint64_t seed);

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct VerificationReport {
  bool labels_match = false;
  double residual = 0.0;
  double unitarity_defect = 0.0;
  double eigenvalue_distance = 0.0;
  std::vector<Check> checks;

  bool passed() const;
};

/// max over eigenvalue pairs of |recovered - planted| / |planted| after a
/// greedy nearest matching; +inf when the counts differ.
double relative_eigenvalue_distance(const std::vector<cplx>& recovered, const std::vector<cplx>& planted);

VerificationReport verify(const Representation& a, const ChainResult& result, const PlantSpec& truth,
                          const TolerancePolicy& tol = {});
VerificationReport verify(const Representation& a, const RegularizingDecomposition& result, const PlantSpec& truth,
                          const TolerancePolicy& tol = {});

}  // namespace quiverstair
