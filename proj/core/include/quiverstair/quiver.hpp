#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "quiverstair/linalg.hpp"

namespace quiverstair {

enum class QuiverKind { Chain, Cycle };

/// Clockwise: arrow i points from vertex i to vertex [i+1].
enum class Orientation { Clockwise, Counterclockwise };

Orientation flipped(Orientation o);

/// Chain or cycle quiver on t vertices. Vertices and arrows are 0-based here;
/// arrow i joins vertex i and vertex (i+1) mod t.
struct QuiverShape {
  QuiverKind kind = QuiverKind::Chain;
  std::size_t t = 1;
  std::vector<Orientation> orientations;

  static QuiverShape chain(std::vector<Orientation> orientations);
  static QuiverShape cycle(std::vector<Orientation> orientations);
  /// Every arrow clockwise.
  static QuiverShape chain(std::size_t t);
  static QuiverShape cycle(std::size_t t);

  std::size_t arrow_count() const { return orientations.size(); }
  std::size_t left(std::size_t arrow) const { return arrow; }
  std::size_t right(std::size_t arrow) const { return (arrow + 1) % t; }
  std::size_t source(std::size_t arrow) const;
  std::size_t target(std::size_t arrow) const;
  bool clockwise(std::size_t arrow) const { return orientations[arrow] == Orientation::Clockwise; }

  /// Throws std::invalid_argument if the arrow count does not fit the kind.
  void validate() const;

  friend bool operator==(const QuiverShape&, const QuiverShape&) = default;
};

/// The unique value in 1..t congruent to n mod t.
long wrap_index(long n, std::size_t t);

/// Orientation strings use one character per arrow: '>' clockwise, '<' counterclockwise.
std::string orientation_string(const QuiverShape& shape);
std::vector<Orientation> parse_orientations(const std::string& text);

struct Representation {
  QuiverShape shape;
  std::vector<std::size_t> dims;
  std::vector<ComplexMatrix> matrices;

  /// Throws std::invalid_argument on size mismatch or non-finite entries.
  void validate() const;
  std::size_t total_dim() const;
  double max_arrow_norm() const;
};

Representation zero_representation(const QuiverShape& shape, std::vector<std::size_t> dims);

/// One square invertible matrix per vertex.
struct Isomorphism {
  std::vector<ComplexMatrix> at_vertex;

  static Isomorphism identity(const std::vector<std::size_t>& dims);
};

Isomorphism compose(const Isomorphism& outer, const Isomorphism& inner);

Representation direct_sum(const Representation& a, const Representation& b);
Representation direct_sum(const std::vector<Representation>& parts, const QuiverShape& shape);
Representation transpose_rep(const Representation& a);
/// Arrow u -> v becomes S_v * A * S_u^{-1}.
Representation apply_isomorphism(const Representation& a, const Isomorphism& s, const TolerancePolicy& tol = {});
/// Changes the basis at one vertex: incoming arrows become S * A, outgoing
/// arrows A * S^{-1}.
void transform_vertex(Representation& rep, std::size_t v, const ComplexMatrix& s, const ComplexMatrix& s_inv);
/// `tol` with its reference scale raised to the largest spectral norm among
/// the arrows of `a`. Every algorithm anchors its rank decisions this way, so
/// a block that is zero up to noise is judged against the whole input.
TolerancePolicy anchored(const TolerancePolicy& tol, const Representation& a);
/// Max over arrows u -> v of ||S_v A - A' S_u||_F.
double iso_residual(const Representation& a, const Representation& a2, const Isomorphism& s);

// ---------------------------------------------------------------------------
// Indecomposables.

enum class LabelKind { Interval, Walk, Regular };

/// L(i,j) on chains, G(l,r) on cycles, Regular(n) for a regular cycle part.
/// Indices are 1-based, as in every report.
struct IndecomposableLabel {
  LabelKind kind = LabelKind::Interval;
  long first = 1;
  long last = 1;

  static IndecomposableLabel interval(long i, long j);
  static IndecomposableLabel walk(long l, long r);
  static IndecomposableLabel regular(long n);

  /// Vertexwise dimensions of the labelled indecomposable on `shape`.
  std::vector<std::size_t> dimension_vector(const QuiverShape& shape) const;
  std::string to_string() const;
  static IndecomposableLabel parse(const std::string& text);

  friend auto operator<=>(const IndecomposableLabel&, const IndecomposableLabel&) = default;
};

Representation make_L(long i, long j, const QuiverShape& shape);
/// Basis of each V_v ordered by increasing walk index.
Representation make_G(long l, long r, const QuiverShape& shape);
Representation make_indecomposable(const IndecomposableLabel& label, const QuiverShape& shape);

/// All dims equal and every matrix square with sigma_min above its tau.
bool is_regular(const Representation& a, const TolerancePolicy& tol = {});

}  // namespace quiverstair
