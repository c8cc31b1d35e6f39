#include "quiverstair/quiver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace quiverstair {

Orientation flipped(Orientation o) {
  return o == Orientation::Clockwise ? Orientation::Counterclockwise : Orientation::Clockwise;
}

QuiverShape QuiverShape::chain(std::vector<Orientation> orientations) {
  QuiverShape s;
  s.kind = QuiverKind::Chain;
  s.t = orientations.size() + 1;
  s.orientations = std::move(orientations);
  return s;
}

QuiverShape QuiverShape::cycle(std::vector<Orientation> orientations) {
  QuiverShape s;
  s.kind = QuiverKind::Cycle;
  s.t = orientations.size();
  s.orientations = std::move(orientations);
  s.validate();
  return s;
}

QuiverShape QuiverShape::chain(std::size_t t) {
  if (t == 0) throw std::invalid_argument("chain needs at least one vertex");
  return chain(std::vector<Orientation>(t - 1, Orientation::Clockwise));
}

QuiverShape QuiverShape::cycle(std::size_t t) {
  return cycle(std::vector<Orientation>(t, Orientation::Clockwise));
}

std::size_t QuiverShape::source(std::size_t arrow) const {
  return clockwise(arrow) ? left(arrow) : right(arrow);
}

std::size_t QuiverShape::target(std::size_t arrow) const {
  return clockwise(arrow) ? right(arrow) : left(arrow);
}

void QuiverShape::validate() const {
  if (kind == QuiverKind::Chain) {
    if (t == 0) throw std::invalid_argument("chain needs at least one vertex");
    if (orientations.size() != t - 1)
      throw std::invalid_argument("chain on " + std::to_string(t) + " vertices needs " + std::to_string(t - 1) +
                                  " arrows, got " + std::to_string(orientations.size()));
  } else {
    if (t < 2) throw std::invalid_argument("cycle needs at least two vertices");
    if (orientations.size() != t)
      throw std::invalid_argument("cycle on " + std::to_string(t) + " vertices needs " + std::to_string(t) +
                                  " arrows, got " + std::to_string(orientations.size()));
  }
}

long wrap_index(long n, std::size_t t) {
  const long tt = static_cast<long>(t);
  long m = n % tt;
  if (m <= 0) m += tt;
  return m;
}

std::string orientation_string(const QuiverShape& shape) {
  std::string out;
  for (auto o : shape.orientations) out.push_back(o == Orientation::Clockwise ? '>' : '<');
  return out;
}

std::vector<Orientation> parse_orientations(const std::string& text) {
  std::vector<Orientation> out;
  for (char c : text) {
    if (c == '>')
      out.push_back(Orientation::Clockwise);
    else if (c == '<')
      out.push_back(Orientation::Counterclockwise);
    else
      throw std::invalid_argument(std::string("orientation character must be '>' or '<', got '") + c + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------

void Representation::validate() const {
  shape.validate();
  if (dims.size() != shape.t)
    throw std::invalid_argument("expected " + std::to_string(shape.t) + " dimensions, got " +
                                std::to_string(dims.size()));
  if (matrices.size() != shape.arrow_count())
    throw std::invalid_argument("expected " + std::to_string(shape.arrow_count()) + " matrices, got " +
                                std::to_string(matrices.size()));
  for (std::size_t a = 0; a < matrices.size(); ++a) {
    const auto& m = matrices[a];
    const std::size_t r = dims[shape.target(a)];
    const std::size_t c = dims[shape.source(a)];
    if (m.rows() != r || m.cols() != c)
      throw std::invalid_argument("arrow " + std::to_string(a + 1) + " must be " + std::to_string(r) + "x" +
                                  std::to_string(c) + ", got " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()));
    if (!m.all_finite()) throw std::invalid_argument("arrow " + std::to_string(a + 1) + " has non-finite entries");
  }
}

std::size_t Representation::total_dim() const {
  std::size_t s = 0;
  for (auto d : dims) s += d;
  return s;
}

double Representation::max_arrow_norm() const {
  double m = 0.0;
  for (const auto& a : matrices) m = std::max(m, a.frobenius_norm());
  return m;
}

TolerancePolicy anchored(const TolerancePolicy& tol, const Representation& a) {
  TolerancePolicy out = tol;
  for (const auto& m : a.matrices) out.scale = std::max(out.scale, spectral_norm(m));
  return out;
}

Representation zero_representation(const QuiverShape& shape, std::vector<std::size_t> dims) {
  Representation r;
  r.shape = shape;
  r.dims = std::move(dims);
  if (r.dims.size() != shape.t) throw std::invalid_argument("dimension vector length must equal t");
  for (std::size_t a = 0; a < shape.arrow_count(); ++a)
    r.matrices.push_back(ComplexMatrix::zeros(r.dims[shape.target(a)], r.dims[shape.source(a)]));
  return r;
}

Isomorphism Isomorphism::identity(const std::vector<std::size_t>& dims) {
  Isomorphism s;
  for (auto d : dims) s.at_vertex.push_back(ComplexMatrix::identity(d));
  return s;
}

Isomorphism compose(const Isomorphism& outer, const Isomorphism& inner) {
  if (outer.at_vertex.size() != inner.at_vertex.size())
    throw std::invalid_argument("isomorphisms act on different vertex counts");
  Isomorphism out;
  for (std::size_t v = 0; v < outer.at_vertex.size(); ++v) out.at_vertex.push_back(outer.at_vertex[v] * inner.at_vertex[v]);
  return out;
}

Representation direct_sum(const Representation& a, const Representation& b) {
  if (!(a.shape == b.shape)) throw std::invalid_argument("direct_sum of representations of different quivers");
  Representation out;
  out.shape = a.shape;
  for (std::size_t v = 0; v < a.dims.size(); ++v) out.dims.push_back(a.dims[v] + b.dims[v]);
  for (std::size_t i = 0; i < a.matrices.size(); ++i) out.matrices.push_back(block_diag(a.matrices[i], b.matrices[i]));
  return out;
}

Representation direct_sum(const std::vector<Representation>& parts, const QuiverShape& shape) {
  Representation out = zero_representation(shape, std::vector<std::size_t>(shape.t, 0));
  for (const auto& p : parts) out = direct_sum(out, p);
  return out;
}

Representation transpose_rep(const Representation& a) {
  Representation out;
  out.shape = a.shape;
  for (auto& o : out.shape.orientations) o = flipped(o);
  out.dims = a.dims;
  for (const auto& m : a.matrices) out.matrices.push_back(m.transpose());
  return out;
}

Representation apply_isomorphism(const Representation& a, const Isomorphism& s, const TolerancePolicy& tol) {
  if (s.at_vertex.size() != a.dims.size()) throw std::invalid_argument("isomorphism has the wrong vertex count");
  std::vector<ComplexMatrix> inv;
  for (std::size_t v = 0; v < a.dims.size(); ++v) {
    const auto& sv = s.at_vertex[v];
    if (sv.rows() != a.dims[v] || sv.cols() != a.dims[v])
      throw std::invalid_argument("isomorphism block at vertex " + std::to_string(v + 1) + " has the wrong size");
    inv.push_back(inverse(sv, tol));
  }
  Representation out = a;
  for (std::size_t i = 0; i < a.matrices.size(); ++i)
    out.matrices[i] = s.at_vertex[a.shape.target(i)] * a.matrices[i] * inv[a.shape.source(i)];
  return out;
}

void transform_vertex(Representation& rep, std::size_t v, const ComplexMatrix& s, const ComplexMatrix& s_inv) {
  for (std::size_t i = 0; i < rep.matrices.size(); ++i) {
    if (rep.shape.target(i) == v) rep.matrices[i] = s * rep.matrices[i];
    if (rep.shape.source(i) == v) rep.matrices[i] = rep.matrices[i] * s_inv;
  }
}

double iso_residual(const Representation& a, const Representation& a2, const Isomorphism& s) {
  if (!(a.shape == a2.shape) || a.dims != a2.dims)
    throw std::invalid_argument("iso_residual needs representations of equal shape and dimensions");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.matrices.size(); ++i) {
    const auto& sv = s.at_vertex[a.shape.target(i)];
    const auto& su = s.at_vertex[a.shape.source(i)];
    worst = std::max(worst, (sv * a.matrices[i] - a2.matrices[i] * su).frobenius_norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------

IndecomposableLabel IndecomposableLabel::interval(long i, long j) {
  if (i < 1 || j < i) throw std::invalid_argument("L(i,j) needs 1 <= i <= j");
  return {LabelKind::Interval, i, j};
}

IndecomposableLabel IndecomposableLabel::walk(long l, long r) {
  if (l < 1 || r < l) throw std::invalid_argument("G(l,r) needs 1 <= l <= r");
  return {LabelKind::Walk, l, r};
}

IndecomposableLabel IndecomposableLabel::regular(long n) {
  if (n < 1) throw std::invalid_argument("Regular(n) needs n >= 1");
  return {LabelKind::Regular, n, n};
}

std::vector<std::size_t> IndecomposableLabel::dimension_vector(const QuiverShape& shape) const {
  std::vector<std::size_t> d(shape.t, 0);
  switch (kind) {
    case LabelKind::Interval:
      for (long v = first; v <= last; ++v) d[static_cast<std::size_t>(v - 1)] += 1;
      break;
    case LabelKind::Walk:
      for (long n = first; n <= last; ++n) d[static_cast<std::size_t>(wrap_index(n, shape.t) - 1)] += 1;
      break;
    case LabelKind::Regular:
      std::fill(d.begin(), d.end(), static_cast<std::size_t>(first));
      break;
  }
  return d;
}

std::string IndecomposableLabel::to_string() const {
  switch (kind) {
    case LabelKind::Interval:
      return "L(" + std::to_string(first) + "," + std::to_string(last) + ")";
    case LabelKind::Walk:
      return "G(" + std::to_string(first) + "," + std::to_string(last) + ")";
    case LabelKind::Regular:
      return "Regular(" + std::to_string(first) + ")";
  }
  return {};
}

IndecomposableLabel IndecomposableLabel::parse(const std::string& text) {
  long a = 0;
  long b = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "L(%ld,%ld%c", &a, &b, &tail) == 3 && tail == ')') return interval(a, b);
  if (std::sscanf(text.c_str(), "G(%ld,%ld%c", &a, &b, &tail) == 3 && tail == ')') return walk(a, b);
  if (std::sscanf(text.c_str(), "Regular(%ld%c", &a, &tail) == 2 && tail == ')') return regular(a);
  throw std::invalid_argument("cannot parse label '" + text + "'");
}

Representation make_L(long i, long j, const QuiverShape& shape) {
  if (shape.kind != QuiverKind::Chain) throw std::invalid_argument("make_L needs a chain");
  if (i < 1 || j < i || j > static_cast<long>(shape.t))
    throw std::invalid_argument("make_L(" + std::to_string(i) + "," + std::to_string(j) + ") out of range for t = " +
                                std::to_string(shape.t));
  auto rep = zero_representation(shape, IndecomposableLabel::interval(i, j).dimension_vector(shape));
  for (long a = i; a < j; ++a) rep.matrices[static_cast<std::size_t>(a - 1)] = ComplexMatrix::identity(1);
  return rep;
}

Representation make_G(long l, long r, const QuiverShape& shape) {
  if (shape.kind != QuiverKind::Cycle) throw std::invalid_argument("make_G needs a cycle");
  if (l < 1 || l > static_cast<long>(shape.t) || r < l)
    throw std::invalid_argument("make_G(" + std::to_string(l) + "," + std::to_string(r) + ") out of range for t = " +
                                std::to_string(shape.t));
  auto rep = zero_representation(shape, IndecomposableLabel::walk(l, r).dimension_vector(shape));
  const long t = static_cast<long>(shape.t);
  // Walk index n sits at position (n - l) / t of V_[n].
  for (long n = l; n < r; ++n) {
    const auto arrow = static_cast<std::size_t>(wrap_index(n, shape.t) - 1);
    const auto here = static_cast<std::size_t>((n - l) / t);
    const auto next = static_cast<std::size_t>((n + 1 - l) / t);
    if (shape.clockwise(arrow))
      rep.matrices[arrow](next, here) = 1.0;
    else
      rep.matrices[arrow](here, next) = 1.0;
  }
  return rep;
}

Representation make_indecomposable(const IndecomposableLabel& label, const QuiverShape& shape) {
  switch (label.kind) {
    case LabelKind::Interval:
      return make_L(label.first, label.last, shape);
    case LabelKind::Walk:
      return make_G(label.first, label.last, shape);
    case LabelKind::Regular:
      break;
  }
  throw std::invalid_argument("Regular labels carry no fixed representation");
}

bool is_regular(const Representation& a, const TolerancePolicy& tol) {
  if (a.shape.kind != QuiverKind::Cycle) return false;
  for (auto d : a.dims)
    if (d != a.dims.front()) return false;
  for (const auto& m : a.matrices) {
    if (m.rows() != m.cols()) return false;
    if (m.rows() == 0) continue;
    if (!(sigma_min(m) > threshold(m, tol))) return false;
  }
  return true;
}

}  // namespace quiverstair
