#include "quiverstair/cycle_algo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "quiverstair/errors.hpp"

namespace quiverstair {

namespace {

constexpr double kSplitPivotCutoff = 1e-8;
// Inverse norm beyond which a split certificate is not inverted.
constexpr double kSingularCertificate = 1e12;

std::size_t vertex_of_level(long level, std::size_t t) { return static_cast<std::size_t>(wrap_index(level, t) - 1); }

std::size_t arrow_of_level(long level, std::size_t t) { return static_cast<std::size_t>(wrap_index(level, t) - 1); }

// Primed segments of every vertex, ascending by level; the tail follows them.
class SegmentBook {
 public:
  explicit SegmentBook(const std::vector<std::size_t>& dims) : dims_(dims), primed_(dims.size()) {}

  std::size_t primed_total(std::size_t v) const {
    std::size_t s = 0;
    for (const auto& seg : primed_[v]) s += seg.size;
    return s;
  }
  std::size_t tail_offset(std::size_t v) const { return primed_total(v); }
  std::size_t tail_size(std::size_t v) const { return dims_[v] - primed_total(v); }

  const Segment& level(std::size_t v, long lvl) const {
    for (const auto& seg : primed_[v])
      if (seg.level == lvl) return seg;
    throw ConsistencyError("shave: level " + std::to_string(lvl) + " missing at vertex " + std::to_string(v + 1));
  }

  // Carves the first `size` tail coordinates of vertex v into a new level.
  void carve(std::size_t v, long lvl, std::size_t size) {
    primed_[v].push_back({lvl, tail_offset(v), size});
  }

  std::vector<std::vector<Segment>> finished() const {
    auto out = primed_;
    for (std::size_t v = 0; v < dims_.size(); ++v) out[v].push_back({kTailLevel, tail_offset(v), tail_size(v)});
    return out;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::vector<Segment>> primed_;
};

struct ShaveState {
  Representation x;
  std::vector<ComplexMatrix> u;

  void change_basis(std::size_t v, const ComplexMatrix& s) {
    transform_vertex(x, v, s, s.adjoint());
    u[v] = s * u[v];
  }
};

ComplexMatrix embed_lower_right(const ComplexMatrix& m, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::identity(n);
  out.set_block(n - m.rows(), n - m.cols(), m);
  return out;
}

ShaveResult finish(const Representation& a, ShaveState state, const SegmentBook& book, long l, long n,
                   std::vector<ShaveStep> steps) {
  const auto& shape = a.shape;
  const std::size_t t = shape.t;
  ShaveResult res;
  res.l = l;
  res.n = n;
  res.steps = std::move(steps);
  res.segments = book.finished();

  const auto chain_shape = primed_chain_shape(shape, l, n);
  res.a_prime = zero_representation(chain_shape, std::vector<std::size_t>(chain_shape.t, 0));
  if (l <= static_cast<long>(t)) {
    for (std::size_t k = 0; k < chain_shape.t; ++k) {
      const long lvl = l + 1 + static_cast<long>(k);
      res.a_prime.dims[k] = book.level(vertex_of_level(lvl, t), lvl).size;
    }
    for (std::size_t k = 0; k + 1 < chain_shape.t; ++k) {
      const long lvl = l + 1 + static_cast<long>(k);
      const std::size_t c = arrow_of_level(lvl, t);
      const auto& here = book.level(shape.left(c), lvl);
      const auto& next = book.level(shape.right(c), lvl + 1);
      const auto& m = state.x.matrices[c];
      res.a_prime.matrices[k] = shape.clockwise(c) ? m.block(next.offset, here.offset, next.size, here.size)
                                                  : m.block(here.offset, next.offset, here.size, next.size);
    }
  }

  std::vector<std::size_t> tails(t);
  for (std::size_t v = 0; v < t; ++v) tails[v] = book.tail_size(v);
  res.a_tilde = zero_representation(shape, tails);
  for (std::size_t c = 0; c < t; ++c) {
    const std::size_t src = shape.source(c);
    const std::size_t dst = shape.target(c);
    res.a_tilde.matrices[c] =
        state.x.matrices[c].block(book.tail_offset(dst), book.tail_offset(src), tails[dst], tails[src]);
  }
  res.trace = std::move(state.u);
  res.transformed = std::move(state.x);
  return res;
}

}  // namespace

QuiverShape primed_chain_shape(const QuiverShape& cycle, long l, long n) {
  if (cycle.kind != QuiverKind::Cycle) throw std::invalid_argument("primed chains live over a cycle");
  if (n < l) throw std::invalid_argument("primed chain needs n >= l, got l=" + std::to_string(l) + " n=" + std::to_string(n));
  std::vector<Orientation> o;
  for (long lvl = l + 1; lvl <= n; ++lvl) o.push_back(cycle.orientations[arrow_of_level(lvl, cycle.t)]);
  return QuiverShape::chain(o);
}

namespace {

// `forced_stop` > 0 ends the shave at that step whatever its stop test says.
ShaveResult shave_once(const Representation& a, const TolerancePolicy& tol, long forced_stop) {
  const auto& shape = a.shape;
  const std::size_t t = shape.t;
  const long tl = static_cast<long>(t);

  ShaveState state{a, {}};
  for (auto d : a.dims) state.u.push_back(ComplexMatrix::identity(d));
  SegmentBook book(a.dims);
  std::vector<ShaveStep> steps;
  std::vector<StopTest> tests;

  long l = tl + 1;
  for (std::size_t c = 0; c < t; ++c) {
    if (shape.clockwise(c) && numerical_rank(a.matrices[c], tol) < a.matrices[c].rows()) {
      l = static_cast<long>(c) + 1;
      break;
    }
  }
  if (l == tl + 1) return finish(a, std::move(state), book, l, l, std::move(steps));

  {
    const std::size_t c = static_cast<std::size_t>(l - 1);
    const std::size_t w = shape.right(c);
    const auto rc = row_compress(state.x.matrices[c], tol);
    const std::size_t split = a.dims[w] - rc.rank;
    state.change_basis(w, rc.q);
    state.x.matrices[c].zero_block(0, 0, split, a.dims[shape.left(c)]);
    book.carve(w, l + 1, split);
    steps.push_back({l, w + 1, true, split, rc.tau});
  }

  const long cap = tl + 2 * static_cast<long>(a.total_dim());
  for (long r = l + 1;; ++r) {
    if (r - l > cap)
      throw ConsistencyError("shave exceeded " + std::to_string(cap) + " steps without reaching the stop condition");
    const std::size_t c = arrow_of_level(r, t);
    const std::size_t u = shape.left(c);
    const std::size_t w = shape.right(c);
    const Segment& prev = book.level(u, r);
    const std::size_t u_off = prev.offset;
    const std::size_t u_len = a.dims[u] - u_off;
    const std::size_t w_off = book.tail_offset(w);
    const std::size_t w_len = book.tail_size(w);
    auto& m = state.x.matrices[c];

    std::size_t split = 0;
    double tau = 0.0;
    if (shape.clockwise(c)) {
      const auto sub = m.block(w_off, u_off, w_len, u_len);
      tau = threshold(sub, tol);
      const auto rc = row_compress(sub.block(0, prev.size, w_len, u_len - prev.size), tau);
      split = w_len - rc.rank;
      state.change_basis(w, embed_lower_right(rc.q, a.dims[w]));
      m.zero_block(w_off, u_off + prev.size, split, u_len - prev.size);
    } else {
      const auto sub = m.block(u_off, w_off, u_len, w_len);
      tau = threshold(sub, tol);
      const auto cc = col_compress(sub.block(0, 0, prev.size, w_len), tau);
      split = cc.rank;
      state.change_basis(w, embed_lower_right(cc.w.adjoint(), a.dims[w]));
      m.zero_block(u_off, w_off + split, prev.size, w_len - split);
    }
    book.carve(w, r + 1, split);
    steps.push_back({r, w + 1, shape.clockwise(c), split, tau});

    if (r < tl) continue;
    // The new level must not reach the tail one arrow further on.
    const std::size_t c2 = arrow_of_level(r + 1, t);
    const std::size_t y = shape.right(c2);
    const Segment& fresh = book.level(w, r + 1);
    const std::size_t y_off = book.tail_offset(y);
    const std::size_t y_len = book.tail_size(y);
    const std::size_t work_len = a.dims[w] - fresh.offset;
    auto& m2 = state.x.matrices[c2];
    ComplexMatrix strip, work;
    if (shape.clockwise(c2)) {
      work = m2.block(y_off, fresh.offset, y_len, work_len);
      strip = work.block(0, 0, y_len, fresh.size);
    } else {
      work = m2.block(fresh.offset, y_off, work_len, y_len);
      strip = work.block(0, 0, fresh.size, y_len);
    }
    const double sigma = strip.empty() ? 0.0 : spectral_norm(strip);
    tests.push_back({r, sigma, threshold(work, tol)});
    if (sigma <= tests.back().tau || r == forced_stop) {
      if (shape.clockwise(c2)) {
        m2.zero_block(y_off, fresh.offset, y_len, fresh.size);
      } else {
        m2.zero_block(fresh.offset, y_off, fresh.size, y_len);
      }
      auto res = finish(a, std::move(state), book, l, r, std::move(steps));
      res.stop_tests = std::move(tests);
      return res;
    }
  }
}

}  // namespace

ShaveResult shave(const Representation& a, const TolerancePolicy& user_tol) {
  a.validate();
  if (a.shape.kind != QuiverKind::Cycle) throw std::invalid_argument("shave expects a cycle representation");
  const auto tol = anchored(user_tol, a);
  auto res = shave_once(a, tol, 0);
  res.certificate = certify_split(a, res, tol);
  if (certified(res.certificate, tol)) return res;

  std::vector<StopTest> rejected;
  for (const auto& test : res.stop_tests)
    if (test.sigma > test.tau) rejected.push_back(test);
  std::stable_sort(rejected.begin(), rejected.end(),
                   [](const StopTest& x, const StopTest& y) { return x.sigma / x.tau < y.sigma / y.tau; });
  if (rejected.size() > kStopRetries) rejected.resize(kStopRetries);
  for (const auto& test : rejected) {
    auto retry = shave_once(a, tol, test.index);
    retry.certificate = certify_split(a, retry, tol);
    if (certified(retry.certificate, tol)) {
      retry.forced_stop = test.index;
      return retry;
    }
  }
  return res;
}

Representation push_down(const Representation& b, long l, long n, const QuiverShape& cycle) {
  const auto chain_shape = primed_chain_shape(cycle, l, n);
  if (!(b.shape == chain_shape))
    throw std::invalid_argument("push_down: chain does not lie over the cycle between levels " + std::to_string(l + 1) +
                                " and " + std::to_string(n + 1));
  b.validate();
  const std::size_t t = cycle.t;
  std::vector<std::size_t> dims(t, 0);
  std::vector<std::size_t> offset(b.dims.size());
  for (std::size_t k = 0; k < b.dims.size(); ++k) {
    const std::size_t v = vertex_of_level(l + 1 + static_cast<long>(k), t);
    offset[k] = dims[v];
    dims[v] += b.dims[k];
  }
  auto out = zero_representation(cycle, dims);
  for (std::size_t k = 0; k < b.matrices.size(); ++k) {
    const std::size_t c = arrow_of_level(l + 1 + static_cast<long>(k), t);
    if (cycle.clockwise(c)) {
      out.matrices[c].set_block(offset[k + 1], offset[k], b.matrices[k]);
    } else {
      out.matrices[c].set_block(offset[k], offset[k + 1], b.matrices[k]);
    }
  }
  return out;
}

Isomorphism push_down(const Isomorphism& s, long l, long n, const QuiverShape& cycle) {
  const auto chain_shape = primed_chain_shape(cycle, l, n);
  if (s.at_vertex.size() != chain_shape.t) throw std::invalid_argument("push_down: isomorphism has the wrong length");
  std::vector<std::vector<ComplexMatrix>> parts(cycle.t);
  for (std::size_t k = 0; k < s.at_vertex.size(); ++k)
    parts[vertex_of_level(l + 1 + static_cast<long>(k), cycle.t)].push_back(s.at_vertex[k]);
  Isomorphism out;
  for (const auto& p : parts) out.at_vertex.push_back(block_diag(p));
  return out;
}

IndecomposableLabel walk_label(long first, long last, std::size_t t) {
  if (last < first) throw std::invalid_argument("walk_label needs first <= last");
  const long start = wrap_index(first, t);
  return IndecomposableLabel::walk(start, last - (first - start));
}

namespace {

// Entries of N_v the least-squares correction may use.
enum class Coupling { LevelLower, OffDiagonal };

SplitCertificate solve_certificate(const Representation& a, const ShaveResult& shaved, Coupling coupling) {
  const auto& shape = a.shape;
  const std::size_t t = shape.t;
  Representation m = a;
  for (std::size_t c = 0; c < t; ++c)
    m.matrices[c] = shaved.trace[shape.target(c)] * a.matrices[c] * shaved.trace[shape.source(c)].adjoint();

  SplitCertificate cert;
  cert.split = direct_sum(push_down(shaved.a_prime, shaved.l, shaved.n, shape), shaved.a_tilde);
  const auto& k = cert.split;

  // LevelLower: N_v(p, q) with level(p) > level(q), the tail counting as the
  // highest level, so I + N_v is unit triangular.
  std::vector<std::vector<long>> level(t);
  for (std::size_t v = 0; v < t; ++v)
    for (const auto& seg : shaved.segments[v])
      for (std::size_t i = 0; i < seg.size; ++i)
        level[v].push_back(seg.level == kTailLevel ? std::numeric_limits<long>::max() : seg.level);

  std::vector<std::vector<long>> unknown(t);
  Eigen::Index n_unknowns = 0;
  for (std::size_t v = 0; v < t; ++v) {
    const std::size_t d = a.dims[v];
    unknown[v].assign(d * d, -1);
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q)
        if (coupling == Coupling::OffDiagonal ? p != q : level[v][p] > level[v][q])
          unknown[v][p * d + q] = n_unknowns++;
  }
  std::vector<Eigen::Index> eq_offset(t + 1, 0);
  for (std::size_t c = 0; c < t; ++c)
    eq_offset[c + 1] = eq_offset[c] + static_cast<Eigen::Index>(a.dims[shape.target(c)] * a.dims[shape.source(c)]);

  // (I + N_y) M = K (I + N_x)  <=>  N_y M - K N_x = K - M.
  Eigen::VectorXcd solution = Eigen::VectorXcd::Zero(n_unknowns);
  if (n_unknowns > 0) {
    Eigen::MatrixXcd sys = Eigen::MatrixXcd::Zero(eq_offset[t], n_unknowns);
    Eigen::VectorXcd rhs(eq_offset[t]);
    for (std::size_t c = 0; c < t; ++c) {
      const std::size_t x = shape.source(c);
      const std::size_t y = shape.target(c);
      const std::size_t dx = a.dims[x];
      const std::size_t dy = a.dims[y];
      const auto& mc = m.matrices[c];
      const auto& kc = k.matrices[c];
      auto eq = [&](std::size_t r, std::size_t col) { return eq_offset[c] + static_cast<Eigen::Index>(r * dx + col); };
      for (std::size_t r = 0; r < dy; ++r)
        for (std::size_t col = 0; col < dx; ++col) rhs(eq(r, col)) = kc(r, col) - mc(r, col);
      for (std::size_t p = 0; p < dy; ++p)
        for (std::size_t q = 0; q < dy; ++q) {
          const long id = unknown[y][p * dy + q];
          if (id < 0) continue;
          for (std::size_t col = 0; col < dx; ++col) sys(eq(p, col), id) += mc(q, col);
        }
      for (std::size_t p = 0; p < dx; ++p)
        for (std::size_t q = 0; q < dx; ++q) {
          const long id = unknown[x][p * dx + q];
          if (id < 0) continue;
          for (std::size_t r = 0; r < dy; ++r) sys(eq(r, q), id) -= kc(r, p);
        }
    }
    // Pivots below kSplitPivotCutoff times the largest count as zero.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
    cod.setThreshold(kSplitPivotCutoff);
    cod.compute(sys);
    solution = cod.solve(rhs);
    if (!solution.allFinite()) throw NumericError("split certificate: least-squares solve produced non-finite values");
  }

  for (std::size_t v = 0; v < t; ++v) {
    const std::size_t d = a.dims[v];
    ComplexMatrix s = ComplexMatrix::identity(d);
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q)
        if (const long id = unknown[v][p * d + q]; id >= 0) s(p, q) = solution(id);
    if (d > 0) cert.inverse_norm = std::max(cert.inverse_norm, 1.0 / sigma_min(s));
    cert.transform.at_vertex.push_back(s * shaved.trace[v]);
  }
  cert.residual = iso_residual(a, k, cert.transform);
  return cert;
}

}  // namespace

bool certified(const SplitCertificate& cert, const TolerancePolicy& tol) {
  return cert.residual * cert.inverse_norm <= tol.threshold(0.0);
}

SplitCertificate certify_split(const Representation& a, const ShaveResult& shaved, const TolerancePolicy& tol) {
  const auto anchored_tol = anchored(tol, a);
  auto cert = solve_certificate(a, shaved, Coupling::LevelLower);
  if (certified(cert, anchored_tol)) return cert;
  auto wide = solve_certificate(a, shaved, Coupling::OffDiagonal);
  return wide.residual * wide.inverse_norm < cert.residual * cert.inverse_norm ? wide : cert;
}

Monodromy monodromy(const Representation& p, const TolerancePolicy& tol) {
  if (p.shape.kind != QuiverKind::Cycle) throw std::invalid_argument("monodromy needs a cycle representation");
  if (!is_regular(p, anchored(tol, p))) throw std::invalid_argument("monodromy needs a regular representation");
  const std::size_t n = p.dims.front();
  Monodromy out;
  out.product = ComplexMatrix::identity(n);
  const TolerancePolicy strict{0.0, 0.0};
  for (std::size_t c = 0; c < p.shape.t; ++c)
    out.product = (p.shape.clockwise(c) ? p.matrices[c] : inverse(p.matrices[c], strict)) * out.product;
  if (n == 0) return out;

  Eigen::MatrixXcd e(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out.product(i, j);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(e, false);
  if (solver.info() != Eigen::Success) throw NumericError("monodromy: eigenvalue iteration did not converge");
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.eigenvalues.push_back(solver.eigenvalues()(i));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

namespace {

void require_regular(const Representation& p, const TolerancePolicy& tol) {
  for (std::size_t v = 1; v < p.dims.size(); ++v) {
    if (p.dims[v] != p.dims.front()) {
      std::ostringstream msg;
      msg << "regular part has unequal dimensions: vertex 1 has " << p.dims.front() << ", vertex " << v + 1 << " has "
          << p.dims[v];
      throw ConsistencyError(msg.str());
    }
  }
  for (std::size_t c = 0; c < p.matrices.size(); ++c) {
    const auto& m = p.matrices[c];
    if (m.empty()) continue;
    const double smin = sigma_min(m);
    const double tau = threshold(m, tol);
    if (!(smin > tau)) {
      std::ostringstream msg;
      msg << "regular part is singular on arrow " << c + 1 << ": sigma_min " << smin << " <= tau " << tau;
      throw ConsistencyError(msg.str());
    }
  }
}

}  // namespace

RegularizingDecomposition regularize(const Representation& a, const TolerancePolicy& user_tol) {
  a.validate();
  if (a.shape.kind != QuiverKind::Cycle) throw std::invalid_argument("regularize expects a cycle representation");
  const auto tol = anchored(user_tol, a);
  const auto& shape = a.shape;
  const std::size_t t = shape.t;

  RegularizingDecomposition out;
  out.first_pass = shave(a, tol);
  const auto& s1 = out.first_pass;
  const auto b = transpose_rep(s1.a_tilde);
  out.second_pass = shave(b, tol);
  const auto& s2 = out.second_pass;

  const auto b_prime_t = transpose_rep(s2.a_prime);
  out.first_chain = canon_chain(s1.a_prime, tol);
  out.second_chain = canon_chain(b_prime_t, tol);
  out.regular_part = transpose_rep(s2.a_tilde);
  require_regular(out.regular_part, tol);
  out.regular_monodromy = monodromy(out.regular_part, tol);

  std::vector<std::pair<IndecomposableLabel, int>> labelled;
  for (const auto& [ij, mult] : out.first_chain.form.multiplicity)
    for (std::size_t i = 0; i < mult; ++i) labelled.emplace_back(walk_label(s1.l + ij.first, s1.l + ij.second, t), 1);
  for (const auto& [ij, mult] : out.second_chain.form.multiplicity)
    for (std::size_t i = 0; i < mult; ++i) labelled.emplace_back(walk_label(s2.l + ij.first, s2.l + ij.second, t), 2);
  std::sort(labelled.begin(), labelled.end());
  for (const auto& [label, pass] : labelled) {
    out.summands.push_back(label);
    out.provenance.push_back(pass);
  }

  const auto up1 = push_down(Isomorphism{out.first_chain.trace.unitaries}, s1.l, s1.n, shape);
  const auto up2 = push_down(Isomorphism{out.second_chain.trace.unitaries}, s2.l, s2.n, shape);
  for (std::size_t v = 0; v < t; ++v) {
    const auto tail = block_diag(up2.at_vertex[v], ComplexMatrix::identity(out.regular_part.dims[v])) *
                      s2.trace[v].conjugate();
    out.trace.push_back(block_diag(up1.at_vertex[v], tail) * s1.trace[v]);
  }

  const auto& split1 = s1.certificate;
  const auto& split2 = s2.certificate;
  const auto chain1 = certify_chain(s1.a_prime, out.first_chain);
  const auto chain2 = certify_chain(b_prime_t, out.second_chain);
  const auto lift1 = push_down(chain1.transform, s1.l, s1.n, shape);
  const auto lift2 = push_down(chain2.transform, s2.l, s2.n, shape);
  const TolerancePolicy strict{0.0, 0.0};
  for (std::size_t v = 0; v < t; ++v) {
    if (!(split2.inverse_norm < kSingularCertificate))
      throw NumericError("regularize: the split certificate of the transposed pass is numerically singular");
    const auto back = inverse(split2.transform.at_vertex[v].transpose(), strict);
    const auto tail = block_diag(lift2.at_vertex[v], ComplexMatrix::identity(out.regular_part.dims[v])) * back;
    out.certificate.at_vertex.push_back(block_diag(lift1.at_vertex[v], tail) * split1.transform.at_vertex[v]);
  }
  const auto target =
      direct_sum(push_down(assemble_canonical(out.first_chain.form, s1.a_prime.shape), s1.l, s1.n, shape),
                 direct_sum(push_down(assemble_canonical(out.second_chain.form, b_prime_t.shape), s2.l, s2.n, shape),
                            out.regular_part));
  out.residual = iso_residual(a, target, out.certificate);
  return out;
}

}  // namespace quiverstair
