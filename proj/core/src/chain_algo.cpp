#include "quiverstair/chain_algo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "quiverstair/errors.hpp"

namespace quiverstair {

void ChainCanonicalForm::add(long i, long j, std::size_t count) {
  if (count == 0) return;
  multiplicity[{i, j}] += count;
}

std::size_t ChainCanonicalForm::count(long i, long j) const {
  const auto it = multiplicity.find({i, j});
  return it == multiplicity.end() ? 0 : it->second;
}

std::vector<IndecomposableLabel> ChainCanonicalForm::labels() const {
  std::vector<IndecomposableLabel> out;
  for (const auto& [ij, m] : multiplicity)
    for (std::size_t c = 0; c < m; ++c) out.push_back(IndecomposableLabel::interval(ij.first, ij.second));
  return out;
}

std::vector<std::size_t> ChainCanonicalForm::dimension_vector(std::size_t t) const {
  std::vector<std::size_t> d(t, 0);
  for (const auto& [ij, m] : multiplicity)
    for (long v = ij.first; v <= ij.second; ++v) d[static_cast<std::size_t>(v - 1)] += m;
  return d;
}

namespace {

std::vector<std::size_t> sizes_of(const std::vector<StripBlock>& strips) {
  std::vector<std::size_t> s;
  for (const auto& b : strips) s.push_back(b.size);
  return s;
}

std::vector<std::size_t> offsets_of(const std::vector<StripBlock>& strips) {
  std::vector<std::size_t> off{0};
  for (const auto& b : strips) off.push_back(off.back() + b.size);
  return off;
}

// Strips at vertex r+1 after step r. The unmatched coordinates at r+1 start a
// new chain; they come last for vertical strips and first for horizontal ones.
std::vector<StripBlock> next_strips(const std::vector<StripBlock>& strips, const std::vector<std::size_t>& blocks,
                                    StripAxis axis, long next_vertex, std::size_t next_dim) {
  const std::size_t pinned = std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
  std::vector<StripBlock> out;
  if (axis == StripAxis::Horizontal) out.push_back({next_vertex, next_dim - pinned});
  for (std::size_t i = 0; i < strips.size(); ++i) out.push_back({strips[i].start, blocks[i]});
  if (axis == StripAxis::Vertical) out.push_back({next_vertex, next_dim - pinned});
  return out;
}

}  // namespace

ChainResult canon_chain(const Representation& a, const TolerancePolicy& user_tol) {
  a.validate();
  if (a.shape.kind != QuiverKind::Chain) throw std::invalid_argument("canon_chain needs a chain representation");
  const auto tol = anchored(user_tol, a);
  const std::size_t t = a.shape.t;

  ChainResult out;
  out.reduced = a;
  auto& rep = out.reduced;
  auto& unitaries = out.trace.unitaries;
  for (auto d : a.dims) unitaries.push_back(ComplexMatrix::identity(d));

  std::vector<StripBlock> strips{{1, a.dims[0]}};
  for (std::size_t arrow = 0; arrow + 1 < t; ++arrow) {
    const long r = static_cast<long>(arrow) + 1;
    ChainStep step;
    step.arrow = arrow + 1;
    step.axis = a.shape.clockwise(arrow) ? StripAxis::Vertical : StripAxis::Horizontal;
    step.strips = strips;

    StaircaseResult st;
    try {
      st = staircase_reduce(rep.matrices[arrow], sizes_of(strips), step.axis, tol);
    } catch (const NumericError& e) {
      throw NumericError("chain step " + std::to_string(r) + ": " + e.what());
    }
    step.block_sizes = st.block_sizes;
    step.tau = st.tau;

    const ComplexMatrix strip_u = block_diag(st.per_strip);
    const ComplexMatrix s_here = step.axis == StripAxis::Vertical ? strip_u.adjoint() : strip_u;
    const ComplexMatrix s_next = step.axis == StripAxis::Vertical ? st.outer : st.outer.adjoint();
    transform_vertex(rep, arrow, s_here, s_here.adjoint());
    transform_vertex(rep, arrow + 1, s_next, s_next.adjoint());
    unitaries[arrow] = s_here * unitaries[arrow];
    unitaries[arrow + 1] = s_next * unitaries[arrow + 1];

    for (std::size_t i = 0; i < strips.size(); ++i) out.form.add(strips[i].start, r, strips[i].size - st.block_sizes[i]);
    strips = next_strips(strips, st.block_sizes, step.axis, r + 1, a.dims[arrow + 1]);
    out.trace.steps.push_back(std::move(step));
  }
  for (const auto& b : strips) out.form.add(b.start, static_cast<long>(t), b.size);
  return out;
}

Representation assemble_canonical(const ChainCanonicalForm& form, const QuiverShape& shape) {
  std::vector<Representation> parts;
  for (const auto& [ij, m] : form.multiplicity)
    for (std::size_t c = 0; c < m; ++c) parts.push_back(make_L(ij.first, ij.second, shape));
  return direct_sum(parts, shape);
}

// ---------------------------------------------------------------------------
// Certificate.

namespace {

bool is_identity(const ComplexMatrix& m) { return m == ComplexMatrix::identity(m.rows()); }

// Partial matching encoded by a 0/1 matrix with at most one 1 per row and column:
// col_to_row[c] = row of the 1 in column c, or -1.
std::vector<long> matching(const ComplexMatrix& d) {
  std::vector<long> out(d.cols(), -1);
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) != cplx(0.0)) out[j] = static_cast<long>(i);
  return out;
}

void require_zero(const ComplexMatrix& s, std::size_t i, std::size_t j, double scale) {
  if (std::abs(s(i, j)) > 1e-12 * scale)
    throw ConsistencyError("chain certificate: basis change does not respect the split part (entry " +
                           std::to_string(std::abs(s(i, j))) + ")");
}

// Given a basis change S at the right end of an exact arrow D, returns the
// basis change at the left end that keeps D fixed.
ComplexMatrix restrict_back(const ComplexMatrix& s, const ComplexMatrix& d, bool clockwise) {
  const auto match = matching(d);
  const double scale = 1.0 + s.max_abs();
  if (clockwise) {
    // d : left -> right, image spanned by the matched rows.
    std::vector<bool> in_image(d.rows(), false);
    for (long r : match)
      if (r >= 0) in_image[static_cast<std::size_t>(r)] = true;
    for (std::size_t i = 0; i < d.rows(); ++i)
      if (!in_image[i])
        for (long r : match)
          if (r >= 0) require_zero(s, i, static_cast<std::size_t>(r), scale);
    ComplexMatrix prev = ComplexMatrix::identity(d.cols());
    for (std::size_t c = 0; c < d.cols(); ++c)
      for (std::size_t c2 = 0; c2 < d.cols(); ++c2)
        if (match[c] >= 0 && match[c2] >= 0)
          prev(c, c2) = s(static_cast<std::size_t>(match[c]), static_cast<std::size_t>(match[c2]));
    return prev;
  }
  // d : right -> left, kernel spanned by the unmatched columns.
  for (std::size_t c = 0; c < d.cols(); ++c)
    if (match[c] >= 0)
      for (std::size_t k = 0; k < d.cols(); ++k)
        if (match[k] < 0) require_zero(s, c, k, scale);
  ComplexMatrix prev = ComplexMatrix::identity(d.rows());
  for (std::size_t c = 0; c < d.cols(); ++c)
    for (std::size_t c2 = 0; c2 < d.cols(); ++c2)
      if (match[c] >= 0 && match[c2] >= 0)
        prev(static_cast<std::size_t>(match[c]), static_cast<std::size_t>(match[c2])) = s(c, c2);
  return prev;
}

struct Replay {
  Representation rep;               // arrows left of the current step hold exact 0/1 matrices
  std::vector<ComplexMatrix> exact;  // exact[arrow] once the arrow is split
  std::vector<ComplexMatrix> t;
  std::vector<ComplexMatrix> t_inv;

  void change_basis(std::size_t v, const ComplexMatrix& s, const ComplexMatrix& s_inv) {
    t[v] = s * t[v];
    t_inv[v] = t_inv[v] * s_inv;
  }

  // Basis change at vertex v whose left arrows are already split: the live
  // arrow v is transformed directly, the split part absorbs the change.
  void carry_back(std::size_t v, ComplexMatrix s, ComplexMatrix s_inv) {
    if (v < rep.matrices.size()) {
      auto& m = rep.matrices[v];
      m = rep.shape.target(v) == v ? s * m : m * s_inv;
    }
    change_basis(v, s, s_inv);
    while (v > 0) {
      const std::size_t arrow = v - 1;
      const bool cw = rep.shape.clockwise(arrow);
      ComplexMatrix prev = restrict_back(s, exact[arrow], cw);
      if (is_identity(prev)) break;
      s_inv = restrict_back(s_inv, exact[arrow], cw);
      s = std::move(prev);
      --v;
      change_basis(v, s, s_inv);
    }
  }

  // Basis change at v + 1, whose arrows are all live.
  void change_ahead(std::size_t v, const ComplexMatrix& s, const ComplexMatrix& s_inv) {
    transform_vertex(rep, v, s, s_inv);
    change_basis(v, s, s_inv);
  }
};

ComplexMatrix checked_inverse(const ComplexMatrix& g, long step) {
  try {
    return inverse(g, TolerancePolicy{0.0, 1e-13});
  } catch (const std::invalid_argument&) {
    throw ConsistencyError("chain certificate: staircase block of step " + std::to_string(step) +
                           " is singular in the replay");
  }
}

}  // namespace

ChainCertificate certify_chain(const Representation& a, const ChainResult& result) {
  const std::size_t t = a.shape.t;
  if (result.trace.steps.size() + 1 != t) throw std::invalid_argument("certify_chain: trace does not match the input");
  Replay rp;
  rp.rep = a;
  rp.exact.resize(a.matrices.size());
  for (auto d : a.dims) {
    rp.t.push_back(ComplexMatrix::identity(d));
    rp.t_inv.push_back(ComplexMatrix::identity(d));
  }

  for (std::size_t arrow = 0; arrow + 1 < t; ++arrow) {
    const ChainStep& step = result.trace.steps[arrow];
    const long r = static_cast<long>(arrow) + 1;
    const auto sizes = sizes_of(step.strips);
    const auto off = offsets_of(step.strips);
    const auto& blocks = step.block_sizes;
    const std::size_t pinned = std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
    const bool vertical = step.axis == StripAxis::Vertical;

    const StaircaseResult st = staircase_reduce_sizes(rp.rep.matrices[arrow], sizes, step.axis, blocks);
    const ComplexMatrix strip_u = block_diag(st.per_strip);
    if (vertical) {
      rp.carry_back(arrow, strip_u.adjoint(), strip_u);
      rp.change_ahead(arrow + 1, st.outer, st.outer.adjoint());
    } else {
      rp.carry_back(arrow, strip_u, strip_u.adjoint());
      rp.change_ahead(arrow + 1, st.outer.adjoint(), st.outer);
    }

    // Coordinates of the staircase blocks: pivot[q] at vertex r is matched
    // with position q of the pinned range at vertex r+1.
    std::vector<std::size_t> pivot;
    for (std::size_t i = 0; i < sizes.size(); ++i)
      for (std::size_t q = 0; q < blocks[i]; ++q)
        pivot.push_back(vertical ? off[i] + sizes[i] - blocks[i] + q : off[i] + q);
    const std::size_t here = a.dims[arrow];
    const std::size_t next = a.dims[arrow + 1];
    const std::size_t base = vertical ? 0 : next - pinned;

    ComplexMatrix g(pinned, pinned);
    const ComplexMatrix& m = rp.rep.matrices[arrow];
    for (std::size_t p = 0; p < pinned; ++p)
      for (std::size_t q = 0; q < pinned; ++q) g(p, q) = vertical ? m(base + p, pivot[q]) : m(pivot[p], base + q);
    const ComplexMatrix g_inv = checked_inverse(g, r);

    // Make the staircase blocks identities by a basis change at r+1.
    {
      ComplexMatrix s = ComplexMatrix::identity(next);
      ComplexMatrix s_inv = ComplexMatrix::identity(next);
      s.set_block(base, base, vertical ? g_inv : g);
      s_inv.set_block(base, base, vertical ? g : g_inv);
      rp.change_ahead(arrow + 1, s, s_inv);
    }

    // Clear the remaining entries with pivot rows/columns at r. The pivot at
    // position q belongs to strip owner[q]; only pivots of earlier strips
    // (vertical) or later strips (horizontal) reach a free coordinate.
    const ComplexMatrix& mn = rp.rep.matrices[arrow];
    ComplexMatrix e(here, here);
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < sizes.size(); ++i) owner.insert(owner.end(), blocks[i], i);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const std::size_t free_count = sizes[i] - blocks[i];
      for (std::size_t z = 0; z < free_count; ++z) {
        const std::size_t coord = vertical ? off[i] + z : off[i] + blocks[i] + z;
        for (std::size_t q = 0; q < pinned; ++q) {
          if (vertical ? owner[q] >= i : owner[q] <= i) continue;
          if (vertical)
            e(pivot[q], coord) = -mn(base + q, coord);
          else
            e(coord, pivot[q]) = -mn(coord, base + q);
        }
      }
    }
    // e squares to zero: its nonzero rows and columns are disjoint coordinate sets.
    const ComplexMatrix plus = ComplexMatrix::identity(here) + e;
    const ComplexMatrix minus = ComplexMatrix::identity(here) - e;
    if (vertical)
      rp.carry_back(arrow, minus, plus);
    else
      rp.carry_back(arrow, plus, minus);

    ComplexMatrix d = vertical ? ComplexMatrix(next, here) : ComplexMatrix(here, next);
    for (std::size_t q = 0; q < pinned; ++q) {
      if (vertical)
        d(base + q, pivot[q]) = 1.0;
      else
        d(pivot[q], base + q) = 1.0;
    }
    rp.exact[arrow] = d;
    rp.rep.matrices[arrow] = d;
  }

  // Threads through the exact arrows are the interval summands.
  std::vector<std::vector<long>> right(t);
  std::vector<std::vector<bool>> has_left(t);
  for (std::size_t v = 0; v < t; ++v) {
    right[v].assign(a.dims[v], -1);
    has_left[v].assign(a.dims[v], false);
  }
  for (std::size_t arrow = 0; arrow + 1 < t; ++arrow) {
    const auto match = matching(rp.exact[arrow]);
    for (std::size_t c = 0; c < match.size(); ++c) {
      if (match[c] < 0) continue;
      const auto other = static_cast<std::size_t>(match[c]);
      const std::size_t lhs = a.shape.clockwise(arrow) ? c : other;
      const std::size_t rhs = a.shape.clockwise(arrow) ? other : c;
      right[arrow][lhs] = static_cast<long>(rhs);
      has_left[arrow + 1][rhs] = true;
    }
  }
  struct Thread {
    long first;
    long last;
    std::vector<std::size_t> coords;
  };
  std::vector<Thread> threads;
  for (std::size_t v = 0; v < t; ++v)
    for (std::size_t c = 0; c < a.dims[v]; ++c) {
      if (has_left[v][c]) continue;
      Thread th{static_cast<long>(v) + 1, static_cast<long>(v) + 1, {c}};
      std::size_t w = v;
      std::size_t cur = c;
      while (w + 1 < t && right[w][cur] >= 0) {
        cur = static_cast<std::size_t>(right[w][cur]);
        ++w;
        th.coords.push_back(cur);
      }
      th.last = static_cast<long>(w) + 1;
      threads.push_back(std::move(th));
    }
  std::stable_sort(threads.begin(), threads.end(),
                   [](const Thread& x, const Thread& y) { return std::pair(x.first, x.last) < std::pair(y.first, y.last); });

  ChainCanonicalForm seen;
  std::vector<ComplexMatrix> perm;
  for (auto d : a.dims) perm.emplace_back(d, d);
  std::vector<std::size_t> fill(t, 0);
  for (const auto& th : threads) {
    seen.add(th.first, th.last, 1);
    for (std::size_t k = 0; k < th.coords.size(); ++k) {
      const auto v = static_cast<std::size_t>(th.first - 1) + k;
      perm[v](fill[v]++, th.coords[k]) = 1.0;
    }
  }
  if (!(seen == result.form))
    throw ConsistencyError("chain certificate: the split structure disagrees with the recorded multiset");

  ChainCertificate cert;
  cert.split = rp.rep;
  for (std::size_t v = 0; v < t; ++v) {
    cert.transform.at_vertex.push_back(perm[v] * rp.t[v]);
    cert.scale = std::max({cert.scale, rp.t[v].frobenius_norm(), rp.t_inv[v].frobenius_norm()});
  }
  cert.residual = iso_residual(a, assemble_canonical(result.form, a.shape), cert.transform);
  return cert;
}

}  // namespace quiverstair
