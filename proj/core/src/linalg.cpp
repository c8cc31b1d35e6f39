#include "quiverstair/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quiverstair/errors.hpp"

namespace quiverstair {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged row literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::invalid_argument("ComplexMatrix::block out of range");
  ComplexMatrix out(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
  return out;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& m) {
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_) {
    throw std::invalid_argument("ComplexMatrix::set_block out of range");
  }
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) (*this)(r0 + i, c0 + j) = m(i, j);
}

void ComplexMatrix::zero_block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::invalid_argument("ComplexMatrix::zero_block out of range");
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) (*this)(r0 + i, c0 + j) = 0.0;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(*this);
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  // Scaled accumulation keeps huge or tiny entries from overflowing.
  double scale = 0.0;
  double ssq = 1.0;
  for (const auto& z : data_) {
    for (double x : {z.real(), z.imag()}) {
      if (x == 0.0) continue;
      const double ax = std::abs(x);
      if (scale < ax) {
        ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
        scale = ax;
      } else {
        ssq += (ax / scale) * (ax / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("ComplexMatrix +=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("ComplexMatrix -=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("ComplexMatrix *: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  ComplexMatrix out(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return out;
}

ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
  ComplexMatrix out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column mismatch");
  ComplexMatrix out(a.rows() + b.rows(), a.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

double unitarity_defect(const ComplexMatrix& q) {
  if (q.rows() != q.cols()) throw std::invalid_argument("unitarity_defect: matrix is not square");
  return (q.adjoint() * q - ComplexMatrix::identity(q.rows())).frobenius_norm();
}

std::string to_string(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m) {
  os << m.rows() << "x" << m.cols() << " [";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i == 0 ? "[" : ", [");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const cplx z = m(i, j);
      if (j) os << ", ";
      os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    os << "]";
  }
  return os << "]";
}

// ---------------------------------------------------------------------------

ComplexMatrix make_block(BlockKind kind, long n, cplx lambda, long m) {
  switch (kind) {
    case BlockKind::DiagonalOnes:
    case BlockKind::SuperdiagonalOnes: {
      if (n < 1) throw std::invalid_argument("make_block: n must be >= 1 for the (n-1) x n blocks");
      const auto un = static_cast<std::size_t>(n);
      ComplexMatrix out(un - 1, un);
      const std::size_t shift = kind == BlockKind::SuperdiagonalOnes ? 1 : 0;
      for (std::size_t i = 0; i + 1 < un; ++i) out(i, i + shift) = 1.0;
      return out;
    }
    case BlockKind::Jordan: {
      if (n < 0) throw std::invalid_argument("make_block: negative Jordan size");
      const auto un = static_cast<std::size_t>(n);
      ComplexMatrix out(un, un);
      for (std::size_t i = 0; i < un; ++i) {
        out(i, i) = lambda;
        if (i + 1 < un) out(i, i + 1) = 1.0;
      }
      return out;
    }
    case BlockKind::Identity:
      if (n < 0) throw std::invalid_argument("make_block: negative identity size");
      return ComplexMatrix::identity(static_cast<std::size_t>(n));
    case BlockKind::Zero: {
      const long cols = m < 0 ? n : m;
      if (n < 0 || cols < 0) throw std::invalid_argument("make_block: negative zero-block size");
      return ComplexMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(cols));
    }
  }
  throw std::invalid_argument("make_block: unknown kind");
}

ComplexMatrix diagonal_ones(long n) { return make_block(BlockKind::DiagonalOnes, n); }
ComplexMatrix superdiagonal_ones(long n) { return make_block(BlockKind::SuperdiagonalOnes, n); }
ComplexMatrix jordan_block(long n, cplx lambda) { return make_block(BlockKind::Jordan, n, lambda); }

double TolerancePolicy::threshold(double sigma_max) const {
  return std::max(abs_floor, rel_factor * std::max(sigma_max, scale));
}

// ---------------------------------------------------------------------------
// SVD

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder reflector H = I - beta v v^* with H x = alpha e_1. An empty v
// means H = I (x already zero below its first entry).
struct Reflector {
  std::vector<cplx> v;
  double beta = 0.0;
};

Reflector make_reflector(std::vector<cplx> x) {
  Reflector h;
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += std::norm(x[i]);
  if (tail == 0.0) return h;  // identity; nothing to annihilate
  const double norm = std::sqrt(std::norm(x[0]) + tail);
  const double ax0 = std::abs(x[0]);
  const cplx phase = ax0 == 0.0 ? cplx(1.0, 0.0) : x[0] / ax0;
  const cplx alpha = -phase * norm;
  x[0] -= alpha;
  double vv = 0.0;
  for (const auto& z : x) vv += std::norm(z);
  h.v = std::move(x);
  h.beta = 2.0 / vv;
  return h;
}

// A(r0:, c0:) <- H A(r0:, c0:), H acting on rows r0..r0+len-1.
void apply_left(ComplexMatrix& a, const Reflector& h, std::size_t r0, std::size_t c0) {
  if (h.v.empty()) return;
  for (std::size_t j = c0; j < a.cols(); ++j) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < h.v.size(); ++i) s += std::conj(h.v[i]) * a(r0 + i, j);
    s *= h.beta;
    for (std::size_t i = 0; i < h.v.size(); ++i) a(r0 + i, j) -= h.v[i] * s;
  }
}

// A(r0:, c0:) <- A(r0:, c0:) H, H acting on columns c0..c0+len-1.
void apply_right(ComplexMatrix& a, const Reflector& h, std::size_t r0, std::size_t c0) {
  if (h.v.empty()) return;
  for (std::size_t i = r0; i < a.rows(); ++i) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < h.v.size(); ++k) s += a(i, c0 + k) * h.v[k];
    s *= h.beta;
    for (std::size_t k = 0; k < h.v.size(); ++k) a(i, c0 + k) -= s * std::conj(h.v[k]);
  }
}

// Columns j, k of M: (mj, mk) <- (c mj + s mk, -s mj + c mk).
void rotate_cols(ComplexMatrix& m, std::size_t j, std::size_t k, double c, double s) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const cplx x = m(i, j), y = m(i, k);
    m(i, j) = c * x + s * y;
    m(i, k) = -s * x + c * y;
  }
}

void givens(double f, double g, double& c, double& s, double& r) {
  if (g == 0.0) {
    c = 1.0;
    s = 0.0;
    r = f;
    return;
  }
  r = std::hypot(f, g);
  c = f / r;
  s = g / r;
}

// SVD of a tall (rows >= cols) matrix.
Svd svd_tall(const ComplexMatrix& input, bool want_vectors) {
  const std::size_t m = input.rows();
  const std::size_t n = input.cols();
  ComplexMatrix a = input;
  ComplexMatrix u = want_vectors ? ComplexMatrix::identity(m) : ComplexMatrix();
  ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix();

  // Bidiagonalize: A = U B V^*.
  for (std::size_t k = 0; k < n; ++k) {
    {
      std::vector<cplx> x(m - k);
      for (std::size_t i = k; i < m; ++i) x[i - k] = a(i, k);
      const Reflector h = make_reflector(std::move(x));
      apply_left(a, h, k, k);
      if (want_vectors) apply_right(u, h, 0, k);
      for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
    }
    if (k + 2 < n) {
      std::vector<cplx> x(n - k - 1);
      for (std::size_t j = k + 1; j < n; ++j) x[j - k - 1] = std::conj(a(k, j));
      const Reflector h = make_reflector(std::move(x));
      apply_right(a, h, k, k + 1);
      if (want_vectors) apply_right(v, h, 0, k + 1);
      for (std::size_t j = k + 2; j < n; ++j) a(k, j) = 0.0;
    }
  }

  // Rotate phases so the bidiagonal is real and nonnegative.
  std::vector<double> d(n, 0.0), e(n > 0 ? n - 1 : 0, 0.0);
  {
    std::vector<cplx> dc(n), ec(e.size());
    for (std::size_t k = 0; k < n; ++k) dc[k] = a(k, k);
    for (std::size_t k = 0; k + 1 < n; ++k) ec[k] = a(k, k + 1);
    for (std::size_t k = 0; k < n; ++k) {
      const double ad = std::abs(dc[k]);
      if (ad != 0.0) {
        const cplx phi = dc[k] / ad;
        d[k] = ad;
        if (k + 1 < n) ec[k] *= std::conj(phi);
        if (want_vectors)
          for (std::size_t i = 0; i < m; ++i) u(i, k) *= phi;
      }
      if (k + 1 < n) {
        const double ae = std::abs(ec[k]);
        if (ae != 0.0) {
          const cplx psi = ec[k] / ae;
          e[k] = ae;
          dc[k + 1] *= std::conj(psi);
          if (want_vectors)
            for (std::size_t i = 0; i < n; ++i) v(i, k + 1) *= std::conj(psi);
        }
      }
    }
  }

  double bnorm = 0.0;
  for (std::size_t k = 0; k < n; ++k) bnorm = std::max(bnorm, d[k] + (k + 1 < n ? e[k] : 0.0));
  const double small = kEps * bnorm;

  const std::size_t max_sweeps = 100 * n;
  std::size_t sweeps = 0;
  std::size_t hi = n == 0 ? 0 : n - 1;
  while (hi > 0) {
    for (std::size_t i = 0; i < hi; ++i) {
      if (e[i] != 0.0 && (std::abs(e[i]) <= kEps * (std::abs(d[i]) + std::abs(d[i + 1])) ||
                          std::abs(e[i]) <= small * kEps)) {
        e[i] = 0.0;
      }
    }
    if (e[hi - 1] == 0.0) {
      --hi;
      continue;
    }
    std::size_t lo = hi - 1;
    while (lo > 0 && e[lo - 1] != 0.0) --lo;

    // A zero on the diagonal splits the block after chasing its row.
    std::size_t zero_at = n;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (std::abs(d[k]) <= small) {
        zero_at = k;
        break;
      }
    }
    if (zero_at != n) {
      const std::size_t k = zero_at;
      d[k] = 0.0;
      double c, s, r;
      if (k < hi) {
        double f = e[k];
        e[k] = 0.0;
        for (std::size_t j = k + 1; j <= hi && f != 0.0; ++j) {
          givens(d[j], f, c, s, r);
          d[j] = r;
          if (j < hi) {
            f = -s * e[j];
            e[j] = c * e[j];
          }
          if (want_vectors) rotate_cols(u, j, k, c, s);
        }
      } else {
        double f = e[hi - 1];
        e[hi - 1] = 0.0;
        for (std::size_t j = hi; j-- > lo && f != 0.0;) {
          givens(d[j], f, c, s, r);
          d[j] = r;
          if (j > lo) {
            f = -s * e[j - 1];
            e[j - 1] = c * e[j - 1];
          }
          if (want_vectors) rotate_cols(v, j, hi, c, s);
        }
      }
      continue;
    }

    if (++sweeps > max_sweeps) {
      std::ostringstream os;
      os << "svd: implicit QR did not converge after " << max_sweeps << " sweeps (matrix "
         << input.rows() << "x" << input.cols() << ", Frobenius norm " << input.frobenius_norm() << ")";
      throw NumericError(os.str());
    }

    // Wilkinson shift from the trailing 2x2 of B^T B.
    const double dm = d[hi - 1], dn = d[hi], em = e[hi - 1];
    const double el = hi - 1 > lo ? e[hi - 2] : 0.0;
    const double ta = dm * dm + el * el;
    const double tb = dm * em;
    const double tc = dn * dn + em * em;
    const double half = 0.5 * (ta - tc);
    double mu = tc;
    if (tb != 0.0) {
      const double root = std::hypot(half, tb);
      mu = tc - tb * tb / (half + (half >= 0.0 ? root : -root));
    }

    double y = d[lo] * d[lo] - mu;
    double z = d[lo] * e[lo];
    for (std::size_t k = lo; k < hi; ++k) {
      double c, s, r;
      givens(y, z, c, s, r);
      if (k > lo) e[k - 1] = r;
      const double dk = d[k], ek = e[k], dk1 = d[k + 1];
      d[k] = c * dk + s * ek;
      e[k] = -s * dk + c * ek;
      const double bulge = s * dk1;
      d[k + 1] = c * dk1;
      if (want_vectors) rotate_cols(v, k, k + 1, c, s);

      givens(d[k], bulge, c, s, r);
      d[k] = r;
      const double ek2 = e[k], dk12 = d[k + 1];
      e[k] = c * ek2 + s * dk12;
      d[k + 1] = -s * ek2 + c * dk12;
      if (k + 1 < hi) {
        y = e[k];
        z = s * e[k + 1];
        e[k + 1] = c * e[k + 1];
      }
      if (want_vectors) rotate_cols(u, k, k + 1, c, s);
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (d[k] < 0.0) {
      d[k] = -d[k];
      if (want_vectors)
        for (std::size_t i = 0; i < n; ++i) v(i, k) = -v(i, k);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] > d[y]; });
  Svd out;
  out.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.sigma[k] = d[order[k]];
  if (want_vectors) {
    out.u = u;
    out.v = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = u(i, order[k]);
      for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, order[k]);
    }
  }
  return out;
}

Svd svd_impl(const ComplexMatrix& a, bool want_vectors) {
  if (!a.all_finite()) throw NumericError("svd: matrix has non-finite entries");
  if (a.empty()) {
    Svd out;
    if (want_vectors) {
      out.u = ComplexMatrix::identity(a.rows());
      out.v = ComplexMatrix::identity(a.cols());
    }
    return out;
  }
  // Entries far from unit magnitude are rescaled by a power of two, which is
  // exact, so squared quantities in the shift cannot overflow or underflow.
  const double peak = a.max_abs();
  int exponent = 0;
  if (peak > 0.0 && (peak > 0x1p+500 || peak < 0x1p-500)) std::frexp(peak, &exponent);
  ComplexMatrix scaled = a;
  if (exponent != 0)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < a.cols(); ++k)
        scaled(i, k) = {std::ldexp(a(i, k).real(), -exponent), std::ldexp(a(i, k).imag(), -exponent)};
  Svd t;
  if (a.rows() >= a.cols()) {
    t = svd_tall(scaled, want_vectors);
  } else {
    t = svd_tall(scaled.adjoint(), want_vectors);
    std::swap(t.u, t.v);
  }
  for (auto& s : t.sigma) s = std::ldexp(s, exponent);
  return t;
}

}  // namespace

Svd svd(const ComplexMatrix& a) { return svd_impl(a, true); }

std::vector<double> singular_values(const ComplexMatrix& a) { return svd_impl(a, false).sigma; }

double spectral_norm(const ComplexMatrix& a) {
  const auto s = singular_values(a);
  return s.empty() ? 0.0 : s.front();
}

double threshold(const ComplexMatrix& a, const TolerancePolicy& tol) { return tol.threshold(spectral_norm(a)); }

std::size_t rank_above(const std::vector<double>& sigma, double tau) {
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > tau; }));
}

std::size_t numerical_rank(const ComplexMatrix& a, const TolerancePolicy& tol) {
  const auto s = singular_values(a);
  return rank_above(s, tol.threshold(s.empty() ? 0.0 : s.front()));
}

RowCompression row_compress(const ComplexMatrix& a, const TolerancePolicy& tol) {
  return row_compress(a, threshold(a, tol));
}

RowCompression row_compress(const ComplexMatrix& a, double tau) {
  const Svd f = svd(a);
  const std::size_t m = a.rows();
  const std::size_t k = rank_above(f.sigma, tau);
  // Rows of Q: the m-k trailing left singular vectors first, then the k leading.
  ComplexMatrix q(m, m);
  for (std::size_t i = 0; i < m - k; ++i)
    for (std::size_t j = 0; j < m; ++j) q(i, j) = std::conj(f.u(j, k + i));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < m; ++j) q(m - k + i, j) = std::conj(f.u(j, i));
  return {q, k, tau};
}

ColCompression col_compress(const ComplexMatrix& a, const TolerancePolicy& tol) {
  return col_compress(a, threshold(a, tol));
}

ColCompression col_compress(const ComplexMatrix& a, double tau) {
  Svd f = svd(a);
  return {std::move(f.v), rank_above(f.sigma, tau), tau};
}

TwoSidedReduction two_sided_reduce_rank(const ComplexMatrix& a, std::size_t k) {
  const Svd f = svd(a);
  const std::size_t n = a.cols();
  if (k > f.sigma.size()) throw std::invalid_argument("two_sided_reduce_rank: rank exceeds min(rows, cols)");
  // S = [V(:, k:) | V(:, :k)] puts the significant columns on the right.
  ComplexMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n - k; ++j) s(i, j) = f.v(i, k + j);
    for (std::size_t j = 0; j < k; ++j) s(i, n - k + j) = f.v(i, j);
  }
  TwoSidedReduction out;
  out.p = f.u;
  out.s = std::move(s);
  out.rank = k;
  return out;
}

TwoSidedReduction two_sided_reduce(const ComplexMatrix& a, double tau) {
  const auto sigma = singular_values(a);
  TwoSidedReduction out = two_sided_reduce_rank(a, rank_above(sigma, tau));
  out.tau = tau;
  return out;
}

TwoSidedReduction two_sided_reduce(const ComplexMatrix& a, const TolerancePolicy& tol) {
  return two_sided_reduce(a, threshold(a, tol));
}

namespace {

std::vector<std::size_t> offsets_of(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> off(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];
  return off;
}

// Shared body of both staircase entry points. When `forced` is non-null the
// block sizes are taken from it instead of from tau.
StaircaseResult staircase_body(const ComplexMatrix& a, const std::vector<std::size_t>& strips, StripAxis axis,
                               double tau, const std::vector<std::size_t>* forced) {
  const std::size_t total = axis == StripAxis::Vertical ? a.cols() : a.rows();
  const auto off = offsets_of(strips);
  if (off.back() != total) throw std::invalid_argument("staircase_reduce: strip sizes do not sum to the strip axis");
  if (forced && forced->size() != strips.size()) {
    throw std::invalid_argument("staircase_reduce_sizes: one block size per strip required");
  }

  StaircaseResult out;
  out.tau = tau;
  out.block_sizes.assign(strips.size(), 0);
  out.per_strip.resize(strips.size());
  ComplexMatrix b = a;

  if (axis == StripAxis::Vertical) {
    // Left to right; H-blocks take the top free rows and the right end of
    // their strip.
    const std::size_t m = b.rows();
    ComplexMatrix outer = ComplexMatrix::identity(m);
    std::size_t pinned = 0;
    for (std::size_t idx = 0; idx < strips.size(); ++idx) {
      const std::size_t c0 = off[idx], w = strips[idx];
      const std::size_t free_rows = m - pinned;
      const ComplexMatrix sub = b.block(pinned, c0, free_rows, w);
      const TwoSidedReduction red =
          forced ? two_sided_reduce_rank(sub, (*forced)[idx]) : two_sided_reduce(sub, tau);
      const ComplexMatrix ph = red.p.adjoint();
      b.set_block(pinned, 0, ph * b.block(pinned, 0, free_rows, b.cols()));
      b.set_block(0, c0, b.block(0, c0, m, w) * red.s);
      ComplexMatrix lift = ComplexMatrix::identity(m);
      lift.set_block(pinned, pinned, ph);
      outer = lift * outer;
      b.zero_block(pinned, c0, free_rows, w - red.rank);
      b.zero_block(pinned + red.rank, c0 + w - red.rank, free_rows - red.rank, red.rank);
      out.per_strip[idx] = red.s;
      out.block_sizes[idx] = red.rank;
      pinned += red.rank;
    }
    out.outer = std::move(outer);
  } else {
    // Bottom to top; H-blocks take the top rows of their strip and the right
    // end of the free columns.
    const std::size_t n = b.cols();
    ComplexMatrix outer = ComplexMatrix::identity(n);
    std::size_t free_cols = n;
    for (std::size_t idx = strips.size(); idx-- > 0;) {
      const std::size_t r0 = off[idx], h = strips[idx];
      const ComplexMatrix sub = b.block(r0, 0, h, free_cols);
      const TwoSidedReduction red =
          forced ? two_sided_reduce_rank(sub, (*forced)[idx]) : two_sided_reduce(sub, tau);
      const ComplexMatrix ph = red.p.adjoint();
      b.set_block(r0, 0, ph * b.block(r0, 0, h, n));
      b.set_block(0, 0, b.block(0, 0, b.rows(), free_cols) * red.s);
      ComplexMatrix lift = ComplexMatrix::identity(n);
      lift.set_block(0, 0, red.s);
      outer = outer * lift;
      b.zero_block(r0, 0, h, free_cols - red.rank);
      b.zero_block(r0 + red.rank, free_cols - red.rank, h - red.rank, red.rank);
      out.per_strip[idx] = ph;
      out.block_sizes[idx] = red.rank;
      free_cols -= red.rank;
    }
    out.outer = std::move(outer);
  }
  out.reduced = std::move(b);
  return out;
}

}  // namespace

StaircaseResult staircase_reduce(const ComplexMatrix& a, const std::vector<std::size_t>& strip_sizes,
                                 StripAxis axis, const TolerancePolicy& tol) {
  return staircase_body(a, strip_sizes, axis, threshold(a, tol), nullptr);
}

StaircaseResult staircase_reduce_sizes(const ComplexMatrix& a, const std::vector<std::size_t>& strip_sizes,
                                       StripAxis axis, const std::vector<std::size_t>& block_sizes) {
  return staircase_body(a, strip_sizes, axis, 0.0, &block_sizes);
}

ComplexMatrix inverse(const ComplexMatrix& a, const TolerancePolicy& tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix is not square");
  const Svd f = svd(a);
  const std::size_t n = a.rows();
  if (n == 0) return ComplexMatrix();
  const double tau = tol.threshold(f.sigma.front());
  if (f.sigma.back() <= tau) {
    std::ostringstream os;
    os << "inverse: matrix is numerically singular (sigma_min " << f.sigma.back() << " <= tau " << tau << ")";
    throw std::invalid_argument(os.str());
  }
  // V diag(1/sigma) U^*
  ComplexMatrix vs = f.v;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) vs(i, j) /= f.sigma[j];
  return vs * f.u.adjoint();
}

double sigma_min(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sigma_min: matrix is not square");
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  return singular_values(a).back();
}

}  // namespace quiverstair
