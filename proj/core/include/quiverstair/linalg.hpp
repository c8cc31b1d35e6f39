#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace quiverstair {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Zero rows or zero columns are legal and
/// stand for the maps 0 -> C^n and C^n -> 0.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  /// Row-wise literal, e.g. {{1, 0}, {0, 1}}. Every row must have equal length.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<cplx>& entries() const { return data_; }

  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& m);
  void zero_block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc);

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Block-diagonal sum following the 0xn / nx0 stacking rules: a p x q block
/// summed with an m x 0 block yields [M; 0_{m x q}].
ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks);
ComplexMatrix hstack(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix vstack(const ComplexMatrix& a, const ComplexMatrix& b);

/// ||A^* A - I||_F for square A.
double unitarity_defect(const ComplexMatrix& q);

/// Row-major text form with entries written as a+bi.
std::string to_string(const ComplexMatrix& m);
std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m);

// ---------------------------------------------------------------------------
// Canonical building blocks.

enum class BlockKind {
  DiagonalOnes,       // (n-1) x n, ones on the main diagonal
  SuperdiagonalOnes,  // (n-1) x n, ones on the superdiagonal
  Jordan,             // n x n Jordan block with eigenvalue lambda
  Identity,           // n x n
  Zero,               // n x m
};

/// `n` is the size parameter; `m` is the column count for BlockKind::Zero.
ComplexMatrix make_block(BlockKind kind, long n, cplx lambda = 0.0, long m = -1);

ComplexMatrix diagonal_ones(long n);
ComplexMatrix superdiagonal_ones(long n);
ComplexMatrix jordan_block(long n, cplx lambda);

// ---------------------------------------------------------------------------
// Rank decisions.

struct TolerancePolicy {
  double abs_floor = 1e-12;
  double rel_factor = 1e-8;
  /// Reference norm of the surrounding problem; 0 leaves tau purely per matrix.
  double scale = 0.0;

  /// tau = max(abs_floor, rel_factor * max(sigma_max, scale)).
  double threshold(double sigma_max) const;
};

struct Svd {
  ComplexMatrix u;           // rows x rows, unitary
  std::vector<double> sigma; // min(rows, cols) values, nonincreasing
  ComplexMatrix v;           // cols x cols, unitary
};

/// A = U diag(sigma) V^*. Golub-Kahan bidiagonalization followed by
/// implicit-shift QR on the real bidiagonal. Throws NumericError when the QR
/// sweeps exceed 100 * min(rows, cols).
Svd svd(const ComplexMatrix& a);
std::vector<double> singular_values(const ComplexMatrix& a);

double spectral_norm(const ComplexMatrix& a);
double threshold(const ComplexMatrix& a, const TolerancePolicy& tol);
std::size_t numerical_rank(const ComplexMatrix& a, const TolerancePolicy& tol);
std::size_t rank_above(const std::vector<double>& sigma, double tau);

struct RowCompression {
  ComplexMatrix q;   // Q * A = [0; R]
  std::size_t rank = 0;
  double tau = 0.0;
};

struct ColCompression {
  ComplexMatrix w;   // A * W = [C | 0]
  std::size_t rank = 0;
  double tau = 0.0;
};

struct TwoSidedReduction {
  ComplexMatrix p;   // P^* A S = [[0, H], [0, 0]], H rank x rank in the top-right
  ComplexMatrix s;
  std::size_t rank = 0;
  double tau = 0.0;
};

RowCompression row_compress(const ComplexMatrix& a, const TolerancePolicy& tol);
RowCompression row_compress(const ComplexMatrix& a, double tau);
ColCompression col_compress(const ComplexMatrix& a, const TolerancePolicy& tol);
ColCompression col_compress(const ComplexMatrix& a, double tau);
TwoSidedReduction two_sided_reduce(const ComplexMatrix& a, const TolerancePolicy& tol);
TwoSidedReduction two_sided_reduce(const ComplexMatrix& a, double tau);
/// Same form with a prescribed rank instead of a threshold decision.
TwoSidedReduction two_sided_reduce_rank(const ComplexMatrix& a, std::size_t rank);

enum class StripAxis { Vertical, Horizontal };

/// Result of a staircase reduction.
///
/// Vertical strips (column groups, processed left to right):
///   B = outer * A * diag(per_strip...)
/// Horizontal strips (row groups, processed bottom to top):
///   B = diag(per_strip...) * A * outer
/// Strip i of B carries a nonsingular l_i x l_i block; all other entries of
/// the pinned pattern are zero up to tau.
struct StaircaseResult {
  ComplexMatrix outer;
  std::vector<ComplexMatrix> per_strip;
  std::vector<std::size_t> block_sizes;
  double tau = 0.0;
  ComplexMatrix reduced;
};

StaircaseResult staircase_reduce(const ComplexMatrix& a, const std::vector<std::size_t>& strip_sizes,
                                 StripAxis axis, const TolerancePolicy& tol);
/// Variant used when block sizes are already known (replays of an earlier run).
StaircaseResult staircase_reduce_sizes(const ComplexMatrix& a, const std::vector<std::size_t>& strip_sizes,
                                       StripAxis axis, const std::vector<std::size_t>& block_sizes);

/// Inverse through the SVD. Throws std::invalid_argument if A is not square
/// or its smallest singular value is not above tau(A).
ComplexMatrix inverse(const ComplexMatrix& a, const TolerancePolicy& tol = {});
/// Smallest singular value of a square matrix (0 for the empty matrix is
/// replaced by +inf, since C^0 -> C^0 is invertible).
double sigma_min(const ComplexMatrix& a);

}  // namespace quiverstair
