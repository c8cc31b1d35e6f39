#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "quiverstair/errors.hpp"
#include "quiverstair/linalg.hpp"

namespace qs = quiverstair;
using qs::ComplexMatrix;
using qs::cplx;

namespace {

ComplexMatrix sigma_matrix(const std::vector<double>& sigma, std::size_t rows, std::size_t cols) {
  ComplexMatrix d(rows, cols);
  for (std::size_t i = 0; i < sigma.size(); ++i) d(i, i) = sigma[i];
  return d;
}

void expect_svd_contract(const ComplexMatrix& a) {
  const auto f = qs::svd(a);
  ASSERT_EQ(f.u.rows(), a.rows());
  ASSERT_EQ(f.v.rows(), a.cols());
  ASSERT_EQ(f.sigma.size(), std::min(a.rows(), a.cols()));
  EXPECT_LE(qs::unitarity_defect(f.u), 1e-12 * std::max<std::size_t>(1, a.rows()));
  EXPECT_LE(qs::unitarity_defect(f.v), 1e-12 * std::max<std::size_t>(1, a.cols()));
  for (std::size_t i = 1; i < f.sigma.size(); ++i) EXPECT_GE(f.sigma[i - 1], f.sigma[i]);
  for (double s : f.sigma) EXPECT_GE(s, 0.0);
  const auto rebuilt = f.u * sigma_matrix(f.sigma, a.rows(), a.cols()) * f.v.adjoint();
  EXPECT_LE((rebuilt - a).frobenius_norm(), 1e-12 * std::max(1.0, a.frobenius_norm()));
}

}  // namespace

TEST(BlockConstructors, DiagonalOnesOfSizeOneIsZeroByOne) {
  const auto f1 = qs::diagonal_ones(1);
  EXPECT_EQ(f1.rows(), 0u);
  EXPECT_EQ(f1.cols(), 1u);
  EXPECT_EQ(qs::superdiagonal_ones(1).rows(), 0u);
}

TEST(BlockConstructors, DiagonalAndSuperdiagonalOnes) {
  EXPECT_EQ(qs::diagonal_ones(3), (ComplexMatrix{{1, 0, 0}, {0, 1, 0}}));
  EXPECT_EQ(qs::superdiagonal_ones(3), (ComplexMatrix{{0, 1, 0}, {0, 0, 1}}));
}

TEST(BlockConstructors, JordanIdentityZero) {
  EXPECT_EQ(qs::jordan_block(2, 0.0), (ComplexMatrix{{0, 1}, {0, 0}}));
  EXPECT_EQ(qs::jordan_block(2, 3.0), (ComplexMatrix{{3, 1}, {0, 3}}));
  EXPECT_EQ(qs::make_block(qs::BlockKind::Identity, 0), ComplexMatrix(0, 0));
  const auto z = qs::make_block(qs::BlockKind::Zero, 2, 0.0, 3);
  EXPECT_EQ(z.rows(), 2u);
  EXPECT_EQ(z.cols(), 3u);
  EXPECT_THROW(qs::diagonal_ones(0), std::invalid_argument);
  EXPECT_THROW(qs::make_block(qs::BlockKind::Identity, -1), std::invalid_argument);
}

TEST(BlockDiag, DegenerateStacking) {
  const ComplexMatrix m{{1, 2}, {3, 4}, {5, 6}};
  const auto s = qs::block_diag(m, ComplexMatrix(2, 0));
  ASSERT_EQ(s.rows(), 5u);
  ASSERT_EQ(s.cols(), 2u);
  EXPECT_EQ(s.block(0, 0, 3, 2), m);
  EXPECT_EQ(s.block(3, 0, 2, 2).max_abs(), 0.0);
  const auto t = qs::block_diag(m, ComplexMatrix(0, 2));
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.cols(), 4u);
}

TEST(Svd, KnownSpectra) {
  auto s = qs::singular_values(ComplexMatrix::identity(3));
  EXPECT_EQ(s.size(), 3u);
  for (double x : s) EXPECT_NEAR(x, 1.0, 1e-15);
  s = qs::singular_values(ComplexMatrix(2, 3));
  EXPECT_EQ(s, (std::vector<double>{0.0, 0.0}));
  s = qs::singular_values(ComplexMatrix{{3, 0}, {4, 0}});
  EXPECT_NEAR(s[0], 5.0, 1e-14);
  EXPECT_NEAR(s[1], 0.0, 1e-14);
}

TEST(Svd, EmptyMatrices) {
  for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {0, 3}, {3, 0}}) {
    const auto f = qs::svd(ComplexMatrix(r, c));
    EXPECT_TRUE(f.sigma.empty());
    EXPECT_EQ(f.u, ComplexMatrix::identity(r));
    EXPECT_EQ(f.v, ComplexMatrix::identity(c));
  }
}

TEST(Svd, RandomShapesReconstruct) {
  std::mt19937_64 rng(11);
  for (std::size_t r = 1; r <= 9; ++r)
    for (std::size_t c = 1; c <= 9; ++c) expect_svd_contract(oracle_ref::gaussian(r, c, rng));
}

TEST(Svd, ExtremeMagnitudes) {
  std::mt19937_64 rng(12);
  for (double scale : {1e300, 1e-300, 1e-310}) {
    const auto g = oracle_ref::gaussian(4, 3, rng);
    const auto reference = qs::singular_values(g);
    const auto f = qs::svd(cplx(scale) * g);
    ASSERT_EQ(f.sigma.size(), reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i)
      EXPECT_NEAR(f.sigma[i] / scale, reference[i], 1e-12 * reference.front()) << scale;
    EXPECT_LE(qs::unitarity_defect(f.u), 1e-12 * 4);
  }
}

TEST(Svd, RankDeficientAndGraded) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle_ref::gaussian(7, 3, rng) * oracle_ref::gaussian(3, 6, rng);
    expect_svd_contract(a);
    EXPECT_EQ(qs::numerical_rank(a, {}), 3u);
  }
  ComplexMatrix graded(5, 5);
  for (std::size_t i = 0; i < 5; ++i) graded(i, i) = std::pow(10.0, -3.0 * static_cast<double>(i));
  const auto u = oracle_ref::haar_unitary(5, rng);
  const auto v = oracle_ref::haar_unitary(5, rng);
  const auto a = u * graded * v.adjoint();
  expect_svd_contract(a);
  const auto s = qs::singular_values(a);
  EXPECT_NEAR(s[2], 1e-6, 1e-12);
  EXPECT_EQ(qs::numerical_rank(a, {}), 3u);
}

TEST(Svd, StructuredMatrices) {
  expect_svd_contract(qs::jordan_block(8, 0.0));
  expect_svd_contract(qs::jordan_block(6, cplx(1.0, -2.0)));
  expect_svd_contract(qs::superdiagonal_ones(7));
  ComplexMatrix ones(6, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) ones(i, j) = 1.0;
  expect_svd_contract(ones);
  EXPECT_EQ(qs::numerical_rank(ones, {}), 1u);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(qs::numerical_rank(ComplexMatrix::identity(4), {}), 4u);
  EXPECT_EQ(qs::numerical_rank(ComplexMatrix(3, 3), {}), 0u);
  EXPECT_EQ(qs::numerical_rank(qs::diagonal_ones(3), {}), 2u);
  EXPECT_EQ(qs::numerical_rank(ComplexMatrix(0, 4), {}), 0u);
}

TEST(NumericalRank, MatchesFractionFreeEliminationOnIntegerMatrices) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 8;
    const std::size_t c = 1 + rng() % 8;
    const std::size_t inner = 1 + rng() % 8;
    // Products of small integer factors give every rank up to min(r, c).
    const auto a = oracle_ref::random_int(r, inner, 2, rng);
    const auto b = oracle_ref::random_int(inner, c, 2, rng);
    oracle_ref::IntMatrix prod(r, std::vector<std::int64_t>(c, 0));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < inner; ++k)
        for (std::size_t j = 0; j < c; ++j) prod[i][j] += a[i][k] * b[k][j];
    const auto exact = oracle_ref::bareiss_rank(prod);
    const auto m = oracle_ref::to_complex(prod);
    EXPECT_EQ(qs::numerical_rank(m, {}), exact);
    EXPECT_EQ(qs::two_sided_reduce(m, qs::TolerancePolicy{}).rank, exact);
  }
}

TEST(TolerancePolicy, Threshold) {
  qs::TolerancePolicy tol;
  EXPECT_DOUBLE_EQ(tol.threshold(0.0), 1e-12);
  EXPECT_DOUBLE_EQ(tol.threshold(1e6), 1e-2);
  EXPECT_DOUBLE_EQ(qs::threshold(ComplexMatrix(0, 0), tol), 1e-12);
}

TEST(RowCompress, Examples) {
  auto rc = qs::row_compress(ComplexMatrix(3, 2), qs::TolerancePolicy{});
  EXPECT_EQ(rc.rank, 0u);
  EXPECT_EQ((rc.q * ComplexMatrix(3, 2)).max_abs(), 0.0);
  rc = qs::row_compress(ComplexMatrix::identity(2), qs::TolerancePolicy{});
  EXPECT_EQ(rc.rank, 2u);
  const ComplexMatrix ones{{1, 1}, {1, 1}};
  rc = qs::row_compress(ones, qs::TolerancePolicy{});
  EXPECT_EQ(rc.rank, 1u);
  EXPECT_LE((rc.q * ones).block(0, 0, 1, 2).frobenius_norm(), rc.tau);
  EXPECT_LE(qs::unitarity_defect(rc.q), 1e-12);
}

TEST(ColCompress, Examples) {
  auto cc = qs::col_compress(ComplexMatrix(2, 3), qs::TolerancePolicy{});
  EXPECT_EQ(cc.rank, 0u);
  cc = qs::col_compress(ComplexMatrix::identity(2), qs::TolerancePolicy{});
  EXPECT_EQ(cc.rank, 2u);
  const ComplexMatrix ones{{1, 1}, {1, 1}};
  cc = qs::col_compress(ones, qs::TolerancePolicy{});
  EXPECT_EQ(cc.rank, 1u);
  EXPECT_LE((ones * cc.w).block(0, 1, 2, 1).frobenius_norm(), cc.tau);
  EXPECT_LE(qs::unitarity_defect(cc.w), 1e-12);
}

TEST(Compressions, RankInvariantUnderUnitaryScrambles) {
  std::mt19937_64 rng(14);
  const auto a = oracle_ref::gaussian(6, 2, rng) * oracle_ref::gaussian(2, 5, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = oracle_ref::haar_unitary(6, rng) * a * oracle_ref::haar_unitary(5, rng);
    const auto rc = qs::row_compress(b, qs::TolerancePolicy{});
    EXPECT_EQ(rc.rank, 2u);
    const auto qb = rc.q * b;
    EXPECT_LE(qb.block(0, 0, 4, 5).frobenius_norm(), rc.tau * 4);
    EXPECT_EQ(qs::numerical_rank(qb.block(4, 0, 2, 5), {}), 2u);
    const auto cc = qs::col_compress(b, qs::TolerancePolicy{});
    EXPECT_EQ(cc.rank, 2u);
    EXPECT_LE((b * cc.w).block(0, 2, 6, 3).frobenius_norm(), cc.tau * 4);
  }
}

TEST(TwoSidedReduce, Examples) {
  auto red = qs::two_sided_reduce(ComplexMatrix(3, 3), qs::TolerancePolicy{});
  EXPECT_EQ(red.rank, 0u);
  red = qs::two_sided_reduce(ComplexMatrix::identity(4), qs::TolerancePolicy{});
  EXPECT_EQ(red.rank, 4u);
  const ComplexMatrix d{{2, 0}, {0, 0}};
  red = qs::two_sided_reduce(d, qs::TolerancePolicy{});
  ASSERT_EQ(red.rank, 1u);
  const auto b = red.p.adjoint() * d * red.s;
  EXPECT_NEAR(std::abs(b(0, 1)), 2.0, 1e-14);
  EXPECT_LE(std::abs(b(0, 0)) + std::abs(b(1, 0)) + std::abs(b(1, 1)), 1e-14);
}

TEST(TwoSidedReduce, TopRightPattern) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t r = 1 + rng() % 7;
    const std::size_t c = 1 + rng() % 7;
    const std::size_t k = rng() % (std::min(r, c) + 1);
    const auto a = oracle_ref::gaussian(r, k, rng) * oracle_ref::gaussian(k, c, rng);
    const auto red = qs::two_sided_reduce(a, qs::TolerancePolicy{});
    ASSERT_EQ(red.rank, k);
    const auto b = red.p.adjoint() * a * red.s;
    EXPECT_LE(b.block(0, 0, r, c - k).frobenius_norm(), 1e-12 * (1 + a.frobenius_norm()));
    EXPECT_LE(b.block(k, c - k, r - k, k).frobenius_norm(), 1e-12 * (1 + a.frobenius_norm()));
    if (k > 0) EXPECT_GT(qs::sigma_min(b.block(0, c - k, k, k)), red.tau);
  }
}

TEST(Staircase, SingleStripIsTwoSidedReduce) {
  std::mt19937_64 rng(16);
  const auto a = oracle_ref::gaussian(4, 2, rng) * oracle_ref::gaussian(2, 5, rng);
  const auto st = qs::staircase_reduce(a, {5}, qs::StripAxis::Vertical, {});
  EXPECT_EQ(st.block_sizes, std::vector<std::size_t>{2});
  const auto st2 = qs::staircase_reduce(a, {0, 5, 0}, qs::StripAxis::Vertical, {});
  EXPECT_EQ(st2.block_sizes, (std::vector<std::size_t>{0, 2, 0}));
  const auto st3 = qs::staircase_reduce(a, {0, 4}, qs::StripAxis::Horizontal, {});
  EXPECT_EQ(st3.block_sizes, (std::vector<std::size_t>{0, 2}));
}

TEST(Staircase, StripSizeMismatchThrows) {
  EXPECT_THROW(qs::staircase_reduce(ComplexMatrix(2, 3), {1, 1}, qs::StripAxis::Vertical, {}), std::invalid_argument);
  EXPECT_THROW(qs::staircase_reduce(ComplexMatrix(2, 3), {3}, qs::StripAxis::Horizontal, {}), std::invalid_argument);
}

namespace {

// Checks the vertical echelon pattern on B = outer * A * diag(per_strip).
void check_vertical(const ComplexMatrix& a, const std::vector<std::size_t>& strips, const qs::StaircaseResult& st) {
  const auto b = st.outer * a * qs::block_diag(st.per_strip);
  const double tol = st.tau * 10 + 1e-12 * a.frobenius_norm();
  std::size_t c0 = 0;
  std::size_t pinned = 0;
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const std::size_t w = strips[i];
    const std::size_t l = st.block_sizes[i];
    EXPECT_LE(b.block(pinned, c0, a.rows() - pinned, w - l).frobenius_norm(), tol);
    EXPECT_LE(b.block(pinned + l, c0 + w - l, a.rows() - pinned - l, l).frobenius_norm(), tol);
    if (l > 0) EXPECT_GT(qs::sigma_min(b.block(pinned, c0 + w - l, l, l)), st.tau);
    pinned += l;
    c0 += w;
  }
  EXPECT_EQ(pinned, qs::numerical_rank(a, {}));
  EXPECT_LE(qs::unitarity_defect(st.outer), 1e-12 * a.rows());
  for (const auto& u : st.per_strip) EXPECT_LE(qs::unitarity_defect(u), 1e-12 * std::max<std::size_t>(1, u.rows()));
}

void check_horizontal(const ComplexMatrix& a, const std::vector<std::size_t>& strips, const qs::StaircaseResult& st) {
  const auto b = qs::block_diag(st.per_strip) * a * st.outer;
  const double tol = st.tau * 10 + 1e-12 * a.frobenius_norm();
  std::size_t free_cols = a.cols();
  std::vector<std::size_t> r0(strips.size() + 1, 0);
  for (std::size_t i = 0; i < strips.size(); ++i) r0[i + 1] = r0[i] + strips[i];
  std::size_t total = 0;
  for (std::size_t i = strips.size(); i-- > 0;) {
    const std::size_t h = strips[i];
    const std::size_t l = st.block_sizes[i];
    EXPECT_LE(b.block(r0[i], 0, h, free_cols - l).frobenius_norm(), tol);
    EXPECT_LE(b.block(r0[i] + l, free_cols - l, h - l, l).frobenius_norm(), tol);
    if (l > 0) EXPECT_GT(qs::sigma_min(b.block(r0[i], free_cols - l, l, l)), st.tau);
    free_cols -= l;
    total += l;
  }
  EXPECT_EQ(total, qs::numerical_rank(a, {}));
}

}  // namespace

TEST(Staircase, RecoversPlantedEchelonBlockSizes) {
  // Two vertical strips of widths 2 and 3 carrying identity blocks of sizes
  // 2 and 1 in a 4-row matrix, scrambled by unitaries that respect the strips.
  ComplexMatrix planted(4, 5);
  planted(0, 0) = 1.0;
  planted(1, 1) = 1.0;
  planted(2, 4) = 1.0;
  planted(0, 3) = 0.5;
  planted(1, 4) = -0.7;
  std::mt19937_64 rng(17);
  const auto scrambled = oracle_ref::haar_unitary(4, rng) * planted *
                         qs::block_diag(oracle_ref::haar_unitary(2, rng), oracle_ref::haar_unitary(3, rng));
  const auto st = qs::staircase_reduce(scrambled, {2, 3}, qs::StripAxis::Vertical, {});
  EXPECT_EQ(st.block_sizes, (std::vector<std::size_t>{2, 1}));
  check_vertical(scrambled, {2, 3}, st);
}

TEST(Staircase, RandomLowRankPatterns) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t r = 1 + rng() % 7;
    const std::size_t c = 1 + rng() % 7;
    const std::size_t k = rng() % (std::min(r, c) + 1);
    const auto a = oracle_ref::gaussian(r, k, rng) * oracle_ref::gaussian(k, c, rng);
    std::vector<std::size_t> vs;
    for (std::size_t left = c; left > 0;) {
      const std::size_t w = rng() % (left + 1);
      vs.push_back(w);
      left -= w;
    }
    vs.push_back(c - std::accumulate(vs.begin(), vs.end(), std::size_t{0}));
    check_vertical(a, vs, qs::staircase_reduce(a, vs, qs::StripAxis::Vertical, {}));
    std::vector<std::size_t> hs;
    for (std::size_t left = r; left > 0;) {
      const std::size_t h = rng() % (left + 1);
      hs.push_back(h);
      left -= h;
    }
    hs.push_back(r - std::accumulate(hs.begin(), hs.end(), std::size_t{0}));
    check_horizontal(a, hs, qs::staircase_reduce(a, hs, qs::StripAxis::Horizontal, {}));
  }
}

TEST(Inverse, RoundTripAndSingular) {
  std::mt19937_64 rng(19);
  const auto a = oracle_ref::gaussian(5, 5, rng);
  EXPECT_LE((qs::inverse(a) * a - ComplexMatrix::identity(5)).frobenius_norm(), 1e-10);
  EXPECT_THROW(qs::inverse(qs::jordan_block(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(qs::inverse(ComplexMatrix(2, 3)), std::invalid_argument);
  EXPECT_EQ(qs::inverse(ComplexMatrix(0, 0)).rows(), 0u);
  EXPECT_TRUE(std::isinf(qs::sigma_min(ComplexMatrix(0, 0))));
}

TEST(Matrix, TextForm) {
  const ComplexMatrix m{{cplx(1, 2), 0}, {cplx(0, -1), 3}};
  const auto s = qs::to_string(m);
  EXPECT_NE(s.find("1+2i"), std::string::npos);
  EXPECT_NE(s.find("0-1i"), std::string::npos);
}
