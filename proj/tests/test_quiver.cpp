#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "quiverstair/quiver.hpp"

namespace qs = quiverstair;
using qs::ComplexMatrix;
using qs::Orientation;
using qs::QuiverShape;

namespace {

constexpr Orientation CW = Orientation::Clockwise;
constexpr Orientation CCW = Orientation::Counterclockwise;

QuiverShape example_six_cycle() { return QuiverShape::cycle({CW, CCW, CCW, CW, CW, CCW}); }

}  // namespace

TEST(Shape, ArrowCountsAndEndpoints) {
  const auto c = QuiverShape::cycle({CW, CCW, CW});
  EXPECT_EQ(c.t, 3u);
  EXPECT_EQ(c.source(0), 0u);
  EXPECT_EQ(c.target(0), 1u);
  EXPECT_EQ(c.source(1), 2u);
  EXPECT_EQ(c.target(1), 1u);
  EXPECT_EQ(c.source(2), 2u);
  EXPECT_EQ(c.target(2), 0u);
  EXPECT_THROW(QuiverShape::cycle({CW}), std::invalid_argument);
  const auto ch = QuiverShape::chain(4);
  EXPECT_EQ(ch.arrow_count(), 3u);
}

TEST(Shape, WrapIndex) {
  EXPECT_EQ(qs::wrap_index(1, 6), 1);
  EXPECT_EQ(qs::wrap_index(6, 6), 6);
  EXPECT_EQ(qs::wrap_index(7, 6), 1);
  EXPECT_EQ(qs::wrap_index(0, 6), 6);
  EXPECT_EQ(qs::wrap_index(-1, 6), 5);
}

TEST(Shape, OrientationStrings) {
  const auto c = example_six_cycle();
  EXPECT_EQ(qs::orientation_string(c), "><<>><");
  EXPECT_EQ(qs::parse_orientations("><<>><"), c.orientations);
  EXPECT_THROW(qs::parse_orientations(">x"), std::invalid_argument);
}

TEST(DirectSum, NeutralElementAndIdentities) {
  const auto c = QuiverShape::cycle(2);
  const auto a = qs::make_G(1, 4, c);
  const auto zero = qs::zero_representation(c, {0, 0});
  const auto s = qs::direct_sum(a, zero);
  EXPECT_EQ(s.dims, a.dims);
  EXPECT_EQ(s.matrices, a.matrices);
  const auto one = qs::make_G(1, 2, QuiverShape::cycle({CW, CW}));
  // G(1,2) on a clockwise 2-cycle is (I_1, 0); use explicit identities instead.
  qs::Representation ii{c, {1, 1}, {ComplexMatrix::identity(1), ComplexMatrix::identity(1)}};
  const auto sum = qs::direct_sum(ii, ii);
  EXPECT_EQ(sum.matrices[0], ComplexMatrix::identity(2));
  EXPECT_EQ(sum.matrices[1], ComplexMatrix::identity(2));
  EXPECT_EQ(one.dims, (std::vector<std::size_t>{1, 1}));
}

TEST(DirectSum, DegenerateStackingRule) {
  // Arrow 2 -> 1 on a chain: M (2x3) summed with a 1x0 block gives [M; 0].
  const auto ch = QuiverShape::chain({CCW});
  qs::Representation a{ch, {2, 3}, {ComplexMatrix{{1, 2, 3}, {4, 5, 6}}}};
  qs::Representation b{ch, {1, 0}, {ComplexMatrix(1, 0)}};
  const auto s = qs::direct_sum(a, b);
  ASSERT_EQ(s.matrices[0].rows(), 3u);
  ASSERT_EQ(s.matrices[0].cols(), 3u);
  EXPECT_EQ(s.matrices[0].block(0, 0, 2, 3), a.matrices[0]);
  EXPECT_EQ(s.matrices[0].block(2, 0, 1, 3).max_abs(), 0.0);
  EXPECT_THROW(qs::direct_sum(a, qs::zero_representation(QuiverShape::chain({CW}), {0, 0})), std::invalid_argument);
}

TEST(Transpose, InvolutionAndFlags) {
  std::mt19937_64 rng(1);
  const auto c = QuiverShape::cycle({CW, CW});
  qs::Representation a{c, {2, 2}, {oracle_ref::gaussian(2, 2, rng), oracle_ref::gaussian(2, 2, rng)}};
  const auto at = qs::transpose_rep(a);
  EXPECT_EQ(at.shape.orientations, (std::vector<Orientation>{CCW, CCW}));
  EXPECT_EQ(at.matrices[0], a.matrices[0].transpose());
  const auto back = qs::transpose_rep(at);
  EXPECT_EQ(back.matrices, a.matrices);
  EXPECT_EQ(back.shape, a.shape);
}

TEST(Transpose, IsomorphicStaysIsomorphic) {
  std::mt19937_64 rng(2);
  const auto c = QuiverShape::cycle({CW, CCW, CW});
  const auto a = qs::direct_sum(qs::make_G(1, 5, c), qs::make_G(2, 3, c));
  qs::Isomorphism s;
  for (auto d : a.dims) s.at_vertex.push_back(oracle_ref::gaussian(d, d, rng));
  const auto b = qs::apply_isomorphism(a, s);
  // {S_v^T}: B^T -> A^T.
  qs::Isomorphism st;
  for (const auto& m : s.at_vertex) st.at_vertex.push_back(m.transpose());
  EXPECT_LE(qs::iso_residual(qs::transpose_rep(b), qs::transpose_rep(a), st), 1e-12 * (1 + b.max_arrow_norm()));
}

TEST(Isomorphism, IdentityAndScalars) {
  const auto c = QuiverShape::cycle(2);
  qs::Representation a{c, {2, 2}, {ComplexMatrix::identity(2), qs::jordan_block(2, 0.0)}};
  EXPECT_EQ(qs::apply_isomorphism(a, qs::Isomorphism::identity(a.dims)).matrices, a.matrices);
  qs::Isomorphism sc;
  for (int v = 0; v < 2; ++v) sc.at_vertex.push_back(qs::cplx(0.0, 3.0) * ComplexMatrix::identity(2));
  const auto b = qs::apply_isomorphism(a, sc);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(oracle_ref::max_diff(b.matrices[i], a.matrices[i]), 1e-15);
}

TEST(Isomorphism, UnitaryResidualIsTiny) {
  std::mt19937_64 rng(3);
  const auto c = QuiverShape::cycle(2);
  qs::Representation a{c, {2, 2}, {ComplexMatrix::identity(2), qs::jordan_block(2, 0.0)}};
  qs::Isomorphism s{{oracle_ref::haar_unitary(2, rng), oracle_ref::haar_unitary(2, rng)}};
  const auto b = qs::apply_isomorphism(a, s);
  EXPECT_LE(qs::iso_residual(a, b, s), 1e-12);
}

TEST(Isomorphism, SingularBlockRejected) {
  const auto c = QuiverShape::cycle(2);
  qs::Representation a{c, {2, 2}, {ComplexMatrix::identity(2), ComplexMatrix::identity(2)}};
  qs::Isomorphism s{{qs::jordan_block(2, 0.0), ComplexMatrix::identity(2)}};
  EXPECT_THROW(qs::apply_isomorphism(a, s), std::invalid_argument);
}

TEST(Isomorphism, ResidualHandComputed) {
  const auto c = QuiverShape::cycle(2);
  qs::Representation a{c, {1, 1}, {ComplexMatrix{{3.0}}, ComplexMatrix{{4.0}}}};
  const auto zero = qs::zero_representation(c, {1, 1});
  EXPECT_DOUBLE_EQ(qs::iso_residual(a, zero, qs::Isomorphism::identity(a.dims)), 4.0);
  // S = (2, 1): arrow 1 -> 2 gives |1*3 - a'*2|, arrow 2 -> 1 gives |2*4 - b'*1|.
  qs::Representation a2{c, {1, 1}, {ComplexMatrix{{1.0}}, ComplexMatrix{{8.0}}}};
  qs::Isomorphism s{{ComplexMatrix{{2.0}}, ComplexMatrix{{1.0}}}};
  EXPECT_DOUBLE_EQ(qs::iso_residual(a, a2, s), 1.0);
}

TEST(MakeL, Examples) {
  const auto ch2 = QuiverShape::chain({CW});
  const auto l11 = qs::make_L(1, 1, ch2);
  EXPECT_EQ(l11.dims, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(l11.matrices[0].rows(), 0u);
  EXPECT_EQ(l11.matrices[0].cols(), 1u);
  const auto l11r = qs::make_L(1, 1, QuiverShape::chain({CCW}));
  EXPECT_EQ(l11r.matrices[0].rows(), 1u);
  EXPECT_EQ(l11r.matrices[0].cols(), 0u);
  const auto ch4 = QuiverShape::chain({CW, CCW, CW});
  const auto l14 = qs::make_L(1, 4, ch4);
  for (const auto& m : l14.matrices) EXPECT_EQ(m, ComplexMatrix::identity(1));
  EXPECT_EQ(qs::make_L(2, 3, ch4).dims, (std::vector<std::size_t>{0, 1, 1, 0}));
  EXPECT_THROW(qs::make_L(2, 5, ch4), std::invalid_argument);
  EXPECT_THROW(qs::make_L(3, 2, ch4), std::invalid_argument);
}

TEST(MakeL, MultiplicityOracleSeesExactlyOneInterval) {
  const auto ch = QuiverShape::chain({CW, CCW, CCW, CW});
  for (long i = 1; i <= 5; ++i)
    for (long j = i; j <= 5; ++j) {
      const auto m = oracle_ref::interval_multiplicities(qs::make_L(i, j, ch));
      ASSERT_EQ(m.size(), 1u);
      EXPECT_EQ(m.begin()->first, std::make_pair(i, j));
      EXPECT_EQ(m.begin()->second, 1);
    }
}

TEST(MakeG, WorkedExampleOnSixCycle) {
  const auto g = qs::make_G(1, 9, example_six_cycle());
  EXPECT_EQ(g.dims, (std::vector<std::size_t>{2, 2, 2, 1, 1, 1}));
  EXPECT_EQ(g.matrices[0], ComplexMatrix::identity(2));
  EXPECT_EQ(g.matrices[1], ComplexMatrix::identity(2));
  EXPECT_EQ(g.matrices[2], (ComplexMatrix{{1}, {0}}));
  EXPECT_EQ(g.matrices[3], ComplexMatrix::identity(1));
  EXPECT_EQ(g.matrices[4], ComplexMatrix::identity(1));
  EXPECT_EQ(g.matrices[5], (ComplexMatrix{{0, 1}}));
}

TEST(MakeG, NilpotentWalkIsShiftUpToBasisReversal) {
  // G(l, l-1+pt): identities everywhere except a nilpotent p x p shift at
  // arrow [l-1]. Increasing walk order gives the lower shift, which is
  // J_p(0) after reversing the basis at every vertex.
  for (std::size_t t = 2; t <= 4; ++t) {
    const auto c = QuiverShape::cycle(t);
    for (long l = 1; l <= static_cast<long>(t); ++l)
      for (long p = 1; p <= 3; ++p) {
        const auto g = qs::make_G(l, l - 1 + p * static_cast<long>(t), c);
        const auto nil = static_cast<std::size_t>(qs::wrap_index(l - 1, t) - 1);
        for (std::size_t a = 0; a < t; ++a) {
          if (a == nil)
            EXPECT_EQ(g.matrices[a], qs::jordan_block(p, 0.0).transpose());
          else
            EXPECT_EQ(g.matrices[a], ComplexMatrix::identity(static_cast<std::size_t>(p)));
        }
      }
  }
}

TEST(MakeG, DimensionsAndPermutationPattern) {
  std::mt19937_64 rng(4);
  for (std::size_t t = 2; t <= 5; ++t)
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Orientation> o;
      for (std::size_t i = 0; i < t; ++i) o.push_back(rng() % 2 ? CW : CCW);
      const auto c = QuiverShape::cycle(o);
      for (long l = 1; l <= static_cast<long>(t); ++l)
        for (long r = l; r <= l + 3 * static_cast<long>(t); ++r) {
          const auto g = qs::make_G(l, r, c);
          g.validate();
          EXPECT_EQ(static_cast<long>(g.total_dim()), r - l + 1);
          for (const auto& m : g.matrices) {
            for (std::size_t i = 0; i < m.rows(); ++i) {
              double s = 0;
              for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
              EXPECT_LE(s, 1.0);
            }
            for (std::size_t j = 0; j < m.cols(); ++j) {
              double s = 0;
              for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
              EXPECT_LE(s, 1.0);
            }
          }
        }
    }
  const auto c = QuiverShape::cycle(4);
  EXPECT_EQ(qs::make_G(1, 1, c).dims, (std::vector<std::size_t>{1, 0, 0, 0}));
  EXPECT_THROW(qs::make_G(5, 6, c), std::invalid_argument);
  EXPECT_THROW(qs::make_G(2, 1, c), std::invalid_argument);
}

TEST(Labels, TextRoundTripAndDimensions) {
  const auto c = example_six_cycle();
  for (const auto& l : {qs::IndecomposableLabel::interval(2, 4), qs::IndecomposableLabel::walk(3, 11),
                        qs::IndecomposableLabel::regular(2)})
    EXPECT_EQ(qs::IndecomposableLabel::parse(l.to_string()), l);
  EXPECT_EQ(qs::IndecomposableLabel::walk(1, 9).dimension_vector(c), (std::vector<std::size_t>{2, 2, 2, 1, 1, 1}));
  EXPECT_THROW(qs::IndecomposableLabel::parse("X(1,2)"), std::invalid_argument);
  EXPECT_THROW(qs::IndecomposableLabel::walk(3, 2), std::invalid_argument);
}

TEST(Regular, Examples) {
  const auto c2 = QuiverShape::cycle(2);
  EXPECT_TRUE(qs::is_regular({c2, {3, 3}, {ComplexMatrix::identity(3), ComplexMatrix::identity(3)}}));
  EXPECT_FALSE(qs::is_regular({c2, {2, 2}, {ComplexMatrix::identity(2), qs::jordan_block(2, 0.0)}}));
  const auto c3 = QuiverShape::cycle({CW, CCW, CW});
  EXPECT_TRUE(qs::is_regular(
      {c3, {2, 2, 2}, {ComplexMatrix::identity(2), ComplexMatrix::identity(2), qs::jordan_block(2, 2.0)}}));
  EXPECT_FALSE(qs::is_regular(qs::make_G(1, 2, c2)));
  EXPECT_TRUE(qs::is_regular(qs::zero_representation(c2, {0, 0})));
}

TEST(Validate, RejectsBadSizes) {
  const auto c2 = QuiverShape::cycle(2);
  qs::Representation bad{c2, {2, 1}, {ComplexMatrix(2, 2), ComplexMatrix(2, 1)}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  qs::Representation nan{c2, {1, 1}, {ComplexMatrix{{NAN}}, ComplexMatrix{{1}}}};
  EXPECT_THROW(nan.validate(), std::invalid_argument);
}
