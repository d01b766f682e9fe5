#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "support.hpp"

using namespace gaitlab;

namespace {

FrameMatrix column(std::initializer_list<double> v) {
  FrameMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

double local(const FrameMatrix& a, Eigen::Index i, const FrameMatrix& b, Eigen::Index j, LocalCost c) {
  return c == LocalCost::L1 ? (a.row(i) - b.row(j)).cwiseAbs().sum() : (a.row(i) - b.row(j)).norm();
}

// Walks every monotone path from (0,0) to (n-1,m-1) and returns the cheapest.
void enumerate(const FrameMatrix& a, const FrameMatrix& b, LocalCost c, Eigen::Index i, Eigen::Index j, double acc,
               double& best) {
  acc += local(a, i, b, j, c);
  if (i == a.rows() - 1 && j == b.rows() - 1) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.rows()) enumerate(a, b, c, i + 1, j, acc, best);
  if (j + 1 < b.rows()) enumerate(a, b, c, i, j + 1, acc, best);
  if (i + 1 < a.rows() && j + 1 < b.rows()) enumerate(a, b, c, i + 1, j + 1, acc, best);
}

double brute_force(const FrameMatrix& a, const FrameMatrix& b, LocalCost c) {
  double best = std::numeric_limits<double>::infinity();
  enumerate(a, b, c, 0, 0, 0.0, best);
  return best;
}

FrameMatrix random_ints(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_int_distribution<int> v(-5, 5);
  FrameMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = v(rng);
  return m;
}

}  // namespace

TEST(Dtw, Examples) {
  EXPECT_EQ(dtw_distance(column({1, 2, 3}), column({1, 2, 3}), {LocalCost::L1}), 0.0);
  EXPECT_EQ(dtw_distance(column({0}), column({5}), {LocalCost::L1}), 5.0);
  EXPECT_EQ(dtw_distance(column({1, 2, 3}), column({1, 2, 2, 3}), {LocalCost::L1}), 0.0);
  EXPECT_EQ(brute_force(column({1, 2, 3}), column({1, 2, 2, 3}), LocalCost::L1), 0.0);
  // L2 cost of a single 2-channel cell.
  FrameMatrix a(1, 2), b(1, 2);
  a << 0, 0;
  b << 3, 4;
  EXPECT_DOUBLE_EQ(dtw_distance(a, b), 5.0);
}

TEST(Dtw, Errors) {
  EXPECT_THROW(dtw_distance(FrameMatrix::Zero(3, 2), FrameMatrix::Zero(3, 3)), ShapeError);
  EXPECT_THROW(dtw_distance(FrameMatrix::Zero(0, 2), FrameMatrix::Zero(3, 2)), InvalidArgument);
}

TEST(Dtw, MatchesPathEnumerationUpToSixFrames) {
  std::mt19937_64 rng(17);
  for (Eigen::Index n = 1; n <= 6; ++n)
    for (Eigen::Index m = 1; m <= 6; ++m)
      for (int trial = 0; trial < 8; ++trial) {
        FrameMatrix a = random_ints(rng, n, 2), b = random_ints(rng, m, 2);
        for (LocalCost c : {LocalCost::L1, LocalCost::L2}) {
          const double got = dtw_distance(a, b, {c});
          if (c == LocalCost::L1) EXPECT_EQ(got, brute_force(a, b, c)) << n << "x" << m;
          else EXPECT_NEAR(got, brute_force(a, b, c), 1e-12) << n << "x" << m;
        }
      }
}

TEST(Dtw, SymmetricExactly) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    FrameMatrix a(1 + trial % 9, 3), b(1 + (trial * 5) % 11, 3);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    for (LocalCost c : {LocalCost::L1, LocalCost::L2}) EXPECT_EQ(dtw_distance(a, b, {c}), dtw_distance(b, a, {c}));
  }
}

TEST(Dtw, ZeroOnlyForFramewiseEqualSequences) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    FrameMatrix a = random_ints(rng, 5, 2);
    EXPECT_EQ(dtw_distance(a, a), 0.0);
    FrameMatrix b = a;
    b(trial % 5, trial % 2) += 1.0;
    EXPECT_GT(dtw_distance(a, b), 0.0);
  }
}

TEST(Dtw, ConstantSequencesOfAnyLength) {
  for (Eigen::Index n = 1; n < 20; n += 3)
    EXPECT_EQ(dtw_distance(FrameMatrix::Constant(4, 2, 1.5), FrameMatrix::Constant(n, 2, 1.5), {LocalCost::L1}), 0.0);
}

TEST(Dtw, SharedSuffixAddsNoCost) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    FrameMatrix a = random_ints(rng, 1 + trial % 5, 2), b = random_ints(rng, 1 + (trial / 5) % 5, 2);
    FrameMatrix x = random_ints(rng, 1 + trial % 3, 2);
    FrameMatrix ax(a.rows() + x.rows(), 2), bx(b.rows() + x.rows(), 2);
    ax << a, x;
    bx << b, x;
    EXPECT_LE(dtw_distance(ax, bx, {LocalCost::L1}), dtw_distance(a, b, {LocalCost::L1}));
  }
}
