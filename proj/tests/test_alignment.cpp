#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "qsvm/alignment.hpp"
#include "qsvm/errors.hpp"
#include "test_util.hpp"

using namespace qsvm;
using testutil::kPi;

TEST(IdealKernel, SameClass) {
  EXPECT_EQ(ideal_kernel(Eigen::Vector2d(1, 1)), Eigen::MatrixXd::Ones(2, 2));
}

TEST(IdealKernel, DifferentClasses) {
  Eigen::Matrix2d e;
  e << 1, -1, -1, 1;
  EXPECT_EQ(ideal_kernel(Eigen::Vector2d(1, -1)), Eigen::MatrixXd(e));
}

TEST(IdealKernel, OuterProductRankOne) {
  Eigen::VectorXd y(5);
  y << 1, -1, -1, 1, 1;
  const auto K = ideal_kernel(y);
  EXPECT_EQ(K, y * y.transpose());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  EXPECT_EQ(lu.rank(), 1);
}

TEST(IdealKernel, RejectsBadLabels) {
  EXPECT_THROW(ideal_kernel(Eigen::Vector2d(1, 0)), DomainError);
  EXPECT_THROW(ideal_kernel(Eigen::VectorXd(0)), SizeError);
}

TEST(Frobenius, Identity) { EXPECT_EQ(frobenius_inner(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()), 2.0); }

TEST(Frobenius, HandExpansion) {
  Eigen::Matrix2d a, b;
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  EXPECT_EQ(frobenius_inner(a, b), 70.0);
}

TEST(Frobenius, NonNegativeSelfProduct) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto a = testutil::normal_matrix(rng, 4, 3);
    EXPECT_GE(frobenius_inner(a, a), 0.0);
  }
}

TEST(Frobenius, ShapeMismatch) {
  EXPECT_THROW(frobenius_inner(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(3, 2)), ShapeError);
}

TEST(TargetAlignment, SelfIsOne) {
  Eigen::VectorXd y(4);
  y << 1, -1, 1, 1;
  const auto T = ideal_kernel(y);
  EXPECT_NEAR(target_alignment(T, T), 1.0, 1e-12);
}

TEST(TargetAlignment, BalancedAllOnesIsZero) {
  Eigen::VectorXd y(4);
  y << 1, 1, -1, -1;
  EXPECT_EQ(target_alignment(Eigen::MatrixXd::Ones(4, 4), ideal_kernel(y)), 0.0);
}

TEST(TargetAlignment, ScaleInvariantInKernel) {
  Rng rng(2);
  const auto A = testutil::normal_matrix(rng, 5, 5);
  const Eigen::MatrixXd K = A * A.transpose();
  Eigen::VectorXd y(5);
  y << 1, -1, -1, 1, -1;
  const double base = target_alignment(K, ideal_kernel(y));
  for (double s : {1e-3, 0.5, 7.0, 1e4}) EXPECT_NEAR(target_alignment((s * K).eval(), ideal_kernel(y)), base, 1e-12);
}

TEST(TargetAlignment, ZeroKernelDegenerate) {
  EXPECT_THROW(target_alignment(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 2)), DegenerateError);
}

TEST(AlignmentObjective, RangeForRandomTheta) {
  Rng rng(3);
  const Eigen::MatrixXd X = testutil::uniform_matrix(rng, 8, 2, 0, 1);
  Eigen::VectorXd y(8);
  y << 1, 1, 1, 1, -1, -1, -1, -1;
  for (int i = 0; i < 20; ++i) {
    const double a = alignment_objective(testutil::uniform_vector(rng, 4, -kPi, kPi), X, y, {2, 2}, ExactKernel{});
    EXPECT_GE(a, -1.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(AlignmentObjective, PermutationInvariant) {
  Rng rng(4);
  const Eigen::MatrixXd X = testutil::uniform_matrix(rng, 6, 2, 0, 1);
  Eigen::VectorXd y(6);
  y << 1, -1, 1, -1, -1, 1;
  std::vector<int> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[4]);
  Eigen::MatrixXd Xp(6, 2);
  Eigen::VectorXd yp(6);
  for (int i = 0; i < 6; ++i) {
    Xp.row(i) = X.row(perm[i]);
    yp[i] = y[perm[i]];
  }
  const Eigen::Vector4d t(0.7, -0.1, 0.3, 1.9);
  EXPECT_NEAR(alignment_objective(t, X, y, {2, 2}, ExactKernel{}), alignment_objective(t, Xp, yp, {2, 2}, ExactKernel{}),
              1e-12);
}

TEST(AlignmentObjective, OppositeLabelsOnIdenticalPoints) {
  Eigen::MatrixXd X(2, 2);
  X << 0.3, 0.8, 0.3, 0.8;
  Rng rng(5);
  for (int i = 0; i < 10; ++i)
    EXPECT_NEAR(alignment_objective(testutil::uniform_vector(rng, 4, -kPi, kPi), X, Eigen::Vector2d(1, -1), {2, 2},
                                    ExactKernel{}),
                0.0, 1e-12);
}
