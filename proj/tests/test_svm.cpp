#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles/qp_oracle.hpp"
#include "oracles/svm_instances.hpp"
#include "qsvm/errors.hpp"
#include "qsvm/svm.hpp"
#include "test_util.hpp"

using namespace qsvm;

TEST(RbfGamma, HandVariance) {
  Eigen::MatrixXd X(2, 2);
  X << 0, 0, 1, 1;
  EXPECT_DOUBLE_EQ(rbf_default_gamma(X), 2.0);
}

TEST(RbfGamma, ConstantDataDegenerate) {
  EXPECT_THROW(rbf_default_gamma(Eigen::MatrixXd::Constant(4, 2, 0.3)), DegenerateError);
}

TEST(RbfGamma, ScalingLaw) {
  Rng rng(1);
  const Eigen::MatrixXd X = testutil::normal_matrix(rng, 10, 3);
  EXPECT_NEAR(rbf_default_gamma(3.0 * X), rbf_default_gamma(X) / 9.0, 1e-12);
}

TEST(Rbf, Entries) {
  EXPECT_EQ(rbf_cross(Eigen::RowVector2d(0.4, 0.1), Eigen::RowVector2d(0.4, 0.1), 3.0)(0, 0), 1.0);
  EXPECT_NEAR(rbf_cross(Eigen::RowVector2d(0, 0), Eigen::RowVector2d(1, 0), 1.0)(0, 0), 0.367879441171, 1e-12);
  Eigen::MatrixXd X(3, 2);
  X << 0, 0, 1, 0, 0, 1;
  const auto K = rbf_gram(X, 1e4);
  EXPECT_LT((K - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-300);
}

TEST(Train, TwoPointsIdentityKernel) {
  const auto m = train(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, -1), 1.0);
  EXPECT_NEAR(m.alpha[0], 1.0, 1e-9);
  EXPECT_NEAR(m.alpha[1], 1.0, 1e-9);
  EXPECT_NEAR(m.bias, 0.0, 1e-9);
  EXPECT_EQ(predict(m, support_columns(m, Eigen::Matrix2d::Identity())), Eigen::VectorXd(Eigen::Vector2d(1, -1)));
}

TEST(Train, SeparableRbfFitsTraining) {
  Eigen::MatrixXd X(4, 2);
  X << 0.1, 0.1, 0.2, 0.15, 0.8, 0.9, 0.9, 0.85;
  const Eigen::Vector4d y(-1, -1, 1, 1);
  const auto m = train_rbf(X, y, 1.0, 1000.0);
  EXPECT_EQ(accuracy(predict_rbf(m, X), y), 1.0);
  const auto K = rbf_gram(X, 1.0);
  const auto qp = oracle::solve_svm_dual(K, y, 1000.0);
  EXPECT_NEAR(dual_objective(m.alpha, y, K), qp.objective, 1e-6);
}

TEST(Train, MatchesQpOracleAtTightTolerance) {
  SmoOptions tight;
  tight.tolerance = 1e-6;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = oracle::random_svm_instance(seed);
    const auto m = train(inst.K, inst.y, inst.C, tight);
    const auto qp = oracle::solve_svm_dual(inst.K, inst.y, inst.C);
    EXPECT_NEAR(dual_objective(m.alpha, inst.y, inst.K), qp.objective, 1e-6) << "seed " << seed;
    const Eigen::VectorXd f_oracle = inst.K_test * qp.alpha.cwiseProduct(inst.y) + Eigen::VectorXd::Constant(6, qp.bias);
    Eigen::VectorXd p_oracle = f_oracle.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
    EXPECT_EQ(predict(m, support_columns(m, inst.K_test)), p_oracle) << "seed " << seed;
  }
}

TEST(Train, DualFeasibility) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = oracle::random_svm_instance(seed);
    const auto m = train(inst.K, inst.y, inst.C);
    EXPECT_NEAR(m.alpha.dot(inst.y), 0.0, 1e-12);
    EXPECT_GE(m.alpha.minCoeff(), 0.0);
    EXPECT_LE(m.alpha.maxCoeff(), inst.C);
    EXPECT_LE(m.kkt_violation, 1e-3);
    ASSERT_EQ(m.support.size(), static_cast<std::size_t>(m.dual_coefs.size()));
    for (std::size_t s = 0; s < m.support.size(); ++s)
      EXPECT_DOUBLE_EQ(m.dual_coefs[s], m.alpha[m.support[s]] * inst.y[m.support[s]]);
  }
}

TEST(Train, LabelFlipNegatesDecision) {
  const auto inst = oracle::random_svm_instance(7);
  const auto a = train(inst.K, inst.y, inst.C);
  const auto b = train(inst.K, (-inst.y).eval(), inst.C);
  const auto fa = decision_function(a, support_columns(a, inst.K_test));
  const auto fb = decision_function(b, support_columns(b, inst.K_test));
  EXPECT_LT((fa + fb).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Train, RbfMatchesPrecomputed) {
  Rng rng(6);
  const Eigen::MatrixXd X = testutil::uniform_matrix(rng, 25, 2, 0, 1);
  Eigen::VectorXd y(25);
  for (int i = 0; i < 25; ++i) y[i] = X(i, 0) > X(i, 1) ? 1 : -1;
  const auto a = train_rbf(X, y, 3.0, 1.0);
  const auto b = train(rbf_gram(X, 3.0), y, 1.0);
  EXPECT_LT((a.alpha - b.alpha).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::MatrixXd T = testutil::uniform_matrix(rng, 40, 2, 0, 1);
  EXPECT_EQ(predict_rbf(a, T), predict(b, support_columns(b, rbf_cross(T, X, 3.0))));
}

TEST(Train, SeparableTrainingRowsReproduced) {
  Rng rng(8);
  Eigen::MatrixXd X(30, 2);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = i % 2 ? 1 : -1;
    X.row(i) = Eigen::RowVector2d(rng.uniform(0, 0.3), rng.uniform(0, 1)) + Eigen::RowVector2d(y[i] > 0 ? 0.7 : 0, 0);
  }
  const auto m = train(rbf_gram(X, 2.0), y, 100.0);
  EXPECT_EQ(predict(m, support_columns(m, rbf_gram(X, 2.0))), y);
}

TEST(Train, InputErrors) {
  EXPECT_THROW(train(Eigen::MatrixXd::Identity(3, 3), Eigen::Vector2d(1, -1), 1.0), ShapeError);
  EXPECT_THROW(train(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 1), 1.0), DegenerateError);
  EXPECT_THROW(train(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1), 1.0), SizeError);
  EXPECT_THROW(train(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 2), 1.0), DomainError);
  EXPECT_THROW(train(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, -1), 0.0), DomainError);
}

TEST(Train, IterationBudgetExhausted) {
  Rng rng(3);
  const Eigen::MatrixXd X = testutil::uniform_matrix(rng, 40, 2, 0, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = i % 2 ? 1 : -1;
  SmoOptions opts;
  opts.max_passes = 0;
  EXPECT_THROW(train(rbf_gram(X, 10.0), y, 10.0, opts), ConvergenceError);
}

TEST(Predict, ZeroKernelRowGivesBiasSign) {
  SvmModel m;
  m.support = {0, 1};
  m.dual_coefs = Eigen::Vector2d(0.5, -0.5);
  m.bias = -0.2;
  EXPECT_EQ(predict(m, Eigen::MatrixXd::Zero(1, 2))[0], -1.0);
  m.bias = 0.3;
  EXPECT_EQ(predict(m, Eigen::MatrixXd::Zero(1, 2))[0], 1.0);
  m.bias = 0.0;
  EXPECT_EQ(predict(m, Eigen::MatrixXd::Zero(1, 2))[0], 1.0);
}

TEST(Accuracy, Counts) {
  const Eigen::Vector4d a(1, 1, -1, -1);
  EXPECT_EQ(accuracy(a, a), 1.0);
  EXPECT_EQ(accuracy(a, -a), 0.0);
  EXPECT_EQ(accuracy(a, Eigen::Vector4d(1, -1, -1, -1)), 0.75);
  EXPECT_THROW(accuracy(a, Eigen::Vector2d(1, 1)), ShapeError);
}

TEST(ModelIo, RoundTripPrecomputed) {
  const auto inst = oracle::random_svm_instance(11);
  const auto m = train(inst.K, inst.y, inst.C);
  std::stringstream ss;
  write_model(ss, m);
  const auto r = read_model(ss);
  EXPECT_EQ(r.support, m.support);
  EXPECT_EQ(r.C, m.C);
  EXPECT_TRUE(std::holds_alternative<PrecomputedKernel>(r.kernel));
  EXPECT_LT((r.dual_coefs - m.dual_coefs).cwiseAbs().maxCoeff(), 1e-11 * (1 + m.dual_coefs.cwiseAbs().maxCoeff()));
  EXPECT_NEAR(r.bias, m.bias, 1e-11 * (1 + std::abs(m.bias)));
}

TEST(ModelIo, RoundTripRbfPredictsSame) {
  Rng rng(12);
  const Eigen::MatrixXd X = testutil::uniform_matrix(rng, 20, 2, 0, 1);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = X(i, 0) + X(i, 1) > 1 ? 1 : -1;
  const auto m = train_rbf(X, y, 2.0, 1.0);
  std::stringstream ss;
  write_model(ss, m);
  const auto r = read_model(ss);
  EXPECT_EQ(std::get<RbfKernel>(r.kernel).gamma, 2.0);
  const Eigen::MatrixXd T = testutil::uniform_matrix(rng, 30, 2, 0, 1);
  EXPECT_EQ(predict_rbf(r, T), predict_rbf(m, T));
}

TEST(ModelIo, RejectsGarbage) {
  std::stringstream ss("qsvm-model 2\n");
  EXPECT_THROW(read_model(ss), ParseError);
  std::stringstream empty;
  EXPECT_THROW(read_model(empty), ParseError);
}
