#include <gtest/gtest.h>

#include <cmath>

#include "magneto/control.hpp"

using namespace magneto;

TEST(LqrGain, ClosedForm) {
  EXPECT_DOUBLE_EQ(lqr_gain({.p_j = 1.0, .nu = 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(lqr_gain({.p_j = 0.0, .nu = 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(lqr_gain({.p_j = 4.0, .nu = 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(lqr_gain({.p_j = 1.0, .p_omega = 5.0, .nu = 4.0}), 0.5);
  EXPECT_THROW(lqr_gain({.p_j = 1.0, .nu = 0.0}), ConfigError);
  EXPECT_THROW(lqr_gain({.p_j = -1.0}), ConfigError);
}

TEST(Care, ScalarAndDoubleIntegrator) {
  // a = 0: x = sqrt(q r) / b
  Eigen::MatrixXd a(1, 1), b(1, 1), q(1, 1), r(1, 1);
  a << 0.0;
  b << 3.0;
  q << 2.0;
  r << 0.5;
  EXPECT_NEAR(care(a, b, q, r)(0, 0), std::sqrt(2.0 * 0.5) / 3.0, 1e-12);
  // double integrator with Q = I, R = 1: X = [[sqrt3, 1], [1, sqrt3]]
  Eigen::MatrixXd A(2, 2), B(2, 1), Q = Eigen::MatrixXd::Identity(2, 2), R(1, 1);
  A << 0, 1, 0, 0;
  B << 0, 1;
  R << 1;
  const Eigen::MatrixXd X = care(A, B, Q, R);
  EXPECT_NEAR(X(0, 0), std::sqrt(3.0), 1e-10);
  EXPECT_NEAR(X(0, 1), 1.0, 1e-10);
  EXPECT_NEAR(X(1, 1), std::sqrt(3.0), 1e-10);
  const Eigen::MatrixXd res = A.transpose() * X + X * A + Q - X * B * B.transpose() * X;
  EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LqrSolve, MatchesClosedForm) {
  for (double j : {1.0, 37.5, 5e4}) {
    const LqrWeights w{.p_j = 4.0, .nu = 1.0};
    const LqrSolution s = lqr_solve(w, j);
    EXPECT_NEAR(s.lambda, 2.0, 1e-8);
    // K_C = (lambda, 1): u = -lambda Jy - omega
    EXPECT_NEAR(s.k(0), 2.0, 1e-8 * std::max(1.0, j));
    EXPECT_NEAR(s.k(1), 1.0, 1e-8);
    const Eigen::Matrix2d res = lqr_residual(w, j, s.sigma);
    const double scale = std::max({1.0, s.sigma.cwiseAbs().maxCoeff(), j});
    EXPECT_LT(std::abs(res(0, 0)), 1e-8 * scale);
    EXPECT_LT(std::abs(res(0, 1)), 1e-8 * scale);
    EXPECT_LT(std::abs(res(1, 0)), 1e-8 * scale);
    // omega is not controllable: this entry is nu + p_omega for every X of this form
    EXPECT_NEAR(res(1, 1), 1.0, 1e-8);
  }
}

TEST(LqrSolve, ZeroPjIsCompensation) {
  const LqrSolution s = lqr_solve({.p_j = 0.0, .nu = 2.0}, 10.0);
  EXPECT_EQ(s.lambda, 0.0);
  EXPECT_NEAR(s.k(1), 1.0, 1e-12);
}

TEST(ControlSignal, Examples) {
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::lqr(1.0), 1.5, -3.0), 1.5);
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::compensate(), 1.2, 7.0), -1.2);
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::none(), 1.2, 7.0), 0.0);
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::lqr(0.0), 0.7, 3.0),
                   control_signal(ControlPolicy::compensate(), 0.7, 3.0));
  EXPECT_THROW(ControlPolicy::lqr(-1.0), ConfigError);
}

TEST(ControlSignal, ReadsFilterStates) {
  EkfState e;
  e.estimate[MomentState::kJy] = 2.0;
  e.estimate[MomentState::kOmega] = 0.5;
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::lqr(2.0), e), -4.5);
  KfState k;
  k.estimate << 2.0, 0.5;
  EXPECT_DOUBLE_EQ(control_signal(ControlPolicy::lqr(2.0), k), -4.5);
}

TEST(ControlKind, ParseRoundTrip) {
  for (ControlKind k : {ControlKind::kLqr, ControlKind::kCompensate, ControlKind::kNone})
    EXPECT_EQ(parse_control_kind(control_name(k)), k);
  EXPECT_THROW(parse_control_kind("pid"), ConfigError);
}
