#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "magneto/core.hpp"
#include "magneto/estimators.hpp"

namespace magneto {

// Cost p_J <Jy>^2 + p_omega omega^2 + nu u^2. p_omega never reaches u.
struct LqrWeights {
  double p_j = 1.0;
  double p_omega = 0.0;
  double nu = 1.0;

  void validate() const {
    if (!(p_j >= 0.0) || !std::isfinite(p_j)) throw ConfigError("p_j must be finite and >= 0");
    if (!(p_omega >= 0.0) || !std::isfinite(p_omega))
      throw ConfigError("p_omega must be finite and >= 0");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be finite and > 0");
  }
};

enum class ControlKind { kLqr, kCompensate, kNone };

inline const char* control_name(ControlKind k) {
  switch (k) {
    case ControlKind::kLqr: return "lqr";
    case ControlKind::kCompensate: return "compensate";
    case ControlKind::kNone: return "none";
  }
  return "?";
}

inline ControlKind parse_control_kind(const std::string& s) {
  if (s == "lqr") return ControlKind::kLqr;
  if (s == "compensate") return ControlKind::kCompensate;
  if (s == "none") return ControlKind::kNone;
  throw ConfigError("unknown controller '" + s + "'");
}

struct ControlPolicy {
  ControlKind kind = ControlKind::kNone;
  double lambda = 0.0;

  static ControlPolicy lqr(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
    return {ControlKind::kLqr, lambda};
  }
  static ControlPolicy compensate() { return {ControlKind::kCompensate, 0.0}; }
  static ControlPolicy none() { return {ControlKind::kNone, 0.0}; }
};

inline double lqr_gain(const LqrWeights& w) {
  w.validate();
  return std::sqrt(w.p_j / w.nu);
}

/// Stabilising solution of A^T X + X A + Q - X B R^{-1} B^T X = 0 through the
/// matrix sign function of the Hamiltonian (Newton iteration with
/// determinant scaling). (A, B) must be stabilisable with no imaginary-axis
/// Hamiltonian eigenvalues.
inline Eigen::MatrixXd care(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd g = B * R.ldlt().solve(B.transpose());
  Eigen::MatrixXd z(2 * n, 2 * n);
  z << A, -g, -Q, -A.transpose();
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(z);
    const double det = std::abs(lu.determinant());
    if (!(det > 0.0) || !std::isfinite(det)) throw NumericalDivergence("care: singular Hamiltonian");
    const double c = std::pow(det, -1.0 / (2.0 * n));
    const Eigen::MatrixXd next = 0.5 * (c * z + lu.inverse() / c);
    const double change = (next - z).norm();
    z = next;
    if (change <= 1e-14 * z.norm()) break;
  }
  const Eigen::MatrixXd w11 = z.topLeftCorner(n, n), w12 = z.topRightCorner(n, n);
  const Eigen::MatrixXd w21 = z.bottomLeftCorner(n, n), w22 = z.bottomRightCorner(n, n);
  Eigen::MatrixXd lhs(2 * n, n), rhs(2 * n, n);
  lhs << w12, w22 + Eigen::MatrixXd::Identity(n, n);
  rhs << -(w11 + Eigen::MatrixXd::Identity(n, n)), -w21;
  Eigen::MatrixXd x = lhs.colPivHouseholderQr().solve(rhs);
  return 0.5 * (x + x.transpose());
}

struct LqrSolution {
  Eigen::Matrix2d sigma;            // Riccati solution on (<Jy>, omega)
  Eigen::Matrix<double, 1, 2> k;    // K_C = nu^{-1} B^T Sigma
  double lambda = 0.0;              // k_jy / k_omega
};

/// Numerical LQR on the linear-Gaussian model with A = (0 J; 0 0), B = (J 0)^T.
/// omega is an uncontrollable, marginally stable mode, so the 2x2 Riccati
/// equation has no stabilising solution; the solution returned stabilises the
/// <Jy> block and leaves the omega-omega entry at zero. Cross term from
/// (A11 - B1 K1)^T X12 + X11 A12 + P12 = 0.
inline LqrSolution lqr_solve(const LqrWeights& w, double j) {
  w.validate();
  if (!(j > 0.0)) throw ConfigError("lqr_solve: J must be > 0");
  LqrSolution s;
  s.sigma.setZero();
  double x11 = 0.0, k1 = 0.0;
  if (w.p_j > 0.0) {
    Eigen::MatrixXd a(1, 1), b(1, 1), q(1, 1), r(1, 1);
    a << 0.0;
    b << j;
    q << w.p_j;
    r << w.nu;
    x11 = care(a, b, q, r)(0, 0);
    k1 = j * x11 / w.nu;
  }
  double x12;
  if (k1 > 0.0) {
    const double acl = -j * k1;  // A11 - B1 K1
    x12 = -x11 * j / acl;
  } else {
    // p_J = 0: cheapest policy cancels omega exactly.
    x12 = w.nu / j;
  }
  s.sigma << x11, x12, x12, 0.0;
  s.k << j * x11 / w.nu, j * x12 / w.nu;
  s.lambda = s.k(1) != 0.0 ? s.k(0) / s.k(1) : 0.0;
  return s;
}

/// Residual A^T X + X A + P - X B nu^{-1} B^T X on the LG model. The
/// (omega, omega) entry equals nu + p_omega for any X of the form above.
inline Eigen::Matrix2d lqr_residual(const LqrWeights& w, double j, const Eigen::Matrix2d& x) {
  Eigen::Matrix2d a;
  a << 0.0, j, 0.0, 0.0;
  const Eigen::Vector2d b(j, 0.0);
  const Eigen::Matrix2d p = Eigen::Vector2d(w.p_j, w.p_omega).asDiagonal();
  return a.transpose() * x + x * a + p - x * b * b.transpose() * x / w.nu;
}

inline double control_signal(const ControlPolicy& policy, double omega_hat, double jy_hat) {
  switch (policy.kind) {
    case ControlKind::kLqr: return -omega_hat - policy.lambda * jy_hat;
    case ControlKind::kCompensate: return -omega_hat;
    case ControlKind::kNone: return 0.0;
  }
  return 0.0;
}

inline double control_signal(const ControlPolicy& policy, const EkfState& f) {
  return control_signal(policy, f.estimate[MomentState::kOmega], f.estimate[MomentState::kJy]);
}

inline double control_signal(const ControlPolicy& policy, const KfState& f) {
  return control_signal(policy, f.estimate[1], f.estimate[0]);
}

}  // namespace magneto
