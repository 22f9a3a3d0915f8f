#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "magneto/cog_model.hpp"
#include "magneto/core.hpp"
#include "magneto/time_grid.hpp"

namespace magneto {

template <int Dim>
struct FilterState {
  using Vector = Eigen::Matrix<double, Dim, 1>;
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  Vector estimate = Vector::Zero();
  Matrix covariance = Matrix::Zero();
  std::size_t step = 0;  // number of updates applied
};

using EkfState = FilterState<7>;
using KfState = FilterState<2>;

/// Covariances of (xi, xi_omega) and of the shot noise, plus their
/// correlation. The photocurrent noise is sqrt(eta) times the same Wiener
/// process that drives the state, hence s = (sqrt(eta), 0).
struct NoiseModel {
  Eigen::Matrix2d q = Eigen::Vector2d(1.0, 0.0).asDiagonal();
  double r = 1.0;
  Eigen::Vector2d s = Eigen::Vector2d(1.0, 0.0);

  static NoiseModel for_sensor(const SensorParams& p) {
    NoiseModel n;
    n.r = p.efficiency();
    n.s = Eigen::Vector2d(std::sqrt(p.efficiency()), 0.0);
    return n;
  }
};

struct EkfJacobians {
  Mat7 F;
  Eigen::Matrix<double, 7, 2> G;
  Eigen::Matrix<double, 1, 7> H;
};

inline EkfJacobians ekf_jacobians(const MomentState& x, double u, const SensorParams& p) {
  const double w = x.omega + u;
  const double kc = p.kappa_coll(), kl = p.kappa_loc(), m = p.meas_strength();
  const double eta = p.efficiency();
  const double em = eta * m;
  EkfJacobians j;
  Mat7& F = j.F;
  F.setZero();
  F(0, 0) = -0.5 * (kc + 2.0 * kl + m);
  F(0, 1) = -w;
  F(0, 6) = -x.jy;

  F(1, 0) = w;
  F(1, 1) = -0.5 * (kc + 2.0 * kl);
  F(1, 6) = x.jx;

  F(2, 1) = 2.0 * kc * x.jy;
  F(2, 2) = -(kc + 2.0 * kl + m);
  F(2, 3) = kc;
  F(2, 4) = m;
  F(2, 5) = -2.0 * w - 8.0 * em * x.cxy;
  F(2, 6) = -2.0 * x.cxy;

  F(3, 0) = 2.0 * kc * x.jx;
  F(3, 2) = kc;
  F(3, 3) = -kc - 2.0 * kl - 8.0 * em * x.vy;
  F(3, 5) = 2.0 * w;
  F(3, 6) = 2.0 * x.cxy;

  F(4, 0) = 2.0 * m * x.jx;
  F(4, 2) = m;
  F(4, 4) = -m;

  F(5, 0) = -kc * x.jy;
  F(5, 1) = -kc * x.jx;
  F(5, 2) = w;
  F(5, 3) = -w - 4.0 * em * x.cxy;
  F(5, 5) = -(2.0 * kc + 2.0 * kl + 0.5 * m) - 4.0 * em * x.vy;
  F(5, 6) = x.vx - x.vy;

  j.G.setZero();
  j.G(0, 0) = 2.0 * std::sqrt(em) * x.cxy;
  j.G(1, 0) = 2.0 * std::sqrt(em) * x.vy;
  j.G(6, 1) = 1.0;

  j.H.setZero();
  j.H(0, 1) = 2.0 * eta * std::sqrt(m);
  return j;
}

/// K = (Sigma H^T + G s) / r. The state noise and the shot noise are the same
/// Wiener increment with the same sign, so the cross term enters with +.
template <int Dim>
Eigen::Matrix<double, Dim, 1> kalman_gain(const Eigen::Matrix<double, Dim, Dim>& sigma,
                                          const Eigen::Matrix<double, 1, Dim>& H,
                                          const Eigen::Matrix<double, Dim, 2>& G,
                                          const NoiseModel& noise) {
  if (!(noise.r > 0.0)) throw std::invalid_argument("kalman_gain: r must be > 0");
  return (sigma * H.transpose() + G * noise.s) / noise.r;
}

namespace detail {

// One step of the correlated-noise Riccati flow in predict/update form:
// Sigma -> Phi Sigma Phi^T + G Q~ G^T dt with Phi = I + A~ dt, then the
// measurement over dt as a discrete observation of variance r/dt. Agrees with
// the continuous flow to O(dt) and keeps Sigma PSD where HSigmaH^T dt/r is not
// small, which the plain Euler step does not.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> riccati_step(const Eigen::Matrix<double, Dim, Dim>& sigma,
                                             const Eigen::Matrix<double, Dim, Dim>& F,
                                             const Eigen::Matrix<double, Dim, 2>& G,
                                             const Eigen::Matrix<double, 1, Dim>& H,
                                             const NoiseModel& noise, double dt) {
  using Mat = Eigen::Matrix<double, Dim, Dim>;
  const Eigen::Matrix<double, Dim, 1> gs = G * noise.s;
  const Mat phi = Mat::Identity() + (F - gs * H / noise.r) * dt;
  const Eigen::Matrix2d qt = noise.q - noise.s * noise.s.transpose() / noise.r;
  Mat next = phi * sigma * phi.transpose() + G * qt * G.transpose() * dt;
  const Eigen::Matrix<double, Dim, 1> sh = next * H.transpose();
  next -= sh * sh.transpose() * (dt / (noise.r + (H * sh)(0) * dt));
  next = 0.5 * (next + next.transpose()).eval();
  const double scale = std::max(1.0, next.diagonal().cwiseAbs().maxCoeff());
  Eigen::LLT<Mat> llt(next + Mat::Identity() * (1e-12 * scale));
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(next);
    if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < -1e-8 * scale) {
      const auto lam = es.eigenvalues().cwiseMax(0.0);
      next = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      next = 0.5 * (next + next.transpose()).eval();
    }
  }
  return next;
}

// kalman_gain with the Sigma H^T part damped by 1 + H Sigma H^T dt / r, the
// gain of the same discrete observation. Equal to kalman_gain as dt -> 0.
template <int Dim>
Eigen::Matrix<double, Dim, 1> discrete_gain(const Eigen::Matrix<double, Dim, Dim>& sigma,
                                            const Eigen::Matrix<double, 1, Dim>& H,
                                            const Eigen::Matrix<double, Dim, 2>& G,
                                            const NoiseModel& noise, double dt) {
  if (!(noise.r > 0.0)) throw std::invalid_argument("kalman_gain: r must be > 0");
  const Eigen::Matrix<double, Dim, 1> sh = sigma * H.transpose();
  return sh / (noise.r + (H * sh)(0) * dt) + G * noise.s / noise.r;
}

template <int Dim>
void check_finite(const FilterState<Dim>& f, const char* who) {
  if (!f.estimate.allFinite() || !f.covariance.allFinite())
    throw FilterDivergence(std::string(who) + ": non-finite update", f.step);
}

}  // namespace detail

/// EKF initialised at the CSS with the prior on omega.
inline EkfState ekf_initial_state(int n_atoms, const GaussianPrior& prior) {
  if (prior.is_flat()) throw ConfigError("the EKF needs a proper prior");
  EkfState f;
  f.estimate = css_initial_state(n_atoms, prior).to_vector();
  f.covariance.setZero();
  f.covariance(6, 6) = prior.variance();
  return f;
}

namespace detail {

inline constexpr double kEkfStiffnessLimit = 0.25;

inline void ekf_substep(EkfState& f, double y_dt, double u, const SensorParams& p,
                        const NoiseModel& noise, double dt) {
  const MomentState x = MomentState::from_vector(f.estimate);
  const EkfJacobians j = ekf_jacobians(x, u, p);
  const Vec7 k = discrete_gain<7>(f.covariance, j.H, j.G, noise, dt);
  const double innovation = y_dt - (j.H * f.estimate)(0) * dt;
  const Vec7 next = f.estimate + cog_drift(x, p, u) * dt + k * innovation;
  f.covariance = riccati_step<7>(f.covariance, j.F, j.G, j.H, noise, dt);
  f.estimate = next;
  if (next.allFinite()) f.estimate = MomentState::from_vector(next).projected().to_vector();
}

}  // namespace detail

/// One filter update over dt. The moment equations of the estimate are stiff
/// in Vy, so the step is split evenly (record included) when 8 eta M Vy dt is
/// large, and the estimated moments are projected back to the feasible set.
inline EkfState ekf_step(const EkfState& f, double y_dt, double u, const SensorParams& p,
                         const NoiseModel& noise, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekf_step: dt must be > 0");
  const double rate = 8.0 * p.efficiency() * p.meas_strength() *
                          std::max(0.0, f.estimate[MomentState::kVy]) +
                      p.meas_strength() + 2.0 * p.kappa_coll() + 2.0 * p.kappa_loc();
  const double want = std::ceil(rate * dt / detail::kEkfStiffnessLimit);
  const int n = std::isfinite(want) ? static_cast<int>(std::clamp(want, 1.0, 1000.0)) : 1;
  EkfState out = f;
  const double h = dt / n;
  for (int i = 0; i < n; ++i) detail::ekf_substep(out, y_dt / n, u, p, noise, h);
  out.step = f.step + 1;
  detail::check_finite(out, "ekf_step");
  return out;
}

/// Deterministic inputs of the linear-Gaussian model at one instant.
struct LgReference {
  double j = 0.0;   // <Jx> along the reference flow
  double vy = 0.0;  // Vy along the reference flow
};

struct LgMatrices {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::Matrix<double, 2, 2> sigma;
  Eigen::Matrix<double, 1, 2> H;
};

inline LgMatrices lg_matrices(const SensorParams& p, const LgReference& ref) {
  LgMatrices m;
  m.A << 0.0, ref.j, 0.0, 0.0;
  m.B << ref.j, 0.0;
  m.sigma << 2.0 * std::sqrt(p.efficiency() * p.meas_strength()) * ref.vy, 0.0, 0.0, 1.0;
  m.H << 2.0 * p.efficiency() * std::sqrt(p.meas_strength()), 0.0;
  return m;
}

inline KfState kf_initial_state(const GaussianPrior& prior) {
  if (prior.is_flat()) throw ConfigError("the KF needs a proper prior");
  KfState f;
  f.estimate << 0.0, prior.mean();
  f.covariance << 0.0, 0.0, 0.0, prior.variance();
  return f;
}

/// Kalman-Bucy step on z = (<Jy>, omega). The covariance does not depend on
/// the record.
inline KfState kf_lg_step(const KfState& f, double y_dt, double u, const SensorParams& p,
                          const NoiseModel& noise, double dt, const LgReference& ref) {
  if (!(dt > 0.0)) throw std::invalid_argument("kf_lg_step: dt must be > 0");
  const LgMatrices m = lg_matrices(p, ref);
  const Eigen::Vector2d k = detail::discrete_gain<2>(f.covariance, m.H, m.sigma, noise, dt);
  KfState out;
  out.step = f.step + 1;
  const double innovation = y_dt - (m.H * f.estimate)(0) * dt;
  out.estimate = f.estimate + (m.A * f.estimate + m.B * u) * dt + k * innovation;
  out.covariance = detail::riccati_step<2>(f.covariance, m.A, m.sigma, m.H, noise, dt);
  detail::check_finite(out, "kf_lg_step");
  return out;
}

/// KF covariance at the requested times from the linear-fractional form
/// Sigma = X Y^{-1}, X' = A~ X + W Y, Y' = C X - A~^T Y, integrated with RK4
/// together with the reference flow. This handles a flat prior (Y(0)
/// singular) and stays accurate where the Riccati equation is stiff.
inline std::vector<Eigen::Matrix2d> lg_covariance_flow(const SensorParams& p,
                                                       const GaussianPrior& prior,
                                                       const std::vector<double>& times,
                                                       int substeps_per_output = 2000) {
  using V = Eigen::Matrix<double, 12, 1>;
  const NoiseModel noise = NoiseModel::for_sensor(p);
  auto deriv = [&](const V& s) {
    ReferenceState r{s[0], s[1], s[2], s[3]};
    const ReferenceState dr = reference_derivative(r, p);
    const LgMatrices m = lg_matrices(p, {r.jx, r.vy});
    const Eigen::Vector2d gs = m.sigma * noise.s;
    const Eigen::Matrix2d at = m.A - gs * m.H / noise.r;
    const Eigen::Matrix2d qt = noise.q - noise.s * noise.s.transpose() / noise.r;
    const Eigen::Matrix2d w = m.sigma * qt * m.sigma.transpose();
    const Eigen::Matrix2d c = m.H.transpose() * m.H / noise.r;
    const Eigen::Map<const Eigen::Matrix2d> x(s.data() + 4), y(s.data() + 8);
    V d;
    d << dr.jx, dr.vx, dr.vy, dr.vz, Eigen::Matrix<double, 4, 1>::Zero(),
        Eigen::Matrix<double, 4, 1>::Zero();
    Eigen::Map<Eigen::Matrix2d> dx(d.data() + 4), dy(d.data() + 8);
    dx = at * x + w * y;
    dy = c * x - at.transpose() * y;
    return d;
  };
  const double n = p.n();
  V s;
  s.setZero();
  s[0] = 0.5 * n;
  s[2] = 0.25 * n;
  s[3] = 0.25 * n;
  Eigen::Map<Eigen::Matrix2d>(s.data() + 4) << 0.0, 0.0, 0.0, 1.0;
  Eigen::Map<Eigen::Matrix2d>(s.data() + 8) << 1.0, 0.0, 0.0, prior.information();

  std::vector<Eigen::Matrix2d> out;
  double t = 0.0;
  for (double target : times) {
    if (!(target > t) && !out.empty()) throw ConfigError("lg_covariance_flow: times must increase");
    const double h = (target - t) / substeps_per_output;
    for (int i = 0; i < substeps_per_output; ++i) {
      const V k1 = deriv(s);
      const V k2 = deriv(s + 0.5 * h * k1);
      const V k3 = deriv(s + 0.5 * h * k2);
      const V k4 = deriv(s + h * k3);
      s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = target;
    const Eigen::Map<const Eigen::Matrix2d> x(s.data() + 4), y(s.data() + 8);
    Eigen::Matrix2d sig = x * y.inverse();
    out.push_back(0.5 * (sig + sig.transpose()));
  }
  return out;
}

}  // namespace magneto
