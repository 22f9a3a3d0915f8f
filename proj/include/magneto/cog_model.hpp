#pragma once

#include <cmath>
#include <string>

#include "magneto/core.hpp"

namespace magneto {

// Comoving-Gaussian moment model. With cov(A,B,C) = <ABC> - <A><BC> - <B><AC>
// - <C><AB> + 2<A><B><C>, the complete Ito expansion carries these extra
// noise terms on the second moments:
//
//   dVx  += 2 sqrt(eta M) [cov(Jx,Jx,Jy)/2 + cov(Jy,Jx,Jx)/2] dW
//   dVy  += 2 sqrt(eta M) cov(Jy,Jy,Jy) dW
//   dVz  += 2 sqrt(eta M) [cov(Jz,Jz,Jy)/2 + cov(Jy,Jz,Jz)/2] dW
//   dCxy += 2 sqrt(eta M) [cov(Jx,Jy,Jy)/4 + cov(Jy,Jx,Jy)/2 + cov(Jy,Jy,Jx)/4] dW
//
// They are cut off here. <Jz>, Cxz and Czy start at zero for a CSS and only
// decay once the cut is made, so they are not tracked either.

struct CogDerivative {
  Vec7 drift = Vec7::Zero();
  Vec7 diffusion = Vec7::Zero();
};

inline Vec7 cog_drift(const MomentState& x, const SensorParams& p, double u) {
  const double w = x.omega + u;
  const double kc = p.kappa_coll(), kl = p.kappa_loc(), m = p.meas_strength();
  const double eta = p.efficiency(), n = p.n();
  Vec7 d;
  d[0] = -w * x.jy - 0.5 * (kc + 2.0 * kl + m) * x.jx;
  d[1] = w * x.jx - 0.5 * (kc + 2.0 * kl) * x.jy;
  d[2] = -2.0 * w * x.cxy + kc * (x.vy + x.jy * x.jy - x.vx) + kl * (0.5 * n - 2.0 * x.vx) +
         m * (x.vz - x.vx - 4.0 * eta * x.cxy * x.cxy);
  d[3] = 2.0 * w * x.cxy + kc * (x.vx + x.jx * x.jx - x.vy) + kl * (0.5 * n - 2.0 * x.vy) -
         4.0 * eta * m * x.vy * x.vy;
  d[4] = m * (x.vx + x.jx * x.jx - x.vz);
  d[5] = w * (x.vx - x.vy) - kc * (2.0 * x.cxy + x.jx * x.jy) - 2.0 * kl * x.cxy -
         0.5 * m * x.cxy * (1.0 + 8.0 * eta * x.vy);
  d[6] = 0.0;
  return d;
}

inline Vec7 cog_diffusion(const MomentState& x, const SensorParams& p) {
  const double c = 2.0 * std::sqrt(p.efficiency() * p.meas_strength());
  Vec7 g = Vec7::Zero();
  g[0] = c * x.cxy;
  g[1] = c * x.vy;
  return g;
}

inline CogDerivative cog_derivative(const MomentState& x, const SensorParams& p, double u) {
  return {cog_drift(x, p, u), cog_diffusion(x, p)};
}

/// One Euler-Maruyama step with u held fixed, followed by the feasibility
/// projection. Throws IntegrationError naming the first non-finite component.
inline MomentState cog_step(const MomentState& x, const SensorParams& p, double u, double dW,
                            double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("cog_step: dt must be > 0");
  const Vec7 next = x.to_vector() + cog_drift(x, p, u) * dt + cog_diffusion(x, p) * dW;
  for (int i = 0; i < 7; ++i) {
    if (!std::isfinite(next[i])) {
      throw IntegrationError(std::string("cog_step: non-finite ") +
                                 MomentState::component_name(i),
                             MomentState::component_name(i));
    }
  }
  return MomentState::from_vector(next).projected();
}

/// y dt = 2 eta sqrt(M) <Jy> dt + sqrt(eta) dW.
inline double photocurrent(double jy_cond, const SensorParams& p, double dW, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("photocurrent: dt must be > 0");
  const double eta = p.efficiency();
  return 2.0 * eta * std::sqrt(p.meas_strength()) * jy_cond * dt + std::sqrt(eta) * dW;
}

/// Inverse of photocurrent for a given estimate of <Jy>.
inline double innovation_dW(double y_dt, double jy_est, const SensorParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("innovation_dW: dt must be > 0");
  const double eta = p.efficiency();
  return y_dt / std::sqrt(eta) - 2.0 * std::sqrt(eta * p.meas_strength()) * jy_est * dt;
}

}  // namespace magneto
