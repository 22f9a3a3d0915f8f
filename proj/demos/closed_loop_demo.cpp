// Closed-loop magnetometry with the moment model: AMSE of EKF+LQR, EKF with
// field compensation and the open-loop EKF, against the CS limit.

#include <cstdio>

#include "magneto/magneto.hpp"

using namespace magneto;

int main() {
  ExperimentConfig cfg;
  cfg.sensor = {.n_atoms = 10000, .kappa_coll = 0.005, .meas_strength = 0.05};
  cfg.backend = Backend::kCog;
  cfg.omega_mode = OmegaMode::fixed(1.0);
  cfg.prior_mean = 1.5;
  cfg.prior_std = 0.5;
  cfg.t_final = 15.0;
  cfg.n_outputs = 6;
  cfg.n_trajectories = 100;

  const ControlPolicy policies[] = {ControlPolicy::lqr(0.02), ControlPolicy::compensate(),
                                    ControlPolicy::none()};
  std::printf("%6s %12s %12s %12s %12s\n", "t", "ekf+lqr", "ekf+comp", "ekf", "cs_limit");
  EnsembleSummary s[3];
  for (int i = 0; i < 3; ++i) {
    cfg.controller = policies[i];
    s[i] = run_ensemble(cfg);
  }
  for (std::size_t k = 1; k < s[0].times.size(); ++k)
    std::printf("%6.2f %12.4e %12.4e %12.4e %12.4e\n", s[0].times[k], s[0].amse[k], s[1].amse[k],
                s[2].amse[k], s[0].cs_limit[k]);
}
