#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "magneto/core.hpp"

namespace magneto {

/// Noise-free moment flow with the mean spin held on the x axis
/// (omega + u = 0, jy = cxy = 0). J(t) = jx_ref and vy_ref are what the
/// linear-Gaussian model and the step-size rule consume.
struct ReferenceState {
  double jx = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
};

inline ReferenceState reference_derivative(const ReferenceState& s, const SensorParams& p) {
  const double kc = p.kappa_coll(), kl = p.kappa_loc(), m = p.meas_strength();
  const double eta = p.efficiency(), n = p.n();
  ReferenceState d;
  d.jx = -0.5 * (kc + 2.0 * kl + m) * s.jx;
  d.vx = kc * (s.vy - s.vx) + kl * (0.5 * n - 2.0 * s.vx) + m * (s.vz - s.vx);
  d.vy = kc * (s.vx + s.jx * s.jx - s.vy) + kl * (0.5 * n - 2.0 * s.vy) -
         4.0 * eta * m * s.vy * s.vy;
  d.vz = m * (s.vx + s.jx * s.jx - s.vz);
  return d;
}

inline ReferenceState reference_rk4(const ReferenceState& s, const SensorParams& p, double h) {
  auto axpy = [](const ReferenceState& a, double c, const ReferenceState& b) {
    return ReferenceState{a.jx + c * b.jx, a.vx + c * b.vx, a.vy + c * b.vy, a.vz + c * b.vz};
  };
  const ReferenceState k1 = reference_derivative(s, p);
  const ReferenceState k2 = reference_derivative(axpy(s, 0.5 * h, k1), p);
  const ReferenceState k3 = reference_derivative(axpy(s, 0.5 * h, k2), p);
  const ReferenceState k4 = reference_derivative(axpy(s, h, k3), p);
  ReferenceState out = s;
  out.jx += h / 6.0 * (k1.jx + 2.0 * k2.jx + 2.0 * k3.jx + k4.jx);
  out.vx += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
  out.vy += h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy);
  out.vz += h / 6.0 * (k1.vz + 2.0 * k2.vz + 2.0 * k3.vz + k4.vz);
  return out;
}

struct GridOptions {
  double dt = 1e-3;  // largest step
  double t_final = 1.0;
  // Fraction of the fastest linearised rate allowed per step. Zero disables
  // the stiffness rule and gives a uniform grid (up to output alignment).
  double stiffness_fraction = 0.2;
  // LQR gain lambda. The sampled loop contracts Jy by 1 - lambda Jx h per
  // step, so h is kept below kFeedbackFraction / (lambda Jx).
  double feedback_gain = 0.0;
  std::vector<double> output_times;
};

/// Deterministic, seed-independent simulation grid. Nodes t[0] = 0 < ... <
/// t[K] = t_final; every requested output time is a node. The step shrinks
/// below dt where the Riccati and variance equations are stiff, which for
/// large N and strong measurement happens throughout the run, not only at t=0.
struct TimeGrid {
  std::vector<double> t;
  std::vector<ReferenceState> ref;   // reference flow at each node
  std::vector<double> outputs;       // output times, sorted
  std::vector<std::size_t> output_node;

  std::size_t steps() const { return t.size() - 1; }
  double step(std::size_t k) const { return t[k + 1] - t[k]; }
};

inline std::vector<double> linear_times(double t_final, int count) {
  if (count < 1) throw ConfigError("output count must be >= 1");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = t_final * (i + 1) / count;
  return out;
}

inline std::vector<double> log_times(double t_first, double t_final, int count) {
  if (count < 2 || !(t_first > 0.0) || !(t_final > t_first))
    throw ConfigError("log_times needs count >= 2 and 0 < t_first < t_final");
  std::vector<double> out(count);
  const double r = std::log(t_final / t_first);
  for (int i = 0; i < count; ++i) out[i] = t_first * std::exp(r * i / (count - 1));
  out.back() = t_final;
  return out;
}

inline constexpr double kFeedbackFraction = 0.5;

inline TimeGrid build_time_grid(const SensorParams& p, const GridOptions& opt) {
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw ConfigError("dt must be > 0");
  if (!(opt.t_final >= opt.dt)) throw ConfigError("t_final must be >= dt");
  if (opt.stiffness_fraction < 0.0) throw ConfigError("stiffness_fraction must be >= 0");
  if (!(opt.feedback_gain >= 0.0)) throw ConfigError("feedback_gain must be >= 0");

  TimeGrid g;
  g.outputs = opt.output_times;
  if (g.outputs.empty()) g.outputs.push_back(opt.t_final);
  std::sort(g.outputs.begin(), g.outputs.end());
  g.outputs.erase(std::unique(g.outputs.begin(), g.outputs.end()), g.outputs.end());
  for (double s : g.outputs)
    if (!(s > 0.0) || s > opt.t_final * (1.0 + 1e-12))
      throw ConfigError("output times must lie in (0, t_final]");

  const double n = p.n();
  const double meas = 8.0 * p.efficiency() * p.meas_strength();
  ReferenceState s{0.5 * n, 0.0, 0.25 * n, 0.25 * n};
  const double alpha = opt.stiffness_fraction;
  const double h0 = alpha > 0.0 && meas > 0.0 ? std::min(opt.dt, alpha / (meas * s.vy)) : opt.dt;

  double t = 0.0;
  std::size_t next = 0;
  g.t.push_back(0.0);
  g.ref.push_back(s);
  const double eps = 1e-12 * opt.t_final;
  while (next < g.outputs.size()) {
    double h = opt.dt;
    if (alpha > 0.0 && meas > 0.0) {
      h = std::min(h, alpha / (meas * std::max(s.vy, 0.0) + 1e-300));
      // filter covariance stiffness grows no faster than ~8/t
      h = std::min(h, std::max(h0, alpha * t / 8.0));
    }
    if (alpha > 0.0 && opt.feedback_gain > 0.0)
      h = std::min(h, kFeedbackFraction / (opt.feedback_gain * std::abs(s.jx) + 1e-300));
    const double remaining = g.outputs[next] - t;
    bool hit = false;
    if (h >= remaining - eps) {
      h = remaining;
      hit = true;
    } else if (h > 0.5 * remaining) {
      h = 0.5 * remaining;  // avoid a sliver step before the output
    }
    s = reference_rk4(s, p, h);
    t = hit ? g.outputs[next] : t + h;
    g.t.push_back(t);
    g.ref.push_back(s);
    if (hit) {
      g.output_node.push_back(g.t.size() - 1);
      ++next;
    }
  }
  return g;
}

}  // namespace magneto
