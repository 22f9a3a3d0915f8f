#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "magneto/core.hpp"
#include "magneto/wigner.hpp"

namespace magneto {

using Series = std::vector<double>;
// Indexed [trajectory][time].
using SeriesSet = std::vector<Series>;

class SqueezingUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct EnsembleSummary {
  std::vector<double> times;
  Series amse;
  Series amse_sem;
  Series mean_ekf_cov;      // E[Sigma_omega_omega], empty without a filter
  Series squeezing_cond;    // E[xi^-2] over conditional states
  Series squeezing_uncond;  // xi^-2 of the averaged state
  Series jx_mean;
  Series jy_mean;
  Series vy_uncond;
  Series cs_limit;
  Series qbcrb;             // empty unless requested
  // E[(x_hat - x)^2] per filter component, omega last; empty without a filter
  std::vector<std::string> estimate_names;
  std::vector<Series> estimate_mse;
  int n_trajectories = 0;
  int n_failed = 0;
};

namespace detail {

inline void check_rectangular(const SeriesSet& s, const char* who) {
  if (s.empty()) throw std::invalid_argument(std::string(who) + ": no trajectories");
  for (const Series& x : s)
    if (x.size() != s.front().size())
      throw std::invalid_argument(std::string(who) + ": series lengths differ");
}

}  // namespace detail

/// Pointwise mean over trajectories of (omega_hat - omega)^2.
inline Series amse(const SeriesSet& estimates, const std::vector<double>& truths,
                   Series* sem = nullptr) {
  detail::check_rectangular(estimates, "amse");
  if (truths.size() != estimates.size())
    throw std::invalid_argument("amse: one truth per trajectory required");
  const std::size_t n = estimates.size(), len = estimates.front().size();
  Series mean(len, 0.0), sq(len, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < len; ++k) {
      const double e = estimates[i][k] - truths[i];
      mean[k] += e * e;
      sq[k] += e * e * e * e;
    }
  for (std::size_t k = 0; k < len; ++k) {
    mean[k] /= n;
    sq[k] /= n;
  }
  if (sem) {
    sem->assign(len, 0.0);
    if (n > 1)
      for (std::size_t k = 0; k < len; ++k) {
        const double var = std::max(sq[k] - mean[k] * mean[k], 0.0) * n / (n - 1.0);
        (*sem)[k] = std::sqrt(var / n);
      }
  }
  return mean;
}

/// Fixed-omega variant: every trajectory has the same true value.
inline Series amse(const SeriesSet& estimates, double truth, Series* sem = nullptr) {
  return amse(estimates, std::vector<double>(estimates.size(), truth), sem);
}

/// xi^-2 = <Jx>^2 / (N Vy).
inline double squeezing_parameter(double jx_mean, double vy, int n_atoms) {
  if (!(vy > 0.0)) throw SqueezingUndefined("squeezing parameter undefined for Vy <= 0");
  if (n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
  return jx_mean * jx_mean / (n_atoms * vy);
}

struct UnconditionalMoments {
  Series jx;
  Series jy;
  Series vy;  // E[Vy_c] + Var[<Jy>_c]
};

/// Law of total variance across conditional trajectories.
inline UnconditionalMoments unconditional_moments(const SeriesSet& jx, const SeriesSet& jy,
                                                  const SeriesSet& vy) {
  detail::check_rectangular(jx, "unconditional_moments");
  detail::check_rectangular(jy, "unconditional_moments");
  detail::check_rectangular(vy, "unconditional_moments");
  if (jx.size() != jy.size() || jx.size() != vy.size() ||
      jx.front().size() != jy.front().size() || jx.front().size() != vy.front().size())
    throw std::invalid_argument("unconditional_moments: shape mismatch");
  const std::size_t n = jx.size(), len = jx.front().size();
  UnconditionalMoments u;
  u.jx.assign(len, 0.0);
  u.jy.assign(len, 0.0);
  u.vy.assign(len, 0.0);
  Series jy2(len, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < len; ++k) {
      u.jx[k] += jx[i][k];
      u.jy[k] += jy[i][k];
      u.vy[k] += vy[i][k];
      jy2[k] += jy[i][k] * jy[i][k];
    }
  for (std::size_t k = 0; k < len; ++k) {
    u.jx[k] /= n;
    u.jy[k] /= n;
    const double var = std::max(jy2[k] / n - u.jy[k] * u.jy[k], 0.0);
    u.vy[k] = u.vy[k] / n + var;
  }
  return u;
}

struct ModelErrorReport {
  std::vector<double> times;
  Series omega_hat;  // percent, trajectory-wise ratio
  Series jx;         // percent, ratio of ensemble means
  Series vy;
  int n_trajectories = 0;
};

namespace detail {

inline Series mean_relative(const SeriesSet& exact, const SeriesSet& approx) {
  const std::size_t n = exact.size(), len = exact.front().size();
  Series num(len, 0.0), den(len, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < len; ++k) {
      num[k] += std::abs(exact[i][k] - approx[i][k]);
      den[k] += std::abs(exact[i][k]);
    }
  Series out(len);
  for (std::size_t k = 0; k < len; ++k) {
    num[k] /= n;
    den[k] /= n;
    out[k] = den[k] < 1e-12 ? (num[k] == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN())
                            : 100.0 * num[k] / den[k];
  }
  return out;
}

}  // namespace detail

/// Percentage errors of the moment model against the exact simulation on the
/// same noise paths. omega_hat uses E|(a - b)/a|; the moments use
/// E|a - b| / E|a|. Trajectory-wise ratios with |a| < 1e-12 count as NaN.
inline ModelErrorReport cog_error_metrics(const SeriesSet& omega_exact, const SeriesSet& omega_cog,
                                          const SeriesSet& jx_exact, const SeriesSet& jx_cog,
                                          const SeriesSet& vy_exact, const SeriesSet& vy_cog) {
  for (const SeriesSet* s : {&omega_exact, &omega_cog, &jx_exact, &jx_cog, &vy_exact, &vy_cog})
    detail::check_rectangular(*s, "cog_error_metrics");
  const std::size_t n = omega_exact.size(), len = omega_exact.front().size();
  for (const SeriesSet* s : {&omega_cog, &jx_exact, &jx_cog, &vy_exact, &vy_cog})
    if (s->size() != n || s->front().size() != len)
      throw std::invalid_argument("cog_error_metrics: series are not aligned");
  ModelErrorReport r;
  r.n_trajectories = static_cast<int>(n);
  r.omega_hat.assign(len, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < len; ++k) {
      const double a = omega_exact[i][k];
      r.omega_hat[k] += std::abs(a) < 1e-12 ? std::numeric_limits<double>::quiet_NaN()
                                            : std::abs((a - omega_cog[i][k]) / a);
    }
  for (double& v : r.omega_hat) v *= 100.0 / n;
  r.jx = detail::mean_relative(jx_exact, jx_cog);
  r.vy = detail::mean_relative(vy_exact, vy_cog);
  return r;
}

}  // namespace magneto
