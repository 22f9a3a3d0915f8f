#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace magneto {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;

// ---------------------------------------------------------------------------
// Errors

/// Invalid parameters or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Any numerical blow-up of a simulator or filter. The CLI maps this to exit
/// code 3.
class NumericalDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulator step produced a non-finite value.
class IntegrationError : public NumericalDivergence {
 public:
  IntegrationError(const std::string& what, std::string component)
      : NumericalDivergence(what), component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

/// A filter update produced a non-finite estimate or covariance.
class FilterDivergence : public NumericalDivergence {
 public:
  FilterDivergence(const std::string& what, std::size_t step)
      : NumericalDivergence(what + " at step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// ---------------------------------------------------------------------------
// Sensor parameters

/// Plain field bundle used to construct SensorParams with designated
/// initializers, e.g. SensorParams({.n_atoms = 200, .meas_strength = 0.3}).
struct SensorSpec {
  int n_atoms = 1;
  double kappa_coll = 0.0;
  double kappa_loc = 0.0;
  double meas_strength = 0.0;
  double efficiency = 1.0;
  double omega_true = 0.0;
};

/// Physical and measurement constants of the monitored ensemble. All rates are
/// in the (arbitrary) inverse time unit used throughout; omega is the Larmor
/// frequency gamma*B.
///
/// Construction rejects efficiency == 0: the measurement-noise variance equals
/// the efficiency and is inverted by the Kalman gain.
class SensorParams {
 public:
  explicit SensorParams(const SensorSpec& s) : s_(s) {
    if (s.n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
    auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0.0; };
    if (!rate_ok(s.kappa_coll)) throw ConfigError("kappa_coll must be finite and >= 0");
    if (!rate_ok(s.kappa_loc)) throw ConfigError("kappa_loc must be finite and >= 0");
    if (!rate_ok(s.meas_strength)) throw ConfigError("meas_strength must be finite and >= 0");
    if (!(s.efficiency > 0.0 && s.efficiency <= 1.0))
      throw ConfigError("efficiency must lie in (0, 1]");
    if (!std::isfinite(s.omega_true)) throw ConfigError("omega_true must be finite");
  }

  int n_atoms() const { return s_.n_atoms; }
  double n() const { return static_cast<double>(s_.n_atoms); }
  double kappa_coll() const { return s_.kappa_coll; }
  double kappa_loc() const { return s_.kappa_loc; }
  double meas_strength() const { return s_.meas_strength; }
  double efficiency() const { return s_.efficiency; }
  double omega_true() const { return s_.omega_true; }
  const SensorSpec& spec() const { return s_; }

  SensorParams with_omega(double omega) const {
    SensorSpec s = s_;
    s.omega_true = omega;
    return SensorParams(s);
  }

  /// Total decay rate of the mean polarisation, M + kappa_coll + 2 kappa_loc.
  /// Its inverse bounds the linear-Gaussian window.
  double total_decay() const {
    return s_.meas_strength + s_.kappa_coll + 2.0 * s_.kappa_loc;
  }

 private:
  SensorSpec s_;
};

// ---------------------------------------------------------------------------
// Prior over omega

/// Gaussian prior N(mean, std^2) on the Larmor frequency. A flat prior is an
/// explicit state (std = +inf) rather than a large number.
class GaussianPrior {
 public:
  GaussianPrior(double mean, double std) : mean_(mean), std_(std) {
    if (!std::isfinite(mean)) throw ConfigError("prior mean must be finite");
    if (!(std > 0.0) || !std::isfinite(std)) throw ConfigError("prior std must be finite and > 0");
  }
  static GaussianPrior flat(double mean = 0.0) {
    GaussianPrior p(mean, 1.0);
    p.std_ = std::numeric_limits<double>::infinity();
    return p;
  }

  double mean() const { return mean_; }
  double std() const { return std_; }
  bool is_flat() const { return std::isinf(std_); }
  double variance() const { return std_ * std_; }
  /// Fisher information of the prior, 1/std^2 (zero when flat).
  double information() const { return is_flat() ? 0.0 : 1.0 / (std_ * std_); }

 private:
  double mean_;
  double std_;
};

// ---------------------------------------------------------------------------
// Moment state

/// Conditional first and second moments of the collective spin plus omega,
/// ordered (jx, jy, vx, vy, vz, cxy, omega) when flattened.
struct MomentState {
  double jx = 0.0;
  double jy = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double vz = 0.0;
  double cxy = 0.0;
  double omega = 0.0;

  enum Index : int { kJx = 0, kJy, kVx, kVy, kVz, kCxy, kOmega };

  Vec7 to_vector() const {
    Vec7 v;
    v << jx, jy, vx, vy, vz, cxy, omega;
    return v;
  }
  static MomentState from_vector(const Vec7& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }

  bool is_feasible(double tol = 0.0) const {
    return vx >= -tol && vy >= -tol && vz >= -tol &&
           cxy * cxy <= vx * vy + tol * (1.0 + std::abs(vx * vy));
  }

  /// Clamps variances to >= 0 and shrinks cxy onto the Cauchy-Schwarz bound.
  MomentState projected() const {
    MomentState out = *this;
    out.vx = std::max(out.vx, 0.0);
    out.vy = std::max(out.vy, 0.0);
    out.vz = std::max(out.vz, 0.0);
    const double bound = std::sqrt(out.vx * out.vy);
    if (std::abs(out.cxy) > bound) out.cxy = std::copysign(bound, out.cxy);
    return out;
  }

  static const char* component_name(int i) {
    static constexpr const char* names[] = {"jx", "jy", "vx", "vy", "vz", "cxy", "omega"};
    return names[i];
  }
};

/// Coherent spin state polarised along +x: <J> = (N/2, 0, 0), V = (0, N/4, N/4).
inline MomentState css_initial_state(int n_atoms, const GaussianPrior& prior) {
  if (n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
  const double n = n_atoms;
  return {n / 2.0, 0.0, 0.0, n / 4.0, n / 4.0, 0.0, prior.mean()};
}

// ---------------------------------------------------------------------------
// Randomness

/// Independent sub-streams derived from one (seed, stream_id) pair.
enum class StreamPurpose : std::uint32_t { kNoise = 0, kPrior = 1 };

/// Per-trajectory random stream. The engine state is derived only from
/// (seed, stream_id, purpose), so a replay with the same triple reproduces the
/// exact sequence and distinct stream ids are decorrelated by seed_seq mixing.
/// Owned by one trajectory worker at a time.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id,
            StreamPurpose purpose = StreamPurpose::kNoise)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32),
                      static_cast<std::uint32_t>(purpose), 0x6d61676eu};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double standard_normal() { return normal_(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draws dW ~ N(0, dt).
inline double wiener_increment(RngStream& rng, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt must be > 0");
  return std::sqrt(dt) * rng.standard_normal();
}

/// Draws omega ~ N(mean, std^2).
inline double sample_prior(const GaussianPrior& prior, RngStream& rng) {
  if (prior.is_flat()) throw ConfigError("cannot sample from a flat prior");
  return prior.mean() + prior.std() * rng.standard_normal();
}

}  // namespace magneto
