#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "magneto/analysis.hpp"
#include "magneto/bounds.hpp"
#include "magneto/cog_model.hpp"
#include "magneto/control.hpp"
#include "magneto/core.hpp"
#include "magneto/estimators.hpp"
#include "magneto/exact_sme.hpp"
#include "magneto/time_grid.hpp"

namespace magneto {

enum class Backend { kCog, kSmeDicke, kSmeFull };
enum class EstimatorKind { kEkf, kKf, kNone };

inline const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kCog: return "cog";
    case Backend::kSmeDicke: return "sme-dicke";
    case Backend::kSmeFull: return "sme-full";
  }
  return "?";
}

inline Backend parse_backend(const std::string& s) {
  if (s == "cog") return Backend::kCog;
  if (s == "sme-dicke") return Backend::kSmeDicke;
  if (s == "sme-full") return Backend::kSmeFull;
  throw ConfigError("unknown backend '" + s + "'");
}

inline const char* estimator_name(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::kEkf: return "ekf";
    case EstimatorKind::kKf: return "kf";
    case EstimatorKind::kNone: return "none";
  }
  return "?";
}

inline EstimatorKind parse_estimator(const std::string& s) {
  if (s == "ekf") return EstimatorKind::kEkf;
  if (s == "kf") return EstimatorKind::kKf;
  if (s == "none") return EstimatorKind::kNone;
  throw ConfigError("unknown estimator '" + s + "'");
}

/// Either a fixed true omega for every trajectory or omega drawn from the prior.
struct OmegaMode {
  bool prior_sampled = false;
  double value = 1.0;

  static OmegaMode fixed(double v) { return {false, v}; }
  static OmegaMode prior() { return {true, 0.0}; }

  std::string str() const {
    if (prior_sampled) return "prior";
    std::ostringstream o;
    o.precision(17);
    o << "fixed:" << value;
    return o.str();
  }
};

inline OmegaMode parse_omega_mode(const std::string& s) {
  if (s == "prior") return OmegaMode::prior();
  if (s.rfind("fixed:", 0) == 0) {
    try {
      std::size_t pos = 0;
      const std::string v = s.substr(6);
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return OmegaMode::fixed(x);
    } catch (const std::logic_error&) {
      throw ConfigError("bad omega mode '" + s + "'");
    }
  }
  throw ConfigError("omega mode must be 'prior' or 'fixed:VALUE', got '" + s + "'");
}

struct ExperimentConfig {
  SensorSpec sensor{.n_atoms = 200, .kappa_coll = 0.02, .meas_strength = 0.3, .omega_true = 1.0};
  double prior_mean = 1.5;
  double prior_std = 0.5;
  double dt = 1e-3;
  double t_final = 30.0;
  int n_trajectories = 1;
  Backend backend = Backend::kCog;
  EstimatorKind estimator = EstimatorKind::kEkf;
  ControlPolicy controller = ControlPolicy::lqr(1.0);
  std::uint64_t seed = 1;
  OmegaMode omega_mode = OmegaMode::fixed(1.0);
  int n_outputs = 100;
  bool log_outputs = false;
  std::vector<double> extra_outputs;    // added to the output grid
  std::vector<double> snapshot_times;   // density matrices kept (exact backends)
  double stiffness_fraction = 0.2;
  bool with_qbcrb = false;
  int workers = 0;  // 0: one per hardware thread

  SensorParams sensor_params() const {
    SensorSpec s = sensor;
    if (!omega_mode.prior_sampled) s.omega_true = omega_mode.value;
    return SensorParams(s);
  }
  GaussianPrior prior() const { return GaussianPrior(prior_mean, prior_std); }

  void validate() const {
    const SensorParams p = sensor_params();
    (void)prior();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    if (!(t_final >= dt) || !std::isfinite(t_final)) throw ConfigError("t_final must be >= dt");
    if (n_trajectories < 1) throw ConfigError("trajectories must be >= 1");
    if (n_outputs < 1) throw ConfigError("outputs must be >= 1");
    if (backend == Backend::kSmeDicke && p.kappa_loc() > 0.0)
      throw ConfigError("sme-dicke requires kappa_loc = 0");
    if (backend == Backend::kSmeFull) check_basis_size(p.n_atoms(), Basis::kFull);
    if (backend == Backend::kSmeDicke) check_basis_size(p.n_atoms(), Basis::kDicke);
    if (estimator == EstimatorKind::kNone && controller.kind != ControlKind::kNone)
      throw ConfigError("feedback control needs an estimator");
    if (!snapshot_times.empty() && backend == Backend::kCog)
      throw ConfigError("density snapshots need an exact backend");
    if (workers < 0) throw ConfigError("workers must be >= 0");
  }

  std::vector<double> output_times() const {
    std::vector<double> t = log_outputs ? log_times(t_final / 1000.0, t_final, n_outputs)
                                        : linear_times(t_final, n_outputs);
    t.insert(t.end(), extra_outputs.begin(), extra_outputs.end());
    t.insert(t.end(), snapshot_times.begin(), snapshot_times.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  }

  /// Flat key = value text; read_config() inverts it.
  std::map<std::string, std::string> to_map() const {
    auto num = [](double x) {
      std::ostringstream o;
      o.precision(17);
      o << x;
      return o.str();
    };
    auto list = [&](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
      return s;
    };
    std::map<std::string, std::string> m;
    m["n_atoms"] = std::to_string(sensor.n_atoms);
    m["kappa_coll"] = num(sensor.kappa_coll);
    m["kappa_loc"] = num(sensor.kappa_loc);
    m["meas_strength"] = num(sensor.meas_strength);
    m["efficiency"] = num(sensor.efficiency);
    m["prior_mean"] = num(prior_mean);
    m["prior_std"] = num(prior_std);
    m["dt"] = num(dt);
    m["t_final"] = num(t_final);
    m["trajectories"] = std::to_string(n_trajectories);
    m["backend"] = backend_name(backend);
    m["estimator"] = estimator_name(estimator);
    m["controller"] = control_name(controller.kind);
    m["lambda"] = num(controller.lambda);
    m["seed"] = std::to_string(seed);
    m["omega_mode"] = omega_mode.str();
    m["outputs"] = std::to_string(n_outputs);
    m["output_spacing"] = log_outputs ? "log" : "linear";
    m["extra_outputs"] = list(extra_outputs);
    m["snapshot_times"] = list(snapshot_times);
    m["stiffness_fraction"] = num(stiffness_fraction);
    m["qbcrb"] = with_qbcrb ? "true" : "false";
    return m;
  }

  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : to_map()) s += k + "=" + v + "\n";
    return s;
  }

  /// FNV-1a over the canonical text. workers is excluded since results do not
  /// depend on it.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::string hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
  }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace detail

/// Applies one key. Unknown keys are an error.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;
  if (key == "n_atoms") c.sensor.n_atoms = static_cast<int>(parse_int(key, value));
  else if (key == "kappa_coll") c.sensor.kappa_coll = parse_double(key, value);
  else if (key == "kappa_loc") c.sensor.kappa_loc = parse_double(key, value);
  else if (key == "meas_strength") c.sensor.meas_strength = parse_double(key, value);
  else if (key == "efficiency") c.sensor.efficiency = parse_double(key, value);
  else if (key == "prior_mean") c.prior_mean = parse_double(key, value);
  else if (key == "prior_std") c.prior_std = parse_double(key, value);
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "t_final") c.t_final = parse_double(key, value);
  else if (key == "trajectories") c.n_trajectories = static_cast<int>(parse_int(key, value));
  else if (key == "backend") c.backend = parse_backend(value);
  else if (key == "estimator") c.estimator = parse_estimator(value);
  else if (key == "controller") c.controller.kind = parse_control_kind(value);
  else if (key == "lambda") c.controller.lambda = parse_double(key, value);
  else if (key == "seed") {
    try {
      std::size_t pos = 0;
      c.seed = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed '" + value + "'");
    }
  } else if (key == "omega_mode") c.omega_mode = parse_omega_mode(value);
  else if (key == "outputs") c.n_outputs = static_cast<int>(parse_int(key, value));
  else if (key == "output_spacing") {
    if (value != "linear" && value != "log") throw ConfigError("output_spacing must be linear or log");
    c.log_outputs = value == "log";
  } else if (key == "extra_outputs") c.extra_outputs = detail::parse_list(key, value);
  else if (key == "snapshot_times") c.snapshot_times = detail::parse_list(key, value);
  else if (key == "stiffness_fraction") c.stiffness_fraction = parse_double(key, value);
  else if (key == "qbcrb") {
    if (value != "true" && value != "false") throw ConfigError("qbcrb must be true or false");
    c.with_qbcrb = value == "true";
  } else if (key == "workers") c.workers = static_cast<int>(parse_int(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
  if (key == "lambda" && !(c.controller.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

// ---------------------------------------------------------------------------

class TrajectoryFailure : public NumericalDivergence {
 public:
  TrajectoryFailure(const std::string& what, std::uint64_t stream_id, std::size_t step,
                    const std::string& config_hash)
      : NumericalDivergence(what + " (stream " + std::to_string(stream_id) + ", step " +
                            std::to_string(step) + ", config " + config_hash + ")"),
        stream_id_(stream_id),
        step_(step) {}
  std::uint64_t stream_id() const { return stream_id_; }
  std::size_t step() const { return step_; }

 private:
  std::uint64_t stream_id_;
  std::size_t step_;
};

/// Everything sampled on the output grid (t = 0 first).
struct TrajectoryRecord {
  std::uint64_t stream_id = 0;
  double omega_true = 0.0;
  std::vector<double> times;
  Series photocurrent;  // integral of y over the preceding output interval
  Series control;       // u in force at the sample time
  std::vector<Eigen::VectorXd> estimate;    // empty without a filter
  std::vector<Eigen::VectorXd> sigma_diag;  // diagonal of Sigma
  std::vector<MomentState> truth;           // moments of the generating backend
  std::vector<DensityMatrix> snapshots;     // at ExperimentConfig::snapshot_times

  double omega_hat(std::size_t k) const { return estimate[k][estimate[k].size() - 1]; }
  double sigma_omega(std::size_t k) const { return sigma_diag[k][sigma_diag[k].size() - 1]; }
};

/// Shared read-only state of one ensemble.
struct RunContext {
  ExperimentConfig cfg;
  SensorParams params;
  GaussianPrior prior;
  TimeGrid grid;
  std::shared_ptr<const CollectiveOperators> ops;
  std::string hash;

  explicit RunContext(const ExperimentConfig& c)
      : cfg(c), params(c.sensor_params()), prior(c.prior()), hash(c.hash_hex()) {
    c.validate();
    GridOptions g;
    g.dt = c.dt;
    g.t_final = c.t_final;
    g.stiffness_fraction = c.stiffness_fraction;
    if (c.controller.kind == ControlKind::kLqr) g.feedback_gain = c.controller.lambda;
    g.output_times = c.output_times();
    grid = build_time_grid(params, g);
    if (c.backend != Backend::kCog) {
      ops = std::make_shared<const CollectiveOperators>(build_collective_operators(
          params.n_atoms(), c.backend == Backend::kSmeFull ? Basis::kFull : Basis::kDicke));
    }
  }
};

namespace detail {

class TrueSystem {
 public:
  TrueSystem(const RunContext& ctx, const SensorParams& p) : p_(p) {
    if (ctx.cfg.backend == Backend::kCog) {
      x_ = css_initial_state(p.n_atoms(), ctx.prior);
      x_.omega = p.omega_true();
    } else {
      const Basis b = ctx.ops->basis;
      sme_.emplace(ctx.ops, p, css_density_matrix(p.n_atoms(), b));
    }
  }

  /// Advances one step and returns y dt.
  double step(double u, double dW, double h) {
    if (sme_) {
      const SmeStepInfo info = sme_->step(u, dW, h);
      return std::sqrt(p_.efficiency()) * info.dY;
    }
    const double y = photocurrent(x_.jy, p_, dW, h);
    x_ = cog_step(x_, p_, u, dW, h);
    return y;
  }

  MomentState moments() const {
    if (!sme_) return x_;
    MomentState m = sme_->moments();
    m.omega = p_.omega_true();
    return m;
  }

  DensityMatrix density() const { return sme_->density(); }

 private:
  SensorParams p_;
  MomentState x_;
  std::optional<SmeIntegrator> sme_;
};

}  // namespace detail

inline TrajectoryRecord run_trajectory(const RunContext& ctx, std::uint64_t stream_id) {
  const ExperimentConfig& cfg = ctx.cfg;
  TrajectoryRecord rec;
  rec.stream_id = stream_id;
  if (cfg.omega_mode.prior_sampled) {
    RngStream prior_rng(cfg.seed, stream_id, StreamPurpose::kPrior);
    rec.omega_true = sample_prior(ctx.prior, prior_rng);
  } else {
    rec.omega_true = cfg.omega_mode.value;
  }
  const SensorParams p = ctx.params.with_omega(rec.omega_true);
  const NoiseModel noise = NoiseModel::for_sensor(p);
  RngStream rng(cfg.seed, stream_id, StreamPurpose::kNoise);

  std::size_t k = 0;
  try {
    detail::TrueSystem sys(ctx, p);
    EkfState ekf;
    KfState kf;
    if (cfg.estimator == EstimatorKind::kEkf) ekf = ekf_initial_state(p.n_atoms(), ctx.prior);
    if (cfg.estimator == EstimatorKind::kKf) kf = kf_initial_state(ctx.prior);

    auto current_u = [&]() {
      switch (cfg.estimator) {
        case EstimatorKind::kEkf: return control_signal(cfg.controller, ekf);
        case EstimatorKind::kKf: return control_signal(cfg.controller, kf);
        case EstimatorKind::kNone: return 0.0;
      }
      return 0.0;
    };
    std::size_t snap = 0;
    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    double y_acc = 0.0;
    auto sample = [&](double t) {
      rec.times.push_back(t);
      rec.photocurrent.push_back(y_acc);
      y_acc = 0.0;
      rec.control.push_back(current_u());
      rec.truth.push_back(sys.moments());
      if (cfg.estimator == EstimatorKind::kEkf) {
        rec.estimate.emplace_back(ekf.estimate);
        rec.sigma_diag.emplace_back(ekf.covariance.diagonal());
      } else if (cfg.estimator == EstimatorKind::kKf) {
        rec.estimate.emplace_back(kf.estimate);
        rec.sigma_diag.emplace_back(kf.covariance.diagonal());
      }
      while (snap < snaps.size() && std::abs(snaps[snap] - t) <= 1e-9 * cfg.t_final) {
        rec.snapshots.push_back(sys.density());
        ++snap;
      }
    };

    const TimeGrid& g = ctx.grid;
    sample(0.0);
    std::size_t next_out = 0;
    for (k = 0; k < g.steps(); ++k) {
      const double h = g.step(k);
      const double u = current_u();
      const double dW = wiener_increment(rng, h);
      const double y = sys.step(u, dW, h);
      y_acc += y;
      if (cfg.estimator == EstimatorKind::kEkf) {
        ekf = ekf_step(ekf, y, u, p, noise, h);
      } else if (cfg.estimator == EstimatorKind::kKf) {
        const ReferenceState& r = g.ref[k];
        kf = kf_lg_step(kf, y, u, p, noise, h, {r.jx, r.vy});
      }
      if (next_out < g.output_node.size() && g.output_node[next_out] == k + 1) {
        sample(g.t[k + 1]);
        ++next_out;
      }
    }
  } catch (const NumericalDivergence& e) {
    throw TrajectoryFailure(e.what(), stream_id, k, ctx.hash);
  }
  return rec;
}

inline TrajectoryRecord run_trajectory(const ExperimentConfig& cfg, std::uint64_t stream_id) {
  return run_trajectory(RunContext(cfg), stream_id);
}

struct EnsembleRecords {
  std::vector<TrajectoryRecord> records;  // successes, in stream order
  std::vector<std::string> failures;
};

/// Runs streams 0..K-1 on a bounded pool of threads. Results are stored by
/// stream index, so the output is independent of scheduling.
inline EnsembleRecords run_records(const RunContext& ctx,
                                   const std::function<void(int)>& progress = {}) {
  const int n = ctx.cfg.n_trajectories;
  int workers = ctx.cfg.workers > 0 ? ctx.cfg.workers
                                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  std::vector<std::optional<TrajectoryRecord>> slots(n);
  std::vector<std::string> errors(n);
  std::atomic<int> next{0}, done{0};
  std::mutex progress_mutex;
  auto work = [&]() {
    for (int i = next++; i < n; i = next++) {
      try {
        slots[i] = run_trajectory(ctx, static_cast<std::uint64_t>(i));
      } catch (const NumericalDivergence& e) {
        errors[i] = e.what();
      }
      const int d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(d);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  EnsembleRecords out;
  for (int i = 0; i < n; ++i) {
    if (slots[i]) out.records.push_back(std::move(*slots[i]));
    else out.failures.push_back(errors[i]);
  }
  return out;
}

/// Reduction of records to the ensemble statistics. Requires at least one record.
inline EnsembleSummary summarize(const RunContext& ctx, const std::vector<TrajectoryRecord>& recs,
                                 int n_failed = 0) {
  if (recs.empty()) throw NumericalDivergence("every trajectory failed (config " + ctx.hash + ")");
  EnsembleSummary s;
  s.times = recs.front().times;
  s.n_trajectories = static_cast<int>(recs.size());
  s.n_failed = n_failed;
  const std::size_t len = s.times.size(), n = recs.size();
  const int na = ctx.params.n_atoms();

  SeriesSet jx(n), jy(n), vy(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const MomentState& m : recs[i].truth) {
      jx[i].push_back(m.jx);
      jy[i].push_back(m.jy);
      vy[i].push_back(m.vy);
    }
  }
  if (!recs.front().estimate.empty()) {
    SeriesSet est(n);
    std::vector<double> truths(n);
    s.mean_ekf_cov.assign(len, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      truths[i] = recs[i].omega_true;
      for (std::size_t k = 0; k < len; ++k) {
        est[i].push_back(recs[i].omega_hat(k));
        s.mean_ekf_cov[k] += recs[i].sigma_omega(k) / n;
      }
    }
    s.amse = amse(est, truths, &s.amse_sem);

    const Eigen::Index dim = recs.front().estimate.front().size();
    static const char* const kEkfNames[] = {"jx", "jy", "vx", "vy", "vz", "cxy", "omega"};
    static const char* const kKfNames[] = {"jy", "omega"};
    for (Eigen::Index c = 0; c < dim; ++c)
      s.estimate_names.push_back(dim == 7 ? kEkfNames[c] : kKfNames[c]);
    s.estimate_mse.assign(dim, Series(len, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < len; ++k) {
        const Vec7 x = recs[i].truth[k].to_vector();
        for (Eigen::Index c = 0; c < dim; ++c) {
          const double truth = c + 1 == dim ? recs[i].omega_true : (dim == 7 ? x[c] : x[1]);
          const double e = recs[i].estimate[k][c] - truth;
          s.estimate_mse[c][k] += e * e / n;
        }
      }
  }
  s.squeezing_cond.assign(len, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < len; ++k)
      s.squeezing_cond[k] += (vy[i][k] > 0.0 ? squeezing_parameter(jx[i][k], vy[i][k], na)
                                             : std::numeric_limits<double>::quiet_NaN()) /
                             n;
  const UnconditionalMoments u = unconditional_moments(jx, jy, vy);
  s.jx_mean = u.jx;
  s.jy_mean = u.jy;
  s.vy_uncond = u.vy;
  for (std::size_t k = 0; k < len; ++k)
    s.squeezing_uncond.push_back(u.vy[k] > 0.0 ? squeezing_parameter(u.jx[k], u.vy[k], na)
                                               : std::numeric_limits<double>::quiet_NaN());
  for (double t : s.times) {
    const bool quiet = ctx.params.kappa_coll() == 0.0 && ctx.params.kappa_loc() == 0.0;
    s.cs_limit.push_back(t > 0.0 ? cs_limit(t, ctx.params, ctx.prior)
                                 : (quiet ? 0.0 : ctx.prior.variance()));
  }
  if (ctx.cfg.with_qbcrb) s.qbcrb = qbcrb_curve(ctx.params, ctx.prior, s.times).values;
  return s;
}

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<TrajectoryRecord> records;
  std::vector<std::string> failures;
};

inline EnsembleResult run_ensemble_full(const ExperimentConfig& cfg,
                                        const std::function<void(int)>& progress = {}) {
  const RunContext ctx(cfg);
  EnsembleRecords r = run_records(ctx, progress);
  EnsembleResult out;
  out.summary = summarize(ctx, r.records, static_cast<int>(r.failures.size()));
  out.records = std::move(r.records);
  out.failures = std::move(r.failures);
  return out;
}

inline EnsembleSummary run_ensemble(const ExperimentConfig& cfg) {
  return run_ensemble_full(cfg).summary;
}

/// Runs both configurations on the same noise paths and reports the
/// percentage errors of the second (moment model) against the first (exact).
inline ModelErrorReport compare_models(const ExperimentConfig& exact, const ExperimentConfig& approx) {
  ExperimentConfig a = exact, b = approx;
  b.backend = a.backend;
  if (a.canonical() != b.canonical())
    throw ConfigError("compare_models: configurations may differ only in the backend");
  const RunContext ca(exact), cb(approx);
  if (ca.grid.t != cb.grid.t) throw ConfigError("compare_models: time grids differ");
  if (exact.estimator == EstimatorKind::kNone)
    throw ConfigError("compare_models needs an estimator");
  const EnsembleRecords ra = run_records(ca), rb = run_records(cb);
  if (!ra.failures.empty() || !rb.failures.empty())
    throw NumericalDivergence("compare_models: trajectories failed");
  const std::size_t n = ra.records.size();
  SeriesSet wa(n), wb(n), xa(n), xb(n), va(n), vb(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectoryRecord &p = ra.records[i], &q = rb.records[i];
    for (std::size_t k = 0; k < p.times.size(); ++k) {
      wa[i].push_back(p.omega_hat(k));
      wb[i].push_back(q.omega_hat(k));
      xa[i].push_back(p.truth[k].jx);
      xb[i].push_back(q.truth[k].jx);
      va[i].push_back(p.truth[k].vy);
      vb[i].push_back(q.truth[k].vy);
    }
  }
  ModelErrorReport rep = cog_error_metrics(wa, wb, xa, xb, va, vb);
  rep.times = ra.records.front().times;
  return rep;
}

struct SweepPoint {
  double value = 0.0;
  EnsembleSummary summary;
};

/// Re-runs the ensemble with one key set to each value in turn.
inline std::vector<SweepPoint> sweep(const ExperimentConfig& base, const std::string& key,
                                     const std::vector<double>& values) {
  std::vector<SweepPoint> out;
  for (double v : values) {
    ExperimentConfig c = base;
    std::ostringstream o;
    o.precision(17);
    o << v;
    set_config_value(c, key, o.str());
    out.push_back({v, run_ensemble(c)});
  }
  return out;
}

/// Unconditional state at each snapshot time, averaged over the records.
inline std::vector<DensityMatrix> average_snapshots(const std::vector<TrajectoryRecord>& recs) {
  if (recs.empty()) throw std::invalid_argument("average_snapshots: no records");
  std::vector<DensityMatrix> out = recs.front().snapshots;
  for (std::size_t i = 1; i < recs.size(); ++i)
    for (std::size_t s = 0; s < out.size(); ++s) out[s].entries += recs[i].snapshots[s].entries;
  for (DensityMatrix& r : out) r.entries /= static_cast<double>(recs.size());
  return out;
}

}  // namespace magneto
