// Acceptance runner. One criterion per invocation:
//   acceptance --criterion N [--cache-dir DIR] [--workers K]
// prints detail lines, then a single "PASS criterion N" or "FAIL criterion N".

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magneto/magneto.hpp"
#include "oracles/sld_qfi.hpp"

using namespace magneto;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kC1Rel = 0.10;
constexpr double kC2RatioMax = 1.5;
constexpr double kC2SemFactor = 3.0;
constexpr double kC3Rel = 0.25;
constexpr double kC6OmegaPct = 1.0;
constexpr double kC6MomentPct = 10.0;
constexpr double kC7Rel = 1e-10;
constexpr double kC8ProductRel = 1e-6;
constexpr double kC8OracleAbs = 1e-8;
constexpr double kC9InvariantTol = 1e-12;
constexpr double kC9JacobianRel = 1e-5;
constexpr double kC9BackendTol = 1e-8;
constexpr double kC9CgTol = 1e-12;
constexpr double kC9WignerTol = 1e-10;

struct Verdict {
  bool ok = true;
  void check(bool cond, const std::string& what) {
    std::cout << "  [" << (cond ? "ok" : "FAILED") << "] " << what << "\n";
    ok = ok && cond;
  }
};

std::string num(double x, int prec = 4) {
  std::ostringstream o;
  o << std::setprecision(prec) << x;
  return o.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int g_workers = 0;
fs::path g_cache_dir = ".";

std::function<void(int)> progress(int total) {
  return [total, last = -1](int done) mutable {
    const int pct = 100 * done / total;
    if (pct / 10 != last / 10) {
      std::cerr << "    " << done << "/" << total << "\n";
      last = pct;
    }
  };
}

EnsembleResult run(ExperimentConfig c) {
  c.workers = g_workers;
  c.validate();
  std::cout << "  config " << c.hash_hex() << ": " << backend_name(c.backend)
            << " N=" << c.sensor.n_atoms << " " << control_name(c.controller.kind)
            << " nu=" << c.n_trajectories << "\n";
  EnsembleResult r = run_ensemble_full(c, progress(c.n_trajectories));
  for (const std::string& f : r.failures) std::cout << "  trajectory failed: " << f << "\n";
  return r;
}

double window_mean(const EnsembleSummary& s, const Series& v, double a, double b) {
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < s.times.size(); ++i)
    if (s.times[i] >= a - 1e-12 && s.times[i] <= b + 1e-12) {
      acc += v[i];
      ++n;
    }
  if (n == 0) throw std::runtime_error("empty averaging window");
  return acc / n;
}

// ---------------------------------------------------------------------------

bool criterion1() {
  Verdict v;
  const double m = 0.3;
  for (int n : {50, 100, 200}) {
    SensorParams p({.n_atoms = n, .meas_strength = m});
    const double tc = 1.0 / (n * m);
    const std::vector<double> ts = log_times(1e-3 * tc, 1e-2 * tc, 11);
    const auto sig = lg_covariance_flow(p, GaussianPrior::flat(), ts);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      worst = std::max(worst, rel(sig[i](1, 1), heisenberg_limit(ts[i], p)));
    v.check(worst <= kC1Rel, "N=" + std::to_string(n) + " max |Sigma/H - 1| = " + num(worst));
  }
  return v.ok;
}

// Large-N moment-model runs shared by criteria 2 and 3.
ExperimentConfig large_cog_config(bool collective) {
  ExperimentConfig c;
  c.sensor = {.n_atoms = 100000,
              .kappa_coll = collective ? 0.005 : 0.0,
              .kappa_loc = collective ? 0.0 : 0.05,
              .meas_strength = 0.05};
  c.prior_mean = 1.5;
  c.prior_std = 0.5;
  c.omega_mode = OmegaMode::prior();
  c.backend = Backend::kCog;
  c.estimator = EstimatorKind::kEkf;
  // lambda N / 2 = 100, the closed-loop rate of the N = 200, lambda = 1 runs
  c.controller = ControlPolicy::lqr(2e-3);
  c.n_trajectories = 2000;
  c.dt = 1e-3;
  c.t_final = 1.0 / (c.sensor.meas_strength + c.sensor.kappa_coll + 2.0 * c.sensor.kappa_loc);
  c.n_outputs = 40;
  c.log_outputs = true;
  c.seed = 2024;
  return c;
}

EnsembleSummary cached_summary(const ExperimentConfig& c) {
  const fs::path path = g_cache_dir / ("acceptance_" + c.hash_hex() + ".json");
  if (fs::exists(path)) {
    std::ifstream in(path);
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("hash") == c.hash_hex()) {
      EnsembleSummary s;
      s.times = j.at("times").get<std::vector<double>>();
      s.amse = j.at("amse").get<Series>();
      s.amse_sem = j.at("amse_sem").get<Series>();
      s.mean_ekf_cov = j.at("mean_ekf_cov").get<Series>();
      s.cs_limit = j.at("cs_limit").get<Series>();
      s.n_trajectories = j.at("n_trajectories");
      s.n_failed = j.at("n_failed");
      std::cout << "  config " << c.hash_hex() << ": reusing " << path.string() << "\n";
      return s;
    }
  }
  const EnsembleSummary s = run(c).summary;
  nlohmann::json j;
  j["hash"] = c.hash_hex();
  j["times"] = s.times;
  j["amse"] = s.amse;
  j["amse_sem"] = s.amse_sem;
  j["mean_ekf_cov"] = s.mean_ekf_cov;
  j["cs_limit"] = s.cs_limit;
  j["n_trajectories"] = s.n_trajectories;
  j["n_failed"] = s.n_failed;
  std::ofstream(path) << j.dump() << "\n";
  return s;
}

bool criterion2() {
  Verdict v;
  for (bool collective : {true, false}) {
    const EnsembleSummary s = cached_summary(large_cog_config(collective));
    const std::string tag = collective ? "collective" : "local";
    double best = 1e300, best_t = 0.0, worst_gap = 1e300, worst_t = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      if (s.times[i] <= 0.0 || s.cs_limit[i] <= 0.0) continue;
      const double ratio = s.amse[i] / s.cs_limit[i];
      if (ratio < best) best = ratio, best_t = s.times[i];
      const double gap = (s.amse[i] - s.cs_limit[i] + kC2SemFactor * s.amse_sem[i]) / s.cs_limit[i];
      if (gap < worst_gap) worst_gap = gap, worst_t = s.times[i];
    }
    v.check(s.n_failed == 0, tag + ": failed trajectories = " + std::to_string(s.n_failed));
    v.check(best <= kC2RatioMax,
            tag + ": min AMSE/cs = " + num(best) + " at t=" + num(best_t));
    v.check(worst_gap >= 0.0, tag + ": min (AMSE - cs + 3 SEM)/cs = " + num(worst_gap) +
                                  " at t=" + num(worst_t));
  }
  return v.ok;
}

bool criterion3() {
  Verdict v;
  for (bool collective : {true, false}) {
    const EnsembleSummary s = cached_summary(large_cog_config(collective));
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      if (s.times[i] <= 0.0) continue;
      const double d = rel(s.mean_ekf_cov[i], s.amse[i]);
      if (d > worst) worst = d, worst_t = s.times[i];
    }
    v.check(worst <= kC3Rel, std::string(collective ? "collective" : "local") +
                                 ": max |E[Sigma] - AMSE|/AMSE = " + num(worst) +
                                 " at t=" + num(worst_t));
  }
  return v.ok;
}

ExperimentConfig strategy_config(ControlPolicy ctl) {
  ExperimentConfig c;
  c.sensor = {.n_atoms = 200, .kappa_coll = 0.02, .meas_strength = 0.3};
  c.prior_mean = 1.5;
  c.prior_std = 0.5;
  c.omega_mode = OmegaMode::fixed(1.0);
  c.backend = Backend::kSmeDicke;
  c.estimator = EstimatorKind::kEkf;
  c.controller = ctl;
  c.n_trajectories = 500;
  c.dt = 5e-3;
  c.t_final = 30.0;
  c.n_outputs = 60;
  c.seed = 7;
  return c;
}

bool criterion4() {
  Verdict v;
  double avg[3];
  const ControlPolicy ctl[3] = {ControlPolicy::lqr(1.0), ControlPolicy::compensate(),
                                ControlPolicy::none()};
  for (int i = 0; i < 3; ++i) {
    const EnsembleSummary s = run(strategy_config(ctl[i])).summary;
    avg[i] = window_mean(s, s.amse, 5.0, 30.0);
    std::cout << "  " << control_name(ctl[i].kind) << ": mean AMSE over [5,30] = " << num(avg[i])
              << " (failed " << s.n_failed << ")\n";
  }
  v.check(avg[0] < avg[1], "lqr < compensate");
  v.check(avg[0] < avg[2], "lqr < none");
  return v.ok;
}

bool criterion5() {
  Verdict v;
  for (bool lqr : {true, false}) {
    ExperimentConfig c;
    c.sensor = {.n_atoms = 100, .kappa_coll = 0.005, .meas_strength = 0.1};
    c.prior_mean = 1.5;
    c.prior_std = 0.5;
    c.omega_mode = OmegaMode::fixed(1.0);
    c.backend = Backend::kSmeDicke;
    c.controller = lqr ? ControlPolicy::lqr(1.0) : ControlPolicy::compensate();
    c.n_trajectories = 500;
    c.dt = 5e-3;
    c.t_final = 30.0;
    c.n_outputs = 30;
    c.snapshot_times = {30.0};
    c.seed = 11;
    const EnsembleResult r = run(c);
    const double xi = r.summary.squeezing_uncond.back();

    // same quantity from the averaged density matrix
    const DensityMatrix avg = average_snapshots(r.records).front();
    const CollectiveOperators ops = build_collective_operators(100, Basis::kDicke);
    const MomentState m = extract_moments(avg, ops);
    const double xi_rho = squeezing_parameter(m.jx, m.vy, 100);
    const std::string tag = lqr ? "lqr" : "compensate";
    v.check(rel(xi_rho, xi) < 1e-6,
            tag + ": moments route " + num(xi, 6) + " vs averaged state " + num(xi_rho, 6));
    v.check(lqr ? xi > 1.0 : xi < 1.0,
            tag + ": unconditional xi^-2 at t=30 = " + num(xi) + (lqr ? " (> 1)" : " (< 1)"));
  }
  return v.ok;
}

bool criterion6() {
  Verdict v;
  for (int n : {50, 100, 150}) {
    ExperimentConfig exact;
    exact.sensor = {.n_atoms = n, .meas_strength = 0.05};
    exact.prior_mean = 1.5;
    exact.prior_std = 0.5;
    exact.omega_mode = OmegaMode::fixed(1.0);
    exact.backend = Backend::kSmeDicke;
    exact.controller = ControlPolicy::lqr(1.0);
    exact.n_trajectories = 500;
    exact.dt = 5e-3;
    exact.t_final = 30.0;
    exact.n_outputs = 60;
    exact.seed = 5;
    exact.workers = g_workers;
    ExperimentConfig approx = exact;
    approx.backend = Backend::kCog;
    std::cout << "  compare N=" << n << " config " << exact.hash_hex() << "\n";
    const ModelErrorReport r = compare_models(exact, approx);
    const double horizon = 1.0 / exact.sensor.meas_strength;
    double w_om = 0.0, w_jx = 0.0, w_vy = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      w_om = std::max(w_om, r.omega_hat[i]);
      if (r.times[i] <= horizon) {
        w_jx = std::max(w_jx, r.jx[i]);
        w_vy = std::max(w_vy, r.vy[i]);
      }
    }
    const std::string tag = "N=" + std::to_string(n);
    v.check(w_om < kC6OmegaPct, tag + ": max delta omega_hat = " + num(w_om) + " %");
    v.check(w_jx < kC6MomentPct, tag + ": max delta Jx (t<=" + num(horizon) + ") = " + num(w_jx) + " %");
    v.check(w_vy < kC6MomentPct, tag + ": max delta Vy (t<=" + num(horizon) + ") = " + num(w_vy) + " %");
  }
  return v.ok;
}

bool criterion7() {
  Verdict v;
  auto sensor = [](int n, double kc, double kl, double m) {
    return SensorParams({.n_atoms = n, .kappa_coll = kc, .kappa_loc = kl, .meas_strength = m});
  };
  const GaussianPrior prior(1.5, 0.5);
  auto close = [&](double got, double want, const std::string& what) {
    const double e = want == 0.0 ? std::abs(got) : rel(got, want);
    v.check(e <= kC7Rel, what + " = " + num(got, 12) + " (want " + num(want, 12) + ")");
  };
  close(cs_limit(3.0, sensor(100, 0, 0, 0.3), prior), 0.0, "cs_limit no decoherence");
  close(cs_limit(10.0, sensor(100, 0.02, 0, 0.3), GaussianPrior::flat()), 0.002,
        "cs_limit flat prior, kc=0.02, t=10");
  close(cs_limit(10.0, sensor(100, 0.02, 0.05, 0.3), prior), 1.0 / (4.0 + 1.0 / 0.0021),
        "cs_limit kc=0.02 kl=0.05 N=100 t=10");
  close(heisenberg_limit(1e-3, sensor(100, 0, 0, 0.3)), 1e6, "heisenberg N=100 M=0.3 t=1e-3");
  close(qfi_local(sensor(10, 0, 0.5, 0), 1.0), 10.0 * std::exp(-0.5), "qfi_local N=10 kl=0.5 t=1");
  close(qfi_local(sensor(7, 0, 0, 0), 3.0), 63.0, "qfi_local N=7 t=3");
  close(qbcrb(prior, 0.0), 0.25, "qbcrb F=0");
  close(qbcrb(prior, 10.0 * std::exp(-0.5)), 1.0 / (4.0 + 10.0 * std::exp(-0.5)), "qbcrb F=10/sqrt(e)");
  return v.ok;
}

bool criterion8() {
  Verdict v;
  {
    const int n = 60;
    const double t = 2.0;
    const auto ops = build_collective_operators(n, Basis::kDicke);
    const double f = qfi_from_state(collective_dephased_css(n, 1e-8 / t, t), ops.jz, t);
    v.check(rel(f, n * t * t) <= kC8ProductRel,
            "kappa t = 1e-8, N=60: F/(N t^2) - 1 = " + num(f / (n * t * t) - 1.0));
  }
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (double kt : {0.1, 1.0, 10.0}) {
      const double t = 1.3;
      const auto ops = build_collective_operators(n, Basis::kDicke);
      const double f = qfi_from_state(collective_dephased_css(n, kt / t, t), ops.jz, t);
      const double g = oracle::sld_qfi(oracle::dephased_css_dicke(n, kt), oracle::jz_dicke(n), t);
      worst = std::max(worst, std::abs(f - g));
    }
  v.check(worst <= kC8OracleAbs, "N<=6 vs SLD oracle: max |dF| = " + num(worst));

  ExperimentConfig c;
  c.sensor = {.n_atoms = 100, .kappa_coll = 0.3, .meas_strength = 0.3};
  c.prior_mean = 1.5;
  c.prior_std = 0.5;
  c.omega_mode = OmegaMode::fixed(1.0);
  c.backend = Backend::kSmeDicke;
  c.controller = ControlPolicy::lqr(1.0);
  c.n_trajectories = 300;
  c.dt = 5e-3;
  c.t_final = 30.0;
  c.n_outputs = 60;
  c.seed = 13;
  const std::vector<double> ts = c.output_times();
  const Series qb = qbcrb_curve(c.sensor_params(), c.prior(), ts).values;
  const std::size_t imin = std::min_element(qb.begin(), qb.end()) - qb.begin();
  bool nondecreasing = true;
  for (std::size_t i = imin + 1; i < qb.size(); ++i)
    nondecreasing = nondecreasing && qb[i] >= qb[i - 1] * (1.0 - 1e-12);
  v.check(imin + 1 < qb.size() && nondecreasing,
          "QBCRB minimum " + num(qb[imin]) + " at t=" + num(ts[imin]) + ", non-decreasing after");

  const EnsembleSummary s = run(c).summary;
  const double t_star = std::max(ts[imin], 5.0);
  const double early = window_mean(s, s.amse, t_star, t_star + 5.0);
  const double mid = window_mean(s, s.amse, 15.0, 20.0);
  const double late = window_mean(s, s.amse, 25.0, 30.0);
  v.check(late < mid && mid < early,
          "EKF+LQR AMSE window means [" + num(t_star) + "," + num(t_star + 5.0) + "]=" +
              num(early) + " > [15,20]=" + num(mid) + " > [25,30]=" + num(late));
  v.check(s.amse.back() < qb[imin],
          "AMSE(30) = " + num(s.amse.back()) + " below the QBCRB minimum " + num(qb[imin]));
  return v.ok;
}

DensityMatrix random_dicke_state(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) a(i, j) = cd(g(gen), g(gen));
  DensityMatrix rho;
  rho.basis = Basis::kDicke;
  rho.n_atoms = n;
  rho.entries = a * a.adjoint();
  rho.entries /= rho.entries.trace();
  return rho;
}

bool criterion9() {
  Verdict v;
  {
    const int n = 30;
    SensorParams p({.n_atoms = n, .kappa_coll = 0.02, .meas_strength = 0.3, .omega_true = 1.0});
    auto ops = std::make_shared<const CollectiveOperators>(build_collective_operators(n, Basis::kDicke));
    SmeIntegrator integ(ops, p, css_density_matrix(n, Basis::kDicke));
    RngStream rng(9, 1);
    double tr = 0.0, herm = 0.0, neg = 0.0;
    for (int k = 1; k <= 10000; ++k) {
      integ.step(-1.0, wiener_increment(rng, 2e-3), 2e-3);
      if (k % 100 == 0) {
        const DensityMatrix r = integ.density();
        tr = std::max(tr, std::abs(r.trace() - 1.0));
        herm = std::max(herm, r.hermiticity_error());
        neg = std::min(neg, r.min_eigenvalue());
      }
    }
    v.check(tr < kC9InvariantTol && herm < kC9InvariantTol && neg > -1e-9,
            "rho invariants over 1e4 steps: |tr-1|=" + num(tr) + " herm=" + num(herm) +
                " min eig=" + num(neg));
  }
  {
    SensorParams p({.n_atoms = 100, .kappa_coll = 0.03, .kappa_loc = 0.01, .meas_strength = 0.3,
                    .efficiency = 0.8});
    std::mt19937_64 g(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const MomentState x{50.0 + 20.0 * u(g), 10.0 * u(g), 5.0 + 4.0 * u(g), 8.0 + 6.0 * u(g),
                          25.0 + 10.0 * u(g), 2.0 * u(g),  1.0 + 0.5 * u(g)};
      const double ctl = 0.3 * u(g);
      const EkfJacobians j = ekf_jacobians(x, ctl, p);
      const Vec7 xv = x.to_vector();
      for (int c = 0; c < 7; ++c) {
        const double eps = 1e-6 * std::max(1.0, std::abs(xv[c]));
        Vec7 a = xv, b = xv;
        a[c] += eps;
        b[c] -= eps;
        const Vec7 fd = (cog_drift(MomentState::from_vector(a), p, ctl) -
                         cog_drift(MomentState::from_vector(b), p, ctl)) / (2.0 * eps);
        for (int r = 0; r < 7; ++r)
          worst = std::max(worst, std::abs(j.F(r, c) - fd[r]) / std::max(1.0, std::abs(fd[r])));
      }
    }
    v.check(worst < kC9JacobianRel, "Jacobian vs central differences, 100 states: " + num(worst));
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) {
      SensorParams p({.n_atoms = n, .kappa_coll = 0.05, .meas_strength = 0.3, .omega_true = 1.0});
      auto od = std::make_shared<const CollectiveOperators>(build_collective_operators(n, Basis::kDicke));
      auto of = std::make_shared<const CollectiveOperators>(build_collective_operators(n, Basis::kFull));
      SmeIntegrator a(od, p, css_density_matrix(n, Basis::kDicke));
      SmeIntegrator b(of, p, css_density_matrix(n, Basis::kFull));
      RngStream rng(2, n);
      for (int k = 0; k < 1000; ++k) {
        const double dW = wiener_increment(rng, 1e-3);
        a.step(0.1, dW, 1e-3);
        b.step(0.1, dW, 1e-3);
      }
      const Vec7 d = a.moments().to_vector() - b.moments().to_vector();
      worst = std::max(worst, d.head<6>().cwiseAbs().maxCoeff());
    }
    v.check(worst < kC9BackendTol, "dicke vs full, N<=8, shared path: max moment diff " + num(worst));
  }
  {
    double worst = 0.0;
    for (int tj1 = 0; tj1 <= 8; ++tj1)
      for (int tj2 = 0; tj2 <= 8; ++tj2) {
        const double j1 = tj1 / 2.0, j2 = tj2 / 2.0;
        for (double k = std::abs(j1 - j2); k <= j1 + j2 + 1e-9; k += 1.0)
          for (double kp = std::abs(j1 - j2); kp <= j1 + j2 + 1e-9; kp += 1.0)
            for (double q = -std::min(k, kp); q <= std::min(k, kp) + 1e-9; q += 1.0) {
              double s = 0.0;
              for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1.0) {
                const double m2 = q - m1;
                if (std::abs(m2) > j2 + 1e-9) continue;
                s += clebsch_gordan(j1, m1, j2, m2, k, q) * clebsch_gordan(j1, m1, j2, m2, kp, q);
              }
              worst = std::max(worst, std::abs(s - (k == kp ? 1.0 : 0.0)));
            }
      }
    v.check(worst < kC9CgTol, "Clebsch-Gordan orthogonality j<=4: " + num(worst));
  }
  {
    const int n = 7, shift = 13, n_phi = 361;
    const DensityMatrix rho = random_dicke_state(n, 5);
    const double phi0 = 2.0 * std::numbers::pi * shift / (n_phi - 1);
    DensityMatrix rot = rho;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) rot.entries(a, b) *= std::polar(1.0, -phi0 * (b - a));
    const WignerField w = wigner_sphere(rho, 91, n_phi), wr = wigner_sphere(rot, 91, n_phi);
    double worst = 0.0;
    for (int i = 0; i < 91; ++i)
      for (int j = shift; j < n_phi; ++j)
        worst = std::max(worst, std::abs(wr.values(i, j) - w.values(i, j - shift)));
    v.check(worst < kC9WignerTol, "Wigner rotation covariance: " + num(worst));

    const WignerField c = wigner_sphere(css_density_matrix(40, Basis::kDicke));
    Eigen::Index i, j;
    c.values.maxCoeff(&i, &j);
    v.check(std::abs(c.theta[i] - std::numbers::pi / 2) < 1e-12 && std::abs(c.phi[j]) < 1e-12,
            "CSS Wigner maximum at theta=" + num(c.theta[i]) + " phi=" + num(c.phi[j]));
  }
  return v.ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  std::string cache = ".";
  app.add_option("--criterion", criterion, "1..9")->required()->check(CLI::Range(1, 9));
  app.add_option("--cache-dir", cache, "where shared ensemble results are kept");
  app.add_option("--workers", g_workers, "threads, 0 for all");
  CLI11_PARSE(app, argc, argv);
  g_cache_dir = cache;

  const std::function<bool()> table[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                         criterion6, criterion7, criterion8, criterion9};
  bool ok = false;
  try {
    ok = table[criterion - 1]();
  } catch (const std::exception& e) {
    std::cout << "  error: " << e.what() << "\n";
  }
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << "\n";
  return ok ? 0 : 1;
}
