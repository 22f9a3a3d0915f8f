// magneto: command-line front end for ensemble runs, bounds and model checks.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "magneto/magneto.hpp"

namespace fs = std::filesystem;
using namespace magneto;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

// Config file first, then each flag that was given on the command line.
struct ConfigSource {
  std::string path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "flat key = value config file");
    ExperimentConfig defaults;
    auto keys = defaults.to_map();
    keys["workers"] = "0";
    for (const auto& kv : keys) {
      const std::string key = kv.first;
      app->add_option_function<std::string>(
          flag_name(key), [this, key](const std::string& v) { overrides[key] = v; },
          "override '" + key + "'");
    }
  }

  ExperimentConfig load() const {
    ExperimentConfig c;
    if (!path.empty()) {
      std::ifstream f(path);
      if (!f) throw ConfigError("cannot read config file " + path);
      c = parse_config(f, c);
    }
    for (const auto& [k, v] : overrides) set_config_value(c, k, v);
    c.validate();
    return c;
  }
};

std::ofstream open_in(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void save_config(const fs::path& dir, const ExperimentConfig& c) {
  auto f = open_in(dir, "config.txt");
  write_config(f, c);
}

std::function<void(int)> progress_printer(int total, bool quiet) {
  if (quiet) return {};
  return [total, last = -1](int done) mutable {
    const int pct = 100 * done / total;
    if (pct / 10 != last / 10 || done == total) {
      std::cerr << "\r  " << done << "/" << total << " trajectories" << std::flush;
      last = pct;
      if (done == total) std::cerr << "\n";
    }
  };
}

int cmd_simulate(const ConfigSource& src, const fs::path& out, bool dump, bool quiet) {
  const ExperimentConfig c = src.load();
  EnsembleResult r = run_ensemble_full(c, progress_printer(c.n_trajectories, quiet));
  save_config(out, c);
  {
    auto f = open_in(out, "summary.csv");
    write_summary_csv(f, r.summary, c.hash_hex());
  }
  if (dump) {
    auto f = open_in(out, "trajectories.ndjson");
    write_records_ndjson(f, r.records, c.hash_hex());
  }
  for (const std::string& e : r.failures) std::cerr << "failed: " << e << "\n";
  const auto& s = r.summary;
  std::cout << "config " << c.hash_hex() << ": " << s.n_trajectories << " trajectories, "
            << s.n_failed << " failed\n";
  if (!s.amse.empty())
    std::cout << "final t=" << s.times.back() << " amse=" << s.amse.back()
              << " mean_cov=" << s.mean_ekf_cov.back() << " cs_limit=" << s.cs_limit.back() << "\n";
  std::cout << "wrote " << (out / "summary.csv").string() << "\n";
  return 0;
}

int cmd_bounds(const ConfigSource& src, const fs::path& out) {
  const ExperimentConfig c = src.load();
  const SensorParams p = c.sensor_params();
  const GaussianPrior prior = c.prior();
  const std::vector<double> t = c.output_times();
  const Series cs = cs_limit_curve(p, prior, t).values;
  Series hz;
  if (p.meas_strength() > 0.0) hz = heisenberg_curve(p, t).values;
  const Series qb = qbcrb_curve(p, prior, t).values;
  auto f = open_in(out, "bounds.csv");
  write_bounds_csv(f, t, cs, hz, qb, c.hash_hex());
  save_config(out, c);
  std::cout << "heisenberg column is valid only for t << 1/(N M) = " << 1.0 / (p.n() * p.meas_strength())
            << "\nwrote " << (out / "bounds.csv").string() << "\n";
  return 0;
}

int cmd_compare(const ConfigSource& src, const fs::path& out) {
  ExperimentConfig exact = src.load();
  if (exact.backend == Backend::kCog)
    throw ConfigError("compare needs an exact backend (sme-dicke or sme-full)");
  ExperimentConfig approx = exact;
  approx.backend = Backend::kCog;
  const ModelErrorReport r = compare_models(exact, approx);
  auto f = open_in(out, "compare.csv");
  write_model_errors_csv(f, r, exact.hash_hex());
  save_config(out, exact);
  double worst = 0.0;
  for (double v : r.omega_hat) worst = std::max(worst, v);
  std::cout << "max delta omega_hat = " << worst << " %\nwrote " << (out / "compare.csv").string()
            << "\n";
  return 0;
}

int cmd_wigner(const ConfigSource& src, const fs::path& out, const std::vector<double>& times,
               int n_theta, int n_phi, bool quiet) {
  ExperimentConfig c = src.load();
  if (c.backend != Backend::kSmeDicke) throw ConfigError("wigner needs the sme-dicke backend");
  if (times.empty()) throw ConfigError("wigner needs --times");
  c.snapshot_times = times;
  c.validate();
  EnsembleResult r = run_ensemble_full(c, progress_printer(c.n_trajectories, quiet));
  const std::vector<DensityMatrix> avg = average_snapshots(r.records);
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < avg.size(); ++i) {
    const WignerField w = wigner_sphere(avg[i], n_theta, n_phi);
    std::ostringstream name;
    name << "wigner_t" << sorted[i] << ".txt";
    auto f = open_in(out, name.str());
    write_wigner(f, w, c.sensor.n_atoms, sorted[i], c.hash_hex());
    std::cout << "wrote " << (out / name.str()).string() << "\n";
  }
  save_config(out, c);
  return 0;
}

int cmd_sweep(const ConfigSource& src, const fs::path& out, const std::string& param,
              const std::vector<double>& values) {
  const ExperimentConfig c = src.load();
  if (values.empty()) throw ConfigError("sweep needs --values");
  const std::vector<SweepPoint> pts = sweep(c, param, values);
  auto f = open_in(out, "sweep.csv");
  f << "# config_hash=" << c.hash_hex() << " param=" << param << "\n";
  f << param << ",time_final,amse_final,mean_ekf_cov_final,squeezing_cond_final,jx_mean_final\n";
  for (const SweepPoint& p : pts) {
    const EnsembleSummary& s = p.summary;
    auto last = [](const Series& x) { return x.empty() ? std::nan("") : x.back(); };
    f << p.value << ',' << s.times.back() << ',' << last(s.amse) << ',' << last(s.mean_ekf_cov)
      << ',' << last(s.squeezing_cond) << ',' << last(s.jx_mean) << '\n';
    std::ostringstream name;
    name << "summary_" << param << "_" << p.value << ".csv";
    auto g = open_in(out, name.str());
    write_summary_csv(g, s, c.hash_hex());
  }
  save_config(out, c);
  std::cout << "wrote " << (out / "sweep.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation, estimation and control of a continuously monitored spin-ensemble magnetometer"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  bool quiet = false;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--quiet", quiet, "no progress output");

  ConfigSource sim_src, bounds_src, cmp_src, wig_src, sweep_src;
  bool dump = false;
  auto* sim = app.add_subcommand("simulate", "run an ensemble and write summary.csv");
  sim_src.attach(sim);
  sim->add_flag("--dump-records", dump, "also write trajectories.ndjson");

  auto* bnd = app.add_subcommand("bounds", "write CS, Heisenberg and QBCRB curves");
  bounds_src.attach(bnd);

  auto* cmp = app.add_subcommand("compare", "exact backend versus the moment model on shared noise");
  cmp_src.attach(cmp);

  std::vector<double> wig_times;
  int n_theta = 181, n_phi = 361;
  auto* wig = app.add_subcommand("wigner", "Wigner functions of the averaged state");
  wig_src.attach(wig);
  wig->add_option("--times", wig_times, "snapshot times")->delimiter(',');
  wig->add_option("--n-theta", n_theta, "polar grid points")->capture_default_str();
  wig->add_option("--n-phi", n_phi, "azimuthal grid points")->capture_default_str();

  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* swp = app.add_subcommand("sweep", "repeat the ensemble over values of one key");
  sweep_src.attach(swp);
  swp->add_option("--param", sweep_param, "config key to vary, e.g. lambda or n_atoms")->required();
  swp->add_option("--values", sweep_values, "values")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const fs::path out(out_dir);
  try {
    if (sim->parsed()) return cmd_simulate(sim_src, out, dump, quiet);
    if (bnd->parsed()) return cmd_bounds(bounds_src, out);
    if (cmp->parsed()) return cmd_compare(cmp_src, out);
    if (wig->parsed()) return cmd_wigner(wig_src, out, wig_times, n_theta, n_phi, quiet);
    if (swp->parsed()) return cmd_sweep(sweep_src, out, sweep_param, sweep_values);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalDivergence& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
