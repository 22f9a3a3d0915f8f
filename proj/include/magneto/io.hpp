#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "magneto/runner.hpp"
#include "magneto/wigner.hpp"

namespace magneto {

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream o;
  o << std::setprecision(12) << x;
  return o.str();
}

inline std::string at_or_nan(const Series& s, std::size_t k) {
  return k < s.size() ? fmt(s[k]) : "nan";
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline void write_config(std::ostream& os, const ExperimentConfig& c) {
  os << "# config_hash=" << c.hash_hex() << "\n";
  for (const auto& [k, v] : c.to_map()) os << k << " = " << v << "\n";
}

inline void write_summary_csv(std::ostream& os, const EnsembleSummary& s, const std::string& hash) {
  os << "# config_hash=" << hash << " trajectories=" << s.n_trajectories
     << " failed=" << s.n_failed << "\n";
  os << "time,amse,mean_ekf_cov,squeezing_cond,squeezing_uncond,jx_mean,cs_limit,qbcrb,amse_sem";
  for (const std::string& name : s.estimate_names) os << ",mse_" << name;
  os << '\n';
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    using detail::at_or_nan;
    os << detail::fmt(s.times[k]) << ',' << at_or_nan(s.amse, k) << ','
       << at_or_nan(s.mean_ekf_cov, k) << ',' << at_or_nan(s.squeezing_cond, k) << ','
       << at_or_nan(s.squeezing_uncond, k) << ',' << at_or_nan(s.jx_mean, k) << ','
       << at_or_nan(s.cs_limit, k) << ',' << at_or_nan(s.qbcrb, k) << ','
       << at_or_nan(s.amse_sem, k);
    for (const Series& e : s.estimate_mse) os << ',' << at_or_nan(e, k);
    os << '\n';
  }
}

inline void write_bounds_csv(std::ostream& os, const std::vector<double>& times, const Series& cs,
                             const Series& heisenberg, const Series& qb, const std::string& hash) {
  os << "# config_hash=" << hash << "\n";
  os << "time,cs_limit,heisenberg,qbcrb\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    os << detail::fmt(times[k]) << ',' << detail::at_or_nan(cs, k) << ','
       << detail::at_or_nan(heisenberg, k) << ',' << detail::at_or_nan(qb, k) << '\n';
}

inline void write_model_errors_csv(std::ostream& os, const ModelErrorReport& r,
                                   const std::string& hash) {
  os << "# config_hash=" << hash << " trajectories=" << r.n_trajectories << "\n";
  os << "time,delta_omega_hat_pct,delta_jx_pct,delta_vy_pct\n";
  for (std::size_t k = 0; k < r.times.size(); ++k)
    os << detail::fmt(r.times[k]) << ',' << detail::fmt(r.omega_hat[k]) << ','
       << detail::fmt(r.jx[k]) << ',' << detail::fmt(r.vy[k]) << '\n';
}

inline nlohmann::json record_to_json(const TrajectoryRecord& r, const std::string& hash) {
  nlohmann::json j;
  j["config_hash"] = hash;
  j["stream_id"] = r.stream_id;
  j["omega_true"] = r.omega_true;
  j["times"] = r.times;
  j["photocurrent"] = r.photocurrent;
  j["control"] = r.control;
  auto vecs = [](const std::vector<Eigen::VectorXd>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    return a;
  };
  j["estimate"] = vecs(r.estimate);
  j["sigma_diag"] = vecs(r.sigma_diag);
  nlohmann::json truth = nlohmann::json::array();
  for (const MomentState& m : r.truth) {
    const Vec7 v = m.to_vector();
    truth.push_back(std::vector<double>(v.data(), v.data() + 7));
  }
  j["truth"] = truth;
  return j;
}

/// One JSON object per line.
inline void write_records_ndjson(std::ostream& os, const std::vector<TrajectoryRecord>& recs,
                                 const std::string& hash) {
  for (const TrajectoryRecord& r : recs) os << record_to_json(r, hash).dump() << '\n';
}

inline void write_wigner(std::ostream& os, const WignerField& w, int n_atoms, double t,
                         const std::string& hash) {
  os << "# N=" << n_atoms << " n_theta=" << w.theta.size() << " n_phi=" << w.phi.size()
     << " t=" << detail::fmt(t) << " timestamp=" << detail::utc_timestamp()
     << " config_hash=" << hash << "\n";
  os << "# rows: theta from 0 to pi; columns: phi from -pi to pi\n";
  for (Eigen::Index i = 0; i < w.values.rows(); ++i) {
    for (Eigen::Index k = 0; k < w.values.cols(); ++k) {
      if (k) os << ' ';
      os << detail::fmt(w.values(i, k));
    }
    os << '\n';
  }
}

}  // namespace magneto
