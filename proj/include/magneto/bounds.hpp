#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "magneto/core.hpp"
#include "magneto/exact_sme.hpp"

namespace magneto {

struct BoundCurve {
  std::vector<double> times;
  std::vector<double> values;
};

/// Classical-simulation limit on the AMSE from decoherence. Zero without
/// decoherence; with a flat prior it is kappa_coll/t + 2 kappa_loc/(N t).
inline double cs_limit(double t, const SensorParams& p, const GaussianPrior& prior) {
  if (!(t > 0.0)) throw ConfigError("cs_limit: t must be > 0");
  const double rate = p.kappa_coll() / t + 2.0 * p.kappa_loc() / (t * p.n());
  if (rate == 0.0) return 0.0;
  return 1.0 / (prior.information() + 1.0 / rate);
}

/// Short-time (t << 1/(N M)) optimum 3/(N^2 eta M t^3).
inline double heisenberg_limit(double t, const SensorParams& p) {
  if (!(t > 0.0)) throw ConfigError("heisenberg_limit: t must be > 0");
  if (!(p.meas_strength() > 0.0)) throw ConfigError("heisenberg_limit: M must be > 0");
  return 3.0 / (p.n() * p.n() * p.efficiency() * p.meas_strength() * t * t * t);
}

/// QFI of a Ramsey strategy with independent dephasing, N t^2 exp(-kappa_loc t).
inline double qfi_local(const SensorParams& p, double t) {
  if (p.kappa_coll() != 0.0) throw ConfigError("qfi_local requires kappa_coll = 0");
  if (t < 0.0) throw ConfigError("qfi_local: t must be >= 0");
  return p.n() * t * t * std::exp(-p.kappa_loc() * t);
}

/// CSS along x after collective dephasing for time t, in the Dicke basis.
inline DensityMatrix collective_dephased_css(int n_atoms, double kappa_coll, double t) {
  if (n_atoms > 300) throw ConfigError("collective_dephased_css: N must be <= 300");
  if (kappa_coll < 0.0 || t < 0.0) throw ConfigError("collective_dephased_css: kappa t must be >= 0");
  const Eigen::VectorXd b = css_amplitudes(n_atoms, Basis::kDicke);
  const int d = n_atoms + 1;
  const double kt = kappa_coll * t;
  DensityMatrix rho;
  rho.basis = Basis::kDicke;
  rho.n_atoms = n_atoms;
  rho.entries.resize(d, d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const double dm = k - l;
      rho.entries(k, l) = b[k] * b[l] * std::exp(-0.5 * kt * dm * dm);
    }
  return rho;
}

/// 2 t^2 sum_{kl} (l_k - l_l)^2 / (l_k + l_l) |<k|G|l>|^2 over eigenpairs with
/// l_k + l_l above the threshold.
inline double qfi_from_state(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& generator, double t,
                             double threshold = 1e-12) {
  if (rho.rows() != rho.cols() || generator.rows() != rho.rows() || generator.cols() != rho.cols())
    throw std::invalid_argument("qfi_from_state: dimension mismatch");
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("qfi_from_state: rho is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.info() != Eigen::Success) throw NumericalDivergence("qfi_from_state: eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXcd g = es.eigenvectors().adjoint() * generator * es.eigenvectors();
  double acc = 0.0;
  const Eigen::Index d = lam.size();
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l) {
      const double s = lam[k] + lam[l];
      if (s <= threshold) continue;
      const double diff = lam[k] - lam[l];
      acc += diff * diff / s * std::norm(g(k, l));
    }
  return 2.0 * t * t * acc;
}

inline double qfi_from_state(const DensityMatrix& rho, const SparseC& generator, double t,
                             double threshold = 1e-12) {
  return qfi_from_state(rho.entries, Eigen::MatrixXcd(generator), t, threshold);
}

inline double qbcrb(const GaussianPrior& prior, double qfi) {
  if (!(qfi >= 0.0)) throw ConfigError("qbcrb: qfi must be >= 0");
  if (prior.is_flat()) return qfi > 0.0 ? 1.0 / qfi : std::numeric_limits<double>::infinity();
  return 1.0 / (prior.information() + qfi);
}

/// Bound on the classical strong-measurement strategy at each time: QFI of
/// the dephased CSS (collective) or the product-state formula (local).
inline BoundCurve qbcrb_curve(const SensorParams& p, const GaussianPrior& prior,
                              const std::vector<double>& times) {
  BoundCurve c;
  c.times = times;
  c.values.reserve(times.size());
  std::shared_ptr<CollectiveOperators> ops;
  for (double t : times) {
    double f;
    if (p.kappa_coll() == 0.0) {
      f = qfi_local(p, t);
    } else {
      if (p.kappa_loc() != 0.0)
        throw ConfigError("qbcrb_curve: mixed collective and local dephasing is not supported");
      if (!ops)
        ops = std::make_shared<CollectiveOperators>(
            build_collective_operators(p.n_atoms(), Basis::kDicke));
      f = qfi_from_state(collective_dephased_css(p.n_atoms(), p.kappa_coll(), t), ops->jz, t);
    }
    c.values.push_back(qbcrb(prior, f));
  }
  return c;
}

inline BoundCurve cs_limit_curve(const SensorParams& p, const GaussianPrior& prior,
                                 const std::vector<double>& times) {
  BoundCurve c;
  c.times = times;
  for (double t : times) c.values.push_back(cs_limit(t, p, prior));
  return c;
}

inline BoundCurve heisenberg_curve(const SensorParams& p, const std::vector<double>& times) {
  BoundCurve c;
  c.times = times;
  for (double t : times) c.values.push_back(heisenberg_limit(t, p));
  return c;
}

}  // namespace magneto
