#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "magneto/exact_sme.hpp"

namespace magneto {

namespace detail {

inline bool is_half_integer(double x) {
  const double twice = 2.0 * x;
  return std::abs(twice - std::round(twice)) < 1e-9;
}

inline bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace detail

/// 3j symbols (j1 j2 j; m1 m2 -m1-m2) for every allowed j, by the
/// Schulten-Gordon three-term recursion in j. Runs forward from j_min while the
/// values grow and backward from j_max, and joins the two on the overlap.
struct ThreeJSeries {
  double j_min = 0.0;
  std::vector<double> values;  // values[i] at j = j_min + i

  double at(double j) const {
    const double i = j - j_min;
    if (values.empty() || i < -1e-9 || i > values.size() - 1.0 + 1e-9 || !detail::is_integer(i))
      return 0.0;
    return values[static_cast<std::size_t>(std::lround(i))];
  }
};

inline ThreeJSeries three_j_series(double j1, double j2, double m1, double m2) {
  ThreeJSeries out;
  const double m3 = -m1 - m2;
  if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9) return out;
  const double jmin = std::max(std::abs(j1 - j2), std::abs(m3));
  const double jmax = j1 + j2;
  if (jmin > jmax + 1e-9) return out;
  const int n = static_cast<int>(std::lround(jmax - jmin)) + 1;
  out.j_min = jmin;
  auto a = [&](double j) {
    const double v = (j * j - (j1 - j2) * (j1 - j2)) * ((j1 + j2 + 1.0) * (j1 + j2 + 1.0) - j * j) *
                     (j * j - m3 * m3);
    return std::sqrt(std::max(v, 0.0));
  };
  auto b = [&](double j) {
    return -(2.0 * j + 1.0) *
           (j1 * (j1 + 1.0) * m3 - j2 * (j2 + 1.0) * m3 - j * (j + 1.0) * (m2 - m1));
  };

  std::vector<double> f(n, 0.0);
  f[0] = 1.0;
  int mid = n - 1;
  if (n > 1) {
    if (jmin == 0.0) {
      // j1 = j2 and m3 = 0: the recursion is degenerate at j = 0.
      f[1] = m1 / std::sqrt(j1 * (j1 + 1.0));
    } else {
      f[1] = -b(jmin) * f[0] / (jmin * a(jmin + 1.0));
    }
    mid = 1;
    for (int i = 1; i + 1 < n; ++i) {
      if (std::abs(f[i]) < std::abs(f[i - 1])) break;
      const double j = jmin + i;
      f[i + 1] = -(b(j) * f[i] + (j + 1.0) * a(j) * f[i - 1]) / (j * a(j + 1.0));
      mid = i + 1;
      if (std::abs(f[i + 1]) > 1e200) {
        for (int k = 0; k <= i + 1; ++k) f[k] *= 1e-200;
      }
    }
  }
  if (mid < n - 1) {
    const int lo = std::max(0, mid - 2);
    std::vector<double> g(n, 0.0);
    g[n - 1] = 1.0;
    g[n - 2] = -b(jmax) * g[n - 1] / ((jmax + 1.0) * a(jmax));
    for (int i = n - 2; i > lo; --i) {
      const double j = jmin + i;
      g[i - 1] = -(j * a(j + 1.0) * g[i + 1] + b(j) * g[i]) / ((j + 1.0) * a(j));
      if (std::abs(g[i - 1]) > 1e200) {
        for (int k = i - 1; k < n; ++k) g[k] *= 1e-200;
      }
    }
    double num = 0.0, den = 0.0;
    for (int i = lo; i <= mid; ++i) {
      num += f[i] * g[i];
      den += g[i] * g[i];
    }
    const double scale = num / den;
    for (int i = mid + 1; i < n; ++i) f[i] = scale * g[i];
  }
  double norm = 0.0;
  for (int i = 0; i < n; ++i) norm += (2.0 * (jmin + i) + 1.0) * f[i] * f[i];
  double s = 1.0 / std::sqrt(norm);
  const long phase = std::lround(j1 - j2 - m3);
  const double want = (phase % 2 == 0) ? 1.0 : -1.0;
  if (f[n - 1] * want < 0.0) s = -s;
  for (double& v : f) v *= s;
  out.values = std::move(f);
  return out;
}

/// <j1 m1; j2 m2 | k q> with the Condon-Shortley phase. Returns 0 outside the
/// selection rules; throws for arguments that are not half-integers.
inline double clebsch_gordan(double j1, double m1, double j2, double m2, double k, double q) {
  using detail::is_half_integer;
  using detail::is_integer;
  if (!is_half_integer(j1) || !is_half_integer(j2) || !is_half_integer(k) ||
      !is_half_integer(m1) || !is_half_integer(m2) || !is_half_integer(q))
    throw std::invalid_argument("clebsch_gordan: arguments must be half-integers");
  if (j1 < 0.0 || j2 < 0.0 || k < 0.0)
    throw std::invalid_argument("clebsch_gordan: negative angular momentum");
  if (!is_integer(j1 - m1) || !is_integer(j2 - m2) || !is_integer(k - q) ||
      !is_integer(j1 + j2 - k))
    return 0.0;
  if (std::abs(m1 + m2 - q) > 1e-9) return 0.0;
  if (k < std::abs(j1 - j2) - 1e-9 || k > j1 + j2 + 1e-9) return 0.0;
  if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9 || std::abs(q) > k + 1e-9) return 0.0;
  const double w = three_j_series(j1, j2, m1, m2).at(k);
  const long phase = std::lround(j1 - j2 + q);
  return ((phase % 2 == 0) ? 1.0 : -1.0) * std::sqrt(2.0 * k + 1.0) * w;
}

/// Orthonormal spherical harmonics Y_l^m(theta, 0) for 0 <= m <= l <= lmax,
/// Condon-Shortley phase included. Entry (l, m).
inline Eigen::MatrixXd spherical_harmonic_table(int lmax, double theta) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
  const double x = std::cos(theta), s = std::sin(theta);
  double pmm = 0.5 / std::sqrt(std::numbers::pi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p(m, m) = pmm;
    if (m + 1 <= lmax) p(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = double(l) * l, m2 = double(m) * m;
      const double al = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double bl = std::sqrt(((l - 1.0) * (l - 1.0) - m2) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p(l, m) = al * (x * p(l - 1, m) - bl * p(l - 2, m));
    }
  }
  return p;
}

struct WignerField {
  std::vector<double> theta;
  std::vector<double> phi;
  Eigen::MatrixXd values;  // values(i, j) at (theta[i], phi[j])
  double imag_residual = 0.0;
};

/// Multipole coefficients rho_kq, stored at (k, q + 2J).
inline Eigen::MatrixXcd wigner_multipoles(const DensityMatrix& rho) {
  if (rho.basis != Basis::kDicke)
    throw std::invalid_argument("wigner: the state must be in the Dicke basis");
  const int n = rho.n_atoms;
  if (n > 300) throw ConfigError("wigner: N must be <= 300");
  const double j = 0.5 * n;
  const int d = n + 1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n + 1, 2 * n + 1);
  for (int a = 0; a < d; ++a) {
    const double m1 = j - a;
    for (int b = 0; b < d; ++b) {
      const double m2 = j - b;
      const cd r = rho.entries(a, b);
      if (r == cd(0.0)) continue;
      const double q = m1 - m2;
      const int qi = static_cast<int>(std::lround(q));
      // <J m1; J -m2 | k q> = (-1)^q sqrt(2k+1) (J J k; m1 -m2 -q)
      const ThreeJSeries w = three_j_series(j, j, m1, -m2);
      for (std::size_t i = 0; i < w.values.size(); ++i) {
        const double k = w.j_min + i;
        const int ki = static_cast<int>(std::lround(k));
        const double cg = ((qi % 2 == 0) ? 1.0 : -1.0) * std::sqrt(2.0 * k + 1.0) * w.values[i];
        const long t_phase = std::lround(j - m1 - q);
        const double t = ((t_phase % 2 == 0) ? 1.0 : -1.0) * cg;
        out(ki, qi + n) += t * r;
      }
    }
  }
  return out;
}

/// W(theta, phi) = sqrt((N+1)/4pi) sum_kq rho_kq Y_kq on a regular grid with
/// theta in [0, pi] and phi in [-pi, pi].
inline WignerField wigner_sphere(const DensityMatrix& rho, int n_theta = 181, int n_phi = 361) {
  if (n_theta < 2 || n_phi < 2) throw ConfigError("wigner grid needs at least 2 points per axis");
  const Eigen::MatrixXcd c = wigner_multipoles(rho);
  const int n = rho.n_atoms;
  const double pre = std::sqrt((n + 1.0) / (4.0 * std::numbers::pi));
  WignerField w;
  w.theta.resize(n_theta);
  w.phi.resize(n_phi);
  for (int i = 0; i < n_theta; ++i) w.theta[i] = std::numbers::pi * i / (n_theta - 1);
  for (int i = 0; i < n_phi; ++i)
    w.phi[i] = -std::numbers::pi + 2.0 * std::numbers::pi * i / (n_phi - 1);
  w.values.resize(n_theta, n_phi);
  Eigen::VectorXcd g(2 * n + 1);
  for (int i = 0; i < n_theta; ++i) {
    const Eigen::MatrixXd y = spherical_harmonic_table(n, w.theta[i]);
    g.setZero();
    for (int q = -n; q <= n; ++q) {
      const int aq = std::abs(q);
      // Y_{k,-m} = (-1)^m conj(Y_{k,m})
      const double sign = (q < 0 && (aq % 2 == 1)) ? -1.0 : 1.0;
      cd acc = 0.0;
      for (int k = aq; k <= n; ++k) acc += c(k, q + n) * y(k, aq);
      g[q + n] = sign * acc;
    }
    for (int jp = 0; jp < n_phi; ++jp) {
      const cd z = std::polar(1.0, w.phi[jp]);
      cd e = std::pow(std::conj(z), n);
      cd acc = 0.0;
      for (int q = -n; q <= n; ++q, e *= z) acc += g[q + n] * e;
      acc *= pre;
      w.imag_residual = std::max(w.imag_residual, std::abs(acc.imag()));
      w.values(i, jp) = acc.real();
    }
  }
  if (w.imag_residual > 1e-8)
    throw NumericalDivergence("wigner: imaginary residual " + std::to_string(w.imag_residual));
  return w;
}

}  // namespace magneto
