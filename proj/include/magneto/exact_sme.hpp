#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "magneto/core.hpp"

namespace magneto {

using cd = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cd>;
using SparseR = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Basis { kDicke, kFull };

inline constexpr int kMaxFullAtoms = 12;

inline const char* basis_name(Basis b) { return b == Basis::kDicke ? "dicke" : "full"; }

struct DensityMatrix {
  Basis basis = Basis::kDicke;
  int n_atoms = 1;
  Eigen::MatrixXcd entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.trace().real(); }
  double hermiticity_error() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  }
  double purity() const { return (entries * entries).trace().real(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

/// Collective spin operators. Dicke basis index k holds m = J - k. In the full
/// basis bit j of the index is spin j, with bit value 1 meaning spin down.
struct CollectiveOperators {
  Basis basis = Basis::kDicke;
  int n_atoms = 1;
  int dim = 2;
  SparseC jx, jy, jz;
  std::vector<Eigen::VectorXd> sigma_z;  // per-site diagonals, full basis only

  Eigen::VectorXd m;     // Jz eigenvalue per basis index
  std::vector<int> flips;  // number of lowered spins per index (k in Dicke, popcount in full)
  SparseR jx_real;       // real symmetric matrix of Jx
};

inline void check_basis_size(int n_atoms, Basis basis) {
  if (n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
  if (basis == Basis::kFull && n_atoms > kMaxFullAtoms)
    throw ConfigError("full basis supports at most " + std::to_string(kMaxFullAtoms) + " atoms");
}

inline CollectiveOperators build_collective_operators(int n_atoms, Basis basis) {
  check_basis_size(n_atoms, basis);
  CollectiveOperators ops;
  ops.basis = basis;
  ops.n_atoms = n_atoms;
  using Trip = Eigen::Triplet<cd>;
  std::vector<Trip> tx, ty, tz;

  if (basis == Basis::kDicke) {
    const int d = n_atoms + 1;
    const double j = 0.5 * n_atoms;
    ops.dim = d;
    ops.m.resize(d);
    ops.flips.resize(d);
    for (int k = 0; k < d; ++k) {
      ops.m[k] = j - k;
      ops.flips[k] = k;
      tz.emplace_back(k, k, ops.m[k]);
    }
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, i.e. from index k to k-1.
    for (int k = 1; k < d; ++k) {
      const double mk = ops.m[k];
      const double c = std::sqrt(j * (j + 1.0) - mk * (mk + 1.0));
      tx.emplace_back(k - 1, k, 0.5 * c);
      tx.emplace_back(k, k - 1, 0.5 * c);
      ty.emplace_back(k - 1, k, cd(0.0, -0.5 * c));
      ty.emplace_back(k, k - 1, cd(0.0, 0.5 * c));
    }
  } else {
    const int d = 1 << n_atoms;
    ops.dim = d;
    ops.m.resize(d);
    ops.flips.resize(d);
    ops.sigma_z.assign(n_atoms, Eigen::VectorXd(d));
    for (int a = 0; a < d; ++a) {
      const int down = std::popcount(static_cast<unsigned>(a));
      ops.flips[a] = down;
      ops.m[a] = 0.5 * n_atoms - down;
      tz.emplace_back(a, a, ops.m[a]);
      for (int s = 0; s < n_atoms; ++s) {
        const int bit = (a >> s) & 1;
        ops.sigma_z[s][a] = bit ? -1.0 : 1.0;
        const int b = a ^ (1 << s);
        tx.emplace_back(b, a, 0.5);
        // sigma_y = [[0, -i], [i, 0]] in (up, down)
        ty.emplace_back(b, a, bit ? cd(0.0, -0.5) : cd(0.0, 0.5));
      }
    }
  }
  const int d = ops.dim;
  ops.jx.resize(d, d);
  ops.jy.resize(d, d);
  ops.jz.resize(d, d);
  ops.jx.setFromTriplets(tx.begin(), tx.end());
  ops.jy.setFromTriplets(ty.begin(), ty.end());
  ops.jz.setFromTriplets(tz.begin(), tz.end());
  ops.jx_real = SparseR(ops.jx.real());
  ops.jx_real.makeCompressed();
  return ops;
}

/// CSS along +x: amplitudes b_m = 2^{-J} sqrt(C(2J, J+m)) in the Dicke basis,
/// or the uniform product state in the full basis.
inline Eigen::VectorXd css_amplitudes(int n_atoms, Basis basis) {
  check_basis_size(n_atoms, basis);
  if (basis == Basis::kFull) {
    const int d = 1 << n_atoms;
    return Eigen::VectorXd::Constant(d, std::pow(2.0, -0.5 * n_atoms));
  }
  const int d = n_atoms + 1;
  Eigen::VectorXd b(d);
  for (int k = 0; k < d; ++k) {
    // log of C(N, k) 2^{-N}, symmetric in k <-> N-k
    const double lg = std::lgamma(n_atoms + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n_atoms - k + 1.0) - n_atoms * std::log(2.0);
    b[k] = std::exp(0.5 * lg);
  }
  return b / b.norm();
}

inline DensityMatrix css_density_matrix(int n_atoms, Basis basis) {
  const Eigen::VectorXd b = css_amplitudes(n_atoms, basis);
  DensityMatrix rho;
  rho.basis = basis;
  rho.n_atoms = n_atoms;
  rho.entries = (b * b.transpose()).cast<cd>();
  return rho;
}

namespace detail {

inline double trace_product(const SparseC& s, const Eigen::MatrixXcd& a, bool real_part = true) {
  cd acc = 0.0;
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseC::InnerIterator it(s, k); it; ++it) acc += it.value() * a(it.col(), it.row());
  return real_part ? acc.real() : acc.imag();
}

}  // namespace detail

/// Moments of rho with the symmetrised covariance. The omega field is zero.
inline MomentState extract_moments(const DensityMatrix& rho, const CollectiveOperators& ops) {
  if (rho.dim() != ops.dim || rho.basis != ops.basis)
    throw std::invalid_argument("extract_moments: operator and state mismatch");
  const Eigen::MatrixXcd ax = ops.jx * rho.entries;
  const Eigen::MatrixXcd ay = ops.jy * rho.entries;
  const Eigen::MatrixXcd az = ops.jz * rho.entries;
  MomentState s;
  s.jx = ax.trace().real();
  s.jy = ay.trace().real();
  const double jz = az.trace().real();
  s.vx = detail::trace_product(ops.jx, ax) - s.jx * s.jx;
  s.vy = detail::trace_product(ops.jy, ay) - s.jy * s.jy;
  s.vz = detail::trace_product(ops.jz, az) - jz * jz;
  // Re Tr(Jx Jy rho) = <{Jx, Jy}>/2
  s.cxy = detail::trace_product(ops.jx, ay) - s.jx * s.jy;
  return s;
}

struct SmeStepInfo {
  double jy = 0.0;     // <Jy> entering the measurement update
  double dY = 0.0;     // dW + 2 sqrt(eta M) <Jy> dt
  double norm = 1.0;   // trace before renormalisation
};

/// Conditional state integrator.
///
/// The state is stored as D rho D^dag with D = diag(i^flips), which maps Jy to
/// -Jx and leaves Jz alone. Jx is real symmetric in both bases, so the
/// measurement operators are real and rho splits into a symmetric real part
/// and an antisymmetric imaginary part that are updated independently.
///
/// One step of length h is a Strang split: h/2 of the Jz-diagonal channel
/// (precession plus collective and local dephasing, solved exactly), then the
/// measurement update, then h/2 of the diagonal channel, then renormalisation.
/// The measurement update is
///
///   rho -> K0 rho K0 + (1 - eta) M h K1 rho K1,
///   K0 = (1 + beta Jy^2)^{-1} (1 + s Jy + g Jy^2),  K1 = (1 + beta Jy^2)^{-1} Jy,
///   s = sqrt(eta M) dY,  beta = M h,  g = beta - M h / 2 + eta M (dY^2 - h) / 2.
///
/// To first order this is the usual second-order-Ito Kraus pair. The plain
/// polynomial 1 + s Jy + (g - beta) Jy^2 grows like M h J^2 at the edges of the
/// Jy spectrum and amplifies rounding noise there without bound; the resolvent
/// keeps both operators bounded. All pieces are completely positive.
class SmeIntegrator {
 public:
  SmeIntegrator(std::shared_ptr<const CollectiveOperators> ops, const SensorParams& p,
                const DensityMatrix& rho0)
      : ops_(std::move(ops)), p_(p) {
    if (!ops_) throw std::invalid_argument("SmeIntegrator: null operators");
    if (ops_->basis == Basis::kDicke && p.kappa_loc() > 0.0)
      throw ConfigError("dicke backend cannot represent local dephasing (kappa_loc > 0)");
    if (ops_->n_atoms != p.n_atoms())
      throw ConfigError("operator set built for a different n_atoms");
    const int d = ops_->dim;
    if (ops_->basis == Basis::kDicke) {
      offdiag_.resize(std::max(d - 1, 0));
      for (int k = 0; k + 1 < d; ++k) offdiag_[k] = ops_->jx_real.coeff(k, k + 1);
    } else {
      qx_.resize(d);
      for (int i = 0; i < d; ++i) qx_[i] = 0.5 * ops_->n_atoms - std::popcount(unsigned(i));
    }
    set_density(rho0);
  }

  void set_density(const DensityMatrix& rho) {
    if (rho.dim() != ops_->dim || rho.basis != ops_->basis)
      throw std::invalid_argument("SmeIntegrator: state does not match operators");
    const int d = ops_->dim;
    re_.resize(d, d);
    im_.resize(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const cd v = rho.entries(k, l) * ipow(ops_->flips[k] - ops_->flips[l]);
        re_(k, l) = v.real();
        im_(k, l) = v.imag();
      }
  }

  DensityMatrix density() const {
    const int d = ops_->dim;
    DensityMatrix rho;
    rho.basis = ops_->basis;
    rho.n_atoms = ops_->n_atoms;
    rho.entries.resize(d, d);
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        rho.entries(k, l) = cd(re_(k, l), im_(k, l)) * ipow(ops_->flips[l] - ops_->flips[k]);
    return rho;
  }

  MomentState moments() const { return extract_moments(density(), *ops_); }

  /// <Jy> = -Tr(rho_frame Jx); the antisymmetric part drops out.
  double expect_jy() const {
    const SparseR& q = ops_->jx_real;
    double acc = 0.0;
    for (int k = 0; k < q.outerSize(); ++k)
      for (SparseR::InnerIterator it(q, k); it; ++it) acc += it.value() * re_(it.col(), it.row());
    return -acc;
  }

  const SensorParams& params() const { return p_; }
  const CollectiveOperators& operators() const { return *ops_; }

  SmeStepInfo step(double u, double dW, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("sme_step: dt must be > 0");
    if (!std::isfinite(dW)) throw std::invalid_argument("sme_step: non-finite dW");
    const double half = 0.5 * dt;
    diagonal_channel((p_.omega_true() + u) * half, half);
    SmeStepInfo info;
    info.jy = expect_jy();
    const double eta = p_.efficiency(), m = p_.meas_strength();
    info.dY = dW + 2.0 * std::sqrt(eta * m) * info.jy * dt;
    if (m > 0.0) {
      Kraus k;
      k.s = std::sqrt(eta * m) * info.dY;
      k.beta = m * dt;
      k.g = k.beta - 0.5 * m * dt + 0.5 * eta * m * (info.dY * info.dY - dt);
      k.c = (1.0 - eta) * m * dt;
      if (ops_->basis == Basis::kDicke) prepare_solver(k.beta);
      for (MatR* x : {&re_, &im_}) {
        if (ops_->basis == Basis::kDicke)
          measurement_banded(k, *x);
        else
          measurement_hadamard(k, *x);
        // a_ holds the transposed update
        if (x == &re_) {
          info.norm = a_.trace();
          if (!std::isfinite(info.norm) || !(info.norm > 0.0))
            throw IntegrationError("sme_step: state lost normalisation", "rho");
        }
        symmetrise(a_, *x, 0.5 / info.norm, x == &im_);
      }
    }
    diagonal_channel((p_.omega_true() + u) * half, half);
    return info;
  }

 private:
  // out <- scale (p + p^T), or scale (p^T - p) for the antisymmetric part.
  static void symmetrise(const MatR& p, MatR& out, double scale, bool antisymmetric) {
    const int d = static_cast<int>(p.rows());
    out.resize(d, d);
    constexpr int kTile = 32;
    for (int i0 = 0; i0 < d; i0 += kTile)
      for (int j0 = i0; j0 < d; j0 += kTile)
        for (int i = i0; i < std::min(i0 + kTile, d); ++i)
          for (int j = std::max(j0, i); j < std::min(j0 + kTile, d); ++j) {
            const double a = p(i, j), b = p(j, i);
            if (antisymmetric) {
              out(i, j) = scale * (b - a);
              out(j, i) = scale * (a - b);
            } else {
              out(i, j) = out(j, i) = scale * (a + b);
            }
          }
  }

  struct Kraus {
    double s = 0.0, beta = 0.0, g = 0.0, c = 0.0;
  };

  static cd ipow(int k) {
    switch (((k % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

  // Y = Jx X, tridiagonal with zero diagonal.
  void apply_jx(const MatR& x, MatR& y) const {
    const int d = ops_->dim;
    y.resize(d, d);
    if (d == 1) {
      y.setZero();
      return;
    }
    y.row(0) = offdiag_[0] * x.row(1);
    for (int k = 1; k + 1 < d; ++k)
      y.row(k) = offdiag_[k - 1] * x.row(k - 1) + offdiag_[k] * x.row(k + 1);
    y.row(d - 1) = offdiag_[d - 2] * x.row(d - 2);
  }

  // 1 + beta Jx^2 couples k with k +- 2 only: two independent tridiagonal
  // chains (even and odd k). Factorised once per beta.
  void prepare_solver(double beta) {
    if (beta == solver_beta_) return;
    const int d = ops_->dim;
    auto e = [&](int k) { return k >= 0 && k < d - 1 ? offdiag_[k] : 0.0; };
    sol_off_.assign(d, 0.0);
    sol_l_.assign(d, 0.0);
    sol_inv_piv_.assign(d, 0.0);
    for (int k = 0; k < d; ++k) {
      const double diag = 1.0 + beta * (e(k - 1) * e(k - 1) + e(k) * e(k));
      sol_off_[k] = k + 2 < d ? beta * e(k) * e(k + 1) : 0.0;
      if (k < 2) {
        sol_inv_piv_[k] = 1.0 / diag;
      } else {
        sol_l_[k] = sol_off_[k - 2] * sol_inv_piv_[k - 2];
        sol_inv_piv_[k] = 1.0 / (diag - sol_l_[k] * sol_off_[k - 2]);
      }
    }
    solver_beta_ = beta;
  }

  // X <- (1 + beta Jx^2)^{-1} X, row operations vectorised over columns.
  void solve_in_place(MatR& x) const {
    const int d = ops_->dim;
    for (int k = 2; k < d; ++k) x.row(k) -= sol_l_[k] * x.row(k - 2);
    back_substitute(x);
  }

  void back_substitute(MatR& x) const {
    const int d = ops_->dim;
    const int n = static_cast<int>(x.cols());
    for (int k = d - 1; k >= 0; --k) {
      double* __restrict r = x.row(k).data();
      const double ip = sol_inv_piv_[k];
      if (k + 2 < d) {
        const double* __restrict r2 = x.row(k + 2).data();
        const double o = sol_off_[k];
        for (int j = 0; j < n; ++j) r[j] = (r[j] - o * r2[j]) * ip;
      } else {
        for (int j = 0; j < n; ++j) r[j] *= ip;
      }
    }
  }

  // out = (1 + beta Jx^2)^{-1} (1 - s Jx + g Jx^2) x. The five-point stencil and
  // the forward elimination share one sweep.
  void apply_k0(const Kraus& kr, const MatR& x, MatR& out) const {
    const int d = ops_->dim;
    const int n = static_cast<int>(x.cols());
    out.resize(d, n);
    auto e = [&](int k) { return k >= 0 && k < d - 1 ? offdiag_[k] : 0.0; };
    for (int k = 0; k < d; ++k) {
      const double c0 = 1.0 + kr.g * (e(k - 1) * e(k - 1) + e(k) * e(k));
      const double cm1 = -kr.s * e(k - 1), cp1 = -kr.s * e(k);
      const double cm2 = kr.g * e(k - 2) * e(k - 1), cp2 = kr.g * e(k) * e(k + 1);
      const double* __restrict x0 = x.row(k).data();
      const double* __restrict xm1 = x.row(k >= 1 ? k - 1 : k).data();
      const double* __restrict xp1 = x.row(k + 1 < d ? k + 1 : k).data();
      const double* __restrict xm2 = x.row(k >= 2 ? k - 2 : k).data();
      const double* __restrict xp2 = x.row(k + 2 < d ? k + 2 : k).data();
      double* __restrict o = out.row(k).data();
      if (k >= 2) {
        const double l = sol_l_[k];
        const double* __restrict o2 = out.row(k - 2).data();
        for (int j = 0; j < n; ++j)
          o[j] = c0 * x0[j] + cm1 * xm1[j] + cp1 * xp1[j] + cm2 * xm2[j] + cp2 * xp2[j] - l * o2[j];
      } else {
        for (int j = 0; j < n; ++j)
          o[j] = c0 * x0[j] + cm1 * xm1[j] + cp1 * xp1[j] + cm2 * xm2[j] + cp2 * xp2[j];
      }
    }
    back_substitute(out);
  }

  // Frame form: Jy -> -Jx, so K0 = (1 + beta Jx^2)^{-1} (1 - s Jx + g Jx^2).
  // Leaves P = (K0 X K0 + c K1 X K1)^T in a_; x is used as scratch.
  void measurement_banded(const Kraus& k, MatR& x) {
    if (k.c > 0.0) {
      apply_jx(x, y_);
      solve_in_place(y_);
      yt_ = y_.transpose();
    }
    apply_k0(k, x, a_);
    x = a_.transpose();
    apply_k0(k, x, a_);
    if (k.c > 0.0) {
      apply_jx(yt_, w_);
      solve_in_place(w_);
      a_ += k.c * w_;
    }
  }

  // Rows of X <- H^{(x)N} X; H^{(x)N} diagonalises the frame Jx in the full basis.
  void hadamard_rows(MatR& x) const {
    const int d = ops_->dim;
    const double r = std::sqrt(0.5);
    for (int len = 1; len < d; len <<= 1)
      for (int base = 0; base < d; base += 2 * len)
        for (int i = base; i < base + len; ++i) {
          w_.noalias() = x.row(i);
          x.row(i) = r * (w_.row(0) + x.row(i + len));
          x.row(i + len) = r * (w_.row(0) - x.row(i + len));
        }
  }

  void measurement_hadamard(const Kraus& k, MatR& x) {
    const int d = ops_->dim;
    hadamard_rows(x);
    at_ = x.transpose();
    hadamard_rows(at_);  // (H X H)^T
    std::vector<double> f0(d), f1(d);
    for (int i = 0; i < d; ++i) {
      const double q = qx_[i];
      const double den = 1.0 / (1.0 + k.beta * q * q);
      f0[i] = (1.0 - k.s * q + k.g * q * q) * den;
      f1[i] = q * den;
    }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) at_(i, j) *= f0[i] * f0[j] + k.c * f1[i] * f1[j];
    hadamard_rows(at_);
    a_ = at_.transpose();
    hadamard_rows(a_);
    a_.transposeInPlace();
  }

  void diagonal_channel(double theta, double h) {
    const double kc = p_.kappa_coll(), kl = p_.kappa_loc();
    if (theta == 0.0 && kc == 0.0 && kl == 0.0) return;
    const int d = ops_->dim;
    if (ops_->basis == Basis::kDicke) {
      // factor depends on the offset l - k = m_k - m_l only
      if (h != cached_h_) {
        damp_.resize(2 * d - 1);
        for (int o = -(d - 1); o <= d - 1; ++o) damp_[o + d - 1] = std::exp(-0.5 * kc * o * o * h);
        cached_h_ = h;
      }
      fr_.resize(2 * d - 1);
      fi_.resize(2 * d - 1);
      for (int o = -(d - 1); o <= d - 1; ++o) {
        fr_[o + d - 1] = damp_[o + d - 1] * std::cos(theta * o);
        fi_[o + d - 1] = -damp_[o + d - 1] * std::sin(theta * o);
      }
      for (int k = 0; k < d; ++k) {
        double* __restrict r = re_.row(k).data();
        double* __restrict i = im_.row(k).data();
        const double* __restrict fr = fr_.data() + (d - 1 - k);
        const double* __restrict fi = fi_.data() + (d - 1 - k);
        for (int l = 0; l < d; ++l) {
          const double rv = r[l], iv = i[l];
          r[l] = fr[l] * rv - fi[l] * iv;
          i[l] = fr[l] * iv + fi[l] * rv;
        }
      }
    } else {
      const int n = ops_->n_atoms;
      // index by (dm + n) * (n + 1) + hamming, dm = m_k - m_l
      if (h != cached_h_) {
        damp_.resize((2 * n + 1) * (n + 1));
        for (int dm = -n; dm <= n; ++dm)
          for (int hd = 0; hd <= n; ++hd)
            damp_[(dm + n) * (n + 1) + hd] = std::exp(-(0.5 * kc * dm * dm + kl * hd) * h);
        cached_h_ = h;
      }
      fr_.resize(2 * n + 1);
      fi_.resize(2 * n + 1);
      for (int dm = -n; dm <= n; ++dm) {
        fr_[dm + n] = std::cos(theta * dm);
        fi_[dm + n] = -std::sin(theta * dm);
      }
      for (int k = 0; k < d; ++k) {
        double* r = re_.row(k).data();
        double* i = im_.row(k).data();
        const int pk = ops_->flips[k];
        for (int l = 0; l < d; ++l) {
          const int dm = ops_->flips[l] - pk;
          const int hd = std::popcount(static_cast<unsigned>(k ^ l));
          const double g = damp_[(dm + n) * (n + 1) + hd];
          const double cr = g * fr_[dm + n], ci = g * fi_[dm + n];
          const double rv = r[l], iv = i[l];
          r[l] = cr * rv - ci * iv;
          i[l] = cr * iv + ci * rv;
        }
      }
    }
  }

  std::shared_ptr<const CollectiveOperators> ops_;
  SensorParams p_;
  MatR re_, im_;
  MatR y_, z_, a_, at_, yt_;
  mutable MatR w_;
  Eigen::VectorXd offdiag_;
  std::vector<double> qx_;
  std::vector<double> sol_off_, sol_l_, sol_inv_piv_;
  double solver_beta_ = -1.0;
  std::vector<double> damp_, fr_, fi_;
  double cached_h_ = -1.0;
};

/// One step on an explicit density matrix. Convenience wrapper; trajectory
/// loops should keep a SmeIntegrator alive instead.
inline DensityMatrix sme_step(const DensityMatrix& rho, const CollectiveOperators& ops,
                              const SensorParams& p, double u, double dW, double dt,
                              SmeStepInfo* info = nullptr) {
  std::shared_ptr<const CollectiveOperators> view(&ops, [](const CollectiveOperators*) {});
  SmeIntegrator integ(view, p, rho);
  const SmeStepInfo i = integ.step(u, dW, dt);
  if (info) *info = i;
  return integ.density();
}

}  // namespace magneto
