#include "breakdate/plugin.hpp"

#include <cmath>

#include "breakdate/ols.hpp"

namespace breakdate {

namespace {

// OLS covariance of delta_hat at the estimated partition, mapped through
// the estimator actually used (plain broken design, or the two-step joint
// design where delta(0) = mu_2 - mu_1).
MatrixXd delta_covariance(const TimeSeriesDataset& data,
                          const BreakEstimate& est) {
  const int n = data.T(), q = data.q(), p = data.p();
  const int tb = est.t_hat;
  const double s2 =
      est.residuals.squaredNorm() / std::max(1, n - (q + 2 * p));

  if (!est.predictable_coeffs) {
    MatrixXd W = build_design(data, tb);
    MatrixXd wtw = W.transpose() * W;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(wtw);
    MatrixXd inv = cod.pseudoInverse();
    return s2 * inv.bottomRightCorner(p, p);
  }

  // Joint step-1 design of the two-step estimator on dy.
  const VectorXd& ylag = data.D.col(0);
  const int mD = q - 1, mZ = p - 1, m = mD + mZ;
  const int d2 = 4 + m + mZ;
  MatrixXd W = MatrixXd::Zero(n, d2);
  for (int t = 0; t < n; ++t) {
    if (t < tb) {
      W(t, 0) = 1.0;
      W(t, 1) = ylag(t);
    } else {
      W(t, 2) = 1.0;
      W(t, 3) = ylag(t);
    }
  }
  if (mD > 0) W.middleCols(4, mD) = data.D.rightCols(mD);
  if (mZ > 0) {
    W.middleCols(4 + mD, mZ) = data.Z.rightCols(mZ);
    W.bottomRightCorner(n - tb, mZ) = data.Z.bottomRows(n - tb).rightCols(mZ);
  }
  MatrixXd wtw = W.transpose() * W;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(wtw);
  MatrixXd inv = cod.pseudoInverse();
  // delta = L theta with rows: mu_2 - mu_1, then the broken Z block.
  MatrixXd L = MatrixXd::Zero(p, d2);
  L(0, 0) = -1.0;
  L(0, 2) = 1.0;
  for (int j = 0; j < mZ; ++j) L(1 + j, 4 + m + j) = 1.0;
  const double s2p = est.residuals.squaredNorm() / std::max(1, n - d2);
  return s2p * L * inv * L.transpose();
}

MatrixXd matrix_sqrt_psd(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

PluginParams compute_plugins(const TimeSeriesDataset& data,
                             const BreakEstimate& est) {
  const int n = data.T(), p = data.p();
  const int tb = est.t_hat;
  if (tb <= 0 || tb >= n) throw OutOfRange("compute_plugins: t_hat interior");
  if (est.delta_hat.size() != p) {
    throw InvalidData("compute_plugins: delta_hat length mismatch");
  }
  const VectorXd& d = est.delta_hat;
  const double yscale = data.y.norm() / std::sqrt(static_cast<double>(n));
  if (d.norm() <= 1e-10 * std::max(yscale, 1e-300)) {
    throw WeakIdentification("compute_plugins: |delta_hat| numerically zero");
  }

  MatrixXd m1 = MatrixXd::Zero(p, p), m2 = MatrixXd::Zero(p, p);
  MatrixXd w1 = MatrixXd::Zero(p, p), w2 = MatrixXd::Zero(p, p);
  for (int k = 0; k < n; ++k) {
    const auto z = data.Z.row(k).transpose();
    const double e2 = est.residuals(k) * est.residuals(k);
    if (k < tb) {
      m1.noalias() += z * z.transpose();
      w1.noalias() += e2 * z * z.transpose();
    } else {
      m2.noalias() += z * z.transpose();
      w2.noalias() += e2 * z * z.transpose();
    }
  }
  m1 /= tb;
  w1 /= tb;
  m2 /= (n - tb);
  w2 /= (n - tb);

  const double dm1 = d.dot(m1 * d), dm2 = d.dot(m2 * d);
  const double dw1 = d.dot(w1 * d), dw2 = d.dot(w2 * d);
  if (dm1 <= 0.0 || dm2 <= 0.0) {
    throw WeakIdentification("compute_plugins: delta' Sigma_Z delta vanishes");
  }

  PluginParams out;
  out.lambda_hat = est.lambda_hat;
  out.t_hat = tb;
  out.sample_size = n;
  out.xi1 = dm2 / dm1;
  out.sigma_bar_sq = est.residuals.squaredNorm() / n;
  out.delta = d;
  out.m1 = m1;
  out.w1 = w1;
  out.delta_cov_sqrt = matrix_sqrt_psd(delta_covariance(data, est));
  const int k_per_regime = (data.q() + 2 * p + 1) / 2;
  out.nu1 = std::max(2, tb - k_per_regime);
  out.nu2 = std::max(2, n - tb - k_per_regime);

  // Residuals can vanish on noiseless input; the limit law then collapses
  // at the estimated date, represented by a capped signal-to-noise ratio.
  constexpr double kRhoCap = 1e12;
  const double tiny = 1e-300 + 1e-15 * dm1 * dm1;
  if (dw1 <= tiny || dw2 <= tiny) {
    out.xi2 = 1.0;
    out.rho = kRhoCap;
    out.vartheta = kRhoCap;
    out.delta_cov_sqrt.setZero();
    return out;
  }
  out.xi2 = dw2 / dw1;
  out.rho = dm1 * dm1 / dw1;
  out.vartheta = out.rho * d.squaredNorm() / out.sigma_bar_sq;
  if (!std::isfinite(out.rho) || !std::isfinite(out.xi1) ||
      !std::isfinite(out.xi2)) {
    throw WeakIdentification("compute_plugins: non-finite plug-in value");
  }
  return out;
}

namespace {

double qs_kernel(double x) {
  if (x == 0.0) return 1.0;
  const double a = 6.0 * 3.14159265358979323846 * x / 5.0;
  return 25.0 / (12.0 * 3.14159265358979323846 *
                 3.14159265358979323846 * x * x) *
         (std::sin(a) / a - std::cos(a));
}

double autocov(const VectorXd& x, int j) {
  const int n = static_cast<int>(x.size());
  double s = 0.0;
  for (int t = j; t < n; ++t) s += x(t) * x(t - j);
  return s / n;
}

}  // namespace

double lrv_qs(const Eigen::Ref<const VectorXd>& series, double bandwidth) {
  const int n = static_cast<int>(series.size());
  if (n < 2) throw InvalidData("lrv_qs: series too short");
  VectorXd x = series.array() - series.mean();
  double lrv = autocov(x, 0);
  if (bandwidth <= 0.0) return lrv;
  const int max_lag =
      std::min(n - 1, static_cast<int>(std::ceil(10.0 * bandwidth)) + 40);
  for (int j = 1; j <= max_lag; ++j) {
    lrv += 2.0 * qs_kernel(j / bandwidth) * autocov(x, j);
  }
  return std::max(lrv, 0.0);
}

LrvResult lrv_qs_prewhitened(const Eigen::Ref<const VectorXd>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 10) throw InvalidData("lrv_qs_prewhitened: need length >= 10");
  VectorXd x = series.array() - series.mean();

  double num = 0.0, den = 0.0;
  for (int t = 1; t < n; ++t) {
    num += x(t) * x(t - 1);
    den += x(t - 1) * x(t - 1);
  }
  LrvResult out;
  double phi = den > 0.0 ? num / den : 0.0;
  if (std::abs(phi) >= 0.97) {
    phi = phi > 0 ? 0.97 : -0.97;
    out.clamped = true;
  }
  out.ar_coeff = phi;

  VectorXd w(n - 1);
  for (int t = 1; t < n; ++t) w(t - 1) = x(t) - phi * x(t - 1);

  // AR(1) plug-in bandwidth on the whitened series.
  const int nw = n - 1;
  double numw = 0.0, denw = 0.0;
  for (int t = 1; t < nw; ++t) {
    numw += w(t) * w(t - 1);
    denw += w(t - 1) * w(t - 1);
  }
  double phiw = denw > 0.0 ? numw / denw : 0.0;
  phiw = std::clamp(phiw, -0.97, 0.97);
  const double alpha2 = 4.0 * phiw * phiw /
                        std::pow(1.0 - phiw, 4.0);
  const double st = 1.3221 * std::pow(std::max(alpha2 * nw, 1e-12), 0.2);

  const double lrv_w = lrv_qs(w, st);
  const double recolor = (1.0 - phi) * (1.0 - phi);
  out.value = std::max(lrv_w / recolor, 0.0);
  return out;
}

}  // namespace breakdate
