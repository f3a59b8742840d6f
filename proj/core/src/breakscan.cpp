#include "breakdate/breakscan.hpp"

#include <cmath>
#include <limits>

#include "breakdate/ols.hpp"

namespace breakdate {

double BreakEstimate::ssr() const {
  for (std::size_t i = 0; i < profile.candidates.size(); ++i) {
    if (profile.candidates[i] == t_hat) return profile.ssr[i];
  }
  return residuals.squaredNorm();
}

std::pair<int, int> trimmed_range(const TimeSeriesDataset& data,
                                  const ModelSpec& spec) {
  const int n = data.T();
  int lo = static_cast<int>(std::ceil(n * spec.trimming_estimation));
  lo = std::max(lo, data.p() + data.q());
  int hi = static_cast<int>(std::floor(n * (1.0 - spec.trimming_estimation)));
  if (lo > hi) throw InvalidSpec("trimming leaves no candidate break dates");
  return {lo, hi};
}

namespace {

struct CandidateFit {
  double ssr = std::numeric_limits<double>::quiet_NaN();
  double q_stat = std::numeric_limits<double>::quiet_NaN();
  bool deficient = false;
};

// Solves the bordered normal equations
//   [A  B] [beta ]   [bx]
//   [B' C] [delta] = [cz]
// falling back to a min-norm solve when the system is singular.
CandidateFit solve_candidate(const MatrixXd& A, const MatrixXd& B,
                             const MatrixXd& C, const VectorXd& bx,
                             const VectorXd& cz, double yy,
                             const Eigen::LDLT<MatrixXd>* A_solver,
                             double ssr_null) {
  const int dx = static_cast<int>(A.rows());
  const int dz = static_cast<int>(C.rows());
  const int d = dx + dz;
  MatrixXd M(d, d);
  M.topLeftCorner(dx, dx) = A;
  M.topRightCorner(dx, dz) = B;
  M.bottomLeftCorner(dz, dx) = B.transpose();
  M.bottomRightCorner(dz, dz) = C;
  VectorXd rhs(d);
  rhs.head(dx) = bx;
  rhs.tail(dz) = cz;

  CandidateFit out;
  Eigen::LDLT<MatrixXd> ldlt(M);
  VectorXd theta;
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    theta = ldlt.solve(rhs);
    double resid = (M * theta - rhs).norm();
    ok = theta.allFinite() && resid <= 1e-8 * (rhs.norm() + 1.0);
  }
  if (!ok) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(M);
    theta = cod.solve(rhs);
    out.deficient = true;
  }
  out.ssr = std::max(0.0, yy - theta.dot(rhs));

  VectorXd delta = theta.tail(dz);
  if (A_solver != nullptr && !out.deficient) {
    MatrixXd ainv_b = A_solver->solve(B);
    out.q_stat = delta.dot((C - B.transpose() * ainv_b) * delta);
  } else {
    out.q_stat = ssr_null - out.ssr;
  }
  return out;
}

BreakEstimate finalize_standard(const TimeSeriesDataset& data, int t_hat,
                                SsrProfile profile) {
  const int q = data.q(), p = data.p();
  OlsFit fit = ols_fit(build_design(data, t_hat), data.y);
  BreakEstimate est;
  est.t_hat = t_hat;
  est.lambda_hat = static_cast<double>(t_hat) / data.T();
  est.beta_hat = fit.coefficients.head(q + p);
  est.delta_hat = fit.coefficients.tail(p);
  est.residuals = fit.residuals;
  est.profile = std::move(profile);
  est.rank = fit.rank;
  est.rank_deficient = fit.rank < q + 2 * p;
  return est;
}

}  // namespace

BreakEstimate scan_break(const TimeSeriesDataset& data, const ModelSpec& spec,
                         ScanMethod method) {
  data.validate();
  spec.validate();
  if (spec.has_predictable) return two_step_predictable(data, spec);
  auto [lo, hi] = trimmed_range(data, spec);

  const int n = data.T(), q = data.q(), p = data.p();
  MatrixXd X(n, q + p);
  if (q > 0) X.leftCols(q) = data.D;
  X.rightCols(p) = data.Z;

  SsrProfile profile;
  profile.candidates.reserve(hi - lo + 1);
  profile.ssr.reserve(hi - lo + 1);
  profile.q_stat.reserve(hi - lo + 1);

  int best = -1;
  double best_ssr = std::numeric_limits<double>::infinity();
  bool any_ok = false;

  if (method == ScanMethod::brute_force) {
    OlsFit null_fit = ols_fit(X, data.y);
    for (int t_b = lo; t_b <= hi; ++t_b) {
      OlsFit fit = ols_fit(build_design(data, t_b), data.y);
      profile.candidates.push_back(t_b);
      profile.ssr.push_back(fit.ssr);
      profile.q_stat.push_back(null_fit.ssr - fit.ssr);
      if (fit.rank == q + 2 * p) any_ok = true;
      if (fit.ssr < best_ssr) {
        best_ssr = fit.ssr;
        best = t_b;
      }
    }
  } else {
    MatrixXd A = X.transpose() * X;
    VectorXd bx = X.transpose() * data.y;
    const double yy = data.y.squaredNorm();

    Eigen::LDLT<MatrixXd> A_ldlt(A);
    bool a_ok = A_ldlt.info() == Eigen::Success;
    if (a_ok) {
      VectorXd beta0 = A_ldlt.solve(bx);
      a_ok = beta0.allFinite() &&
             (A * beta0 - bx).norm() <= 1e-8 * (bx.norm() + 1.0);
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod_x(X);
    const double ssr_null = (data.y - X * cod_x.solve(data.y)).squaredNorm();

    // Suffix cross-products over rows >= t_b; shrink as t_b advances.
    MatrixXd S_zz = MatrixXd::Zero(p, p);
    MatrixXd S_xz = MatrixXd::Zero(q + p, p);
    VectorXd S_zy = VectorXd::Zero(p);
    for (int k = lo; k < n; ++k) {
      const auto z = data.Z.row(k).transpose();
      S_zz.noalias() += z * z.transpose();
      S_xz.noalias() += X.row(k).transpose() * z.transpose();
      S_zy.noalias() += z * data.y(k);
    }

    for (int t_b = lo; t_b <= hi; ++t_b) {
      if (t_b > lo) {
        const int k = t_b - 1;  // row k leaves the post-break block
        const auto z = data.Z.row(k).transpose();
        S_zz.noalias() -= z * z.transpose();
        S_xz.noalias() -= X.row(k).transpose() * z.transpose();
        S_zy.noalias() -= z * data.y(k);
      }
      CandidateFit fit =
          solve_candidate(A, S_xz, S_zz, bx, S_zy, yy,
                          a_ok ? &A_ldlt : nullptr, ssr_null);
      profile.candidates.push_back(t_b);
      profile.ssr.push_back(fit.ssr);
      profile.q_stat.push_back(fit.q_stat);
      if (!fit.deficient) any_ok = true;
      if (fit.ssr < best_ssr) {
        best_ssr = fit.ssr;
        best = t_b;
      }
    }
  }

  if (best < 0) throw DegenerateDesign("scan_break: no candidate admissible");
  if (!any_ok) {
    throw DegenerateDesign("scan_break: all candidate designs rank-deficient");
  }
  return finalize_standard(data, best, std::move(profile));
}

BreakEstimate estimate_given_break(const TimeSeriesDataset& data,
                                   const ModelSpec& spec, int t_b) {
  data.validate();
  spec.validate();
  auto [lo, hi] = trimmed_range(data, spec);
  if (t_b < lo || t_b > hi) {
    throw OutOfRange("estimate_given_break: t_b outside trimmed range");
  }

  const int q = data.q(), p = data.p();
  MatrixXd X(data.T(), q + p);
  if (q > 0) X.leftCols(q) = data.D;
  X.rightCols(p) = data.Z;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod_x(X);
  const double ssr_null = (data.y - X * cod_x.solve(data.y)).squaredNorm();

  OlsFit fit = ols_fit(build_design(data, t_b), data.y);
  SsrProfile profile;
  profile.candidates = {t_b};
  profile.ssr = {fit.ssr};
  profile.q_stat = {ssr_null - fit.ssr};
  return finalize_standard(data, t_b, std::move(profile));
}

namespace {

// Closed 2x2 solve for the per-regime drift fit, min-norm on collinearity.
void fit_drift(double n, double sy, double syy, double sdy, double sydy,
               double* mu, double* alpha, bool* deficient) {
  const double det = n * syy - sy * sy;
  if (n <= 0.0) {
    *mu = 0.0;
    *alpha = 0.0;
    *deficient = true;
    return;
  }
  if (std::abs(det) <= 1e-12 * (n * syy + sy * sy + 1.0)) {
    Eigen::Matrix2d m;
    m << n, sy, sy, syy;
    Eigen::Vector2d r(sdy, sydy);
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix2d> cod(m);
    Eigen::Vector2d sol = cod.solve(r);
    *mu = sol(0);
    *alpha = sol(1);
    *deficient = true;
    return;
  }
  *mu = (syy * sdy - sy * sydy) / det;
  *alpha = (n * sydy - sy * sdy) / det;
  *deficient = false;
}

}  // namespace

BreakEstimate two_step_predictable(const TimeSeriesDataset& data,
                                   const ModelSpec& spec) {
  data.validate();
  spec.validate();
  if (!spec.has_predictable) {
    throw InvalidSpec("two_step_predictable: spec.has_predictable is false");
  }
  const int n = data.T(), q = data.q(), p = data.p();
  if (q < 1 || (data.D.col(0).segment(1, n - 1) -
                data.y.head(n - 1)).lpNorm<Eigen::Infinity>() >
                   1e-9 * (1.0 + data.y.cwiseAbs().maxCoeff())) {
    throw InvalidSpec("two_step_predictable: D column 0 must hold y_{t-1}");
  }
  if ((data.Z.col(0).array() - 1.0).abs().maxCoeff() > 1e-12) {
    throw InvalidSpec("two_step_predictable: Z column 0 must be the constant");
  }

  const VectorXd& ylag = data.D.col(0);
  VectorXd dy = data.y - ylag;

  // Remaining (semimartingale) regressors: D columns 1.., Z columns 1..
  const int mD = q - 1, mZ = p - 1, m = mD + mZ;
  MatrixXd U(n, std::max(m, 1));
  if (mD > 0) U.leftCols(mD) = data.D.rightCols(mD);
  if (mZ > 0) U.middleCols(mD, mZ) = data.Z.rightCols(mZ);

  // Running regime-1 sums (rows < t_b) plus fixed totals; regime 2 comes
  // from the difference, so the scan is O(T d^2) with O(d^2) memory.
  struct Sums {
    double n = 0, sy = 0, syy = 0, sdy = 0, sydy = 0, sdy2 = 0;
    VectorXd su, sudy, suy;
    MatrixXd suu;
    void init(int m) {
      su = VectorXd::Zero(m);
      sudy = VectorXd::Zero(m);
      suy = VectorXd::Zero(m);
      suu = MatrixXd::Zero(m, m);
    }
    void add(double yl, double d, const Eigen::Ref<const VectorXd>& u) {
      n += 1.0;
      sy += yl;
      syy += yl * yl;
      sdy += d;
      sydy += yl * d;
      sdy2 += d * d;
      if (su.size() > 0) {
        su += u;
        sudy += u * d;
        suy += u * yl;
        suu.noalias() += u * u.transpose();
      }
    }
  };
  Sums total;
  total.init(m);
  VectorXd urow = VectorXd::Zero(m);
  for (int k = 0; k < n; ++k) {
    if (m > 0) urow = U.row(k).head(m).transpose();
    total.add(ylag(k), dy(k), urow);
  }

  auto [lo0, hi0] = trimmed_range(data, spec);
  const int lo = std::max(lo0, 2);
  const int hi = std::min(hi0, n - 2);
  if (lo > hi) throw InvalidSpec("two_step: trimming leaves no candidates");

  Sums left;
  left.init(m);
  for (int k = 0; k < lo; ++k) {
    if (m > 0) urow = U.row(k).head(m).transpose();
    left.add(ylag(k), dy(k), urow);
  }

  SsrProfile profile;
  int best = -1;
  double best_ssr = std::numeric_limits<double>::infinity();
  // Step-1 design per candidate: per-regime drift columns
  // (1, ylag) x {pre, post} plus the semimartingale block [uD | uZ | uZ2].
  const int d2 = 4 + mD + 2 * mZ;
  MatrixXd M2(d2, d2);
  VectorXd r2(d2);

  for (int t_b = lo; t_b <= hi; ++t_b) {
    if (t_b > lo) {
      const int k = t_b - 1;
      if (m > 0) urow = U.row(k).head(m).transpose();
      left.add(ylag(k), dy(k), urow);
    }
    M2.setZero();
    const double n2 = total.n - left.n;
    const double sy2 = total.sy - left.sy, syy2 = total.syy - left.syy;
    const double sdy2r = total.sdy - left.sdy;
    const double sydy2 = total.sydy - left.sydy;
    M2(0, 0) = left.n;
    M2(0, 1) = M2(1, 0) = left.sy;
    M2(1, 1) = left.syy;
    M2(2, 2) = n2;
    M2(2, 3) = M2(3, 2) = sy2;
    M2(3, 3) = syy2;
    r2(0) = left.sdy;
    r2(1) = left.sydy;
    r2(2) = sdy2r;
    r2(3) = sydy2;
    if (m > 0) {
      const VectorXd su2 = total.su - left.su;
      const VectorXd suy2 = total.suy - left.suy;
      const MatrixXd uu2 = total.suu - left.suu;
      // Drift-block cross products with [uD | uZ] and the broken uZ2.
      M2.block(0, 4, 1, m) = left.su.transpose();
      M2.block(1, 4, 1, m) = left.suy.transpose();
      M2.block(2, 4, 1, m) = su2.transpose();
      M2.block(3, 4, 1, m) = suy2.transpose();
      if (mZ > 0) {
        M2.block(2, 4 + m, 1, mZ) = su2.tail(mZ).transpose();
        M2.block(3, 4 + m, 1, mZ) = suy2.tail(mZ).transpose();
      }
      M2.block(4, 4, m, m) = total.suu;
      if (mZ > 0) {
        M2.block(4, 4 + m, m, mZ) = uu2.rightCols(mZ);
        M2.block(4 + m, 4 + m, mZ, mZ) = uu2.bottomRightCorner(mZ, mZ);
      }
      M2.triangularView<Eigen::Lower>() =
          M2.triangularView<Eigen::Upper>().transpose();
      r2.segment(4, m) = total.sudy;
      if (mZ > 0) {
        r2.tail(mZ) = (total.sudy - left.sudy).tail(mZ);
      }
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(M2);
    VectorXd th = cod.solve(r2);
    const double ssr = std::max(0.0, total.sdy2 - th.dot(r2));
    profile.candidates.push_back(t_b);
    profile.ssr.push_back(ssr);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best = t_b;
    }
  }
  if (best < 0) throw DegenerateDesign("two_step: no candidate admissible");

  // No-break drift fit defines the Q_T profile through the SSR identity.
  {
    double mu0, al0;
    bool defv;
    fit_drift(total.n, total.sy, total.syy, total.sdy, total.sydy, &mu0, &al0,
              &defv);
    double ssr0 = total.sdy2 - 2.0 * mu0 * total.sdy - 2.0 * al0 * total.sydy +
                  mu0 * mu0 * total.n + 2.0 * mu0 * al0 * total.sy +
                  al0 * al0 * total.syy;
    if (m > 0) {
      VectorXd sur0 = total.sudy - mu0 * total.su - al0 * total.suy;
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(total.suu);
      VectorXd th0 = cod.solve(sur0);
      ssr0 -= th0.dot(sur0);
    }
    profile.q_stat.resize(profile.ssr.size());
    for (std::size_t i = 0; i < profile.ssr.size(); ++i) {
      profile.q_stat[i] = ssr0 - profile.ssr[i];
    }
  }

  // Final fit at the chosen date through the QR path: step 1 takes the
  // drift coefficients from the joint candidate regression, step 2 refits
  // the semimartingale block on the drift-removed residual.
  const int t_hat = best;
  MatrixXd W(n, d2);
  W.setZero();
  for (int t = 0; t < n; ++t) {
    if (t < t_hat) {
      W(t, 0) = 1.0;
      W(t, 1) = ylag(t);
    } else {
      W(t, 2) = 1.0;
      W(t, 3) = ylag(t);
    }
  }
  if (m > 0) {
    W.middleCols(4, m) = U.leftCols(m);
    if (mZ > 0) {
      W.bottomRightCorner(n - t_hat, mZ) = U.block(t_hat, mD, n - t_hat, mZ);
    }
  }
  OlsFit joint = ols_fit(W, dy);

  BreakEstimate est;
  est.t_hat = t_hat;
  est.lambda_hat = static_cast<double>(t_hat) / n;
  est.beta_hat = VectorXd::Zero(q + p);
  est.delta_hat = VectorXd::Zero(p);
  PredictableCoeffs pc;
  pc.mu1 = joint.coefficients(0);
  pc.alpha1 = joint.coefficients(1);
  pc.mu2 = joint.coefficients(2);
  pc.alpha2 = joint.coefficients(3);
  est.predictable_coeffs = pc;
  est.beta_hat(0) = pc.alpha1;  // lag column of D
  est.beta_hat(q) = pc.mu1;     // constant column of Z
  est.delta_hat(0) = pc.mu2 - pc.mu1;
  est.rank = joint.rank;
  est.rank_deficient = joint.rank < d2;

  VectorXd r = dy - W.leftCols(4) * joint.coefficients.head(4);
  if (m > 0) {
    OlsFit f2 = ols_fit(W.rightCols(m + mZ), r);
    est.residuals = f2.residuals;
    if (mD > 0) est.beta_hat.segment(1, mD) = f2.coefficients.head(mD);
    if (mZ > 0) {
      est.beta_hat.segment(q + 1, mZ) = f2.coefficients.segment(mD, mZ);
      est.delta_hat.tail(mZ) = f2.coefficients.tail(mZ);
    }
  } else {
    est.residuals = r;
  }
  est.profile = std::move(profile);
  return est;
}

}  // namespace breakdate
