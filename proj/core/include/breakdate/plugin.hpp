#pragma once

#include "breakdate/breakscan.hpp"
#include "breakdate/types.hpp"

namespace breakdate {

// Feasible quantities parameterizing the limit distribution. All four are
// invariant to positive rescaling of y. rho carries the per-date scale of
// the simulated law; see limitsim.
struct PluginParams {
  double xi1 = 1.0;
  double xi2 = 1.0;
  double rho = 1.0;
  double vartheta = 1.0;
  double sigma_bar_sq = 1.0;  // full-sample mean squared residual
  double lambda_hat = 0.5;
  int t_hat = 0;
  int sample_size = 0;

  // Inputs for propagating first-stage noise into the simulated law
  // (limitsim): delta_cov_sqrt is a square root of the OLS covariance of
  // delta_hat, m1/w1 the regime-1 moment matrices behind rho, and nu1/nu2
  // the per-regime residual degrees of freedom behind the variance
  // quadratic forms. Zero delta_cov_sqrt (e.g. noiseless data) disables
  // the smoothing.
  VectorXd delta;
  MatrixXd delta_cov_sqrt;
  MatrixXd m1;
  MatrixXd w1;
  int nu1 = 0;
  int nu2 = 0;
};

PluginParams compute_plugins(const TimeSeriesDataset& data,
                             const BreakEstimate& est);

struct LrvResult {
  double value = 0.0;
  double ar_coeff = 0.0;
  bool clamped = false;
};

// Andrews-Monahan: AR(1) prewhitening, QS kernel with the AR(1) plug-in
// automatic bandwidth 1.3221*(alpha2*n)^(1/5), recoloring by (1-phi)^-2.
LrvResult lrv_qs_prewhitened(const Eigen::Ref<const VectorXd>& series);

// QS-kernel long-run variance without prewhitening. bandwidth <= 0 keeps
// zero lags, i.e. returns the plain variance.
double lrv_qs(const Eigen::Ref<const VectorXd>& series, double bandwidth);

}  // namespace breakdate
