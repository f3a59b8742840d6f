#pragma once

#include "breakdate/types.hpp"

namespace breakdate {

struct SsrProfile {
  std::vector<int> candidates;
  std::vector<double> ssr;     // S_T(T_b)
  std::vector<double> q_stat;  // Q_T(T_b) = delta' (Z2' M Z2) delta
};

struct PredictableCoeffs {
  double mu1 = 0.0, alpha1 = 0.0;  // pre-break drift: dy = mu + alpha*y_{t-1}
  double mu2 = 0.0, alpha2 = 0.0;
};

struct BreakEstimate {
  int t_hat = 0;            // pre-break sample size T_hat_b
  double lambda_hat = 0.0;  // t_hat / T
  VectorXd beta_hat;        // stable + regime-1 coefficients, length q+p
  VectorXd delta_hat;       // post-break shift on the Z block, length p
  VectorXd residuals;
  SsrProfile profile;
  int rank = 0;
  bool rank_deficient = false;
  std::optional<PredictableCoeffs> predictable_coeffs;

  double ssr() const;
};

enum class ScanMethod {
  fast,        // O(T d^2) incremental cross-product scan
  brute_force  // fresh OLS refit at every candidate (test oracle)
};

// Candidate range [max(p+q, ceil(T*trim)), floor(T*(1-trim))].
std::pair<int, int> trimmed_range(const TimeSeriesDataset& data,
                                  const ModelSpec& spec);

BreakEstimate scan_break(const TimeSeriesDataset& data, const ModelSpec& spec,
                         ScanMethod method = ScanMethod::fast);

BreakEstimate estimate_given_break(const TimeSeriesDataset& data,
                                   const ModelSpec& spec, int t_b);

// Two-step estimator for models with a constant and lagged dependent
// variable: step 1 fits the per-regime drift (mu_i, alpha_i) of
// dy_t = mu + alpha * y_{t-1}, step 2 regresses the drift-removed residual
// on the remaining regressors with the Z block broken at the candidate.
// Requires Z column 0 == 1 and D column 0 == y_{t-1} (D(0,0) is y_0).
BreakEstimate two_step_predictable(const TimeSeriesDataset& data,
                                   const ModelSpec& spec);

}  // namespace breakdate
