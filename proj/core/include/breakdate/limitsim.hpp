#pragma once

#include <cstdint>
#include <string>

#include "breakdate/breakscan.hpp"
#include "breakdate/plugin.hpp"
#include "breakdate/types.hpp"

namespace breakdate {

struct LimitSimConfig {
  int n_draws = 10000;
  int n_grid = 2000;   // grid points per path
  double pi = 0.05;    // limit-law domain trimming
  double span = 1.0;
  std::uint64_t seed = 1;
  int workers = 1;
  // Propagate the OLS noise of delta_hat into the simulated law (each draw
  // perturbs the drift/diffusion scale through delta_cov_sqrt). Off gives
  // the plain plug-in law of Proposition-5.1 form.
  bool plugin_smoothing = true;
};

enum class LimitMode { stationary, general };

// Draws of the limit statistic on the rho-scaled date axis: the estimated
// break date sits at 0 and date T_b at rho * (T_b - t_hat), so one linear
// map handles date decoding for every downstream consumer.
struct LimitDraws {
  std::vector<double> draws;
  double domain_lo = 0.0;
  double domain_hi = 0.0;
  double per_date_scale = 1.0;  // rho-hat: axis units per observation index
  LimitMode mode = LimitMode::stationary;
};

// Path simulator for the two-sided drifted process
//   V(s) = -|s|/2 + W1(-s)              s < 0,
//   V(s) = -xi1 |s|/2 + sqrt(xi2) W2(s) s >= 0,
// returning grid-argmax draws on [domain_lo, domain_hi]. Ties resolve
// toward 0 and V(0)=0 is always a grid point.
std::vector<double> simulate_vlaw_draws(double domain_lo, double domain_hi,
                                        double xi1, double xi2,
                                        const LimitSimConfig& cfg);

// Feasible stationary-regimes law anchored at the estimate: domain
// [rho*T*(pi - lambda), rho*T*(1-pi - lambda)].
LimitDraws simulate_stationary(const PluginParams& params,
                               const LimitSimConfig& cfg);

// Feasible general law: drift from one-sided cumulative sums of
// delta' z z' delta anchored at t_hat, Gaussian part with per-step variance
// delta' (e^2 z z') delta, normalized by the regime-1 moments so the
// homoskedastic case reduces to the stationary law on the same axis.
LimitDraws simulate_general(const TimeSeriesDataset& data,
                            const BreakEstimate& est,
                            const PluginParams& params,
                            const LimitSimConfig& cfg);

// Single-column CSV export of the raw draws.
void export_draws_csv(const LimitDraws& draws, const std::string& path);

}  // namespace breakdate
