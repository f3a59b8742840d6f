#include "breakdate/limitsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include "breakdate/rng.hpp"

namespace breakdate {

namespace {

void run_partitioned(int n, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<double> simulate_vlaw_draws(double domain_lo, double domain_hi,
                                        double xi1, double xi2,
                                        const LimitSimConfig& cfg) {
  if (!(domain_hi > domain_lo)) {
    throw DegenerateDomain("simulate_vlaw: empty domain");
  }
  if (!(domain_lo < 0.0 && domain_hi > 0.0)) {
    throw DegenerateDomain("simulate_vlaw: domain must straddle the origin");
  }
  if (cfg.n_draws < 1 || cfg.n_grid < 2) {
    throw InvalidSpec("simulate_vlaw: n_draws/n_grid too small");
  }
  const double width = domain_hi - domain_lo;
  const double left_len = -domain_lo;
  const double right_len = domain_hi;
  // Grid points split across sides in proportion to side length; V(0) = 0
  // is always representable when the domain straddles the origin.
  int n_left = static_cast<int>(std::lround(cfg.n_grid * left_len / width));
  n_left = std::clamp(n_left, 1, cfg.n_grid - 1);
  const int n_right = cfg.n_grid - n_left;
  const double dl = left_len / n_left;
  const double dr = right_len / n_right;
  const double sd_l = std::sqrt(dl);
  const double sd_r = std::sqrt(xi2 * dr);

  std::vector<double> draws(cfg.n_draws);
  run_partitioned(cfg.n_draws, cfg.workers, [&](int i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    double best = 0.0;  // V(0) = 0; strict comparisons break ties toward 0
    double arg = 0.0;
    double level = 0.0;
    for (int j = 1; j <= n_left; ++j) {
      level += -0.5 * dl + sd_l * rng.normal();
      if (level > best) {
        best = level;
        arg = -j * dl;
      }
    }
    level = 0.0;
    for (int j = 1; j <= n_right; ++j) {
      level += -0.5 * xi1 * dr + sd_r * rng.normal();
      if (level > best) {
        best = level;
        arg = j * dr;
      }
    }
    draws[i] = std::clamp(arg, domain_lo, domain_hi);
  });
  return draws;
}

namespace {

// Per-draw multipliers propagating first-stage sampling noise: one
// Gaussian perturbation of delta_hat scales the drift (r_a) and diffusion
// (r_b) quadratic forms, and inverse-chi-square draws perturb the
// per-regime residual variances (v1, v2). All ones when smoothing is off
// or the covariance is zero.
struct ScaleDraw {
  double r_a = 1.0;
  double r_b_left = 1.0;
  double r_b_right = 1.0;
};

double chi2_ratio(CounterRng& rng, int nu) {
  double s = 0.0;
  for (int i = 0; i < nu; ++i) {
    const double g = rng.normal();
    s += g * g;
  }
  return s / nu;
}

ScaleDraw draw_plugin_scales(const PluginParams& p, bool enabled,
                             CounterRng& rng) {
  ScaleDraw out;
  if (!enabled || p.delta.size() == 0 || p.delta_cov_sqrt.size() == 0 ||
      p.delta_cov_sqrt.isZero(0.0)) {
    return out;
  }
  VectorXd eta(p.delta.size());
  for (int i = 0; i < eta.size(); ++i) eta(i) = rng.normal();
  VectorXd dstar = p.delta + p.delta_cov_sqrt * eta;
  const double qm = p.delta.dot(p.m1 * p.delta);
  const double qw = p.delta.dot(p.w1 * p.delta);
  double r_b = 1.0;
  if (qm > 0.0) out.r_a = std::max(dstar.dot(p.m1 * dstar) / qm, 1e-12);
  if (qw > 0.0) r_b = std::max(dstar.dot(p.w1 * dstar) / qw, 1e-12);
  const double v1 = p.nu1 > 0 ? chi2_ratio(rng, p.nu1) : 1.0;
  const double v2 = p.nu2 > 0 ? chi2_ratio(rng, p.nu2) : 1.0;
  out.r_b_left = r_b / v1;
  out.r_b_right = r_b / v2;
  return out;
}

}  // namespace

LimitDraws simulate_stationary(const PluginParams& params,
                               const LimitSimConfig& cfg) {
  if (params.sample_size <= 0) {
    throw InvalidSpec("simulate_stationary: params.sample_size unset");
  }
  const double scale = params.rho * params.sample_size;
  const double lo = scale * (cfg.pi - params.lambda_hat);
  const double hi = scale * (1.0 - cfg.pi - params.lambda_hat);
  if (!(hi > lo)) throw DegenerateDomain("simulate_stationary: domain");
  if (!(lo < 0.0 && hi > 0.0)) {
    throw DegenerateDomain("simulate_stationary: domain must straddle 0");
  }
  if (cfg.n_draws < 1 || cfg.n_grid < 2) {
    throw InvalidSpec("simulate_stationary: n_draws/n_grid too small");
  }

  const double width = hi - lo;
  int n_left = static_cast<int>(std::lround(cfg.n_grid * (-lo) / width));
  n_left = std::clamp(n_left, 1, cfg.n_grid - 1);
  const int n_right = cfg.n_grid - n_left;
  const double dl = -lo / n_left;
  const double dr = hi / n_right;

  LimitDraws out;
  out.draws.resize(cfg.n_draws);
  out.domain_lo = lo;
  out.domain_hi = hi;
  out.per_date_scale = params.rho;
  out.mode = LimitMode::stationary;

  run_partitioned(cfg.n_draws, cfg.workers, [&](int i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    ScaleDraw sc = draw_plugin_scales(params, cfg.plugin_smoothing, rng);
    const double sd_l = std::sqrt(sc.r_b_left * dl);
    const double sd_r = std::sqrt(params.xi2 * sc.r_b_right * dr);
    double best = 0.0;
    double arg = 0.0;
    double level = 0.0;
    for (int j = 1; j <= n_left; ++j) {
      level += -0.5 * sc.r_a * dl + sd_l * rng.normal();
      if (level > best) {
        best = level;
        arg = -j * dl;
      }
    }
    level = 0.0;
    for (int j = 1; j <= n_right; ++j) {
      level += -0.5 * params.xi1 * sc.r_a * dr + sd_r * rng.normal();
      if (level > best) {
        best = level;
        arg = j * dr;
      }
    }
    out.draws[i] = std::clamp(arg, lo, hi);
  });
  return out;
}

LimitDraws simulate_general(const TimeSeriesDataset& data,
                            const BreakEstimate& est,
                            const PluginParams& params,
                            const LimitSimConfig& cfg) {
  const int n = data.T();
  const int tb = est.t_hat;
  const VectorXd& d = est.delta_hat;

  const int lo_date = std::max(
      1, static_cast<int>(std::ceil(cfg.pi * n)));
  const int hi_date = std::min(
      n - 1, static_cast<int>(std::floor((1.0 - cfg.pi) * n)));
  if (lo_date >= hi_date || tb <= lo_date || tb >= hi_date) {
    throw DegenerateDomain("simulate_general: trimmed window");
  }

  // Per-date drift and noise-variance steps, regime-1 normalized so the
  // time-constant case matches the stationary law on the rho axis.
  double a1 = 0.0, b1 = 0.0;
  std::vector<double> dz(n), de(n);
  for (int k = 0; k < n; ++k) {
    const auto z = data.Z.row(k).transpose();
    const double zz = d.dot(z) * d.dot(z);
    dz[k] = zz;
    de[k] = zz * est.residuals(k) * est.residuals(k);
    if (k < tb) {
      a1 += zz;
      b1 += de[k];
    }
  }
  a1 /= tb;
  b1 /= tb;
  if (a1 <= 0.0) throw WeakIdentification("simulate_general: flat drift");
  if (b1 <= 0.0) {
    // Noiseless input: the drift dominates and every draw sits at 0.
    LimitDraws out;
    out.draws.assign(cfg.n_draws, 0.0);
    out.per_date_scale = params.rho;
    out.domain_lo = params.rho * (lo_date - tb);
    out.domain_hi = params.rho * (hi_date - tb);
    out.mode = LimitMode::general;
    return out;
  }
  const double drift_scale = params.rho / (2.0 * a1);
  const double var_scale = params.rho / b1;

  const int n_left = tb - lo_date;
  const int n_right = hi_date - tb;
  std::vector<double> drift_l(n_left), sd_l(n_left);
  std::vector<double> drift_r(n_right), sd_r(n_right);
  for (int j = 0; j < n_left; ++j) {
    const int k = tb - 1 - j;  // walking left from the break
    drift_l[j] = drift_scale * dz[k];
    sd_l[j] = std::sqrt(var_scale * de[k]);
  }
  for (int j = 0; j < n_right; ++j) {
    const int k = tb + j;
    drift_r[j] = drift_scale * dz[k];
    sd_r[j] = std::sqrt(var_scale * de[k]);
  }

  LimitDraws out;
  out.draws.resize(cfg.n_draws);
  out.per_date_scale = params.rho;
  out.domain_lo = params.rho * (lo_date - tb);
  out.domain_hi = params.rho * (hi_date - tb);
  out.mode = LimitMode::general;

  run_partitioned(cfg.n_draws, cfg.workers, [&](int i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    ScaleDraw sc = draw_plugin_scales(params, cfg.plugin_smoothing, rng);
    const double sb_l = std::sqrt(sc.r_b_left);
    const double sb_r = std::sqrt(sc.r_b_right);
    double best = 0.0;
    double arg = 0.0;
    double level = 0.0;
    for (int j = 0; j < n_left; ++j) {
      level += -sc.r_a * drift_l[j] + sb_l * sd_l[j] * rng.normal();
      if (level > best) {
        best = level;
        arg = params.rho * (-(j + 1));
      }
    }
    level = 0.0;
    for (int j = 0; j < n_right; ++j) {
      level += -sc.r_a * drift_r[j] + sb_r * sd_r[j] * rng.normal();
      if (level > best) {
        best = level;
        arg = params.rho * (j + 1);
      }
    }
    out.draws[i] = arg;
  });
  return out;
}

void export_draws_csv(const LimitDraws& draws, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidData("export_draws_csv: cannot open " + path);
  f << "draw\n";
  f.precision(17);
  for (double v : draws.draws) f << v << "\n";
}

}  // namespace breakdate
