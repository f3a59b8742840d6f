#include "breakdate/argmax_law.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "breakdate/rng.hpp"
#include "breakdate/types.hpp"

namespace breakdate {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// exp(x) * Phi(-a), stable for large x where Phi(-a) underflows.
double exp_x_phi_neg(double x, double a) {
  const double lp = std::log(0.5) + std::log(std::erfc(a / std::sqrt(2.0)));
  return std::exp(x + lp);
}

}  // namespace

double argmax_cdf(double x) {
  if (x == 0.0) return 0.5;
  const double ax = std::abs(x);
  const double sax = std::sqrt(ax);
  double g = 1.0 + std::sqrt(ax / (2.0 * 3.14159265358979323846)) *
                       std::exp(-ax / 8.0) +
             1.5 * exp_x_phi_neg(ax, 1.5 * sax) -
             0.5 * (ax + 5.0) * norm_cdf(-0.5 * sax);
  g = std::clamp(g, 0.5, 1.0);
  return x > 0.0 ? g : 1.0 - g;
}

double argmax_density(double x) {
  // The exp(-x/8) terms of dG/dx cancel identically, leaving the familiar
  // closed form (Yao 1987).
  const double ax = std::abs(x);
  const double sax = std::sqrt(ax);
  return 1.5 * exp_x_phi_neg(ax, 1.5 * sax) - 0.5 * norm_cdf(-0.5 * sax);
}

double argmax_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw Unsupported("argmax_quantile: prob in (0,1)");
  }
  double lo = -500.0, hi = 500.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (argmax_cdf(mid) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {
#include "generated_constants.inc"
}  // namespace

double argmax_quantile_cached(double prob) {
  for (const auto& row : kArgmaxQuantiles) {
    if (std::abs(row.prob - prob) < 1e-9) return row.value;
  }
  return argmax_quantile(prob);
}

double simulate_argmax_quantile(double prob, double half_domain, int n_paths,
                                int n_grid, std::uint64_t seed) {
  std::vector<double> draws(n_paths);
  const double step = half_domain / n_grid;
  const double sd = std::sqrt(step);
  for (int i = 0; i < n_paths; ++i) {
    CounterRng rng(seed, i);
    double best = 0.0, arg = 0.0;
    for (int side = 0; side < 2; ++side) {
      double level = 0.0;
      for (int j = 1; j <= n_grid; ++j) {
        level += -0.5 * step + sd * rng.normal();
        if (level > best) {
          best = level;
          arg = (side == 0 ? -1.0 : 1.0) * j * step;
        }
      }
    }
    draws[i] = arg;
  }
  std::sort(draws.begin(), draws.end());
  const std::size_t idx = std::min(
      draws.size() - 1,
      static_cast<std::size_t>(std::floor(prob * draws.size())));
  return draws[idx];
}

double simulate_sup_wald_cv(double level, double trim, int p, int n_paths,
                            int n_grid, std::uint64_t seed) {
  if (!(trim > 0.0 && trim < 0.5)) {
    throw Unsupported("sup_wald_cv: trim must lie in (0, 1/2)");
  }
  const int lo = std::max(1, static_cast<int>(std::ceil(trim * n_grid)));
  const int hi =
      std::min(n_grid - 1, static_cast<int>(std::floor((1.0 - trim) * n_grid)));
  std::vector<double> sups(n_paths);
  const double step = 1.0 / n_grid;
  const double sd = std::sqrt(step);
  std::vector<double> w(p);
  std::vector<double> path(static_cast<std::size_t>(n_grid) * p);
  for (int i = 0; i < n_paths; ++i) {
    CounterRng rng(seed, i);
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < n_grid; ++j) {
      for (int c = 0; c < p; ++c) {
        w[c] += sd * rng.normal();
        path[static_cast<std::size_t>(j) * p + c] = w[c];
      }
    }
    double sup = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double u = j * step;
      double q = 0.0;
      for (int c = 0; c < p; ++c) {
        const double bb = path[static_cast<std::size_t>(j - 1) * p + c] -
                          u * w[c];
        q += bb * bb;
      }
      q /= u * (1.0 - u);
      if (q > sup) sup = q;
    }
    sups[i] = sup;
  }
  std::sort(sups.begin(), sups.end());
  const std::size_t idx = std::min(
      sups.size() - 1,
      static_cast<std::size_t>(std::floor((1.0 - level) * sups.size())));
  return sups[idx];
}

double sup_wald_critical_value(double level, double trim, int p) {
  const bool level_ok = std::abs(level - 0.10) < 1e-9 ||
                        std::abs(level - 0.05) < 1e-9 ||
                        std::abs(level - 0.01) < 1e-9;
  if (!level_ok) throw Unsupported("sup_wald_critical_value: level");
  if (!(trim > 0.0 && trim < 0.5)) {
    throw Unsupported("sup_wald_critical_value: trim");
  }
  for (const auto& row : kSupWaldCv) {
    if (std::abs(row.level - level) < 1e-9 && std::abs(row.trim - trim) < 1e-9 &&
        row.p == p) {
      return row.value;
    }
  }
  return simulate_sup_wald_cv(level, trim, p, 200000, 2048, 0x5157A1Du);
}

}  // namespace breakdate
