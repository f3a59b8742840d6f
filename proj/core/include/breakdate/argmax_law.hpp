#pragma once

#include <cstdint>

namespace breakdate {

// Law of argmax_{s in R} { W(s) - |s|/2 } with W a two-sided standard
// Wiener process (Yao 1987; Bai 1997 appendix). Symmetric about 0.
double argmax_cdf(double x);
double argmax_density(double x);
double argmax_quantile(double prob);

// Cached quantiles at the conventional levels, produced by the checked-in
// simulation oracle (tools/gen_constants) and cross-checked against the
// closed-form CDF in the test suite. prob in {0.95, 0.975, 0.995}.
double argmax_quantile_cached(double prob);

// 1-alpha quantile of sup over [trim, 1-trim] of
// BB(u)'BB(u)/(u(1-u)), BB a p-dimensional Brownian bridge. Values at the
// cached grid (level in {0.10,0.05,0.01}, trim in {0.05,0.10,0.15}, p<=3)
// come from the generated table; other trims are simulated on demand with
// a fixed internal seed.
double sup_wald_critical_value(double level, double trim, int p);

// Simulation oracle behind the cached tables.
double simulate_sup_wald_cv(double level, double trim, int p,
                            int n_paths, int n_grid, std::uint64_t seed);
double simulate_argmax_quantile(double prob, double half_domain,
                                int n_paths, int n_grid, std::uint64_t seed);

}  // namespace breakdate
