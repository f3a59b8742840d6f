#include <doctest.h>

#include <cmath>

#include "breakdate/breakscan.hpp"
#include "breakdate/dgp.hpp"
#include "breakdate/ols.hpp"
#include "breakdate/rng.hpp"

using namespace breakdate;

namespace {

TimeSeriesDataset mean_shift(int n, int tb, double delta, double noise_sd,
                             std::uint64_t seed) {
  TimeSeriesDataset data;
  data.y.resize(n);
  data.D.resize(n, 0);
  data.Z = MatrixXd::Ones(n, 1);
  CounterRng rng(seed, 0);
  for (int t = 0; t < n; ++t) {
    data.y(t) = (t >= tb ? delta : 0.0) + noise_sd * rng.normal();
  }
  return data;
}

}  // namespace

TEST_CASE("scan_break: noiseless mean shift recovers the break exactly") {
  TimeSeriesDataset data = mean_shift(100, 50, 1.0, 0.0, 1);
  ModelSpec spec;
  BreakEstimate est = scan_break(data, spec);
  CHECK(est.t_hat == 50);
  CHECK(est.delta_hat(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.ssr() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scan_break: fast scan equals the brute-force oracle on M1 data") {
  DgpSpec dspec;
  dspec.model = DgpModel::M1;
  dspec.T = 100;
  dspec.lambda0 = 0.5;
  dspec.delta0 = 1.0;
  dspec.seed = 99;
  TimeSeriesDataset data = generate(dspec).data;
  ModelSpec spec;
  BreakEstimate fast = scan_break(data, spec, ScanMethod::fast);
  BreakEstimate brute = scan_break(data, spec, ScanMethod::brute_force);
  CHECK(fast.t_hat == brute.t_hat);
  REQUIRE(fast.profile.ssr.size() == brute.profile.ssr.size());
  for (std::size_t i = 0; i < fast.profile.ssr.size(); ++i) {
    CHECK(fast.profile.ssr[i] ==
          doctest::Approx(brute.profile.ssr[i]).epsilon(1e-8));
  }
}

TEST_CASE("scan_break: constant y returns a smallest-index tie with tiny delta") {
  TimeSeriesDataset data = mean_shift(60, 30, 0.0, 0.0, 1);
  data.y.setConstant(3.0);
  ModelSpec spec;
  BreakEstimate est = scan_break(data, spec);
  auto [lo, hi] = trimmed_range(data, spec);
  CHECK(est.t_hat == lo);
  CHECK(std::abs(est.delta_hat(0)) < 1e-10);
}

TEST_CASE("scan_break: argmin SSR equals argmax Q_T index-for-index") {
  DgpSpec dspec;
  dspec.model = DgpModel::M4;
  dspec.T = 120;
  dspec.delta0 = 0.8;
  dspec.seed = 5;
  TimeSeriesDataset data = generate(dspec).data;
  ModelSpec spec;
  BreakEstimate est = scan_break(data, spec);
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 0; i < est.profile.ssr.size(); ++i) {
    if (est.profile.ssr[i] < est.profile.ssr[imin]) imin = i;
    if (est.profile.q_stat[i] > est.profile.q_stat[imax]) imax = i;
  }
  CHECK(imin == imax);
  CHECK(est.profile.candidates[imin] == est.t_hat);
}

TEST_CASE("scan_break: scale equivariance and shift invariance") {
  DgpSpec dspec;
  dspec.model = DgpModel::M1;
  dspec.T = 100;
  dspec.delta0 = 0.7;
  dspec.seed = 31;
  TimeSeriesDataset data = generate(dspec).data;
  ModelSpec spec;
  BreakEstimate base = scan_break(data, spec);

  TimeSeriesDataset scaled = data;
  scaled.y *= 3.0;
  BreakEstimate s = scan_break(scaled, spec);
  CHECK(s.t_hat == base.t_hat);
  CHECK((s.beta_hat - 3.0 * base.beta_hat).norm() < 1e-9);
  CHECK((s.delta_hat - 3.0 * base.delta_hat).norm() < 1e-9);
  CHECK((s.residuals - 3.0 * base.residuals).norm() < 1e-8);

  TimeSeriesDataset shifted = data;  // Z is the constant column here
  shifted.y.array() += 5.0;
  BreakEstimate sh = scan_break(shifted, spec);
  CHECK(sh.t_hat == base.t_hat);
  CHECK((sh.delta_hat - base.delta_hat).norm() < 1e-9);
}

TEST_CASE("scan_break: reversal symmetry for the pure mean-shift model") {
  DgpSpec dspec;
  dspec.model = DgpModel::M1;
  dspec.T = 100;
  dspec.delta0 = 1.2;
  dspec.lambda0 = 0.4;
  dspec.seed = 77;
  TimeSeriesDataset data = generate(dspec).data;
  ModelSpec spec;
  BreakEstimate fwd = scan_break(data, spec);

  TimeSeriesDataset rev = data;
  rev.y = data.y.reverse();
  BreakEstimate bwd = scan_break(rev, spec);
  CHECK(std::abs(bwd.t_hat - (data.T() - fwd.t_hat)) <= 1);
}

TEST_CASE("estimate_given_break: consistency with the scan and error path") {
  DgpSpec dspec;
  dspec.model = DgpModel::M1;
  dspec.T = 100;
  dspec.delta0 = 1.0;
  dspec.seed = 13;
  TimeSeriesDataset data = generate(dspec).data;
  ModelSpec spec;
  BreakEstimate scanned = scan_break(data, spec);
  BreakEstimate fixed = estimate_given_break(data, spec, scanned.t_hat);
  CHECK((scanned.beta_hat - fixed.beta_hat).norm() < 1e-12);
  CHECK((scanned.delta_hat - fixed.delta_hat).norm() < 1e-12);
  CHECK_THROWS_AS(estimate_given_break(data, spec, 2), OutOfRange);
}

TEST_CASE("estimate_given_break: mean-shift delta equals the segment-mean gap") {
  TimeSeriesDataset data = mean_shift(80, 40, 0.9, 0.3, 8);
  ModelSpec spec;
  BreakEstimate est = estimate_given_break(data, spec, 40);
  const double m1 = data.y.head(40).mean();
  const double m2 = data.y.tail(40).mean();
  CHECK(est.delta_hat(0) == doctest::Approx(m2 - m1).epsilon(1e-12));
  CHECK(est.beta_hat(0) == doctest::Approx(m1).epsilon(1e-12));
}

TEST_CASE("estimate_given_break: collinear Z2 at the edge is min-norm fitted") {
  // Two identical Z columns make every candidate rank-deficient in the
  // Z2 block; the fit must still return with the rank flag set.
  TimeSeriesDataset data;
  const int n = 40;
  data.y.resize(n);
  data.D.resize(n, 0);
  data.Z.resize(n, 2);
  CounterRng rng(3, 0);
  for (int t = 0; t < n; ++t) {
    data.Z(t, 0) = 1.0;
    data.Z(t, 1) = 1.0;
    data.y(t) = (t >= 20 ? 1.0 : 0.0) + 0.2 * rng.normal();
  }
  ModelSpec spec;
  BreakEstimate est = estimate_given_break(data, spec, 6);
  CHECK(est.rank_deficient);
  CHECK(est.residuals.allFinite());
}

TEST_CASE("two_step_predictable: reduces to the one-shot scan, drift absent") {
  // Generated with mu_1 = mu_2 = 0, alpha_1 = alpha_2 = 0. The equivalent
  // one-shot design regresses dy on the fully-broken [1, ylag, z] block;
  // the two-step estimates must match it by Frisch-Waugh.
  const int n = 1000;
  TimeSeriesDataset data;
  data.y.resize(n);
  data.D.resize(n, 1);
  data.Z.resize(n, 2);
  CounterRng rng(17, 0);
  double y = 0.0;
  const int tb = n / 2;
  for (int t = 0; t < n; ++t) {
    data.D(t, 0) = y;  // lagged level
    data.Z(t, 0) = 1.0;
    const double z = rng.normal();
    data.Z(t, 1) = z;
    const double dy = z * (1.0 + (t >= tb ? 0.5 : 0.0)) + 0.1 * rng.normal();
    y += dy;
    data.y(t) = y;
  }
  ModelSpec pspec;
  pspec.has_predictable = true;
  BreakEstimate two = two_step_predictable(data, pspec);

  TimeSeriesDataset flat;
  flat.y = data.y - data.D.col(0);  // dy
  flat.D.resize(n, 0);
  flat.Z.resize(n, 3);
  flat.Z.col(0).setOnes();
  flat.Z.col(1) = data.D.col(0);
  flat.Z.col(2) = data.Z.col(1);
  ModelSpec fspec;
  BreakEstimate ref = scan_break(flat, fspec);
  CHECK(two.t_hat == ref.t_hat);
  CHECK(std::abs(two.predictable_coeffs->mu1 - ref.beta_hat(0)) < 1e-6);
  CHECK(std::abs(two.predictable_coeffs->alpha1 - ref.beta_hat(1)) < 1e-6);
  CHECK(std::abs(two.delta_hat(0) - ref.delta_hat(0)) < 1e-6);
  CHECK(std::abs(two.delta_hat(1) - ref.delta_hat(2)) < 1e-6);
  CHECK(std::abs(two.beta_hat(2) - ref.beta_hat(2)) < 1e-6);
}

TEST_CASE("two_step_predictable: recovers the break on M7-style data") {
  DgpSpec dspec;
  dspec.model = DgpModel::M7;
  dspec.T = 100;
  dspec.lambda0 = 0.5;
  dspec.delta0 = 2.0;
  dspec.beta0 = 0.0;
  dspec.seed = 4242;
  GeneratedSample s = generate(dspec);

  // Noiseless analogue as the oracle for this seed.
  DgpSpec clean = dspec;
  clean.extra["sigma_e2"] = 1e-12;
  GeneratedSample s0 = generate(clean);
  ModelSpec spec;
  spec.has_predictable = true;
  BreakEstimate est0 = two_step_predictable(s0.data, spec);
  REQUIRE(est0.t_hat == 50);

  BreakEstimate est = two_step_predictable(s.data, spec);
  CHECK(std::abs(est.t_hat - 50) <= 2);
  CHECK(est.predictable_coeffs.has_value());
}

TEST_CASE("two_step_predictable: step-1 alpha matches a two-variable oracle") {
  // Exact AR(1)-with-drift path; the step-1 slope on the pre-break block
  // must equal the closed-form OLS slope of dy on (1, y_{t-1}).
  const int n = 200;
  TimeSeriesDataset data;
  data.y.resize(n);
  data.D.resize(n, 1);
  data.Z = MatrixXd::Ones(n, 1);
  CounterRng rng(55, 0);
  double y = 0.3;
  for (int t = 0; t < n; ++t) {
    data.D(t, 0) = y;
    y = 0.2 + 0.9 * y + 0.5 * rng.normal();
    data.y(t) = y;
  }
  ModelSpec spec;
  spec.has_predictable = true;
  BreakEstimate est = two_step_predictable(data, spec);

  const int tb = est.t_hat;
  VectorXd dy = data.y - data.D.col(0);
  double sy = 0, syy = 0, sdy = 0, sydy = 0;
  for (int t = 0; t < tb; ++t) {
    sy += data.D(t, 0);
    syy += data.D(t, 0) * data.D(t, 0);
    sdy += dy(t);
    sydy += data.D(t, 0) * dy(t);
  }
  const double det = tb * syy - sy * sy;
  const double alpha_oracle = (tb * sydy - sy * sdy) / det;
  CHECK(est.predictable_coeffs->alpha1 ==
        doctest::Approx(alpha_oracle).epsilon(1e-8));
}

TEST_CASE("two_step_predictable: rejects malformed column conventions") {
  TimeSeriesDataset data;
  const int n = 50;
  data.y = VectorXd::LinSpaced(n, 0.0, 1.0);
  data.D = MatrixXd::Zero(n, 1);
  data.Z = MatrixXd::Ones(n, 1);
  ModelSpec spec;
  spec.has_predictable = true;
  CHECK_THROWS_AS(two_step_predictable(data, spec), InvalidSpec);
}
