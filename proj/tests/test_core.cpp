#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "breakdate/ols.hpp"
#include "breakdate/rng.hpp"

using namespace breakdate;

namespace {

// Normal-equations oracle: solve X'X b = X'y by explicit inversion. Kept
// independent of the library's QR/COD path on purpose.
VectorXd normal_equations_oracle(const MatrixXd& X, const VectorXd& y) {
  MatrixXd xtx = X.transpose() * X;
  return xtx.inverse() * (X.transpose() * y);
}

MatrixXd random_matrix(int n, int k, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  MatrixXd X(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) X(i, j) = rng.normal();
  return X;
}

}  // namespace

TEST_CASE("ols_fit: identity design reproduces y") {
  MatrixXd X = MatrixXd::Identity(3, 3);
  VectorXd y(3);
  y << 1, 2, 3;
  OlsFit fit = ols_fit(X, y);
  CHECK(fit.coefficients.isApprox(y, 1e-14));
  CHECK(fit.ssr == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(fit.rank == 3);
}

TEST_CASE("ols_fit: column of ones gives the sample mean") {
  MatrixXd X = MatrixXd::Ones(4, 1);
  VectorXd y(4);
  y << 1, 2, 3, 4;
  OlsFit fit = ols_fit(X, y);
  CHECK(fit.coefficients(0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(fit.ssr == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("ols_fit: matches the normal-equations oracle on a random design") {
  MatrixXd X = random_matrix(50, 3, 42);
  VectorXd b(3);
  b << 0.5, -1.0, 2.0;
  CounterRng rng(43, 0);
  VectorXd e(50);
  for (int i = 0; i < 50; ++i) e(i) = 0.1 * rng.normal();
  VectorXd y = X * b + e;
  OlsFit fit = ols_fit(X, y);
  VectorXd oracle = normal_equations_oracle(X, y);
  CHECK((fit.coefficients - oracle).norm() < 1e-8);
}

TEST_CASE("ols_fit: error contracts") {
  MatrixXd X = MatrixXd::Ones(2, 3);
  VectorXd y(2);
  y << 1, 2;
  CHECK_THROWS_AS(ols_fit(X, y), Underdetermined);

  MatrixXd Xn = MatrixXd::Ones(3, 1);
  VectorXd yn(3);
  yn << 1, std::nan(""), 2;
  CHECK_THROWS_AS(ols_fit(Xn, yn), InvalidData);
}

TEST_CASE("ols_fit: rank-deficient design returns min-norm solution") {
  MatrixXd X(4, 2);
  X.col(0) = VectorXd::Ones(4);
  X.col(1) = 2.0 * VectorXd::Ones(4);
  VectorXd y(4);
  y << 1, 2, 3, 4;
  OlsFit fit = ols_fit(X, y);
  CHECK(fit.rank == 1);
  // Min-norm solution of b0 + 2 b1 = 2.5.
  CHECK(fit.coefficients(0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.coefficients(1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ols_fit is deterministic") {
  MatrixXd X = random_matrix(30, 4, 7);
  VectorXd y = random_matrix(30, 1, 8).col(0);
  OlsFit a = ols_fit(X, y);
  OlsFit b = ols_fit(X, y);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.ssr == b.ssr);
}

TEST_CASE("build_design: Z2 zeroes the pre-break rows") {
  TimeSeriesDataset data;
  data.y = VectorXd::Zero(4);
  data.D.resize(4, 0);
  data.Z = MatrixXd::Ones(4, 1);
  MatrixXd X = build_design(data, 2);
  VectorXd z2_expected(4);
  z2_expected << 0, 0, 1, 1;
  CHECK(X.col(1) == z2_expected);
}

TEST_CASE("build_design: t_b = T gives all-zero Z2, flagged by ols_fit") {
  TimeSeriesDataset data;
  data.y = VectorXd::LinSpaced(6, 1.0, 6.0);
  data.D.resize(6, 0);
  data.Z = MatrixXd::Ones(6, 1);
  MatrixXd X = build_design(data, 6);
  CHECK(X.col(1).norm() == 0.0);
  OlsFit fit = ols_fit(X, data.y);
  CHECK(fit.rank == 1);
}

TEST_CASE("build_design: post-break rows copy Z exactly") {
  TimeSeriesDataset data;
  data.y = VectorXd::Zero(6);
  data.D.resize(6, 0);
  data.Z = random_matrix(6, 1, 11);
  MatrixXd X = build_design(data, 3);
  CHECK(X.col(1).tail(3) == data.Z.col(0).tail(3));
  CHECK(X.col(1).head(3).norm() == 0.0);
  CHECK_THROWS_AS(build_design(data, 7), OutOfRange);
}

TEST_CASE("build_design: [X|Z2] and [X|Z1] give identical SSR") {
  TimeSeriesDataset data;
  data.y = random_matrix(40, 1, 21).col(0);
  data.D = random_matrix(40, 1, 22);
  data.Z = random_matrix(40, 1, 23);
  for (int t_b : {6, 17, 33}) {
    MatrixXd X2 = build_design(data, t_b);
    MatrixXd X1 = X2;
    X1.col(2).setZero();
    X1.col(2).head(t_b) = data.Z.col(0).head(t_b);
    OlsFit f2 = ols_fit(X2, data.y);
    OlsFit f1 = ols_fit(X1, data.y);
    CHECK(f1.ssr == doctest::Approx(f2.ssr).epsilon(1e-10));
  }
}
