#include "breakdate/ols.hpp"

namespace breakdate {

void TimeSeriesDataset::validate() const {
  const int n = T();
  if (n < 2) throw InvalidData("dataset: T < 2");
  if (p() < 1) throw InvalidData("dataset: needs at least one Z column");
  if (D.rows() != 0 && D.rows() != n) {
    throw InvalidData("dataset: D row count differs from y");
  }
  if (Z.rows() != n) throw InvalidData("dataset: Z row count differs from y");
  if (n < 2 * (p() + q()) + 2) {
    throw InvalidData("dataset: T too small for two estimable regimes");
  }
  if (!(span > 0.0)) throw InvalidData("dataset: span must be positive");
  require_finite(y, "y");
  if (q() > 0) require_finite(D, "D");
  require_finite(Z, "Z");
}

void ModelSpec::validate() const {
  if (!(trimming_estimation > 0.0 && trimming_estimation < 0.5)) {
    throw InvalidSpec("trimming_estimation must lie in (0, 1/2)");
  }
  if (!(trimming_limit > 0.0 && trimming_limit < 0.5)) {
    throw InvalidSpec("trimming_limit must lie in (0, 1/2)");
  }
  if (!(span > 0.0)) throw InvalidSpec("span must be positive");
}

OlsFit ols_fit(const Eigen::Ref<const MatrixXd>& X,
               const Eigen::Ref<const VectorXd>& y) {
  require_finite(X, "X");
  require_finite(y, "y");
  if (X.rows() != y.size()) throw InvalidData("ols_fit: row mismatch");
  if (X.rows() < X.cols()) throw Underdetermined("ols_fit: n < k");

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(X);
  OlsFit fit;
  fit.coefficients = cod.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.ssr = fit.residuals.squaredNorm();
  fit.rank = static_cast<int>(cod.rank());
  return fit;
}

MatrixXd build_design(const TimeSeriesDataset& data, int t_b) {
  data.validate();
  const int n = data.T(), q = data.q(), p = data.p();
  if (t_b < 0 || t_b > n) throw OutOfRange("build_design: t_b outside [0, T]");

  MatrixXd X(n, q + 2 * p);
  if (q > 0) X.leftCols(q) = data.D;
  X.middleCols(q, p) = data.Z;
  X.rightCols(p).setZero();
  if (t_b < n) {
    X.bottomRightCorner(n - t_b, p) = data.Z.bottomRows(n - t_b);
  }
  return X;
}

}  // namespace breakdate
