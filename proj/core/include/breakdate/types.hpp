#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace breakdate {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Error taxonomy shared by all modules. Everything derives from Error so
// callers can catch broadly; the CLI maps these onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidData : Error {
  using Error::Error;
};
struct Underdetermined : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct DegenerateDesign : Error {
  using Error::Error;
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct WeakIdentification : Error {
  using Error::Error;
};
struct DegenerateDomain : Error {
  using Error::Error;
};
struct Unsupported : Error {
  using Error::Error;
};

// Observed sample: y on [D | Z] where only the Z-coefficients may shift.
// Row k of Z is z_k'; the selection matrix R = (0, I)' is implicit in the
// (D, Z) column split. For models with a constant and lagged dependent
// variable (two-step path) the convention is: D column 0 holds y_{t-1}
// (so D(0,0) is the presample value y_0) and Z column 0 is the constant.
struct TimeSeriesDataset {
  VectorXd y;
  MatrixXd D;  // T x q, q >= 0
  MatrixXd Z;  // T x p, p >= 1
  double span = 1.0;

  int T() const { return static_cast<int>(y.size()); }
  int q() const { return static_cast<int>(D.cols()); }
  int p() const { return static_cast<int>(Z.cols()); }

  void validate() const;
};

struct ModelSpec {
  double trimming_estimation = 0.15;  // candidate-break window
  double trimming_limit = 0.05;       // pi: limit-law domain trimming
  bool has_predictable = false;       // constant + lagged y present
  double span = 1.0;

  void validate() const;
};

struct OlsFit {
  VectorXd coefficients;
  VectorXd residuals;
  double ssr = 0.0;
  int rank = 0;
};

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidData(std::string(what) + ": non-finite entries");
  }
}

}  // namespace breakdate
