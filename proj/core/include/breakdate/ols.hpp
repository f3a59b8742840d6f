#pragma once

#include "breakdate/types.hpp"

namespace breakdate {

// Minimum-norm least squares via a pivoted complete orthogonal
// decomposition; rank-deficient designs do not error, they report rank.
OlsFit ols_fit(const Eigen::Ref<const MatrixXd>& X,
               const Eigen::Ref<const VectorXd>& y);

// Full broken design [D | Z | Z2] where Z2 equals Z with rows 1..t_b zeroed
// (t_b = number of pre-break observations).
MatrixXd build_design(const TimeSeriesDataset& data, int t_b);

}  // namespace breakdate
