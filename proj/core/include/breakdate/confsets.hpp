#pragma once

#include "breakdate/kde.hpp"
#include "breakdate/limitsim.hpp"
#include "breakdate/plugin.hpp"
#include "breakdate/types.hpp"

namespace breakdate {

enum class CsMethod { hdr, bai };

struct ConfidenceSet {
  std::vector<std::pair<int, int>> intervals;  // disjoint, sorted, 1-based
  double level = 0.95;
  CsMethod method = CsMethod::hdr;
  std::optional<double> cv;  // HDR density threshold
  bool weak_identification = false;

  int total_length() const;
  bool contains(int date) const;
  std::string to_string() const;  // "[lo1-hi1]u[lo2-hi2]"
};

// HDR confidence set (Algorithm 1): date T_b enters when the simulated
// density at its axis coordinate rho*(T_b - t_hat) exceeds cv_alpha.
// Candidates are 1..T less edge_trim dates at each end; the estimated
// break date is always a member.
ConfidenceSet hdr_confidence_set(const LimitDraws& draws,
                                 const BreakEstimate& est,
                                 const PluginParams& params, double alpha,
                                 int T, int edge_trim = 0);

// Fallback set under weak identification: the whole candidate range.
ConfidenceSet full_range_set(double alpha, int T, int edge_trim,
                             CsMethod method);

struct BaiOptions {
  bool serial_correlation = false;  // use prewhitened QS LRV in the scale
  int edge_trim = 0;
};

// Comparator interval from the large-N shrinkage asymptotics: the classical
// argmax quantile divided by the regime-specific scale
// (delta' Q_i delta)^2 / (delta' Omega_i delta) on each side.
ConfidenceSet bai_confidence_interval(const BreakEstimate& est,
                                      const TimeSeriesDataset& data,
                                      double alpha,
                                      const BaiOptions& opts = {});

}  // namespace breakdate
