#pragma once

#include "breakdate/types.hpp"

namespace breakdate {

// Gaussian-kernel density with Silverman's rule bandwidth
// 0.9 * min(sd, IQR/1.34) * n^(-1/5), evaluated through a binned grid.
// Degenerate (zero-spread) draws fall back to a point mass.
class DensityEstimate {
 public:
  explicit DensityEstimate(const std::vector<double>& draws,
                           int grid_bins = 4096);

  double eval(double x) const;
  double bandwidth() const { return bandwidth_; }
  bool point_mass() const { return point_mass_; }
  double atom() const { return atom_; }
  const std::vector<double>& draw_densities() const { return draw_dens_; }
  double grid_lo() const { return lo_; }
  double grid_hi() const { return hi_; }
  const std::vector<double>& grid_values() const { return grid_; }

 private:
  double lo_ = 0.0, hi_ = 0.0, step_ = 1.0;
  double bandwidth_ = 0.0;
  bool point_mass_ = false;
  double atom_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> draw_dens_;
};

// Hyndman's estimator: the alpha-quantile of the density evaluated at the
// draws, the largest threshold retaining at least 1-alpha of the mass.
double hdr_threshold(const DensityEstimate& dens, double alpha);

// Local maxima of a density grid with a relative prominence filter:
// a peak counts when it exceeds the higher of its flanking valleys by
// min_prominence * max(values).
int count_modes(const std::vector<double>& values, double min_prominence);

}  // namespace breakdate
