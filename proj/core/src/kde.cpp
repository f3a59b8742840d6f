#include "breakdate/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace breakdate {

DensityEstimate::DensityEstimate(const std::vector<double>& draws,
                                 int grid_bins) {
  const std::size_t n = draws.size();
  if (n == 0) throw InvalidData("kde: no draws");

  std::vector<double> sorted(draws);
  std::sort(sorted.begin(), sorted.end());
  const double lo_draw = sorted.front(), hi_draw = sorted.back();

  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  var = n > 1 ? var / (n - 1) : 0.0;
  const double sd = std::sqrt(var);
  const double iqr =
      sorted[static_cast<std::size_t>(0.75 * (n - 1))] -
      sorted[static_cast<std::size_t>(0.25 * (n - 1))];

  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  if (spread <= 0.0) {
    point_mass_ = true;
    atom_ = mean;
    draw_dens_.assign(n, std::numeric_limits<double>::infinity());
    return;
  }
  bandwidth_ = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);

  lo_ = lo_draw - 5.0 * bandwidth_;
  hi_ = hi_draw + 5.0 * bandwidth_;
  step_ = (hi_ - lo_) / (grid_bins - 1);

  std::vector<double> counts(grid_bins, 0.0);
  for (double v : sorted) {
    // Linear binning keeps the grid density second-order accurate.
    double pos = (v - lo_) / step_;
    int i = static_cast<int>(pos);
    i = std::clamp(i, 0, grid_bins - 2);
    const double w = pos - i;
    counts[i] += 1.0 - w;
    counts[i + 1] += w;
  }

  const int radius =
      std::min(grid_bins - 1,
               static_cast<int>(std::ceil(5.0 * bandwidth_ / step_)));
  std::vector<double> kernel(radius + 1);
  const double norm = 1.0 / (n * bandwidth_ * std::sqrt(2.0 * 3.14159265358979323846));
  for (int j = 0; j <= radius; ++j) {
    const double u = j * step_ / bandwidth_;
    kernel[j] = norm * std::exp(-0.5 * u * u);
  }
  grid_.assign(grid_bins, 0.0);
  for (int i = 0; i < grid_bins; ++i) {
    if (counts[i] == 0.0) continue;
    grid_[i] += counts[i] * kernel[0];
    for (int j = 1; j <= radius; ++j) {
      const double c = counts[i] * kernel[j];
      if (i - j >= 0) grid_[i - j] += c;
      if (i + j < grid_bins) grid_[i + j] += c;
    }
  }

  draw_dens_.resize(n);
  for (std::size_t k = 0; k < n; ++k) draw_dens_[k] = eval(draws[k]);
}

double DensityEstimate::eval(double x) const {
  if (point_mass_) {
    return x == atom_ ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (x <= lo_ || x >= hi_) return 0.0;
  const double pos = (x - lo_) / step_;
  const int i = std::min(static_cast<int>(pos),
                         static_cast<int>(grid_.size()) - 2);
  const double w = pos - i;
  return (1.0 - w) * grid_[i] + w * grid_[i + 1];
}

double hdr_threshold(const DensityEstimate& dens, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidData("hdr_threshold: alpha in (0,1)");
  }
  std::vector<double> d = dens.draw_densities();
  std::sort(d.begin(), d.end());
  const std::size_t idx = std::min(
      d.size() - 1, static_cast<std::size_t>(std::floor(alpha * d.size())));
  return d[idx];
}

int count_modes(const std::vector<double>& values, double min_prominence) {
  // 1-D topological persistence: a peak counts when it dies at least
  // thresh below its height (the global maximum always counts).
  const int n = static_cast<int>(values.size());
  if (n == 0) return 0;
  const double vmax = *std::max_element(values.begin(), values.end());
  if (vmax <= 0.0) return 0;
  const double thresh = min_prominence * vmax;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values[a] > values[b]; });

  std::vector<int> parent(n, -1);  // union-find over assigned points
  std::vector<double> comp_peak(n, 0.0);
  auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };

  int modes = 1;  // global maximum
  for (int i : order) {
    parent[i] = i;
    comp_peak[i] = values[i];
    int left = (i > 0 && parent[i - 1] >= 0) ? find(i - 1) : -1;
    int right = (i + 1 < n && parent[i + 1] >= 0) ? find(i + 1) : -1;
    if (left >= 0 && right >= 0 && left != right) {
      // Saddle at i: the lower of the two merging peaks dies here.
      const double dying = std::min(comp_peak[left], comp_peak[right]);
      if (dying - values[i] >= thresh) ++modes;
      const double top = std::max(comp_peak[left], comp_peak[right]);
      parent[left] = right;
      parent[i] = right;
      comp_peak[right] = top;
    } else if (left >= 0) {
      parent[i] = left;
    } else if (right >= 0) {
      parent[i] = right;
    }
  }
  return modes;
}

}  // namespace breakdate
