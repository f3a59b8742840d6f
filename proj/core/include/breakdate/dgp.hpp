#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "breakdate/types.hpp"

namespace breakdate {

enum class DgpModel { M1, M2, M3, M4, M5, M6, M7, M8, M9, M10, FS51 };

DgpModel parse_model(const std::string& tag);
std::string model_name(DgpModel m);

// Monte Carlo design cell. `extra` overrides per-model constants; known
// keys (with defaults): ar (per model), nu0, innov_var, sigma_e2, d, beta0.
struct DgpSpec {
  DgpModel model = DgpModel::M1;
  int T = 100;
  double lambda0 = 0.5;
  double delta0 = 1.0;
  double beta0 = 1.0;  // 0 in M7/M8
  std::uint64_t seed = 1;
  std::map<std::string, double> extra;

  double get(const std::string& key, double fallback) const;
  void validate() const;
  int true_break() const;  // floor(T * lambda0)
  bool predictable() const {
    return model == DgpModel::M7 || model == DgpModel::M8;
  }
};

struct GeneratedSample {
  TimeSeriesDataset data;
  int true_tb = 0;
};

GeneratedSample generate(const DgpSpec& spec);

// Binomial expansion weights of (1-L)^d: psi_0 = 1,
// psi_j = psi_{j-1} * (j-1-d)/j.
std::vector<double> fractional_diff_coeffs(double d, int K);

// CSV export in the schema the CLI reads back: header y[,d1..dq][,z1..zp].
void write_dataset_csv(const TimeSeriesDataset& data, const std::string& path);
TimeSeriesDataset read_dataset_csv(const std::string& path);

}  // namespace breakdate
