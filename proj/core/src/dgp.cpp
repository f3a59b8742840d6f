#include "breakdate/dgp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "breakdate/rng.hpp"

namespace breakdate {

namespace {
constexpr int kBurnIn = 500;
constexpr int kFracTrunc = 1000;
// Stream ids within one (seed) namespace.
constexpr std::uint64_t kStreamMain = 0;
constexpr std::uint64_t kStreamAux = 1;
constexpr std::uint64_t kStreamRegressor = 2;
}  // namespace

DgpModel parse_model(const std::string& tag) {
  static const std::map<std::string, DgpModel> names = {
      {"M1", DgpModel::M1},   {"M2", DgpModel::M2}, {"M3", DgpModel::M3},
      {"M4", DgpModel::M4},   {"M5", DgpModel::M5}, {"M6", DgpModel::M6},
      {"M7", DgpModel::M7},   {"M8", DgpModel::M8}, {"M9", DgpModel::M9},
      {"M10", DgpModel::M10}, {"FS51", DgpModel::FS51}};
  auto it = names.find(tag);
  if (it == names.end()) throw InvalidSpec("unknown model tag: " + tag);
  return it->second;
}

std::string model_name(DgpModel m) {
  switch (m) {
    case DgpModel::M1: return "M1";
    case DgpModel::M2: return "M2";
    case DgpModel::M3: return "M3";
    case DgpModel::M4: return "M4";
    case DgpModel::M5: return "M5";
    case DgpModel::M6: return "M6";
    case DgpModel::M7: return "M7";
    case DgpModel::M8: return "M8";
    case DgpModel::M9: return "M9";
    case DgpModel::M10: return "M10";
    case DgpModel::FS51: return "FS51";
  }
  return "?";
}

double DgpSpec::get(const std::string& key, double fallback) const {
  auto it = extra.find(key);
  return it == extra.end() ? fallback : it->second;
}

int DgpSpec::true_break() const {
  return static_cast<int>(std::floor(T * lambda0));
}

void DgpSpec::validate() const {
  if (T < 20) throw InvalidSpec("dgp: T too small");
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw InvalidSpec("dgp: lambda0");
  if (lambda0 * T < 2.0) throw InvalidSpec("dgp: lambda0*T < 2");
  const double d = get("d", model == DgpModel::M9 ? 0.6 : 0.5);
  if ((model == DgpModel::M9 || model == DgpModel::M10) &&
      !(d > 0.0 && d < 1.0)) {
    throw InvalidSpec("dgp: d outside (0,1)");
  }
}

std::vector<double> fractional_diff_coeffs(double d, int K) {
  if (!(d > 0.0 && d < 1.0)) throw InvalidSpec("fractional_diff_coeffs: d");
  if (K < 1) throw InvalidSpec("fractional_diff_coeffs: K >= 1");
  std::vector<double> psi(K);
  psi[0] = 1.0;
  for (int j = 1; j < K; ++j) {
    psi[j] = psi[j - 1] * (j - 1.0 - d) / j;
  }
  return psi;
}

namespace {

double student_t5(CounterRng& rng) {
  const double z = rng.normal();
  double chi = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double g = rng.normal();
    chi += g * g;
  }
  return z / std::sqrt(chi / 5.0);
}

VectorXd ar1_path(CounterRng& rng, int n, double phi, double innov_sd) {
  VectorXd out(n);
  double x = 0.0;
  for (int t = -kBurnIn; t < n; ++t) {
    x = phi * x + innov_sd * rng.normal();
    if (t >= 0) out(t) = x;
  }
  return out;
}

// ARFIMA(ar, d, 0) with truncated MA(inf) weights, scaled to unit variance
// of the truncated representation.
VectorXd arfima_path(CounterRng& rng, int n, double ar, double d) {
  // (1-L)^{-d} weights: b_0 = 1, b_j = b_{j-1} (j-1+d)/j.
  std::vector<double> b(kFracTrunc);
  b[0] = 1.0;
  for (int j = 1; j < kFracTrunc; ++j) b[j] = b[j - 1] * (j - 1.0 + d) / j;
  std::vector<double> a(kFracTrunc);
  a[0] = 1.0;
  for (int j = 1; j < kFracTrunc; ++j) a[j] = ar * a[j - 1] + b[j];
  double var = 0.0;
  for (double c : a) var += c * c;
  const double scale = 1.0 / std::sqrt(var);

  std::vector<double> shocks(kBurnIn + n + kFracTrunc);
  for (auto& s : shocks) s = rng.normal();
  VectorXd out(n);
  for (int t = 0; t < n; ++t) {
    double v = 0.0;
    const int base = t + kFracTrunc;  // shocks[base] is w_t
    for (int j = 0; j < kFracTrunc; ++j) v += a[j] * shocks[base - j];
    out(t) = scale * v;
  }
  return out;
}

// FIGARCH(1,d,1) conditional-variance recursion specialized to
// sigma_t^2 = 0.1 + sum_j lambda_j e_{t-j}^2 with
// lambda(L) = 1 - (1 - 0.2 L)(1-L)^d.
VectorXd figarch_errors(CounterRng& rng, int n, double d, double phi,
                        double omega, int* positivity_violations) {
  std::vector<double> psi = fractional_diff_coeffs(d, kFracTrunc + 1);
  std::vector<double> lam(kFracTrunc);
  for (int j = 1; j <= kFracTrunc; ++j) {
    lam[j - 1] = phi * psi[j - 1] - psi[j];
  }
  std::vector<double> e2(kBurnIn + n, omega);
  VectorXd out(n);
  int viol = 0;
  for (int t = 0; t < kBurnIn + n; ++t) {
    double s2 = omega;
    for (int j = 1; j <= kFracTrunc && j <= t; ++j) {
      s2 += lam[j - 1] * e2[t - j];
    }
    if (s2 < 1e-8) {
      s2 = 1e-8;
      ++viol;
    }
    const double e = std::sqrt(s2) * rng.normal();
    e2[t] = e * e;
    if (t >= kBurnIn) out(t - kBurnIn) = e;
  }
  if (positivity_violations != nullptr) *positivity_violations = viol;
  return out;
}

}  // namespace

GeneratedSample generate(const DgpSpec& spec) {
  spec.validate();
  const int n = spec.T;
  const int tb = spec.true_break();
  CounterRng main_rng(spec.seed, kStreamMain);
  CounterRng aux_rng(spec.seed, kStreamAux);
  CounterRng reg_rng(spec.seed, kStreamRegressor);

  GeneratedSample out;
  out.true_tb = tb;
  TimeSeriesDataset& ds = out.data;
  auto indicator = [tb](int t) { return t >= tb ? 1.0 : 0.0; };

  switch (spec.model) {
    case DgpModel::M1:
    case DgpModel::M2:
    case DgpModel::M3:
    case DgpModel::M6: {
      ds.Z = MatrixXd::Ones(n, 1);
      ds.D.resize(n, 0);
      ds.y.resize(n);
      VectorXd e(n);
      if (spec.model == DgpModel::M1 || spec.model == DgpModel::M2) {
        for (int t = 0; t < n; ++t) e(t) = main_rng.normal();
        if (spec.model == DgpModel::M2) {
          for (int t = tb; t < n; ++t) e(t) *= 2.0;
        }
      } else {
        const double phi = spec.get("ar", 0.3);
        const double sd = std::sqrt(spec.get("innov_var", 0.49));
        double x = 0.0;
        for (int t = -kBurnIn; t < n; ++t) {
          const double u = spec.model == DgpModel::M3
                               ? sd * main_rng.normal()
                               : student_t5(main_rng);
          x = phi * x + u;
          if (t >= 0) e(t) = x;
        }
      }
      for (int t = 0; t < n; ++t) {
        ds.y(t) = spec.beta0 + spec.delta0 * indicator(t) + e(t);
      }
      break;
    }
    case DgpModel::M4:
    case DgpModel::M5:
    case DgpModel::M10:
    case DgpModel::FS51: {
      ds.D = MatrixXd::Ones(n, 1);
      ds.y.resize(n);
      ds.Z.resize(n, 1);
      const double nu = spec.get("nu0", 1.0);
      VectorXd z;
      if (spec.model == DgpModel::M10) {
        z = arfima_path(reg_rng, n, spec.get("ar", 0.3), spec.get("d", 0.5));
      } else {
        const double phi = spec.get("ar", 0.5);
        const double iv =
            spec.get("innov_var", spec.model == DgpModel::M4 ? 0.75 : 1.0);
        z = ar1_path(reg_rng, n, phi, std::sqrt(iv));
      }
      ds.Z.col(0) = z;
      for (int t = 0; t < n; ++t) {
        double e;
        if (spec.model == DgpModel::M5) {
          e = aux_rng.normal() * std::abs(z(t));
        } else {
          e = std::sqrt(spec.get("sigma_e2", 1.0)) * main_rng.normal();
        }
        ds.y(t) = nu + z(t) * (spec.beta0 + spec.delta0 * indicator(t)) + e;
      }
      break;
    }
    case DgpModel::M7:
    case DgpModel::M8: {
      const double nu =
          spec.get("nu0", spec.model == DgpModel::M7 ? 0.3 : 0.8);
      const double ev =
          spec.get("sigma_e2", spec.model == DgpModel::M7 ? 0.49 : 0.04);
      const double sd = std::sqrt(ev);
      ds.y.resize(n);
      ds.D.resize(n, 1);
      ds.Z = MatrixXd::Ones(n, 1);
      double y = 0.0;
      for (int t = -kBurnIn; t < n; ++t) {
        const double shift =
            t >= 0 ? (1.0 - nu) * spec.delta0 * indicator(t) : 0.0;
        const double ylag = y;
        y = nu * ylag + shift + sd * main_rng.normal();
        if (t >= 0) {
          ds.y(t) = y;
          ds.D(t, 0) = ylag;
        }
      }
      break;
    }
    case DgpModel::M9: {
      ds.D = MatrixXd::Ones(n, 1);
      ds.Z.resize(n, 1);
      ds.y.resize(n);
      const double nu = spec.get("nu0", 1.0);
      for (int t = 0; t < n; ++t) {
        ds.Z(t, 0) = 1.0 + std::sqrt(1.44) * reg_rng.normal();
      }
      VectorXd e = figarch_errors(main_rng, n, spec.get("d", 0.6),
                                  spec.get("phi", 0.2),
                                  spec.get("omega", 0.1), nullptr);
      for (int t = 0; t < n; ++t) {
        ds.y(t) = nu + ds.Z(t, 0) * (spec.beta0 +
                                     spec.delta0 * indicator(t)) +
                  e(t);
      }
      break;
    }
  }
  ds.span = 1.0;
  return out;
}

void write_dataset_csv(const TimeSeriesDataset& data,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidData("write_dataset_csv: cannot open " + path);
  f << "y";
  for (int j = 0; j < data.q(); ++j) f << ",d" << j + 1;
  for (int j = 0; j < data.p(); ++j) f << ",z" << j + 1;
  f << "\n";
  f.precision(17);
  for (int t = 0; t < data.T(); ++t) {
    f << data.y(t);
    for (int j = 0; j < data.q(); ++j) f << "," << data.D(t, j);
    for (int j = 0; j < data.p(); ++j) f << "," << data.Z(t, j);
    f << "\n";
  }
}

TimeSeriesDataset read_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidData("read_dataset_csv: cannot open " + path);
  std::string header;
  if (!std::getline(f, header)) {
    throw InvalidData("read_dataset_csv: empty file");
  }
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  int q = 0, p = 0;
  if (cols.empty() || cols[0] != "y") {
    throw InvalidData("read_dataset_csv: first column must be y");
  }
  for (std::size_t j = 1; j < cols.size(); ++j) {
    if (cols[j].rfind('d', 0) == 0 && p == 0) {
      ++q;
    } else if (cols[j].rfind('z', 0) == 0) {
      ++p;
    } else {
      throw InvalidData("read_dataset_csv: bad column name " + cols[j]);
    }
  }
  if (p == 0) throw InvalidData("read_dataset_csv: needs a z column");

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw InvalidData("read_dataset_csv: non-numeric cell '" + cell + "'");
      }
      if (pos != cell.size()) {
        throw InvalidData("read_dataset_csv: trailing junk in '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != cols.size()) {
      throw InvalidData("read_dataset_csv: ragged row");
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw InvalidData("read_dataset_csv: no data rows");

  TimeSeriesDataset ds;
  ds.y.resize(n);
  ds.D.resize(n, q);
  ds.Z.resize(n, p);
  for (int t = 0; t < n; ++t) {
    ds.y(t) = rows[t][0];
    for (int j = 0; j < q; ++j) ds.D(t, j) = rows[t][1 + j];
    for (int j = 0; j < p; ++j) ds.Z(t, j) = rows[t][1 + q + j];
  }
  return ds;
}

}  // namespace breakdate
