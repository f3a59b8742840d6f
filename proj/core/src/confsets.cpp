#include "breakdate/confsets.hpp"

#include <cmath>
#include <sstream>

#include "breakdate/argmax_law.hpp"

namespace breakdate {

int ConfidenceSet::total_length() const {
  int len = 0;
  for (const auto& [lo, hi] : intervals) len += hi - lo + 1;
  return len;
}

bool ConfidenceSet::contains(int date) const {
  for (const auto& [lo, hi] : intervals) {
    if (date >= lo && date <= hi) return true;
  }
  return false;
}

std::string ConfidenceSet::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (i > 0) os << "u";
    os << "[" << intervals[i].first << "-" << intervals[i].second << "]";
  }
  return os.str();
}

namespace {

std::vector<std::pair<int, int>> merge_dates(const std::vector<int>& dates) {
  std::vector<std::pair<int, int>> out;
  for (int d : dates) {
    if (!out.empty() && out.back().second + 1 == d) {
      out.back().second = d;
    } else {
      out.push_back({d, d});
    }
  }
  return out;
}

}  // namespace

ConfidenceSet full_range_set(double alpha, int T, int edge_trim,
                             CsMethod method) {
  ConfidenceSet cs;
  cs.level = 1.0 - alpha;
  cs.method = method;
  cs.weak_identification = true;
  cs.intervals = {{1 + edge_trim, T - edge_trim}};
  return cs;
}

ConfidenceSet hdr_confidence_set(const LimitDraws& draws,
                                 const BreakEstimate& est,
                                 const PluginParams& params, double alpha,
                                 int T, int edge_trim) {
  if (draws.draws.size() < 2) throw InvalidData("hdr_confidence_set: draws");
  DensityEstimate dens(draws.draws);
  const double cv = hdr_threshold(dens, alpha);

  const int lo = 1 + edge_trim, hi = T - edge_trim;
  if (lo > hi) throw InvalidSpec("hdr_confidence_set: edge_trim too large");

  std::vector<int> member;
  for (int t_b = lo; t_b <= hi; ++t_b) {
    if (t_b == est.t_hat) {
      member.push_back(t_b);
      continue;
    }
    const double x = params.rho * (t_b - est.t_hat);
    const double f = dens.point_mass() ? (x == 0.0 ? 1.0 : 0.0)
                                       : dens.eval(x);
    if (f > cv) member.push_back(t_b);
  }

  ConfidenceSet cs;
  cs.level = 1.0 - alpha;
  cs.method = CsMethod::hdr;
  cs.cv = cv;
  cs.intervals = merge_dates(member);
  if (cs.intervals.empty()) cs.intervals = {{est.t_hat, est.t_hat}};
  return cs;
}

ConfidenceSet bai_confidence_interval(const BreakEstimate& est,
                                      const TimeSeriesDataset& data,
                                      double alpha,
                                      const BaiOptions& opts) {
  const int n = data.T(), p = data.p();
  const int tb = est.t_hat;
  const VectorXd& d = est.delta_hat;
  const double yscale = data.y.norm() / std::sqrt(static_cast<double>(n));
  if (d.norm() <= 1e-10 * std::max(yscale, 1e-300)) {
    throw WeakIdentification("bai_confidence_interval: delta_hat zero");
  }

  // Regime second moments of z and of the score delta'z*e.
  MatrixXd q1 = MatrixXd::Zero(p, p), q2 = MatrixXd::Zero(p, p);
  VectorXd score(n);
  double w1 = 0.0, w2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto z = data.Z.row(k).transpose();
    score(k) = d.dot(z) * est.residuals(k);
    if (k < tb) {
      q1.noalias() += z * z.transpose();
      w1 += score(k) * score(k);
    } else {
      q2.noalias() += z * z.transpose();
      w2 += score(k) * score(k);
    }
  }
  q1 /= tb;
  q2 /= (n - tb);
  w1 /= tb;
  w2 /= (n - tb);
  if (opts.serial_correlation) {
    w1 = lrv_qs_prewhitened(score.head(tb)).value;
    w2 = lrv_qs_prewhitened(score.tail(n - tb)).value;
  }

  const double dq1 = d.dot(q1 * d), dq2 = d.dot(q2 * d);
  const double q = argmax_quantile_cached(1.0 - alpha / 2.0);

  // Half-widths q / L_i rounded to the nearest date, with the regime-i
  // scale L_i = (delta' Q_i delta)^2 / (delta' Omega_i delta) on side i.
  int half_left = 0, half_right = 0;
  if (w1 > 0.0 && dq1 > 0.0) {
    half_left = static_cast<int>(std::lround(q * w1 / (dq1 * dq1)));
  }
  if (w2 > 0.0 && dq2 > 0.0) {
    half_right = static_cast<int>(std::lround(q * w2 / (dq2 * dq2)));
  }

  ConfidenceSet cs;
  cs.level = 1.0 - alpha;
  cs.method = CsMethod::bai;
  const int lo = std::max(1 + opts.edge_trim, tb - half_left);
  const int hi = std::min(n - opts.edge_trim, tb + half_right);
  cs.intervals = {{lo, hi}};
  return cs;
}

}  // namespace breakdate
