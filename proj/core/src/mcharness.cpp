#include "breakdate/mcharness.hpp"

#include <cmath>
#include <thread>

#include "breakdate/argmax_law.hpp"
#include "breakdate/ols.hpp"
#include "breakdate/rng.hpp"

namespace breakdate {

SupWaldResult sup_wald(const TimeSeriesDataset& data, double trim,
                       WaldVariance variance, double level) {
  data.validate();
  ModelSpec spec;
  spec.trimming_estimation = trim;
  const auto [lo, hi] = trimmed_range(data, spec);
  const int n = data.T(), q = data.q(), p = data.p();
  const int dim = q + 2 * p;

  MatrixXd X(n, q + p);
  if (q > 0) X.leftCols(q) = data.D;
  X.rightCols(p) = data.Z;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod_x(X);
  const double ssr_null = (data.y - X * cod_x.solve(data.y)).squaredNorm();

  double sup = -1.0;
  int sup_tb = lo;
  // The statistic is studentized by the no-break model: plain uses
  // SSR_0/(T-q-p), long_run the prewhitened QS long-run variance of the
  // null residuals.
  VectorXd null_resid = data.y - X * cod_x.solve(data.y);
  double null_scale = ssr_null / (n - q - p);
  if (variance == WaldVariance::long_run) {
    null_scale = lrv_qs_prewhitened(null_resid).value;
  }

  for (int t_b = lo; t_b <= hi; ++t_b) {
    MatrixXd W = build_design(data, t_b);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(W);
    if (cod.rank() < dim) continue;
    VectorXd theta = cod.solve(data.y);
    VectorXd resid = data.y - W * theta;
    const double ssr = resid.squaredNorm();
    double w;
    if (variance == WaldVariance::robust) {
      // HC0 sandwich on the delta block.
      MatrixXd WtW = W.transpose() * W;
      MatrixXd meat = MatrixXd::Zero(dim, dim);
      for (int k = 0; k < n; ++k) {
        meat.noalias() +=
            resid(k) * resid(k) * W.row(k).transpose() * W.row(k);
      }
      MatrixXd bread = WtW.ldlt().solve(MatrixXd::Identity(dim, dim));
      MatrixXd V = bread * meat * bread;
      MatrixXd Vd = V.bottomRightCorner(p, p);
      VectorXd delta = theta.tail(p);
      w = delta.dot(Vd.ldlt().solve(delta));
    } else {
      w = (ssr_null - ssr) / null_scale;
    }
    if (w > sup) {
      sup = w;
      sup_tb = t_b;
    }
  }
  (void)sup_tb;
  if (sup < 0.0) throw DegenerateDesign("sup_wald: no admissible candidate");

  SupWaldResult out;
  out.statistic = sup;
  out.reject_5pct = sup > sup_wald_critical_value(level, trim, p);
  return out;
}

int edge_trim_for(const DgpSpec& spec) {
  // Number of estimated regression parameters, per the simulation protocol.
  switch (spec.model) {
    case DgpModel::M7:
    case DgpModel::M8:
      return 4;  // mu_1, alpha_1, mu_2, alpha_2
    case DgpModel::M1:
    case DgpModel::M2:
    case DgpModel::M3:
    case DgpModel::M6:
      return 2;  // beta, delta
    default:
      return 3;  // nu, beta, delta
  }
}

namespace {

struct RepOutcome {
  int cover_hdr = 0, len_hdr = 0;
  int cover_bai = 0, len_bai = 0;
  int supw = 0;
  int failure = 0;   // weak identification or excluded
  int excluded = 0;  // unusable replication, dropped from the means
};

// The diagnostic is studentized by the prewhitened-QS long-run variance of
// the no-break residuals throughout; an unmodeled shift inflates it, which
// matches the reported power profile of the test across break sizes.
WaldVariance wald_variance_for(DgpModel m) {
  (void)m;
  return WaldVariance::long_run;
}

}  // namespace

McCell run_cell(const McRequest& request) {
  if (request.reps < 100) throw InvalidSpec("run_cell: reps >= 100");
  request.spec.validate();

  const int reps = request.reps;
  const int edge = edge_trim_for(request.spec);
  const bool general_mode = request.spec.model == DgpModel::M9 ||
                            request.spec.model == DgpModel::M10;
  const WaldVariance wv = wald_variance_for(request.spec.model);
  ModelSpec mspec;
  mspec.trimming_estimation = 0.15;
  mspec.trimming_limit = request.sim.pi;
  mspec.has_predictable = request.spec.predictable();

  std::vector<RepOutcome> outcomes(reps);
  auto run_rep = [&](int r) {
    DgpSpec ds = request.spec;
    ds.seed = mix_seed(request.spec.seed, static_cast<std::uint64_t>(r));
    GeneratedSample sample = generate(ds);
    const int true_date = sample.true_tb;  // 1-based date == regime-1 count
    RepOutcome& o = outcomes[r];

    LimitSimConfig sim = request.sim;
    sim.seed = mix_seed(ds.seed, 0xD0A3u);
    sim.workers = 1;

    try {
      SupWaldResult sw = sup_wald(sample.data, 0.15, wv);
      o.supw = sw.reject_5pct ? 1 : 0;

      BreakEstimate est = mspec.has_predictable
                              ? two_step_predictable(sample.data, mspec)
                              : scan_break(sample.data, mspec);
      PluginParams params = compute_plugins(sample.data, est);
      if (request.run_hdr) {
        LimitDraws draws =
            general_mode ? simulate_general(sample.data, est, params, sim)
                         : simulate_stationary(params, sim);
        ConfidenceSet cs = hdr_confidence_set(draws, est, params,
                                              request.alpha,
                                              sample.data.T(), edge);
        o.cover_hdr = cs.contains(true_date) ? 1 : 0;
        o.len_hdr = cs.total_length();
      }
      if (request.run_bai) {
        BaiOptions bo;
        bo.serial_correlation = request.spec.model == DgpModel::M3 ||
                                request.spec.model == DgpModel::M6;
        bo.edge_trim = edge;
        ConfidenceSet cs =
            bai_confidence_interval(est, sample.data, request.alpha, bo);
        o.cover_bai = cs.contains(true_date) ? 1 : 0;
        o.len_bai = cs.total_length();
      }
    } catch (const WeakIdentification&) {
      // Weak identification keeps the replication, scored with the maximal
      // fallback set.
      o.failure = 1;
      ConfidenceSet cs =
          full_range_set(request.alpha, sample.data.T(), edge, CsMethod::hdr);
      o.cover_hdr = o.cover_bai = cs.contains(true_date) ? 1 : 0;
      o.len_hdr = o.len_bai = cs.total_length();
    } catch (const Error&) {
      o.failure = 1;
      o.excluded = 1;
    }
  };

  const int workers = std::max(1, request.workers);
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) run_rep(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < reps; r += workers) run_rep(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  McCell cell;
  cell.spec = request.spec;
  cell.reps = reps;
  long ch = 0, lh = 0, cb = 0, lb = 0, sw = 0, fail = 0, excl = 0;
  for (const RepOutcome& o : outcomes) {
    ch += o.cover_hdr;
    lh += o.len_hdr;
    cb += o.cover_bai;
    lb += o.len_bai;
    sw += o.supw;
    fail += o.failure;
    excl += o.excluded;
  }
  const long used = std::max<long>(1, reps - excl);
  cell.coverage_hdr = static_cast<double>(ch) / used;
  cell.avg_length_hdr = static_cast<double>(lh) / used;
  cell.coverage_bai = static_cast<double>(cb) / used;
  cell.avg_length_bai = static_cast<double>(lb) / used;
  cell.supw_rejection = static_cast<double>(sw) / used;
  cell.failures = static_cast<int>(fail);
  return cell;
}

}  // namespace breakdate
