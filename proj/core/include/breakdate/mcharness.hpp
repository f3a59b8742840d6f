#pragma once

#include "breakdate/confsets.hpp"
#include "breakdate/dgp.hpp"
#include "breakdate/limitsim.hpp"

namespace breakdate {

enum class WaldVariance { plain, robust, long_run };

struct SupWaldResult {
  double statistic = 0.0;
  bool reject_5pct = false;
};

// Sup over trimmed candidates of the Wald statistic for delta = 0,
// compared against the cached asymptotic critical value.
SupWaldResult sup_wald(const TimeSeriesDataset& data, double trim,
                       WaldVariance variance = WaldVariance::plain,
                       double level = 0.05);

struct McRequest {
  DgpSpec spec;
  int reps = 2000;
  double alpha = 0.05;
  bool run_hdr = true;
  bool run_bai = true;
  LimitSimConfig sim;
  int workers = 1;
};

struct McCell {
  DgpSpec spec;
  int reps = 0;
  double coverage_hdr = 0.0, avg_length_hdr = 0.0;
  double coverage_bai = 0.0, avg_length_bai = 0.0;
  double supw_rejection = 0.0;
  int failures = 0;  // degenerate replications (weak identification)
};

// One table cell: per replication generate -> estimate (two-step for
// M7/M8) -> plug-ins -> simulate -> confidence sets -> record coverage and
// length. Deterministic under (seed, reps) for any worker count.
McCell run_cell(const McRequest& request);

// Candidate edge trimming used inside run_cell: the number of estimated
// regression parameters, dropped at each end of the sample.
int edge_trim_for(const DgpSpec& spec);

}  // namespace breakdate
