// breakdate: least-squares break-date estimation, feasible limit-law
// simulation, and HDR confidence sets, with a Monte Carlo table runner.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "breakdate/argmax_law.hpp"
#include "breakdate/confsets.hpp"
#include "breakdate/dgp.hpp"
#include "breakdate/kde.hpp"
#include "breakdate/limitsim.hpp"
#include "breakdate/mcharness.hpp"

namespace bd = breakdate;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitDegenerate = 4;

struct CliError {
  int code;
  std::string message;
};

bd::TimeSeriesDataset load_dataset(const std::string& path) {
  if (path.empty()) throw CliError{kExitIo, "missing input path"};
  if (!std::filesystem::exists(path)) {
    throw CliError{kExitIo, "input file not found: " + path};
  }
  try {
    return bd::read_dataset_csv(path);
  } catch (const bd::InvalidData& e) {
    throw CliError{kExitValidation, e.what()};
  }
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(path);
  if (!f) throw CliError{kExitIo, "cannot open output: " + path};
  f << body;
}

json estimate_to_json(const bd::BreakEstimate& est) {
  json j;
  j["t_hat"] = est.t_hat;
  j["lambda_hat"] = est.lambda_hat;
  j["beta_hat"] = std::vector<double>(est.beta_hat.begin(),
                                      est.beta_hat.end());
  j["delta_hat"] = std::vector<double>(est.delta_hat.begin(),
                                       est.delta_hat.end());
  j["ssr"] = est.ssr();
  j["rank_deficient"] = est.rank_deficient;
  if (est.predictable_coeffs) {
    const auto& pc = *est.predictable_coeffs;
    j["predictable_coeffs"] = {{"mu1", pc.mu1},
                               {"alpha1", pc.alpha1},
                               {"mu2", pc.mu2},
                               {"alpha2", pc.alpha2}};
  }
  return j;
}

json plugins_to_json(const bd::PluginParams& p) {
  return json{{"xi1", p.xi1},
              {"xi2", p.xi2},
              {"rho", p.rho},
              {"vartheta", p.vartheta},
              {"sigma_bar_sq", p.sigma_bar_sq},
              {"lambda_hat", p.lambda_hat}};
}

json set_to_json(const bd::ConfidenceSet& cs) {
  json j;
  j["level"] = cs.level;
  j["method"] = cs.method == bd::CsMethod::hdr ? "hdr" : "bai";
  json iv = json::array();
  for (const auto& [lo, hi] : cs.intervals) iv.push_back({lo, hi});
  j["intervals"] = iv;
  j["text"] = cs.to_string();
  j["total_length"] = cs.total_length();
  if (cs.cv) j["cv"] = *cs.cv;
  j["weak_identification"] = cs.weak_identification;
  return j;
}

struct CommonOpts {
  std::string input, output;
  double trim = 0.15;
  bool predictable = false;
};

bd::BreakEstimate run_estimator(const bd::TimeSeriesDataset& data,
                                const CommonOpts& c, double pi) {
  bd::ModelSpec spec;
  spec.trimming_estimation = c.trim;
  spec.trimming_limit = pi;
  spec.has_predictable = c.predictable;
  return c.predictable ? bd::two_step_predictable(data, spec)
                       : bd::scan_break(data, spec);
}

int dispatch(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Break-date estimation and HDR confidence sets"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags win");

  // ---- estimate ----
  CommonOpts est_opts;
  auto* cmd_est = app.add_subcommand("estimate",
                                     "Estimate the break date from a CSV");
  cmd_est->add_option("--input", est_opts.input, "CSV with header y[,d..][,z..]");
  cmd_est->add_option("--output", est_opts.output, "JSON report path (stdout)");
  cmd_est->add_option("--trim", est_opts.trim, "Estimation trimming");
  cmd_est->add_flag("--predictable", est_opts.predictable,
                    "Two-step fit for constant + lagged y");

  // ---- confset ----
  CommonOpts cs_opts;
  double cs_alpha = 0.05, cs_pi = 0.05;
  std::uint64_t cs_seed = 1;
  int cs_draws = 10000, cs_grid = 2000, cs_edge = 0, cs_workers = 1;
  std::vector<std::string> cs_methods = {"hdr", "bai"};
  std::string cs_draws_out;
  bool cs_general = false;
  auto* cmd_cs = app.add_subcommand("confset",
                                    "Confidence sets for the break date");
  cmd_cs->add_option("--input", cs_opts.input, "CSV with header y[,d..][,z..]");
  cmd_cs->add_option("--output", cs_opts.output, "JSON report path (stdout)");
  cmd_cs->add_option("--trim", cs_opts.trim, "Estimation trimming");
  cmd_cs->add_flag("--predictable", cs_opts.predictable,
                   "Two-step fit for constant + lagged y");
  cmd_cs->add_option("--alpha", cs_alpha, "Significance level");
  cmd_cs->add_option("--pi", cs_pi, "Limit-law domain trimming");
  cmd_cs->add_option("--n-draws", cs_draws, "Simulation draws");
  cmd_cs->add_option("--n-grid", cs_grid, "Grid points per path");
  cmd_cs->add_option("--seed", cs_seed, "RNG seed")
      ->envname("BREAKDATE_SEED");
  cmd_cs->add_option("--edge-trim", cs_edge, "Candidate dates dropped per end");
  cmd_cs->add_option("--workers", cs_workers, "Simulation worker threads");
  cmd_cs->add_option("--method", cs_methods, "Subset of {hdr, bai}");
  cmd_cs->add_option("--draws-out", cs_draws_out, "CSV export of raw draws");
  cmd_cs->add_flag("--general", cs_general,
                   "Use the general (time-varying moments) simulator");

  // ---- density ----
  double dn_rho2 = 0.5, dn_lambda0 = 0.5, dn_xi1 = 1.0, dn_xi2 = 1.0,
         dn_pi = 0.05, dn_span = 100.0;
  int dn_draws = 100000, dn_grid = 2000, dn_points = 512, dn_workers = 1;
  std::uint64_t dn_seed = 1;
  std::string dn_output, dn_draws_out;
  auto* cmd_dn = app.add_subcommand(
      "density", "Export the limit density on a grid for plotting");
  cmd_dn->add_option("--rho2", dn_rho2, "Signal-to-noise ratio rho^2")
      ->required();
  cmd_dn->add_option("--lambda0", dn_lambda0, "True break fraction")
      ->required();
  cmd_dn->add_option("--xi1", dn_xi1, "Drift ratio across regimes");
  cmd_dn->add_option("--xi2", dn_xi2, "Diffusion ratio across regimes");
  cmd_dn->add_option("--pi", dn_pi, "Domain trimming");
  cmd_dn->add_option("--span-n", dn_span, "Time span N of the panel");
  cmd_dn->add_option("--n-draws", dn_draws, "Simulation draws");
  cmd_dn->add_option("--n-grid", dn_grid, "Grid points per path");
  cmd_dn->add_option("--points", dn_points, "Evaluation grid size");
  cmd_dn->add_option("--workers", dn_workers, "Simulation worker threads");
  cmd_dn->add_option("--seed", dn_seed, "RNG seed")->envname("BREAKDATE_SEED");
  cmd_dn->add_option("--output", dn_output, "CSV output path (stdout)");
  cmd_dn->add_option("--draws-out", dn_draws_out, "CSV export of raw draws");

  // ---- mc ----
  std::string mc_model = "M1", mc_output, mc_json_out;
  std::vector<double> mc_deltas = {1.0}, mc_lambdas = {0.5};
  int mc_reps = 2000, mc_workers = 1, mc_draws = 10000, mc_grid = 2000;
  double mc_alpha = 0.05, mc_pi = 0.05, mc_beta0 = -1.0;
  std::uint64_t mc_seed = 1;
  std::vector<std::string> mc_methods = {"hdr", "bai"};
  bool mc_resume = false;
  auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo coverage/length table");
  cmd_mc->add_option("--model", mc_model, "Design tag M1..M10 or FS51");
  cmd_mc->add_option("--delta", mc_deltas, "Break magnitudes");
  cmd_mc->add_option("--lambda0", mc_lambdas, "Break fractions");
  cmd_mc->add_option("--reps", mc_reps, "Replications per cell");
  cmd_mc->add_option("--alpha", mc_alpha, "Significance level");
  cmd_mc->add_option("--pi", mc_pi, "Limit-law domain trimming");
  cmd_mc->add_option("--beta0", mc_beta0, "Pre-break coefficient override");
  cmd_mc->add_option("--n-draws", mc_draws, "Simulation draws per replication");
  cmd_mc->add_option("--n-grid", mc_grid, "Grid points per path");
  cmd_mc->add_option("--seed", mc_seed, "RNG seed")->envname("BREAKDATE_SEED");
  cmd_mc->add_option("--workers", mc_workers, "Replication worker threads");
  cmd_mc->add_option("--method", mc_methods, "Subset of {hdr, bai}");
  cmd_mc->add_option("--output", mc_output, "CSV output path (stdout)");
  cmd_mc->add_option("--json", mc_json_out, "Optional JSON output path");
  cmd_mc->add_flag("--resume", mc_resume, "Skip cells already in the output");

  if (int rc = dispatch(app, argc, argv); rc >= 0) return rc;

  try {
    if (cmd_est->parsed()) {
      bd::TimeSeriesDataset data = load_dataset(est_opts.input);
      bd::BreakEstimate est = run_estimator(data, est_opts, 0.05);
      json j = estimate_to_json(est);
      try {
        j["plugins"] = plugins_to_json(bd::compute_plugins(data, est));
      } catch (const bd::WeakIdentification&) {
        j["plugins"] = nullptr;
        j["weak_identification"] = true;
      }
      write_text(est_opts.output, j.dump(2) + "\n");
      return kExitOk;
    }

    if (cmd_cs->parsed()) {
      bd::TimeSeriesDataset data = load_dataset(cs_opts.input);
      const bool want_hdr =
          std::find(cs_methods.begin(), cs_methods.end(), "hdr") !=
          cs_methods.end();
      const bool want_bai =
          std::find(cs_methods.begin(), cs_methods.end(), "bai") !=
          cs_methods.end();
      if (!want_hdr && !want_bai) {
        throw CliError{kExitValidation, "--method must include hdr or bai"};
      }
      bd::BreakEstimate est = run_estimator(data, cs_opts, cs_pi);
      json j;
      j["estimate"] = estimate_to_json(est);
      bd::LimitSimConfig sim;
      sim.n_draws = cs_draws;
      sim.n_grid = cs_grid;
      sim.pi = cs_pi;
      sim.seed = cs_seed;
      sim.workers = cs_workers;
      try {
        bd::PluginParams params = bd::compute_plugins(data, est);
        j["plugins"] = plugins_to_json(params);
        if (want_hdr) {
          bd::LimitDraws draws =
              cs_general ? bd::simulate_general(data, est, params, sim)
                         : bd::simulate_stationary(params, sim);
          if (!cs_draws_out.empty()) bd::export_draws_csv(draws, cs_draws_out);
          j["hdr"] = set_to_json(bd::hdr_confidence_set(
              draws, est, params, cs_alpha, data.T(), cs_edge));
        }
        if (want_bai) {
          bd::BaiOptions bo;
          bo.edge_trim = cs_edge;
          j["bai"] = set_to_json(
              bd::bai_confidence_interval(est, data, cs_alpha, bo));
        }
        j["weak_identification"] = false;
      } catch (const bd::WeakIdentification&) {
        bd::ConfidenceSet fb = bd::full_range_set(cs_alpha, data.T(), cs_edge,
                                                  bd::CsMethod::hdr);
        if (want_hdr) j["hdr"] = set_to_json(fb);
        if (want_bai) {
          fb.method = bd::CsMethod::bai;
          j["bai"] = set_to_json(fb);
        }
        j["weak_identification"] = true;
      }
      write_text(cs_opts.output, j.dump(2) + "\n");
      return kExitOk;
    }

    if (cmd_dn->parsed()) {
      if (!(dn_lambda0 > dn_pi && dn_lambda0 < 1.0 - dn_pi)) {
        throw CliError{kExitValidation, "lambda0 must lie in (pi, 1-pi)"};
      }
      if (dn_rho2 <= 0.0) {
        throw CliError{kExitValidation, "rho2 must be positive"};
      }
      const double lo = dn_rho2 * dn_span * (dn_pi - dn_lambda0);
      const double hi = dn_rho2 * dn_span * (1.0 - dn_pi - dn_lambda0);
      bd::LimitSimConfig sim;
      sim.n_draws = dn_draws;
      sim.n_grid = dn_grid;
      sim.pi = dn_pi;
      sim.seed = dn_seed;
      sim.workers = dn_workers;
      std::vector<double> draws =
          bd::simulate_vlaw_draws(lo, hi, dn_xi1, dn_xi2, sim);
      if (!dn_draws_out.empty()) {
        bd::LimitDraws ld;
        ld.draws = draws;
        ld.domain_lo = lo;
        ld.domain_hi = hi;
        bd::export_draws_csv(ld, dn_draws_out);
      }
      bd::DensityEstimate dens(draws);
      std::ostringstream os;
      os.precision(12);
      os << "x,density\n";
      for (int i = 0; i < dn_points; ++i) {
        const double x = lo + (hi - lo) * i / (dn_points - 1);
        os << x << "," << dens.eval(x) << "\n";
      }
      write_text(dn_output, os.str());
      return kExitOk;
    }

    if (cmd_mc->parsed()) {
      if (mc_reps <= 0) throw CliError{kExitValidation, "reps must be > 0"};
      bd::DgpModel model;
      try {
        model = bd::parse_model(mc_model);
      } catch (const bd::InvalidSpec& e) {
        throw CliError{kExitValidation, e.what()};
      }
      const bool want_hdr =
          std::find(mc_methods.begin(), mc_methods.end(), "hdr") !=
          mc_methods.end();
      const bool want_bai =
          std::find(mc_methods.begin(), mc_methods.end(), "bai") !=
          mc_methods.end();

      std::set<std::string> done;
      std::ostringstream table;
      table << "model,lambda0,delta0,method,reps,coverage,avg_length,"
               "supw_rejection,failures\n";
      if (mc_resume && !mc_output.empty() &&
          std::filesystem::exists(mc_output)) {
        std::ifstream f(mc_output);
        std::string line;
        std::getline(f, line);  // header
        table.str("");
        table << line << "\n";
        while (std::getline(f, line)) {
          if (line.empty()) continue;
          table << line << "\n";
          std::stringstream ss(line);
          std::string m, l0, d0;
          std::getline(ss, m, ',');
          std::getline(ss, l0, ',');
          std::getline(ss, d0, ',');
          done.insert(m + "," + l0 + "," + d0);
        }
      }

      json cells = json::array();
      for (double l0 : mc_lambdas) {
        for (double d0 : mc_deltas) {
          std::ostringstream key;
          key << mc_model << "," << l0 << "," << d0;
          if (done.count(key.str())) continue;
          bd::McRequest req;
          req.spec.model = model;
          req.spec.lambda0 = l0;
          req.spec.delta0 = d0;
          req.spec.seed = mc_seed;
          req.spec.beta0 = mc_beta0 >= 0.0
                               ? mc_beta0
                               : (req.spec.predictable() ? 0.0 : 1.0);
          req.reps = mc_reps;
          req.alpha = mc_alpha;
          req.run_hdr = want_hdr;
          req.run_bai = want_bai;
          req.sim.n_draws = mc_draws;
          req.sim.n_grid = mc_grid;
          req.sim.pi = mc_pi;
          req.workers = mc_workers;
          bd::McCell cell = bd::run_cell(req);
          auto emit = [&](const std::string& method, double cov, double len) {
            table << mc_model << "," << l0 << "," << d0 << "," << method
                  << "," << mc_reps << "," << cov << "," << len << ","
                  << cell.supw_rejection << "," << cell.failures << "\n";
          };
          if (want_hdr) emit("hdr", cell.coverage_hdr, cell.avg_length_hdr);
          if (want_bai) emit("bai", cell.coverage_bai, cell.avg_length_bai);
          if (!mc_output.empty()) {
            // Flush after each cell so long runs are resumable.
            std::ofstream f(mc_output);
            if (!f) throw CliError{kExitIo, "cannot open " + mc_output};
            f << table.str();
          }
          json jc;
          jc["model"] = mc_model;
          jc["lambda0"] = l0;
          jc["delta0"] = d0;
          jc["reps"] = mc_reps;
          jc["coverage_hdr"] = cell.coverage_hdr;
          jc["avg_length_hdr"] = cell.avg_length_hdr;
          jc["coverage_bai"] = cell.coverage_bai;
          jc["avg_length_bai"] = cell.avg_length_bai;
          jc["supw_rejection"] = cell.supw_rejection;
          jc["failures"] = cell.failures;
          cells.push_back(jc);
        }
      }
      if (mc_output.empty()) std::cout << table.str();
      if (!mc_json_out.empty()) {
        write_text(mc_json_out, cells.dump(2) + "\n");
      }
      return kExitOk;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const bd::DegenerateDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const bd::DegenerateDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const bd::InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const bd::InvalidData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const bd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitOk;
}
