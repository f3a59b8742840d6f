// Regenerates core/src/generated_constants.inc: simulated quantiles of the
// classical break-date argmax law and sup-Wald critical values.
//
//   breakdate_gen_constants [--paths N] [--seed S] > generated_constants.inc

#include <cstdint>
#include <cstring>
#include <future>
#include <iostream>
#include <vector>

#include "breakdate/argmax_law.hpp"

int main(int argc, char** argv) {
  int paths = 300000;
  std::uint64_t seed = 20240801;
  for (int i = 1; i < argc - 1; ++i) {
    if (std::strcmp(argv[i], "--paths") == 0) paths = std::atoi(argv[i + 1]);
    if (std::strcmp(argv[i], "--seed") == 0) seed = std::atoll(argv[i + 1]);
  }

  const double probs[] = {0.950, 0.975, 0.995};
  std::vector<std::future<double>> argmax_jobs;
  for (double p : probs) {
    argmax_jobs.push_back(std::async(std::launch::async, [=] {
      return breakdate::simulate_argmax_quantile(p, 150.0, paths, 8192, seed);
    }));
  }

  struct Combo {
    double trim;
    int p;
  };
  const Combo combos[] = {{0.15, 1}, {0.10, 1}, {0.05, 1}, {0.15, 2}, {0.15, 3}};
  const double levels[] = {0.10, 0.05, 0.01};
  std::vector<std::future<std::vector<double>>> sw_jobs;
  for (const Combo& c : combos) {
    sw_jobs.push_back(std::async(std::launch::async, [=] {
      std::vector<double> out;
      for (double lv : levels) {
        out.push_back(breakdate::simulate_sup_wald_cv(lv, c.trim, c.p, paths,
                                                      3000, seed + c.p));
      }
      return out;
    }));
  }

  std::cout << "// Generated by tools/gen_constants; do not edit by hand.\n"
            << "// Regenerate with: breakdate_gen_constants > "
               "core/src/generated_constants.inc\n"
            << "// paths=" << paths << " seed=" << seed << "\n\n";
  std::cout << "struct ArgmaxQuantileRow {\n  double prob;\n  double value;\n"
            << "};\n\nstruct SupWaldCvRow {\n  double level;\n  double trim;\n"
            << "  int p;\n  double value;\n};\n\n";

  std::cout.precision(6);
  std::cout << "constexpr ArgmaxQuantileRow kArgmaxQuantiles[] = {\n";
  for (std::size_t i = 0; i < 3; ++i) {
    std::cout << "    {" << probs[i] << ", " << argmax_jobs[i].get() << "},\n";
  }
  std::cout << "};\n\nconstexpr SupWaldCvRow kSupWaldCv[] = {\n";
  for (std::size_t i = 0; i < std::size(combos); ++i) {
    std::vector<double> vals = sw_jobs[i].get();
    for (std::size_t j = 0; j < 3; ++j) {
      std::cout << "    {" << levels[j] << ", " << combos[i].trim << ", "
                << combos[i].p << ", " << vals[j] << "},\n";
    }
  }
  std::cout << "};\n";
  return 0;
}
