// Wall-clock comparison of the OpenMP kernels against their serial reference
// paths: the sweep executor over independent runs and the random-pair
// contraction estimator.

#include <omp.h>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "tetd/analysis.hpp"
#include "tetd/envs/baird.hpp"
#include "tetd/harness/config.hpp"
#include "tetd/harness/sweep.hpp"

using namespace tetd;
namespace fs = std::filesystem;

namespace {

ExperimentConfig bench_config(const std::string& dir, int threads) {
  ExperimentConfig c;
  c.environment = "baird";
  c.setting = "prediction";
  c.algorithms = {{"truncated-etd", {2, 4}, {}, kNoProjection}};
  c.alphas = {0.0125, 0.00625, 0.003125};
  c.target_dashed = {0.06};
  c.seeds = 6;
  c.steps = 20000;
  c.eval_points = 100;
  c.output_dir = dir;
  c.threads = threads;
  return c;
}

double time_sweep(int threads) {
  const std::string dir =
      (fs::temp_directory_path() / ("tetd_bench_" + std::to_string(threads))).string();
  fs::remove_all(dir);
  const ExperimentConfig config = bench_config(dir, threads);
  const double start = omp_get_wtime();
  run_sweep(config);
  const double elapsed = omp_get_wtime() - start;
  fs::remove_all(dir);
  return elapsed;
}

}  // namespace

int main() {
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "hardware threads available: " << omp_get_max_threads() << "\n\n";

  const double serial = time_sweep(1);
  const double parallel = time_sweep(0);
  std::cout << "sweep executor (36 runs x 20k steps)\n"
            << "  serial reference: " << serial << " s\n"
            << "  openmp:           " << parallel << " s\n"
            << "  speedup:          " << serial / parallel << "x\n\n";

  // Contraction estimator on a mid-sized chain.
  const BairdEnv env = baird_env();
  const EmphasisInputs inputs =
      control_inputs(env.mdp, env.behavior, baird_target(0.1), InterestFunction::ones(14));
  const FeatureMap tabular(MatrixXd::Identity(14, 14));
  const int pairs = 2000000;
  double t0 = omp_get_wtime();
  const double f_serial = contraction_factor_estimate(inputs, tabular, 8, pairs, 7, false);
  const double serial_est = omp_get_wtime() - t0;
  t0 = omp_get_wtime();
  const double f_parallel = contraction_factor_estimate(inputs, tabular, 8, pairs, 7, true);
  const double parallel_est = omp_get_wtime() - t0;
  std::cout << "contraction estimator (" << pairs << " random pairs)\n"
            << "  serial reference: " << serial_est << " s (factor " << f_serial << ")\n"
            << "  openmp:           " << parallel_est << " s (factor " << f_parallel << ")\n"
            << "  speedup:          " << serial_est / parallel_est << "x\n";
  return 0;
}
