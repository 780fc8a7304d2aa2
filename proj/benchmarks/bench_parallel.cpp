// Compares the serial reference path (jobs = 1) against the OpenMP sweep
// kernels and checks that both produce byte-identical reports.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pcn/experiments.hpp"

using namespace pcn;

namespace {

template <typename Fn>
double time_it(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-14s %10.3fs %12.3fs %8.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int jobs = 4;
#ifdef _OPENMP
  jobs = omp_get_max_threads();
#endif
  if (argc > 1) jobs = std::atoi(argv[1]);

  std::printf("sweep kernels, serial reference vs OpenMP (%d threads)\n\n", jobs);
  std::printf("%-14s %11s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    GameSweepConfig cfg;
    for (double t = 0.0; t <= 1.0; t += 0.0005) cfg.thetas.push_back(t);
    cfg.amounts = {15000, 30000, 45000, 60000};
    cfg.rates = {0.1, 0.2, 0.4};
    cfg.base.gamma = 1e-5;
    std::string serial_csv, parallel_csv;
    cfg.jobs = 1;
    const double s = time_it([&] { serial_csv = game_sweep_csv(run_game_sweep(cfg)); });
    cfg.jobs = jobs;
    const double p = time_it([&] { parallel_csv = game_sweep_csv(run_game_sweep(cfg)); });
    row("game-sweep", s, p, serial_csv == parallel_csv);
  }

  {
    ExperimentConfig cfg;
    cfg.snapshot = "synthetic";
    cfg.synthetic_nodes = 2000;
    cfg.seed = 42;
    cfg.gamma_sweep = {1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3};
    cfg.kz_grid = {{0.25, 0.025}, {0.5, 0.05}, {1.0, 0.1}};
    std::string serial_csv, parallel_csv;
    cfg.jobs = 1;
    const double s = time_it([&] { serial_csv = capacity_csv(run_capacity_experiment(cfg)); });
    cfg.jobs = jobs;
    const double p = time_it([&] { parallel_csv = capacity_csv(run_capacity_experiment(cfg)); });
    row("capacity", s, p, serial_csv == parallel_csv);
  }

  {
    ExperimentConfig cfg;
    cfg.snapshot = "synthetic";
    cfg.synthetic_nodes = 2000;
    cfg.seed = 42;
    cfg.workload = 3000;
    cfg.gamma_sweep = {1e-7, 3e-7, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3};
    std::string serial_csv, parallel_csv;
    cfg.jobs = 1;
    const double s = time_it([&] { serial_csv = success_csv(run_success_rate(cfg)); });
    cfg.jobs = jobs;
    const double p = time_it([&] { parallel_csv = success_csv(run_success_rate(cfg)); });
    row("success-rate", s, p, serial_csv == parallel_csv);
  }

  return 0;
}
