// Times the coverage replication kernel in the serial reference mode
// (threads = 1) against the OpenMP team (threads = 0), and checks that the
// slot-based aggregates are bit-identical across the two schedules.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flproj/montecarlo.hpp"
#include "flproj/projection.hpp"

using namespace flproj;

namespace {

CoverageReport run_once(const ExpAConfig& cfg, int reps, int threads, double* secs) {
  ProductElement zeta =
      make_functional_shock(1, make_const(BasisSpec::fourier(cfg.J), 1.0));
  auto start = std::chrono::steady_clock::now();
  CoverageReport rep = run_coverage(cfg, {1, 3}, zeta, 0.95, reps, 42, threads);
  auto stop = std::chrono::steady_clock::now();
  *secs = std::chrono::duration<double>(stop - start).count();
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 80;
  if (reps < 10) reps = 10;
  ExpAConfig cfg = ExpAConfig::synthetic_default(250, 3);

#ifdef _OPENMP
  int team = omp_get_max_threads();
#else
  int team = 1;
#endif
  std::printf("coverage kernel, T=%d J=%d reps=%d, OpenMP team=%d\n", cfg.T, cfg.J,
              reps, team);

  double warm = 0.0;
  run_once(cfg, reps >= 20 ? 20 : reps, 1, &warm);  // warm caches

  double t_serial = 0.0, t_parallel = 0.0;
  CoverageReport serial = run_once(cfg, reps, 1, &t_serial);
  CoverageReport parallel = run_once(cfg, reps, 0, &t_parallel);

  std::printf("%-10s %10s %12s\n", "mode", "seconds", "reps/sec");
  std::printf("%-10s %10.3f %12.1f\n", "serial", t_serial, reps / t_serial);
  std::printf("%-10s %10.3f %12.1f\n", "parallel", t_parallel, reps / t_parallel);
  std::printf("speedup: %.2fx\n", t_serial / t_parallel);

  bool same = serial.cells.size() == parallel.cells.size();
  for (size_t i = 0; same && i < serial.cells.size(); ++i) {
    same = serial.cells[i].coverage == parallel.cells[i].coverage &&
           serial.cells[i].mean_k == parallel.cells[i].mean_k;
  }
  std::printf("aggregates identical across schedules: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
