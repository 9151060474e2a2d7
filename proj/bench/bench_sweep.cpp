// Compares the OpenMP sweep kernel against the serial reference on a
// production-sized workload and reports timings and the value discrepancy
// (which must be exactly zero: the parallel reduction is position-addressed).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qvs/sweep.hpp"

using namespace qvs;

namespace {

double run_ms(const char* label, const Spectrum& spec, double ms) {
  std::printf("%-24s %8.1f ms   peak F = %.6e\n", label, ms, spec.peak());
  return ms;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 48;
  if (n < 2) n = 48;

  const FieldConfig field{{{0.1 * M_SQRT2, 0.0, 0.1, 100.0, 0.0, 0.0}}};
  const MomentumGrid grid{-1.0, 1.0, n, -1.0, 1.0, n, 0.0};
  SolverSettings settings;
  settings.rel_tol = settings.abs_tol = 1e-8;

  std::printf("sweep benchmark: %dx%d modes, tolerance %.0e\n", n, n,
              settings.rel_tol);
#ifdef _OPENMP
  std::printf("OpenMP max threads: %d\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP: parallel path runs serially\n\n");
#endif

  using clock = std::chrono::steady_clock;

  auto t0 = clock::now();
  const Spectrum serial = compute_spectrum_serial(field, grid, settings);
  auto t1 = clock::now();
  const double serial_ms =
      run_ms("serial reference", serial,
             std::chrono::duration<double, std::milli>(t1 - t0).count());

  auto t2 = clock::now();
  const Spectrum parallel = compute_spectrum(field, grid, settings);
  auto t3 = clock::now();
  const double parallel_ms =
      run_ms("openmp kernel", parallel,
             std::chrono::duration<double, std::milli>(t3 - t2).count());

  const bool identical =
      serial.values.size() == parallel.values.size() &&
      std::memcmp(serial.values.data(), parallel.values.data(),
                  serial.values.size() * sizeof(double)) == 0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < serial.values.size(); ++i)
    max_abs = std::max(max_abs,
                       std::abs(serial.values[i] - parallel.values[i]));

  std::printf("\nspeedup: %.2fx\n", serial_ms / parallel_ms);
  std::printf("max |serial - parallel| = %.3e (%s)\n", max_abs,
              identical ? "bit-identical" : "DIFFERS");
  return identical ? 0 : 1;
}
