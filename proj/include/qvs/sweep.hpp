#pragma once

#include <string>
#include <vector>

#include "qvs/solve.hpp"

namespace qvs {

/// Cartesian (kx, ky) grid at fixed kz; node values are stored row-major
/// with kx as the outer (row) index: index(i, j) = i * ny + j.
struct MomentumGrid {
  double kx_min = -1.0, kx_max = 1.0;
  int nx = 2;
  double ky_min = -1.0, ky_max = 1.0;
  int ny = 2;
  double kz = 0.0;

  void validate() const;
  double kx(int i) const { return kx_min + (kx_max - kx_min) * i / double(nx - 1); }
  double ky(int j) const { return ky_min + (ky_max - ky_min) * j / double(ny - 1); }
  std::size_t index(int i, int j) const { return std::size_t(i) * ny + j; }
  std::size_t size() const { return std::size_t(nx) * ny; }
};

struct NodeFailure {
  int ix, iy;
  std::string message;
};

struct SpectrumDiagnostics {
  double max_drift = 0.0;
  double max_asymptotic_residual = 0.0;
  long total_steps = 0;
  std::vector<NodeFailure> failures;
  bool clean() const { return failures.empty(); }
};

/// Asymptotic occupation F over a momentum grid.  Failed nodes hold NaN and
/// are listed in the diagnostics; they are never silently zeroed.
struct Spectrum {
  MomentumGrid grid;
  std::vector<double> values;
  Vec3 A_end{};      // residual potential; kinetic momentum p = k - q A_end
  double charge = -1.0;
  SpectrumDiagnostics diag;
  SolverSettings settings;
  std::string config_hash;  // filled by the run layer when known

  double peak() const;
};

/// OpenMP-parallel sweep.  Nodes are independent work items written to
/// position-addressed slots, so output is bit-identical for any thread
/// count.  threads = 0 uses the runtime default.
Spectrum compute_spectrum(const FieldConfig& field, const MomentumGrid& grid,
                          const SolverSettings& settings,
                          ModeCoordinates particle = {}, int threads = 0);

/// Plain-loop reference implementation; kept for testing the parallel
/// kernel against and as the baseline in the benchmark.
Spectrum compute_spectrum_serial(const FieldConfig& field, const MomentumGrid& grid,
                                 const SolverSettings& settings,
                                 ModeCoordinates particle = {});

struct DensityResult {
  double value = 0.0;
  /// Set when boundary F exceeds 1e-6 of the peak (grid truncation).
  bool truncation_warning = false;
};

/// Trapezoid integral of F over the 2D slice, / (2pi)^2.  Requires clean
/// diagnostics.  Deterministic ordered reduction.
DensityResult number_density(const Spectrum& spec);

/// Full 3D density: adaptive Simpson over kz of 2D slice densities,
/// exploiting F(kz) = F(-kz); calls the sweep on demand per kz node.
DensityResult number_density_full3d(const FieldConfig& field, MomentumGrid xy_grid,
                                    const SolverSettings& settings,
                                    ModeCoordinates particle, double kz_max,
                                    double rel_tol = 1e-3, int max_slices = 64,
                                    int threads = 0);

enum class MirrorAxis { Kx, Ky };

/// max |F(mirror) - F| / peak under kx -> -kx or ky -> -ky.  The mirrored
/// range must be symmetric about zero so nodes map onto nodes.
double symmetry_residual(const Spectrum& spec, MirrorAxis axis);

/// Mean F over a radial band [r0 - half_width, r0 + half_width] at n_phi
/// uniform azimuth samples, bilinearly interpolated.  Radii are measured in
/// kinetic momentum, i.e. about the center k = q A_end.
std::vector<double> azimuthal_profile(const Spectrum& spec, double r0,
                                      double half_width, int n_phi = 256,
                                      int n_r = 9);

/// Index of the strongest nonzero Fourier mode of the profile; throws
/// FlatProfileError when no mode exceeds 1e-3 of the profile mean.  Ties
/// within 1% resolve to the lowest mode.
int dominant_azimuthal_mode(const std::vector<double>& profile);

struct ScanRow {
  double value = 0.0;
  double density = 0.0;
  double peak_F = 0.0;
  double gamma = 0.0;
  bool failed = false;
  std::string error;
};

struct ScanTable {
  std::string parameter;
  std::vector<ScanRow> rows;  // ordered by value
};

/// Sweep a numeric pulse parameter addressed as "pulses[i].<name>" over the
/// given values; each row records slice density, peak F and the Keldysh
/// gamma of the addressed pulse.  Row failures are recorded, not fatal.
ScanTable parameter_scan(const FieldConfig& base, const std::string& parameter,
                         std::vector<double> values, const MomentumGrid& grid,
                         const SolverSettings& settings,
                         ModeCoordinates particle = {}, int threads = 0);

/// m* = m sqrt(1 + E01^2 / 2): cycle-averaged mass shift of a linearly
/// polarized carrier at peak strength E01 (units of E_cr).
double effective_mass(double E01, double m = 1.0);

}  // namespace qvs
