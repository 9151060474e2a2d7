#include "qvs/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qvs/quadrature.hpp"

namespace qvs {

void MomentumGrid::validate() const {
  if (nx < 2 || ny < 2) throw GridError("grid needs at least 2 nodes per axis");
  if (!(kx_max > kx_min) || !(ky_max > ky_min))
    throw GridError("grid ranges must be increasing");
  if (!std::isfinite(kx_min) || !std::isfinite(kx_max) ||
      !std::isfinite(ky_min) || !std::isfinite(ky_max) || !std::isfinite(kz))
    throw GridError("grid bounds must be finite");
}

double Spectrum::peak() const {
  double p = 0.0;
  for (double v : values)
    if (std::isfinite(v) && v > p) p = v;
  return p;
}

namespace {

Vec3 residual_potential(const FieldConfig& field, double t0, double t1) {
  auto ef = [&field](cplx t) -> Vec3c { return eval_field_complex(field, t); };
  Vec3c inc = quad::integrate_segment(ef, cplx(t0), cplx(t1), 1e-12, 1e-15);
  return {-inc.x.real(), -inc.y.real(), 0.0};
}

struct NodeOutcome {
  double value = std::numeric_limits<double>::quiet_NaN();
  double drift = 0.0;
  double asym = 0.0;
  long steps = 0;
  std::string error;  // empty on success
};

NodeOutcome run_node(const FieldConfig& field, const MomentumGrid& grid,
                     const SolverSettings& settings, ModeCoordinates particle,
                     int i, int j) {
  NodeOutcome out;
  particle.k = {grid.kx(i), grid.ky(j), grid.kz};
  try {
    ModeResult r = solve_mode(field, particle, settings);
    out.value = r.F_inf;
    out.drift = r.invariant_drift;
    out.asym = r.asymptotic_residual;
    out.steps = r.n_steps + r.n_rejected;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

Spectrum assemble(const FieldConfig& field, const MomentumGrid& grid,
                  const SolverSettings& settings, ModeCoordinates particle,
                  std::vector<NodeOutcome>&& nodes) {
  Spectrum s;
  s.grid = grid;
  s.charge = particle.q;
  s.settings = settings;
  s.values.resize(grid.size());
  // Ordered (index-addressed) reduction: identical for any worker count.
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      const NodeOutcome& n = nodes[grid.index(i, j)];
      s.values[grid.index(i, j)] = n.value;
      s.diag.max_drift = std::max(s.diag.max_drift, n.drift);
      s.diag.max_asymptotic_residual =
          std::max(s.diag.max_asymptotic_residual, n.asym);
      s.diag.total_steps += n.steps;
      if (!n.error.empty()) s.diag.failures.push_back({i, j, n.error});
    }
  s.A_end = residual_potential(field, settings.start_time(field),
                               settings.end_time(field));
  return s;
}

}  // namespace

Spectrum compute_spectrum(const FieldConfig& field, const MomentumGrid& grid,
                          const SolverSettings& settings,
                          ModeCoordinates particle, int threads) {
  field.validate();
  grid.validate();
  settings.validate();
  std::vector<NodeOutcome> nodes(grid.size());
  const long total = long(grid.size());
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
  for (long idx = 0; idx < total; ++idx) {
    const int i = int(idx / grid.ny), j = int(idx % grid.ny);
    nodes[idx] = run_node(field, grid, settings, particle, i, j);
  }
#else
  (void)threads;
  for (long idx = 0; idx < total; ++idx) {
    const int i = int(idx / grid.ny), j = int(idx % grid.ny);
    nodes[idx] = run_node(field, grid, settings, particle, i, j);
  }
#endif
  return assemble(field, grid, settings, particle, std::move(nodes));
}

Spectrum compute_spectrum_serial(const FieldConfig& field, const MomentumGrid& grid,
                                 const SolverSettings& settings,
                                 ModeCoordinates particle) {
  field.validate();
  grid.validate();
  settings.validate();
  std::vector<NodeOutcome> nodes(grid.size());
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      nodes[grid.index(i, j)] = run_node(field, grid, settings, particle, i, j);
  return assemble(field, grid, settings, particle, std::move(nodes));
}

DensityResult number_density(const Spectrum& spec) {
  if (!spec.diag.clean())
    throw Error("number density requires a spectrum with clean diagnostics");
  const MomentumGrid& g = spec.grid;
  const double dx = (g.kx_max - g.kx_min) / (g.nx - 1);
  const double dy = (g.ky_max - g.ky_min) / (g.ny - 1);
  double sum = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double wx = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      const double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
      row += wy * spec.values[g.index(i, j)];
    }
    sum += wx * row;
  }
  DensityResult r;
  r.value = sum * dx * dy / (4.0 * M_PI * M_PI);

  const double peak = spec.peak();
  double edge = 0.0;
  for (int i = 0; i < g.nx; ++i)
    edge = std::max({edge, spec.values[g.index(i, 0)],
                     spec.values[g.index(i, g.ny - 1)]});
  for (int j = 0; j < g.ny; ++j)
    edge = std::max({edge, spec.values[g.index(0, j)],
                     spec.values[g.index(g.nx - 1, j)]});
  r.truncation_warning = peak > 0.0 && edge > 1e-6 * peak;
  return r;
}

DensityResult number_density_full3d(const FieldConfig& field, MomentumGrid xy_grid,
                                    const SolverSettings& settings,
                                    ModeCoordinates particle, double kz_max,
                                    double rel_tol, int max_slices, int threads) {
  if (!(kz_max > 0.0)) throw GridError("kz_max must be positive");
  int slices = 0;
  bool truncated = false;
  std::map<double, double> cache;
  auto slice_density = [&](double kz) {
    auto it = cache.find(kz);
    if (it != cache.end()) return it->second;
    if (++slices > max_slices)
      throw QuadratureError("3D density slice budget exhausted");
    MomentumGrid g = xy_grid;
    g.kz = kz;
    Spectrum s = compute_spectrum(field, g, settings, particle, threads);
    if (!s.diag.clean())
      throw Error("3D density: slice at kz = " + std::to_string(kz) + " failed");
    DensityResult d = number_density(s);
    truncated = truncated || d.truncation_warning;
    cache.emplace(kz, d.value);
    return d.value;
  };

  // Adaptive Simpson on [0, kz_max]; F is even in kz.
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double a, double b, double fa, double fm, double fb, double whole,
          int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = slice_density(lm), frm = slice_density(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) throw QuadratureError("3D density quadrature depth exhausted");
    if (std::abs(left + right - whole) <=
        15.0 * rel_tol * std::max(std::abs(left + right), 1e-300))
      return left + right + (left + right - whole) / 15.0;
    return rec(a, m, fa, flm, fm, left, depth - 1) +
           rec(m, b, fm, frm, fb, right, depth - 1);
  };

  const double f0 = slice_density(0.0), fm = slice_density(0.5 * kz_max),
               f1 = slice_density(kz_max);
  const double whole = kz_max / 6.0 * (f0 + 4.0 * fm + f1);
  const double integral = rec(0.0, kz_max, f0, fm, f1, whole, 12);

  DensityResult r;
  r.value = 2.0 * integral / (2.0 * M_PI);  // kz > 0 doubled by symmetry
  r.truncation_warning = truncated || f1 > 1e-6 * std::max(f0, 1e-300);
  return r;
}

double symmetry_residual(const Spectrum& spec, MirrorAxis axis) {
  const MomentumGrid& g = spec.grid;
  const double lo = axis == MirrorAxis::Kx ? g.kx_min : g.ky_min;
  const double hi = axis == MirrorAxis::Kx ? g.kx_max : g.ky_max;
  if (std::abs(lo + hi) > 1e-12 * (hi - lo))
    throw GridError("mirrored axis range must be symmetric about zero");
  const double peak = spec.peak();
  if (peak == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const std::size_t a = g.index(i, j);
      const std::size_t b = axis == MirrorAxis::Kx
                                ? g.index(g.nx - 1 - i, j)
                                : g.index(i, g.ny - 1 - j);
      worst = std::max(worst, std::abs(spec.values[a] - spec.values[b]));
    }
  return worst / peak;
}

namespace {

double bilinear(const Spectrum& spec, double kx, double ky) {
  const MomentumGrid& g = spec.grid;
  const double fx = (kx - g.kx_min) / (g.kx_max - g.kx_min) * (g.nx - 1);
  const double fy = (ky - g.ky_min) / (g.ky_max - g.ky_min) * (g.ny - 1);
  if (fx < 0.0 || fy < 0.0 || fx > g.nx - 1 || fy > g.ny - 1)
    throw GridError("azimuthal band leaves the grid");
  const int i = std::min(int(fx), g.nx - 2);
  const int j = std::min(int(fy), g.ny - 2);
  const double sx = fx - i, sy = fy - j;
  return (1 - sx) * (1 - sy) * spec.values[g.index(i, j)] +
         sx * (1 - sy) * spec.values[g.index(i + 1, j)] +
         (1 - sx) * sy * spec.values[g.index(i, j + 1)] +
         sx * sy * spec.values[g.index(i + 1, j + 1)];
}

}  // namespace

std::vector<double> azimuthal_profile(const Spectrum& spec, double r0,
                                      double half_width, int n_phi, int n_r) {
  if (n_phi < 64) throw GridError("azimuthal profile needs >= 64 samples");
  if (n_r < 1 || !(r0 > 0.0) || half_width < 0.0 || half_width >= r0)
    throw GridError("bad radial band");
  // Ring center: canonical-k image of zero kinetic momentum.
  const double cx = spec.charge * spec.A_end.x;
  const double cy = spec.charge * spec.A_end.y;
  std::vector<double> prof(n_phi, 0.0);
  for (int ip = 0; ip < n_phi; ++ip) {
    const double phi = 2.0 * M_PI * ip / n_phi;
    double acc = 0.0;
    for (int jr = 0; jr < n_r; ++jr) {
      const double r =
          n_r == 1 ? r0
                   : r0 - half_width + 2.0 * half_width * jr / double(n_r - 1);
      acc += bilinear(spec, cx + r * std::cos(phi), cy + r * std::sin(phi));
    }
    prof[ip] = acc / n_r;
  }
  return prof;
}

int dominant_azimuthal_mode(const std::vector<double>& profile) {
  const int n = int(profile.size());
  if (n < 64) throw GridError("profile too short for mode analysis");
  double mean = 0.0;
  for (double v : profile) mean += v;
  mean /= n;
  const int m_max = n / 2;
  std::vector<double> amp(m_max + 1, 0.0);
  for (int m = 1; m <= m_max; ++m) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ph = 2.0 * M_PI * m * j / n;
      re += profile[j] * std::cos(ph);
      im -= profile[j] * std::sin(ph);
    }
    amp[m] = 2.0 * std::hypot(re, im) / n;
  }
  double best = 0.0;
  for (int m = 1; m <= m_max; ++m) best = std::max(best, amp[m]);
  if (best <= 1e-3 * std::abs(mean))
    throw FlatProfileError("no azimuthal mode above the noise floor");
  for (int m = 1; m <= m_max; ++m)
    if (amp[m] >= 0.99 * best) return m;  // ties resolve to the lowest mode
  return 0;
}

namespace {

double* resolve_pulse_field(FieldConfig& f, const std::string& path, int& pulse_idx) {
  const std::string prefix = "pulses[";
  if (path.rfind(prefix, 0) != 0)
    throw ConfigError("scan parameter must look like pulses[i].<name>");
  std::size_t close = path.find(']', prefix.size());
  if (close == std::string::npos)
    throw ConfigError("malformed scan parameter '" + path + "'");
  int idx = -1;
  try {
    idx = std::stoi(path.substr(prefix.size(), close - prefix.size()));
  } catch (...) {
    throw ConfigError("malformed scan parameter '" + path + "'");
  }
  if (idx < 0 || std::size_t(idx) >= f.pulses.size())
    throw ConfigError("scan parameter pulse index out of range");
  if (close + 1 >= path.size() || path[close + 1] != '.')
    throw ConfigError("malformed scan parameter '" + path + "'");
  const std::string name = path.substr(close + 2);
  pulse_idx = idx;
  EllipticPulse& p = f.pulses[idx];
  if (name == "E01") return &p.E01;
  if (name == "delta") return &p.delta;
  if (name == "omega") return &p.omega;
  if (name == "tau") return &p.tau;
  if (name == "delay") return &p.delay;
  if (name == "phase") return &p.phase;
  throw ConfigError("unknown pulse field '" + name + "'");
}

}  // namespace

ScanTable parameter_scan(const FieldConfig& base, const std::string& parameter,
                         std::vector<double> values, const MomentumGrid& grid,
                         const SolverSettings& settings,
                         ModeCoordinates particle, int threads) {
  {
    FieldConfig probe = base;  // validate the path once, up front
    int idx;
    (void)resolve_pulse_field(probe, parameter, idx);
  }
  std::sort(values.begin(), values.end());
  ScanTable table;
  table.parameter = parameter;
  for (double v : values) {
    ScanRow row;
    row.value = v;
    try {
      FieldConfig f = base;
      int idx;
      *resolve_pulse_field(f, parameter, idx) = v;
      f.validate();
      row.gamma = keldysh_gamma(f.pulses[idx], particle.m, particle.q);
      Spectrum s = compute_spectrum(f, grid, settings, particle, threads);
      if (!s.diag.clean())
        throw Error(std::to_string(s.diag.failures.size()) + " nodes failed");
      row.density = number_density(s).value;
      row.peak_F = s.peak();
    } catch (const Error& e) {
      row.failed = true;
      row.error = e.what();
    }
    table.rows.push_back(row);
  }
  return table;
}

double effective_mass(double E01, double m) {
  if (!(E01 >= 0.0)) throw ConfigError("effective mass needs E01 >= 0");
  const double xi = m * E01;  // E_cr = 1 in internal units
  return m * std::sqrt(1.0 + 0.5 * xi * xi);
}

}  // namespace qvs
