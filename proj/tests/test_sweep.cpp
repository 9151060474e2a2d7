#include <cmath>
#include <cstring>

#include "doctest.h"
#include "qvs/sweep.hpp"

using namespace qvs;
using doctest::Approx;

namespace {

FieldConfig reference_pulse() {
  return {{{0.1 * M_SQRT2, 0.0, 0.1, 100.0, 0.0, 0.0}}};
}

SolverSettings tol(double t) {
  SolverSettings s;
  s.rel_tol = s.abs_tol = t;
  return s;
}

MomentumGrid square(double half, int n, double kz = 0.0) {
  return {-half, half, n, -half, half, n, kz};
}

/// Spectrum with values filled from a closed-form function of (kx, ky).
template <class Fn>
Spectrum synthetic(const MomentumGrid& g, Fn&& fn) {
  Spectrum s;
  s.grid = g;
  s.values.resize(g.size());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      s.values[g.index(i, j)] = fn(g.kx(i), g.ky(j));
  return s;
}

}  // namespace

TEST_CASE("sweep: zero-amplitude field yields an exactly zero spectrum") {
  const FieldConfig zero{{{0.0, 0.0, 1.0, 1.0, 0.0, 0.0}}};
  const Spectrum s = compute_spectrum(zero, square(1.0, 6), tol(1e-8));
  REQUIRE(s.diag.clean());
  for (double v : s.values) CHECK(v == 0.0);
  const DensityResult d = number_density(s);
  CHECK(d.value == 0.0);
  CHECK_FALSE(d.truncation_warning);
}

TEST_CASE("sweep: parallel and serial kernels agree bit for bit") {
  const MomentumGrid g = square(0.8, 7);
  const SolverSettings s = tol(1e-8);
  const Spectrum ser = compute_spectrum_serial(reference_pulse(), g, s);
  const Spectrum par2 = compute_spectrum(reference_pulse(), g, s, {}, 2);
  const Spectrum par8 = compute_spectrum(reference_pulse(), g, s, {}, 8);
  REQUIRE(ser.values.size() == par2.values.size());
  CHECK(std::memcmp(ser.values.data(), par2.values.data(),
                    ser.values.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(ser.values.data(), par8.values.data(),
                    ser.values.size() * sizeof(double)) == 0);
  CHECK(ser.A_end.x == par2.A_end.x);
  CHECK(ser.diag.total_steps == par2.diag.total_steps);
}

TEST_CASE("density: trapezoid rule is exact for bilinear data") {
  // On a symmetric grid the odd terms integrate to zero and the nodal
  // trapezoid sum reproduces the a * area contribution exactly.
  const MomentumGrid g{-1.0, 1.0, 9, -2.0, 2.0, 11, 0.0};
  const double a = 0.37;
  const Spectrum s = synthetic(
      g, [&](double kx, double ky) { return a + 0.2 * kx - 0.1 * ky + 0.05 * kx * ky; });
  const DensityResult d = number_density(s);
  CHECK(d.value == Approx(a * 8.0 / (4.0 * M_PI * M_PI)).epsilon(1e-14));
  CHECK(d.truncation_warning);  // the synthetic data does not decay at edges
}

TEST_CASE("density: compactly supported data raises no truncation warning") {
  const MomentumGrid g = square(1.0, 33);
  const Spectrum s = synthetic(g, [](double kx, double ky) {
    const double r2 = kx * kx + ky * ky;
    return r2 < 0.25 ? (0.25 - r2) : 0.0;
  });
  const DensityResult d = number_density(s);
  CHECK(d.value > 0.0);
  CHECK_FALSE(d.truncation_warning);
}

TEST_CASE("density: refusal on dirty diagnostics") {
  Spectrum s = synthetic(square(1.0, 5), [](double, double) { return 1.0; });
  s.diag.failures.push_back({0, 0, "synthetic node failure"});
  CHECK_THROWS_AS((void)number_density(s), Error);
}

TEST_CASE("density: grid refinement changes the physical value only mildly") {
  const SolverSettings s = tol(1e-8);
  const Spectrum coarse = compute_spectrum(reference_pulse(), square(1.0, 13), s);
  const Spectrum fine = compute_spectrum(reference_pulse(), square(1.0, 25), s);
  REQUIRE(coarse.diag.clean());
  REQUIRE(fine.diag.clean());
  const double n_coarse = number_density(coarse).value;
  const double n_fine = number_density(fine).value;
  CHECK(n_fine > 0.0);
  CHECK(std::abs(n_fine - n_coarse) <= 0.2 * n_fine);
}

TEST_CASE("symmetry: residual is the peak-relative worst mirror defect") {
  const MomentumGrid g = square(1.0, 9);
  Spectrum s = synthetic(g, [](double, double) { return 0.0; });
  CHECK(symmetry_residual(s, MirrorAxis::Kx) == 0.0);  // peak == 0 short-circuit

  s.values[g.index(1, 3)] = 2.0;  // (kx, ky) = (-0.75, -0.25)
  s.values[g.index(7, 3)] = 1.0;  // its kx mirror, half the height
  CHECK(symmetry_residual(s, MirrorAxis::Kx) == Approx(0.5));  // |2 - 1| / 2
  CHECK(symmetry_residual(s, MirrorAxis::Ky) == Approx(1.0));  // |2 - 0| / 2
}

TEST_CASE("symmetry: asymmetric axis range is rejected") {
  const Spectrum s =
      synthetic({-1.0, 2.0, 5, -1.0, 1.0, 5, 0.0}, [](double, double) { return 1.0; });
  CHECK_THROWS_AS((void)symmetry_residual(s, MirrorAxis::Kx), GridError);
  CHECK_NOTHROW((void)symmetry_residual(s, MirrorAxis::Ky));
}

TEST_CASE("symmetry: linearly polarized spectrum is ky-even") {
  const Spectrum s = compute_spectrum(reference_pulse(), square(1.0, 17), tol(1e-8));
  REQUIRE(s.diag.clean());
  CHECK(symmetry_residual(s, MirrorAxis::Ky) <= 1e-4);
}

TEST_CASE("azimuthal: profile and mode extraction on synthetic rings") {
  const MomentumGrid g = square(1.0, 129);
  const Spectrum flat = synthetic(g, [](double, double) { return 3.0; });
  const std::vector<double> pf = azimuthal_profile(flat, 0.5, 0.1);
  REQUIRE(pf.size() == 256);
  for (double v : pf) CHECK(v == Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)dominant_azimuthal_mode(pf), FlatProfileError);

  const Spectrum ring8 = synthetic(g, [](double kx, double ky) {
    return 1.0 + 0.5 * std::cos(8.0 * std::atan2(ky, kx));
  });
  CHECK(dominant_azimuthal_mode(azimuthal_profile(ring8, 0.5, 0.05)) == 8);
}

TEST_CASE("azimuthal: ties resolve to the lowest mode") {
  std::vector<double> prof(256);
  for (int j = 0; j < 256; ++j) {
    const double phi = 2.0 * M_PI * j / 256;
    prof[j] = 5.0 + std::cos(3.0 * phi) + std::cos(7.0 * phi);
  }
  CHECK(dominant_azimuthal_mode(prof) == 3);
}

TEST_CASE("azimuthal: band and profile preconditions") {
  const Spectrum s = synthetic(square(1.0, 33), [](double, double) { return 1.0; });
  CHECK_THROWS_AS((void)azimuthal_profile(s, 2.0, 0.1), GridError);   // off grid
  CHECK_THROWS_AS((void)azimuthal_profile(s, 0.5, 0.6), GridError);   // width >= r0
  CHECK_THROWS_AS((void)azimuthal_profile(s, 0.5, 0.1, 32), GridError);
  CHECK_THROWS_AS((void)dominant_azimuthal_mode(std::vector<double>(16, 1.0)),
                  GridError);
}

TEST_CASE("azimuthal: ring center follows the residual potential") {
  const MomentumGrid g = square(1.0, 129);
  Spectrum s = synthetic(g, [](double kx, double ky) {
    const double dx = kx - 0.2, dy = ky;
    return 1.0 + 0.5 * std::cos(6.0 * std::atan2(dy, dx));
  });
  s.charge = -1.0;
  s.A_end = {-0.2, 0.0, 0.0};  // center = charge * A_end = (0.2, 0)
  CHECK(dominant_azimuthal_mode(azimuthal_profile(s, 0.4, 0.05)) == 6);
}

TEST_CASE("grid: validation and addressing") {
  CHECK_THROWS_AS(square(1.0, 1).validate(), GridError);
  CHECK_THROWS_AS((MomentumGrid{1.0, -1.0, 4, -1.0, 1.0, 4, 0.0}).validate(),
                  GridError);
  const MomentumGrid g{-1.0, 1.0, 5, 0.0, 2.0, 3, 0.25};
  g.validate();
  CHECK(g.kx(0) == -1.0);
  CHECK(g.kx(4) == 1.0);
  CHECK(g.ky(1) == Approx(1.0));
  CHECK(g.size() == std::size_t(15));
  CHECK(g.index(2, 1) == 2 * 3 + 1);
}

TEST_CASE("scan: a single-value scan reproduces the direct computation") {
  const MomentumGrid g = square(0.6, 5);
  const SolverSettings s = tol(1e-8);
  const ScanTable t =
      parameter_scan(reference_pulse(), "pulses[0].omega", {0.1}, g, s);
  REQUIRE(t.rows.size() == 1);
  REQUIRE_FALSE(t.rows[0].failed);
  const Spectrum direct = compute_spectrum(reference_pulse(), g, s);
  CHECK(t.rows[0].density == number_density(direct).value);
  CHECK(t.rows[0].peak_F == direct.peak());
  CHECK(t.rows[0].gamma == Approx(keldysh_gamma(reference_pulse().pulses[0])));
}

TEST_CASE("scan: values are sorted and bad rows are marked, not fatal") {
  const ScanTable t = parameter_scan(reference_pulse(), "pulses[0].tau",
                                     {20.0, -5.0, 10.0}, square(0.5, 4), tol(1e-6));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].value == -5.0);  // sorted ascending
  CHECK(t.rows[0].failed);         // tau <= 0 rejected by validation
  CHECK_FALSE(t.rows[0].error.empty());
  CHECK_FALSE(t.rows[1].failed);
  CHECK(t.rows[1].value == 10.0);
  CHECK(t.rows[2].value == 20.0);
  CHECK(t.rows[1].density > 0.0);
}

TEST_CASE("scan: parameter path validation") {
  const MomentumGrid g = square(0.5, 4);
  const SolverSettings s = tol(1e-6);
  CHECK_THROWS_AS(parameter_scan(reference_pulse(), "omega", {0.1}, g, s), ConfigError);
  CHECK_THROWS_AS(parameter_scan(reference_pulse(), "pulses[2].omega", {0.1}, g, s),
                  ConfigError);
  CHECK_THROWS_AS(parameter_scan(reference_pulse(), "pulses[0].bogus", {0.1}, g, s),
                  ConfigError);
  CHECK_THROWS_AS(parameter_scan(reference_pulse(), "pulses[x].omega", {0.1}, g, s),
                  ConfigError);
}

TEST_CASE("effective mass: closed form and monotonicity") {
  CHECK(effective_mass(0.0) == 1.0);
  CHECK(effective_mass(M_SQRT2) == Approx(M_SQRT2));
  CHECK(effective_mass(0.2) == Approx(std::sqrt(1.02)));
  CHECK(effective_mass(0.3) > effective_mass(0.2));
  CHECK(effective_mass(0.2, 2.0) == Approx(2.0 * std::sqrt(1.0 + 0.5 * 0.16)));
  CHECK_THROWS_AS(effective_mass(-0.1), ConfigError);
}
