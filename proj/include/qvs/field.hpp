#pragma once

#include <vector>

#include "qvs/errors.hpp"
#include "qvs/vec.hpp"

namespace qvs {

/// One Gaussian-enveloped pulse, polarized in the x-y plane:
///   E(t) = E1 exp(-u^2/2tau^2) (cos(omega u + phase), delta sin(omega u + phase), 0),
/// with u = t - delay and E1 = E01 / sqrt(1 + delta^2), so that total pulse
/// energy is independent of the ellipticity delta.  Units: m = 1, field
/// strengths in units of the critical field.
struct EllipticPulse {
  double E01 = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double tau = 1.0;
  double delay = 0.0;
  double phase = 0.0;

  /// E1 = E01 / sqrt(1 + delta^2); derived, never stored.
  double amplitude() const;

  void validate() const;
};

/// Linear superposition of pulses.  Evaluation is pure; the struct carries
/// no mutable state.
struct FieldConfig {
  std::vector<EllipticPulse> pulses;

  void validate() const;

  /// Time window outside which every envelope is below exp(-cut^2/2) of its
  /// peak.  The default cut of 7 puts the truncated tails below 2.3e-11.
  double t_start(double envelope_cut = 7.0) const;
  double t_end(double envelope_cut = 7.0) const;

  /// Largest carrier frequency and longest duration over pulses.
  double max_omega() const;
  double max_tau() const;
};

Vec3 eval_field(const FieldConfig& f, double t);

/// Analytic continuation of eval_field.  Restricted to the real axis it
/// reproduces eval_field bitwise (shared evaluation template).  Throws
/// FieldOverflowError when the continued envelope exp(+Im(t)^2/2tau^2)
/// leaves floating-point range.
Vec3c eval_field_complex(const FieldConfig& f, cplx t);

/// Vector potential A(t) on a real-time grid in temporal gauge with
/// A(t_start) = 0, cubic-Hermite interpolated (derivative -E is exact at
/// the nodes).  Built by per-cell Gauss-Kronrod quadrature with adaptive
/// cell bisection.
class PotentialTable {
 public:
  double t_min() const { return t_[0]; }
  double t_max() const { return t_.back(); }
  Vec3 eval(double t) const;

  /// Fixed cubic Hermite.
  int interpolation_order() const { return 3; }
  /// Accumulated quadrature error bound over all cells.
  double accuracy() const { return accuracy_; }
  std::size_t cell_count() const { return t_.size() - 1; }

 private:
  friend PotentialTable build_potential(const FieldConfig&, double, double, double);

  std::vector<double> t_;       // cell boundaries, ascending
  std::vector<double> ax_, ay_; // A at boundaries (Az = 0 identically)
  std::vector<double> ex_, ey_; // E at boundaries (dA/dt = -E exact there)
  double accuracy_ = 0.0;
};

PotentialTable build_potential(const FieldConfig& f, double t0, double t1,
                               double tol = 1e-12);

/// A(t) for complex t: interpolated table value at the real anchor plus an
/// adaptive complex-path quadrature of -E along the straight segment from
/// the anchor to t.  Path independence holds because E is entire.
Vec3c eval_potential_complex(const FieldConfig& f, const PotentialTable& table,
                             cplx t, double anchor);

/// Adiabaticity parameter gamma = m omega / |q E1| of a single pulse.
double keldysh_gamma(const EllipticPulse& p, double m = 1.0, double q = -1.0);

}  // namespace qvs
