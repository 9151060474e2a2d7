#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qvs/field.hpp"
#include "qvs/qve.hpp"

namespace qvs {

enum class Formulation { Chi, Fgh, Bogoliubov };

const char* to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct SolverSettings {
  /// Defaults are the oracle tolerances: tight enough that the formulation
  /// constraints hold to 1e-8 along any trajectory.  Production sweeps
  /// typically relax rel_tol to 1e-8 but keep abs_tol well below the
  /// smallest F of interest, since abs_tol sets the noise floor of the
  /// spectrum tails.
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  long max_steps = 4'000'000;
  double envelope_cut = 7.0;
  Formulation formulation = Formulation::Fgh;
  bool record_trajectory = false;
  /// When > 0 together with record_trajectory, the solver lands on this many
  /// uniformly spaced times and records only there (for matched-time
  /// comparisons); otherwise it records every accepted step.
  int n_samples = 0;
  /// Optional window override; NaN means derive from envelope_cut.
  double t_start_override = std::numeric_limits<double>::quiet_NaN();
  double t_end_override = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
  double start_time(const FieldConfig& f) const;
  double end_time(const FieldConfig& f) const;
};

struct TrajectorySample {
  double t;
  double F;
  double drift;
};

struct ModeResult {
  double F_inf = 0.0;
  /// Max over accepted steps of the formulation's constraint violation.
  double invariant_drift = 0.0;
  long n_steps = 0;
  long n_rejected = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  /// |F(t_end) - F(t_end - tau_min/10)|: late-time settling check.
  double asymptotic_residual = 0.0;
  std::vector<TrajectorySample> trajectory;
};

/// Integrate one momentum mode from the adiabatic vacuum through the pulse.
/// The vector potential is carried as part of the ODE state (dA/dt = -E),
/// so every formulation is self-contained; accepted steps are capped at
/// 0.9 * pi / (4 omega) to resolve the 2 omega oscillation.
ModeResult solve_mode(const FieldConfig& field, const ModeCoordinates& mode,
                      const SolverSettings& settings);

struct AllFormulationsResult {
  ModeResult chi, fgh, bogoliubov;
  double discrepancy(Formulation a, Formulation b) const;
  double max_pairwise_discrepancy() const;
};

/// Run all three formulations on the same mode and report pairwise
/// |F_inf(a) - F_inf(b)|; the production equivalence oracle.
AllFormulationsResult solve_mode_all(const FieldConfig& field,
                                     const ModeCoordinates& mode,
                                     SolverSettings settings);

}  // namespace qvs
