#include "qvs/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvs/errors.hpp"
#include "qvs/ode.hpp"

namespace qvs {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Chi: return "chi";
    case Formulation::Fgh: return "fgh";
    case Formulation::Bogoliubov: return "bogoliubov";
  }
  return "?";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "chi") return Formulation::Chi;
  if (s == "fgh") return Formulation::Fgh;
  if (s == "bogoliubov") return Formulation::Bogoliubov;
  throw ConfigError("unknown formulation '" + s + "'");
}

void SolverSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw ConfigError("solver tolerances must be positive");
  if (max_steps <= 0) throw ConfigError("solver max_steps must be positive");
  if (!(envelope_cut > 0.0)) throw ConfigError("envelope_cut must be positive");
  if (!std::isnan(t_start_override) && !std::isnan(t_end_override) &&
      !(t_end_override > t_start_override))
    throw ConfigError("solver window must satisfy t_end > t_start");
}

double SolverSettings::start_time(const FieldConfig& f) const {
  return std::isnan(t_start_override) ? f.t_start(envelope_cut) : t_start_override;
}

double SolverSettings::end_time(const FieldConfig& f) const {
  return std::isnan(t_end_override) ? f.t_end(envelope_cut) : t_end_override;
}

double AllFormulationsResult::discrepancy(Formulation a, Formulation b) const {
  auto value = [this](Formulation f) {
    switch (f) {
      case Formulation::Chi: return chi.F_inf;
      case Formulation::Fgh: return fgh.F_inf;
      case Formulation::Bogoliubov: return bogoliubov.F_inf;
    }
    return 0.0;
  };
  return std::abs(value(a) - value(b));
}

double AllFormulationsResult::max_pairwise_discrepancy() const {
  return std::max({discrepancy(Formulation::Chi, Formulation::Fgh),
                   discrepancy(Formulation::Chi, Formulation::Bogoliubov),
                   discrepancy(Formulation::Fgh, Formulation::Bogoliubov)});
}

namespace {

struct Readout {
  int dim;          // ODE dimension including the (Ax, Ay) tail
  int a_offset;     // index of Ax in the state
  double (*value)(const double* y, const ModeCoordinates& mc);
  double (*drift)(const double* y, const ModeCoordinates& mc);
};

Vec3 state_A(const double* y, int off) { return {y[off], y[off + 1], 0.0}; }

double chi_value(const double* y, const ModeCoordinates& mc) {
  ChiState s{y[0], y[1], y[2]};
  return chi_to_fgh(s, mc, state_A(y, 3)).F;
}
double chi_drift(const double* y, const ModeCoordinates& mc) {
  ChiState s{y[0], y[1], y[2]};
  FghState f = chi_to_fgh(s, mc, state_A(y, 3));
  const double fp = 1.0 + 2.0 * f.F;
  return std::abs(fp * fp - f.G * f.G - f.H * f.H - 1.0);
}

double fgh_value(const double* y, const ModeCoordinates&) { return y[0]; }
double fgh_drift(const double* y, const ModeCoordinates&) {
  const double fp = 1.0 + 2.0 * y[0];
  return std::abs(fp * fp - y[1] * y[1] - y[2] * y[2] - 1.0);
}

double bog_value(const double* y, const ModeCoordinates&) {
  return y[2] * y[2] + y[3] * y[3];
}
double bog_drift(const double* y, const ModeCoordinates&) {
  return std::abs(y[0] * y[0] + y[1] * y[1] - y[2] * y[2] - y[3] * y[3] - 1.0);
}

Readout readout_for(Formulation f) {
  switch (f) {
    case Formulation::Chi: return {5, 3, chi_value, chi_drift};
    case Formulation::Fgh: return {5, 3, fgh_value, fgh_drift};
    case Formulation::Bogoliubov: return {7, 5, bog_value, bog_drift};
  }
  throw Error("unreachable");
}

}  // namespace

ModeResult solve_mode(const FieldConfig& field, const ModeCoordinates& mode,
                      const SolverSettings& settings) {
  field.validate();
  settings.validate();
  const double t0 = settings.start_time(field);
  const double t1 = settings.end_time(field);
  if (!(t1 > t0)) throw ConfigError("integration window is empty");

  const Readout ro = readout_for(settings.formulation);

  double y[ode::kMaxDim] = {};
  switch (settings.formulation) {
    case Formulation::Chi: {
      ChiState v = vacuum_chi(mode, Vec3{});
      y[0] = v.chi0;
      y[1] = v.chi1;
      y[2] = v.chi2;
      break;
    }
    case Formulation::Fgh:
      break;  // F = G = H = 0
    case Formulation::Bogoliubov:
      y[0] = 1.0;  // alpha = 1, beta = 0, theta = 0
      break;
  }
  // A(t_start) = 0 occupies the state tail in every formulation.

  auto rhs = [&](double t, const double* yy, double* dy) {
    const Vec3 A = state_A(yy, ro.a_offset);
    const Vec3 E = eval_field(field, t);
    switch (settings.formulation) {
      case Formulation::Chi: {
        ChiState d = chi_rhs({yy[0], yy[1], yy[2]}, mode, E, A);
        dy[0] = d.chi0;
        dy[1] = d.chi1;
        dy[2] = d.chi2;
        break;
      }
      case Formulation::Fgh: {
        FghState d = fgh_rhs({yy[0], yy[1], yy[2]}, mode, E, A);
        dy[0] = d.F;
        dy[1] = d.G;
        dy[2] = d.H;
        break;
      }
      case Formulation::Bogoliubov: {
        BogoliubovState s;
        s.alpha = {yy[0], yy[1]};
        s.beta = {yy[2], yy[3]};
        s.theta = yy[4];
        BogoliubovState d = bogoliubov_rhs(s, mode, E, A);
        dy[0] = d.alpha.real();
        dy[1] = d.alpha.imag();
        dy[2] = d.beta.real();
        dy[3] = d.beta.imag();
        dy[4] = d.theta;
        break;
      }
    }
    dy[ro.a_offset] = -E.x;
    dy[ro.a_offset + 1] = -E.y;
  };

  auto cap = [&](double /*t*/, const double* yy) {
    return 0.9 * M_PI / (4.0 * omega(mode, state_A(yy, ro.a_offset)));
  };

  ModeResult res;
  res.t_start = t0;
  res.t_end = t1;

  auto obs = [&](double t, const double* yy, double /*h*/) {
    const double d = ro.drift(yy, mode);
    if (d > res.invariant_drift) res.invariant_drift = d;
    if (settings.record_trajectory && settings.n_samples <= 0)
      res.trajectory.push_back({t, ro.value(yy, mode), d});
  };

  // Landing times: the settling checkpoint plus optional uniform samples.
  double tau_min = std::numeric_limits<double>::infinity();
  for (const auto& p : field.pulses) tau_min = std::min(tau_min, p.tau);
  const double t_check = t1 - tau_min / 10.0;

  std::vector<double> landings;
  if (settings.record_trajectory && settings.n_samples > 0) {
    for (int i = 1; i <= settings.n_samples; ++i)
      landings.push_back(t0 + (t1 - t0) * double(i) / settings.n_samples);
  }
  landings.push_back(t_check);
  landings.push_back(t1);
  std::sort(landings.begin(), landings.end());
  landings.erase(std::unique(landings.begin(), landings.end()), landings.end());

  ode::Control ctl{settings.rel_tol, settings.abs_tol, settings.max_steps, 0.0};
  double F_check = 0.0;
  double t_cur = t0;
  try {
    if (settings.record_trajectory && settings.n_samples > 0)
      res.trajectory.push_back({t0, ro.value(y, mode), ro.drift(y, mode)});
    for (double tl : landings) {
      if (!(tl > t_cur)) continue;
      ode::Stats st = ode::integrate(ro.dim, rhs, t_cur, tl, y, ctl, cap, obs);
      res.n_steps += st.accepted;
      res.n_rejected += st.rejected;
      ctl.h_init = st.h_final;
      ctl.max_steps -= st.accepted + st.rejected;
      t_cur = tl;
      if (tl == t_check) F_check = ro.value(y, mode);
      if (settings.record_trajectory && settings.n_samples > 0)
        res.trajectory.push_back({tl, ro.value(y, mode), ro.drift(y, mode)});
    }
  } catch (const ode::StepBudgetExceeded& e) {
    throw SolveError(SolveError::Kind::StepBudget, mode.k, e.t,
                     "step budget exceeded at t = " + std::to_string(e.t));
  } catch (const ode::StepUnderflow& e) {
    throw SolveError(SolveError::Kind::StepUnderflow, mode.k, e.t,
                     "step size underflow at t = " + std::to_string(e.t));
  }

  res.F_inf = ro.value(y, mode);
  res.asymptotic_residual = std::abs(res.F_inf - F_check);
  return res;
}

AllFormulationsResult solve_mode_all(const FieldConfig& field,
                                     const ModeCoordinates& mode,
                                     SolverSettings settings) {
  AllFormulationsResult r;
  settings.formulation = Formulation::Chi;
  r.chi = solve_mode(field, mode, settings);
  settings.formulation = Formulation::Fgh;
  r.fgh = solve_mode(field, mode, settings);
  settings.formulation = Formulation::Bogoliubov;
  r.bogoliubov = solve_mode(field, mode, settings);
  return r;
}

}  // namespace qvs
