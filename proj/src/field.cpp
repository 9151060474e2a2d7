#include "qvs/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qvs/quadrature.hpp"

namespace qvs {

double EllipticPulse::amplitude() const {
  return E01 / std::sqrt(1.0 + delta * delta);
}

void EllipticPulse::validate() const {
  if (!(E01 >= 0.0)) throw ConfigError("pulse E01 must be >= 0");
  if (!(std::abs(delta) <= 1.0)) throw ConfigError("pulse delta must lie in [-1, 1]");
  if (!(omega >= 0.0)) throw ConfigError("pulse omega must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("pulse tau must be > 0");
  if (!std::isfinite(delay)) throw ConfigError("pulse delay must be finite");
  if (!std::isfinite(phase)) throw ConfigError("pulse phase must be finite");
}

void FieldConfig::validate() const {
  if (pulses.empty()) throw ConfigError("field needs at least one pulse");
  for (const auto& p : pulses) p.validate();
}

double FieldConfig::t_start(double cut) const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& p : pulses) t = std::min(t, p.delay - cut * p.tau);
  return t;
}

double FieldConfig::t_end(double cut) const {
  double t = -std::numeric_limits<double>::infinity();
  for (const auto& p : pulses) t = std::max(t, p.delay + cut * p.tau);
  return t;
}

double FieldConfig::max_omega() const {
  double w = 0.0;
  for (const auto& p : pulses) w = std::max(w, p.omega);
  return w;
}

double FieldConfig::max_tau() const {
  double t = 0.0;
  for (const auto& p : pulses) t = std::max(t, p.tau);
  return t;
}

namespace {

// Shared evaluation template: instantiated at double and cplx so the real
// path and the restriction of the continued path are the same expressions.
template <class T>
void accumulate_pulse(const EllipticPulse& p, T t, T& ex, T& ey) {
  using std::cos;
  using std::exp;
  using std::sin;
  const double e1 = p.amplitude();
  const T u = t - p.delay;
  const T env = e1 * exp(-(u * u) / (2.0 * p.tau * p.tau));
  const T arg = p.omega * u + p.phase;
  ex = ex + env * cos(arg);
  ey = ey + p.delta * env * sin(arg);
}

}  // namespace

Vec3 eval_field(const FieldConfig& f, double t) {
  double ex = 0.0, ey = 0.0;
  for (const auto& p : f.pulses) accumulate_pulse(p, t, ex, ey);
  return {ex, ey, 0.0};
}

Vec3c eval_field_complex(const FieldConfig& f, cplx t) {
  cplx ex = 0.0, ey = 0.0;
  for (const auto& p : f.pulses) accumulate_pulse(p, t, ex, ey);
  if (!std::isfinite(ex.real()) || !std::isfinite(ex.imag()) ||
      !std::isfinite(ey.real()) || !std::isfinite(ey.imag()))
    throw FieldOverflowError("continued envelope overflowed; restrict |Im t|");
  return {ex, ey, cplx(0.0)};
}

Vec3 PotentialTable::eval(double t) const {
  const double slack = 1e-9 * (t_max() - t_min());
  if (t < t_min() - slack || t > t_max() + slack)
    throw GridError("potential table evaluated outside its range");
  t = std::clamp(t, t_min(), t_max());
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = (it == t_.begin()) ? 0 : (it - t_.begin() - 1);
  i = std::min(i, t_.size() - 2);
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  // Cubic Hermite with exact node derivatives dA/dt = -E.
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  auto hermite = [&](const std::vector<double>& a, const std::vector<double>& e) {
    return h00 * a[i] + h01 * a[i + 1] - h * (h10 * e[i] + h11 * e[i + 1]);
  };
  return {hermite(ax_, ex_), hermite(ay_, ey_), 0.0};
}

PotentialTable build_potential(const FieldConfig& f, double t0, double t1,
                               double tol) {
  if (!(t1 > t0)) throw ConfigError("potential table needs t1 > t0");
  const double span = t1 - t0;
  const double interp_tol = 1e-9;

  // Cell length from the cubic-Hermite error bound h^4 |A''''| / 384 with
  // A'''' = -E''' estimated as E1 (omega + 3/tau)^3 near the envelope peak.
  double h = span / 512.0;
  for (const auto& p : f.pulses) {
    const double rate = p.omega + 3.0 / p.tau;
    const double e3 = p.amplitude() * rate * rate * rate;
    if (e3 > 0.0) h = std::min(h, std::pow(384.0 * interp_tol / e3, 0.25));
  }
  const std::size_t n =
      std::min<std::size_t>(2'000'000,
                            std::max<std::size_t>(512, std::ceil(span / h)));

  auto ef = [&f](cplx t) -> Vec3c { return eval_field_complex(f, t); };

  PotentialTable tab;
  tab.t_.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    tab.t_.push_back(t0 + span * (double(i) / double(n)));
  tab.t_.back() = t1;

  tab.ax_.resize(n + 1);
  tab.ay_.resize(n + 1);
  tab.ex_.resize(n + 1);
  tab.ey_.resize(n + 1);
  tab.ax_[0] = tab.ay_[0] = 0.0;  // gauge: A(t_start) = 0
  {
    Vec3 e = eval_field(f, t0);
    tab.ex_[0] = e.x;
    tab.ey_[0] = e.y;
  }
  const double cell_tol = tol / double(n);
  double err_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a(tab.t_[i]), b(tab.t_[i + 1]);
    double perr = 0.0;
    Vec3c inc = quad::gk15_panel<decltype(ef)&, Vec3c>(ef, a, b, perr);
    if (perr > cell_tol) {
      inc = quad::integrate_segment(ef, a, b, 1e-14, cell_tol, 512);
      perr = cell_tol;
    }
    err_acc += perr;
    tab.ax_[i + 1] = tab.ax_[i] - inc.x.real();
    tab.ay_[i + 1] = tab.ay_[i] - inc.y.real();
    Vec3 e = eval_field(f, tab.t_[i + 1]);
    tab.ex_[i + 1] = e.x;
    tab.ey_[i + 1] = e.y;
  }
  tab.accuracy_ = err_acc + interp_tol;
  return tab;
}

Vec3c eval_potential_complex(const FieldConfig& f, const PotentialTable& table,
                             cplx t, double anchor) {
  if (anchor < table.t_min() || anchor > table.t_max())
    throw GridError("potential anchor outside table range");
  Vec3 a0 = table.eval(anchor);
  auto ef = [&f](cplx tt) -> Vec3c { return eval_field_complex(f, tt); };
  Vec3c inc = quad::integrate_segment(ef, cplx(anchor), t, 1e-12, 1e-15, 20000);
  return {a0.x - inc.x, a0.y - inc.y, cplx(0.0)};
}

double keldysh_gamma(const EllipticPulse& p, double m, double q) {
  const double e1 = p.amplitude();
  if (e1 == 0.0 || q == 0.0)
    throw ConfigError("keldysh gamma undefined for zero field or charge");
  return m * p.omega / std::abs(q * e1);
}

}  // namespace qvs
