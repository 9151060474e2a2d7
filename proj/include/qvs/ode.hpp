#pragma once

#include <algorithm>
#include <cmath>

namespace qvs::ode {

inline constexpr int kMaxDim = 8;

struct Control {
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  long max_steps = 4'000'000;
  double h_init = 0.0;  // 0: choose automatically
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  double h_final = 0.0;
};

struct StepBudgetExceeded {
  double t;
};
struct StepUnderflow {
  double t;
};

/// Dormand-Prince 5(4) with FSAL and the standard PI-free controller.
/// rhs(t, y, dy); cap(t, y) -> max |h| allowed from this point (used to keep
/// steps below a quarter oscillation period); obs(t, y, h) after each
/// accepted step.  Integrates y in place from t0 to t1 (either direction).
template <class Rhs, class Cap, class Obs>
Stats integrate(int n, Rhs&& rhs, double t0, double t1, double* y,
                const Control& ctl, Cap&& cap, Obs&& obs) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;

  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  Stats st;
  if (span == 0.0) return st;

  double k1[kMaxDim], k2[kMaxDim], k3[kMaxDim], k4[kMaxDim], k5[kMaxDim],
      k6[kMaxDim], k7[kMaxDim], yt[kMaxDim], yn[kMaxDim];

  double t = t0;
  rhs(t, y, k1);

  double h_abs = ctl.h_init > 0.0 ? ctl.h_init : 1e-4 * span;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0.0) {
    if (st.accepted + st.rejected >= ctl.max_steps) throw StepBudgetExceeded{t};

    h_abs = std::min(h_abs, cap(t, y));
    const double remaining = std::abs(t1 - t);
    bool last = false;
    if (h_abs >= remaining) {
      h_abs = remaining;
      last = true;
    }
    if (h_abs < 16.0 * 2.220446049250313e-16 * std::max(std::abs(t), 1.0))
      throw StepUnderflow{t};
    const double h = dir * h_abs;

    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, yt, k2);
    for (int i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, yt, k3);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, yt, k4);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, yt, k5);
    for (int i = 0; i < n; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, yt, k6);
    for (int i = 0; i < n; ++i)
      yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    rhs(t + h, yn, k7);  // FSAL stage

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / n);

    if (!std::isfinite(err)) {
      h_abs *= 0.1;
      last_rejected = true;
      ++st.rejected;
      continue;
    }

    if (err <= 1.0) {
      t = last ? t1 : t + h;
      for (int i = 0; i < n; ++i) {
        y[i] = yn[i];
        k1[i] = k7[i];
      }
      ++st.accepted;
      obs(t, y, h);
      const double fac = err <= 1e-30
                             ? 6.0
                             : std::min(last_rejected ? 1.0 : 6.0,
                                        std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h_abs *= fac;
      last_rejected = false;
    } else {
      h_abs *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      ++st.rejected;
    }
  }
  st.h_final = h_abs;
  return st;
}

}  // namespace qvs::ode
