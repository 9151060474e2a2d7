#pragma once

#include <cmath>
#include <vector>

#include "qvs/errors.hpp"
#include "qvs/vec.hpp"

namespace qvs::quad {

/// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double abs_norm(double v) { return std::abs(v); }
inline double abs_norm(const cplx& v) { return std::abs(v); }
inline double abs_norm(const Vec3c& v) {
  return std::abs(v.x) + std::abs(v.y) + std::abs(v.z);
}

/// One G7/K15 panel on the straight segment [a, b].  Returns the K15 value;
/// err gets |K15 - G7|.
template <class F, class T>
T gk15_panel(F&& f, cplx a, cplx b, double& err) {
  const cplx c = 0.5 * (a + b);
  const cplx hh = 0.5 * (b - a);
  T fc = f(c);
  T resk = kWgk[7] * fc;
  T resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    T lo = f(c - kXgk[j] * hh);
    T hi = f(c + kXgk[j] * hh);
    T sum = lo + hi;
    resk = resk + kWgk[j] * sum;
    if (j % 2 == 1) resg = resg + kWg[j / 2] * sum;
  }
  err = abs_norm(hh) * abs_norm(resk - resg);
  return hh * resk;
}

/// Adaptive bisection of [a, b] until every panel meets its length-weighted
/// share of the tolerance.  T must support +, -, and scalar multiplication;
/// deduced from the integrand.  Throws QuadratureError when the panel budget
/// is exhausted.
template <class F>
auto integrate_segment(F&& f, cplx a, cplx b, double rel_tol = 1e-12,
                       double abs_tol = 1e-14, int max_panels = 20000)
    -> decltype(f(a)) {
  using T = decltype(f(a));
  struct Panel {
    cplx a, b;
  };
  const double total_len = std::abs(b - a);
  if (total_len == 0.0) return T{};

  double err0 = 0.0;
  T whole = gk15_panel<F, T>(f, a, b, err0);
  double scale = abs_norm(whole);

  std::vector<Panel> stack{{a, b}};
  T acc{};
  bool first = true;
  int used = 0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    double err = 0.0;
    T val = first ? whole : gk15_panel<F, T>(f, p.a, p.b, err);
    if (first) {
      err = err0;
      first = false;
    }
    if (++used > max_panels)
      throw QuadratureError("quadrature panel budget exhausted");
    const double len = std::abs(p.b - p.a);
    const double tol =
        std::max(abs_tol, rel_tol * scale) * (len / total_len);
    if (err <= tol || len < 1e-14 * total_len) {
      acc = acc + val;
      scale = std::max(scale, abs_norm(acc));
    } else {
      const cplx m = 0.5 * (p.a + p.b);
      stack.push_back({p.a, m});
      stack.push_back({m, p.b});
    }
  }
  return acc;
}

}  // namespace qvs::quad
