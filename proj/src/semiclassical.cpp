#include "qvs/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include "qvs/quadrature.hpp"

namespace qvs {

SearchRegion default_search_region(const FieldConfig& f, double envelope_cut) {
  return {f.t_start(envelope_cut), f.t_end(envelope_cut), 1e-9, 3.0 * f.max_tau()};
}

namespace {

cplx omega_sq_at(const FieldConfig& f, const PotentialTable& table,
                 const ModeCoordinates& mode, cplx t) {
  const double anchor = std::clamp(t.real(), table.t_min(), table.t_max());
  return omega_sq_complex(mode, eval_potential_complex(f, table, t, anchor));
}

// d(omega^2)/dt = 2 q p . E(t) with dp/dt = q E.
cplx omega_sq_deriv(const FieldConfig& f, const PotentialTable& table,
                    const ModeCoordinates& mode, cplx t) {
  const double anchor = std::clamp(t.real(), table.t_min(), table.t_max());
  const Vec3c A = eval_potential_complex(f, table, t, anchor);
  const Vec3c p = mode.k - mode.q * A;
  const Vec3c E = eval_field_complex(f, t);
  return 2.0 * mode.q * dot_bilinear(p, E);
}

}  // namespace

std::vector<TurningPointPair> find_turning_points(const FieldConfig& f,
                                                  const PotentialTable& table,
                                                  const ModeCoordinates& mode,
                                                  const SearchRegion& region,
                                                  int seeds) {
  if (seeds < 1) throw ConfigError("turning-point search needs seeds >= 1");
  const int n_re = 2 * seeds, n_im = seeds;
  const double margin_re = 0.05 * (region.re_max - region.re_min);
  const double margin_im = 0.25 * (region.im_max - region.im_min);
  long budget = 240L * n_re * n_im;

  std::vector<cplx> roots;
  for (int ir = 0; ir < n_re; ++ir) {
    for (int ii = 0; ii < n_im; ++ii) {
      cplx t(region.re_min +
                 (region.re_max - region.re_min) * (ir + 0.5) / n_re,
             region.im_min +
                 (region.im_max - region.im_min) * (ii + 0.5) / n_im);
      bool converged = false;
      try {
        for (int it = 0; it < 60; ++it) {
          if (--budget < 0)
            throw SeedBudgetError("turning-point iteration budget exhausted");
          const cplx w2 = omega_sq_at(f, table, mode, t);
          if (std::abs(w2) < 1e-12) {
            converged = true;
            break;
          }
          const cplx dw2 = omega_sq_deriv(f, table, mode, t);
          if (std::abs(dw2) < 1e-300) break;
          const cplx step = w2 / dw2;
          t -= step;
          if (std::abs(t.imag()) > region.im_max + margin_im ||
              t.real() < region.re_min - margin_re ||
              t.real() > region.re_max + margin_re)
            break;  // wandered out of the safe evaluation region
          if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(t))) {
            converged = std::abs(omega_sq_at(f, table, mode, t)) < 1e-10;
            break;
          }
        }
      } catch (const FieldOverflowError&) {
        continue;  // seed escaped the representable strip
      } catch (const GridError&) {
        continue;
      } catch (const QuadratureError&) {
        continue;
      }
      if (!converged) continue;
      if (t.imag() < 0.0) t = std::conj(t);  // canonical upper-half member
      if (t.imag() <= 1e-9 || t.imag() > region.im_max ||
          t.real() < region.re_min || t.real() > region.re_max)
        continue;
      bool dup = false;
      for (const cplx& r : roots)
        if (std::abs(r - t) < 1e-6) {
          dup = true;
          break;
        }
      if (!dup) roots.push_back(t);
    }
  }
  if (roots.empty())
    throw NoRootsError("no complex turning points in the search region");

  std::vector<TurningPointPair> out;
  out.reserve(roots.size());
  for (const cplx& r : roots)
    out.push_back({r, std::abs(omega_sq_at(f, table, mode, r))});
  std::sort(out.begin(), out.end(),
            [](const TurningPointPair& a, const TurningPointPair& b) {
              return a.t.imag() < b.t.imag();
            });
  return out;
}

namespace {

/// Branch-tracked sqrt of omega^2 along the ray r -> t_p, parameterized
/// t(u) = t_p + (r - t_p) u^2 so u = 1 is the real axis and u = 0 the
/// turning point.  Sign flips of the principal root along the ray are
/// located by marching from the real axis and bisecting each crossing.
class BranchedOmega {
 public:
  BranchedOmega(const FieldConfig& f, const PotentialTable& table,
                const ModeCoordinates& mode, cplx t_p, double r)
      : f_(f), table_(table), mode_(mode), t_p_(t_p), r_(r) {
    const int m = 160;
    cplx prev = principal(1.0);
    double prev_u = 1.0;
    for (int i = 1; i <= m; ++i) {
      const double u = 1.0 - double(i) / m;
      cplx cur = principal(u);
      if (flipped(prev, cur)) {
        double lo = u, hi = prev_u;
        cplx at_hi = prev;
        for (int b = 0; b < 48 && hi - lo > 1e-12; ++b) {
          const double mid = 0.5 * (lo + hi);
          const cplx at_mid = principal(mid);
          if (flipped(at_hi, at_mid)) {
            lo = mid;
          } else {
            hi = mid;
            at_hi = at_mid;
          }
        }
        flips_.push_back(0.5 * (lo + hi));
      }
      prev = cur;
      prev_u = u;
    }
  }

  cplx t_of(double u) const { return t_p_ + (r_ - t_p_) * (u * u); }

  /// Branch-consistent omega at parameter u in [0, 1].
  cplx omega(double u) const {
    double sign = 1.0;
    for (double fu : flips_)
      if (u < fu) sign = -sign;
    return sign * principal(u);
  }

 private:
  cplx principal(double u) const {
    return std::sqrt(omega_sq_at(f_, table_, mode_, t_of(u)));
  }
  static bool flipped(cplx a, cplx b) {
    // Continuity heuristic: the nearer of +/-b to a decides the branch.
    return std::abs(b - a) > std::abs(b + a);
  }

  const FieldConfig& f_;
  const PotentialTable& table_;
  const ModeCoordinates& mode_;
  cplx t_p_;
  double r_;
  std::vector<double> flips_;  // u locations of branch flips, descending
};

/// J(t_p) = integral of omega dt from the real-axis point r to t_p.
/// With t(u) = t_p + (r - t_p) u^2, dt/du = 2u (r - t_p) and the sqrt branch
/// point at u = 0 becomes a smooth zero of the integrand.
cplx half_phase_integral(const FieldConfig& f, const PotentialTable& table,
                         const ModeCoordinates& mode, cplx t_p, double r) {
  BranchedOmega bw(f, table, mode, t_p, r);
  auto integrand = [&](cplx u) -> cplx {
    const double uu = u.real();
    return bw.omega(uu) * (2.0 * uu) * (cplx(r, 0.0) - t_p);
  };
  const cplx to_r = quad::integrate_segment(integrand, cplx(0.0), cplx(1.0),
                                            1e-10, 1e-14, 4000);
  return -to_r;  // orientation r -> t_p
}

}  // namespace

double phase_integral_K(const FieldConfig& f, const PotentialTable& table,
                        const ModeCoordinates& mode, cplx t_a, cplx t_b) {
  const double r = 0.5 * (t_a + t_b).real();
  const cplx J_b = half_phase_integral(f, table, mode, t_b, r);
  const cplx J_a = half_phase_integral(f, table, mode, t_a, r);
  return std::abs(J_b - J_a);
}

double interference_alpha(const PotentialTable& table, const ModeCoordinates& mode,
                          double re_t1, double re_t2) {
  if (re_t1 == re_t2) return 0.0;
  auto integrand = [&](cplx t) -> cplx {
    return cplx(omega(mode, table.eval(t.real())), 0.0);
  };
  const cplx I = quad::integrate_segment(integrand, cplx(re_t1), cplx(re_t2),
                                         1e-12, 1e-14, 4000);
  return I.real();
}

double interference_estimate(std::span<const double> K_sorted, double alpha,
                             Statistics stat) {
  if (K_sorted.empty())
    throw NoRootsError("interference estimate needs at least one pair");
  if (K_sorted.size() == 1) return std::exp(-2.0 * K_sorted[0]);
  const double K1 = K_sorted[0], K2 = K_sorted[1];
  const double sign = stat == Statistics::Boson ? 1.0 : -1.0;
  return std::exp(-2.0 * K1) + std::exp(-2.0 * K2) +
         sign * 2.0 * std::cos(2.0 * alpha) * std::exp(-(K1 + K2));
}

PhaseIntegralReport analyze_mode(const FieldConfig& f, const PotentialTable& table,
                                 const ModeCoordinates& mode,
                                 const SearchRegion& region, int seeds) {
  PhaseIntegralReport rep;
  std::vector<TurningPointPair> pairs =
      find_turning_points(f, table, mode, region, seeds);

  std::vector<std::pair<double, TurningPointPair>> with_k;
  with_k.reserve(pairs.size());
  for (const auto& p : pairs)
    with_k.emplace_back(
        phase_integral_K(f, table, mode, p.t, std::conj(p.t)), p);
  std::sort(with_k.begin(), with_k.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (const auto& [k, p] : with_k) {
    rep.K.push_back(k);
    rep.pairs.push_back(p);
  }
  rep.single_pair = rep.pairs.size() == 1;
  if (!rep.single_pair)
    rep.alpha = interference_alpha(table, mode, rep.pairs[0].t.real(),
                                   rep.pairs[1].t.real());
  rep.F_boson = interference_estimate(rep.K, rep.alpha, Statistics::Boson);
  rep.F_fermion = interference_estimate(rep.K, rep.alpha, Statistics::Fermion);
  return rep;
}

}  // namespace qvs
