#include "qvs/qve.hpp"

#include <cmath>

namespace qvs {

double omega(const ModeCoordinates& mc, Vec3 A) {
  const Vec3 p = kinetic_momentum(mc, A);
  return std::sqrt(norm2(p) + mc.m * mc.m);
}

cplx omega_sq_complex(const ModeCoordinates& mc, Vec3c A) {
  const Vec3c p = mc.k - mc.q * A;
  return dot_bilinear(p, p) + mc.m * mc.m;
}

double w_factor(const ModeCoordinates& mc, Vec3 E, Vec3 A) {
  const Vec3 p = kinetic_momentum(mc, A);
  const double w2 = norm2(p) + mc.m * mc.m;
  return mc.q * dot(E, p) / w2;
}

ChiState vacuum_chi(const ModeCoordinates& mc, Vec3 A_start) {
  const double w = omega(mc, A_start);
  return {0.5 * (mc.m / w + w / mc.m), 0.5 * (mc.m / w - w / mc.m), 0.0};
}

FghState chi_to_fgh(const ChiState& s, const ModeCoordinates& mc, Vec3 A) {
  const Vec3 p = kinetic_momentum(mc, A);
  const double p2 = norm2(p);
  const double w = std::sqrt(p2 + mc.m * mc.m);
  const double a = p2 / (2.0 * mc.m * w);
  const double b = mc.m / w;
  const double fplus = (a + b) * s.chi0 + a * s.chi1;  // = 1 + 2F
  return {0.5 * (fplus - 1.0), a * s.chi0 + (a + b) * s.chi1, s.chi2};
}

ChiState chi_rhs(const ChiState& s, const ModeCoordinates& mc, Vec3 /*E*/, Vec3 A) {
  const double p2 = norm2(kinetic_momentum(mc, A));
  const double c1 = p2 / mc.m;
  const double c2 = c1 + 2.0 * mc.m;
  return {c1 * s.chi2, -c2 * s.chi2, c1 * s.chi0 + c2 * s.chi1};
}

FghState fgh_rhs(const FghState& s, const ModeCoordinates& mc, Vec3 E, Vec3 A) {
  const Vec3 p = kinetic_momentum(mc, A);
  const double w2 = norm2(p) + mc.m * mc.m;
  const double w = std::sqrt(w2);
  const double W = mc.q * dot(E, p) / w2;
  return {0.5 * W * s.G, W * (1.0 + 2.0 * s.F) - 2.0 * w * s.H, 2.0 * w * s.G};
}

BogoliubovState bogoliubov_rhs(const BogoliubovState& s, const ModeCoordinates& mc,
                               Vec3 E, Vec3 A) {
  const Vec3 p = kinetic_momentum(mc, A);
  const double w2 = norm2(p) + mc.m * mc.m;
  const double w = std::sqrt(w2);
  const double W = mc.q * dot(E, p) / w2;
  const double c = std::cos(2.0 * s.theta), sn = std::sin(2.0 * s.theta);
  const cplx e2i(c, sn);
  BogoliubovState d;
  d.alpha = 0.5 * W * s.beta * e2i;
  d.beta = 0.5 * W * s.alpha * std::conj(e2i);
  d.theta = w;
  return d;
}

}  // namespace qvs
