#pragma once

#include "qvs/vec.hpp"

namespace qvs {

/// One momentum mode of a scalar field of mass m and charge q in a
/// homogeneous electric field.  k is the canonical momentum; the kinetic
/// momentum is p(t) = k - q A(t).  Internal units: m = 1, |q| = 1, E_cr = 1;
/// q = -1 matches an electron-like charge convention.
struct ModeCoordinates {
  Vec3 k{};
  double m = 1.0;
  double q = -1.0;
};

inline Vec3 kinetic_momentum(const ModeCoordinates& mc, Vec3 A) {
  return mc.k - mc.q * A;
}

/// omega(k,t)^2 = (k - qA)^2 + m^2 >= m^2 on the real axis.
double omega(const ModeCoordinates& mc, Vec3 A);

/// Principal-branch continuation; vanishes at complex turning points.
cplx omega_sq_complex(const ModeCoordinates& mc, Vec3c A);

/// W(k,t) = q E . p / omega^2, the pair-creation coupling rate.
double w_factor(const ModeCoordinates& mc, Vec3 E, Vec3 A);

/// Components of the real 3-vector chi ODE system (the third Wigner-like
/// component chi3 decouples and stays 0 for these fields; it is dropped).
struct ChiState {
  double chi0 = 0.0, chi1 = 0.0, chi2 = 0.0;
};

/// Quantum Vlasov variables: F is the momentum-space occupation, G and H
/// the auxiliary counter-terms.  (1+2F)^2 - G^2 - H^2 = 1 along trajectories.
struct FghState {
  double F = 0.0, G = 0.0, H = 0.0;
};

/// Bogoliubov coefficients with accumulated dynamical phase Theta;
/// |alpha|^2 - |beta|^2 = 1 and F = |beta|^2.
struct BogoliubovState {
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  double theta = 0.0;
};

/// Adiabatic vacuum at the initial time: chi0 = (m/w + w/m)/2,
/// chi1 = (m/w - w/m)/2, chi2 = 0 with w = omega(k, A_start).
ChiState vacuum_chi(const ModeCoordinates& mc, Vec3 A_start);

/// Algebraic map chi -> (F,G,H):
///   Fplus = (p^2/2mw + m/w) chi0 + (p^2/2mw) chi1   (= 1 + 2F)
///   G     = (p^2/2mw) chi0 + (p^2/2mw + m/w) chi1
///   H     = chi2.
FghState chi_to_fgh(const ChiState& s, const ModeCoordinates& mc, Vec3 A);

/// d chi/dt:  chi0' = (p^2/m) chi2,  chi1' = -(p^2/m + 2m) chi2,
///            chi2' = (p^2/m) chi0 + (p^2/m + 2m) chi1.
ChiState chi_rhs(const ChiState& s, const ModeCoordinates& mc, Vec3 E, Vec3 A);

/// d(F,G,H)/dt:  F' = W G / 2,  G' = W (1 + 2F) - 2 w H,  H' = 2 w G.
FghState fgh_rhs(const FghState& s, const ModeCoordinates& mc, Vec3 E, Vec3 A);

/// d(alpha,beta,Theta)/dt:  alpha' = (W/2) beta e^{+2i Theta},
/// beta' = (W/2) alpha e^{-2i Theta},  Theta' = w.
BogoliubovState bogoliubov_rhs(const BogoliubovState& s, const ModeCoordinates& mc,
                               Vec3 E, Vec3 A);

}  // namespace qvs
