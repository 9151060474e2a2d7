#pragma once

#include <span>
#include <vector>

#include "qvs/field.hpp"
#include "qvs/qve.hpp"

namespace qvs {

/// Rectangle in the upper half of the complex t plane searched for zeros of
/// omega^2.  Roots come in conjugate pairs; the Im > 0 representative is
/// reported.
struct SearchRegion {
  double re_min, re_max;
  double im_min, im_max;
};

/// Default region: the integration window horizontally, (0, 3 tau_max]
/// vertically — high enough for the relevant pairs, low enough that the
/// continued envelope exp(Im(t)^2 / 2 tau^2) stays in range.
SearchRegion default_search_region(const FieldConfig& f, double envelope_cut = 7.0);

struct TurningPointPair {
  cplx t;          // upper-half-plane member; the partner is conj(t)
  double residual; // |omega^2(t)| at the accepted root
};

/// Newton iteration on omega^2(k, t) = 0 from a (2*seeds) x (seeds) lattice
/// of starting points.  Results are deduplicated (spacing 1e-6), restricted
/// to the region, and sorted by Im(t).
std::vector<TurningPointPair> find_turning_points(const FieldConfig& f,
                                                  const PotentialTable& table,
                                                  const ModeCoordinates& mode,
                                                  const SearchRegion& region,
                                                  int seeds = 10);

/// K = |integral of omega dt| along the straight segment t_a -> t_b between
/// a conjugate pair.  The square-root branch points at the endpoints are
/// removed by the substitution t = t_p + (r - t_p) u^2; the branch of omega
/// is tracked by continuity from the real-axis crossing.
double phase_integral_K(const FieldConfig& f, const PotentialTable& table,
                        const ModeCoordinates& mode, cplx t_a, cplx t_b);

/// Interference phase: integral of omega over the real axis between the two
/// pair locations Re(t_1), Re(t_2).
double interference_alpha(const PotentialTable& table, const ModeCoordinates& mode,
                          double re_t1, double re_t2);

enum class Statistics { Boson, Fermion };

/// Single-pair estimate e^{-2 K1}; two-pair estimate
/// e^{-2K1} + e^{-2K2} +/- 2 cos(2 alpha) e^{-(K1+K2)} (+ boson, - fermion).
double interference_estimate(std::span<const double> K_sorted, double alpha,
                             Statistics stat);

struct PhaseIntegralReport {
  std::vector<TurningPointPair> pairs;  // sorted by K, ascending
  std::vector<double> K;                // matching order
  double alpha = 0.0;                   // between the two dominant pairs
  double F_boson = 0.0;
  double F_fermion = 0.0;
  bool single_pair = false;
};

/// Full per-mode analysis: locate pairs, compute K for each, and form the
/// boson/fermion interference estimates from the two dominant (smallest-K)
/// pairs.
PhaseIntegralReport analyze_mode(const FieldConfig& f, const PotentialTable& table,
                                 const ModeCoordinates& mode,
                                 const SearchRegion& region, int seeds = 10);

}  // namespace qvs
