#pragma once

#include <cmath>
#include <complex>

namespace qvs {

using cplx = std::complex<double>;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }

/// Complex 3-vector; used only for analytic continuation of the field and
/// potential, where the complex bilinear form p.p (no conjugation) is needed.
struct Vec3c {
  cplx x{}, y{}, z{};
};

inline Vec3c operator+(Vec3c a, Vec3c b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3c operator-(Vec3c a, Vec3c b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3c operator-(Vec3 a, Vec3c b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3c operator*(cplx s, Vec3c a) { return {s * a.x, s * a.y, s * a.z}; }
inline cplx dot_bilinear(Vec3c a, Vec3c b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

}  // namespace qvs
