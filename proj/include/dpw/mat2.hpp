#pragma once

#include <Eigen/Dense>
#include <complex>

#include "dpw/errors.hpp"

namespace dpw {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kI = 0.0;  // placeholder to keep clang-tidy quiet

// Largest singular value.
double op_norm(const Mat2& m);

// Adjugate of a 2x2 matrix: adj(m) * m = det(m) * id.
inline Mat2 adjugate(const Mat2& m) {
  Mat2 a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a;
}

// exp of a traceless 2x2 matrix via exp X = cosh(d) id + sinhc(d) X,
// d^2 = -det X. Entire in d^2, so the branch of d is irrelevant.
Mat2 exp_traceless(const Mat2& x);

// General 2x2 exponential by scaling and squaring (used as an oracle
// and for non-traceless drift).
Mat2 exp_dense(const Mat2& m);

// QR decomposition m = U T with U in SU(2) (for det m = 1) and T upper
// triangular with positive real diagonal.
void qr_constant(const Mat2& m, Mat2& unitary, Mat2& upper);

// RQ decomposition m = T U with T upper triangular positive-diagonal.
void rq_constant(const Mat2& m, Mat2& upper, Mat2& unitary);

// sinh(z)/z, stable near 0.
cplx sinhc(cplx z);

// Principal-branch square root continued to agree with `near` (picks the
// root closer to `near`).
cplx sqrt_near(cplx z, cplx near_value);

// su(2) basis used for the R^3 identification:
//   e1 = [[0,1],[-1,0]], e2 = [[0,i],[i,0]], e3 = [[i,0],[0,-i]],
// with coordinates x_j = -1/2 tr(e_j X).
const Mat2& su2_e1();
const Mat2& su2_e2();
const Mat2& su2_e3();
Vec3 su2_to_r3(const Mat2& x);
Mat2 r3_to_su2(const Vec3& v);

// Chordal (Fubini-Study) distance between lines [v], [w] in CP^1:
// sqrt(1 - |<v,w>|^2) for unit vectors.
double cp1_distance(const Vec2& v, const Vec2& w);

// Unit vector orthogonal to v (hermitian inner product).
Vec2 perp(const Vec2& v);

}  // namespace dpw
