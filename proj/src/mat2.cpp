#include "dpw/mat2.hpp"

#include <cmath>

namespace dpw {

double op_norm(const Mat2& m) {
  // Largest singular value of a 2x2: closed form via the Gram matrix.
  Mat2 g = m.adjoint() * m;
  double tr = g.trace().real();
  double det = std::abs(g.determinant());
  double disc = std::max(0.0, tr * tr / 4.0 - det);
  return std::sqrt(std::max(0.0, tr / 2.0 + std::sqrt(disc)));
}

cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-3) {
    cplx z2 = z * z;
    return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0));
  }
  return std::sinh(z) / z;
}

Mat2 exp_traceless(const Mat2& x) {
  cplx d2 = -x.determinant();
  cplx d = std::sqrt(d2);
  return std::cosh(d) * Mat2::Identity() + sinhc(d) * x;
}

Mat2 exp_dense(const Mat2& m) {
  double n = op_norm(m);
  int s = 0;
  double scaled = n;
  while (scaled > 0.25) {
    scaled /= 2.0;
    ++s;
  }
  Mat2 a = m / std::pow(2.0, s);
  Mat2 term = Mat2::Identity();
  Mat2 sum = Mat2::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = (term * a) / double(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

void qr_constant(const Mat2& m, Mat2& unitary, Mat2& upper) {
  Vec2 m1 = m.col(0);
  double n1 = m1.norm();
  if (n1 < 1e-300) throw SingularLoopError("qr_constant: singular matrix");
  Vec2 u1 = m1 / n1;
  Vec2 w = m.col(1) - u1 * (u1.adjoint() * m.col(1));
  double n2 = w.norm();
  if (n2 < 1e-300) throw SingularLoopError("qr_constant: singular matrix");
  Vec2 u2 = w / n2;
  unitary.col(0) = u1;
  unitary.col(1) = u2;
  upper = unitary.adjoint() * m;
  // Clean the structural zero.
  upper(1, 0) = 0.0;
  upper(0, 0) = cplx(upper(0, 0).real(), 0.0);
  upper(1, 1) = cplx(upper(1, 1).real(), 0.0);
}

void rq_constant(const Mat2& m, Mat2& upper, Mat2& unitary) {
  // m = T U: rows. Second row of U is the normalized second row of m.
  Eigen::RowVector2cd r2 = m.row(1);
  double n2 = r2.norm();
  if (n2 < 1e-300) throw SingularLoopError("rq_constant: singular matrix");
  Eigen::RowVector2cd u2 = r2 / n2;
  Eigen::RowVector2cd r1 = m.row(0);
  Eigen::RowVector2cd w = r1 - (r1 * u2.adjoint())(0, 0) * u2;
  double n1 = w.norm();
  if (n1 < 1e-300) throw SingularLoopError("rq_constant: singular matrix");
  Eigen::RowVector2cd u1 = w / n1;
  unitary.row(0) = u1;
  unitary.row(1) = u2;
  upper = m * unitary.adjoint();
  upper(1, 0) = 0.0;
  upper(0, 0) = cplx(upper(0, 0).real(), 0.0);
  upper(1, 1) = cplx(upper(1, 1).real(), 0.0);
}

cplx sqrt_near(cplx z, cplx near_value) {
  cplx s = std::sqrt(z);
  if (std::abs(s - near_value) > std::abs(-s - near_value)) return -s;
  return s;
}

const Mat2& su2_e1() {
  static const Mat2 e = (Mat2() << 0, 1, -1, 0).finished();
  return e;
}
const Mat2& su2_e2() {
  static const Mat2 e = (Mat2() << 0, cplx(0, 1), cplx(0, 1), 0).finished();
  return e;
}
const Mat2& su2_e3() {
  static const Mat2 e = (Mat2() << cplx(0, 1), 0, 0, cplx(0, -1)).finished();
  return e;
}

Vec3 su2_to_r3(const Mat2& x) {
  Vec3 v;
  v[0] = -0.5 * (su2_e1() * x).trace().real();
  v[1] = -0.5 * (su2_e2() * x).trace().real();
  v[2] = -0.5 * (su2_e3() * x).trace().real();
  return v;
}

Mat2 r3_to_su2(const Vec3& v) {
  return v[0] * su2_e1() + v[1] * su2_e2() + v[2] * su2_e3();
}

double cp1_distance(const Vec2& v, const Vec2& w) {
  Vec2 a = v.normalized();
  Vec2 b = w.normalized();
  double c = std::abs((a.adjoint() * b)(0, 0));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Vec2 perp(const Vec2& v) {
  Vec2 u = v.normalized();
  Vec2 w;
  w << -std::conj(u[1]), std::conj(u[0]);
  return w;
}

}  // namespace dpw
