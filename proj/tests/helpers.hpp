#pragma once

#include <Eigen/Eigenvalues>
#include <random>

#include "dpw/matrix_loop.hpp"

namespace dpwtest {

using dpw::cplx;
using dpw::Mat2;
using dpw::MatrixLoop;

inline std::mt19937& rng() {
  static std::mt19937 gen(20240811);
  return gen;
}

inline double urand(double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng());
}

inline cplx crand(double scale = 1.0) {
  return scale * cplx(urand(), urand());
}

inline Mat2 random_mat2(double scale = 1.0) {
  Mat2 m;
  m << crand(scale), crand(scale), crand(scale), crand(scale);
  return m;
}

inline Mat2 random_traceless(double scale = 1.0) {
  Mat2 m = random_mat2(scale);
  cplx t = 0.5 * m.trace();
  m(0, 0) -= t;
  m(1, 1) -= t;
  return m;
}

// Random loop with geometric coefficient decay; analytic well beyond
// [inner_ratio, 1/inner_ratio].
inline MatrixLoop random_loop(int band, double decay, double scale = 0.5,
                              double radius = 1.0) {
  MatrixLoop x;
  x.radius = radius;
  for (int k = -band; k <= band; ++k) {
    x.set_coeff(k, random_mat2(scale * std::pow(decay, std::abs(k))));
  }
  x.validity = dpw::Annulus(decay * 1.08, 1.0 / (decay * 1.08));
  return x;
}

// Random SL(2) loop: pointwise exp of a traceless loop, sampled and
// reconstructed. Analytic wherever the exponent loop is.
inline MatrixLoop random_sl2_loop(int band, double decay, double scale = 0.4,
                                  int m = 256) {
  MatrixLoop y = random_loop(band, decay, scale);
  std::vector<Mat2> s(m);
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < m; ++j) {
    double th = 2 * pi * j / m;
    Mat2 v = y.eval(cplx(std::cos(th), std::sin(th)));
    v -= 0.5 * v.trace() * Mat2::Identity();
    s[j] = dpw::exp_traceless(v);
  }
  MatrixLoop out = MatrixLoop::from_samples(s, 1.0, 1.0);
  out.validity = y.validity;
  return out;
}

// Independent exponential oracle: eigen-decomposition.
inline Mat2 exp_eigen_oracle(const Mat2& m) {
  Eigen::ComplexEigenSolver<Mat2> es(m);
  Mat2 v = es.eigenvectors();
  Mat2 d = Mat2::Zero();
  d(0, 0) = std::exp(es.eigenvalues()[0]);
  d(1, 1) = std::exp(es.eigenvalues()[1]);
  return v * d * v.inverse();
}

inline double svd_norm_oracle(const Mat2& m) {
  Eigen::JacobiSVD<Mat2> svd(m);
  return svd.singularValues()(0);
}

inline double max_diff(const Mat2& x, const Mat2& y) {
  return (x - y).cwiseAbs().maxCoeff();
}

}  // namespace dpwtest
