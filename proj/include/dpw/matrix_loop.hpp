#pragma once

#include <functional>
#include <vector>

#include "dpw/mat2.hpp"

#include "json.hpp"

namespace dpw {

// Open annulus s < |lambda| < r.
struct Annulus {
  double inner = 0.0;
  double outer = 1e300;
  Annulus() = default;
  Annulus(double s, double r);
  bool contains(cplx lambda, double margin = 0.0) const;
  // Image under lambda -> 1/conj(lambda).
  Annulus inverted() const;
  Annulus intersect(const Annulus& other) const;
};

struct LoopOptions {
  int max_bandwidth = 64;       // K: coefficients kept in [-K, K] after truncation
  int samples = 256;            // default sample count M (power of two)
  double equality_tol = 1e-10;
  double singular_tol = 1e-12;
  double trunc_tol = 1e-10;     // relative mass allowed to be dropped
};

LoopOptions& loop_options();  // process-wide defaults, mutable

// 2x2 complex matrix loop as a truncated two-sided Laurent series
//   X(lambda) = sum_k coeff(k) lambda^k,  k in [k_min, k_max].
// Immutable in spirit: operations return new loops.
class MatrixLoop {
 public:
  MatrixLoop();
  MatrixLoop(std::vector<Mat2> coeffs, int k_min, double radius);

  static MatrixLoop identity(double radius = 1.0);
  static MatrixLoop constant(const Mat2& m, double radius = 1.0);
  static MatrixLoop monomial(int k, const Mat2& m, double radius = 1.0);
  // Recover coefficients in [-M/2, M/2) from M samples on the circle of
  // radius `circle`. M must be a power of two.
  static MatrixLoop from_samples(const std::vector<Mat2>& samples, double circle,
                                 double radius);

  Mat2 eval(cplx lambda) const;
  // M samples on |lambda| = circle, lambda_j = circle * e^{2 pi i j / M}.
  std::vector<Mat2> samples(double circle, int m) const;

  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(c_.size()) - 1; }
  Mat2 coeff(int k) const;
  void set_coeff(int k, const Mat2& m);

  // Drop leading/trailing coefficients below `tol` (absolute, per entry max).
  MatrixLoop trimmed(double tol = 1e-14) const;
  // Truncate to [-band, band]; returns dropped mass via *residual if non-null.
  MatrixLoop truncated(int band, double* residual = nullptr) const;

  double radius = 1.0;          // home circle C_r
  Annulus validity;             // annulus of analyticity
  int samples_hint = 256;

  // Frobenius-style magnitude of all coefficients (for relative tolerances).
  double coeff_scale() const;

 private:
  std::vector<Mat2> c_;
  int k_min_ = 0;
};

MatrixLoop star(const MatrixLoop& x);
MatrixLoop mul(const MatrixLoop& x, const MatrixLoop& y);
MatrixLoop add(const MatrixLoop& x, const MatrixLoop& y);
MatrixLoop sub(const MatrixLoop& x, const MatrixLoop& y);
MatrixLoop scale(const MatrixLoop& x, cplx s);
MatrixLoop inv(const MatrixLoop& x);

// Max operator norm over M samples of the circle |lambda| = circle.
double sup_norm_circle(const MatrixLoop& x, double circle, int m = 0);
// Max over a sweep of circles through the annulus (inclusive endpoints).
double sup_norm_annulus(const MatrixLoop& x, const Annulus& a, int circles = 9,
                        int m = 0);

// Residual diagnostics.
double unitary_residual(const MatrixLoop& x, double circle, int m = 0);
// Mass of negative Fourier coefficients relative to coeff scale.
double negative_tail(const MatrixLoop& x);
bool is_positive_loop(const MatrixLoop& x, double tol);

nlohmann::json loop_to_json(const MatrixLoop& x);
MatrixLoop loop_from_json(const nlohmann::json& j);

}  // namespace dpw
