#include "dpw/matrix_loop.hpp"

#include <algorithm>
#include <cmath>

#include "dpw/fft.hpp"

namespace dpw {

Annulus::Annulus(double s, double r) : inner(s), outer(r) {
  if (!(s < r)) throw DomainError("Annulus: inner must be < outer");
}

bool Annulus::contains(cplx lambda, double margin) const {
  double m = std::abs(lambda);
  return m > inner + margin && m < outer - margin;
}

Annulus Annulus::inverted() const {
  double s = outer >= 1e300 ? 0.0 : 1.0 / outer;
  double r = inner <= 0.0 ? 1e300 : 1.0 / inner;
  return Annulus(s, r);
}

Annulus Annulus::intersect(const Annulus& o) const {
  return Annulus(std::max(inner, o.inner), std::min(outer, o.outer));
}

LoopOptions& loop_options() {
  static LoopOptions opts;
  return opts;
}

MatrixLoop::MatrixLoop() : c_(1, Mat2::Zero()), k_min_(0) {}

MatrixLoop::MatrixLoop(std::vector<Mat2> coeffs, int k_min, double r)
    : radius(r), c_(std::move(coeffs)), k_min_(k_min) {
  if (c_.empty()) {
    c_.assign(1, Mat2::Zero());
    k_min_ = 0;
  }
}

MatrixLoop MatrixLoop::identity(double radius) {
  return constant(Mat2::Identity(), radius);
}

MatrixLoop MatrixLoop::constant(const Mat2& m, double radius) {
  return MatrixLoop({m}, 0, radius);
}

MatrixLoop MatrixLoop::monomial(int k, const Mat2& m, double radius) {
  return MatrixLoop({m}, k, radius);
}

MatrixLoop MatrixLoop::from_samples(const std::vector<Mat2>& samples, double circle,
                                    double radius) {
  const int m = static_cast<int>(samples.size());
  if (!is_power_of_two(m)) throw DomainError("from_samples: M must be a power of two");
  std::vector<std::vector<cplx>> bins(4, std::vector<cplx>(m));
  for (int j = 0; j < m; ++j) {
    bins[0][j] = samples[j](0, 0);
    bins[1][j] = samples[j](0, 1);
    bins[2][j] = samples[j](1, 0);
    bins[3][j] = samples[j](1, 1);
  }
  for (auto& b : bins) fft_radix2(b, -1);
  std::vector<Mat2> coeffs(m);
  const int half = m / 2;
  for (int idx = 0; idx < m; ++idx) {
    int k = idx <= half - 1 ? idx : idx - m;  // k in [-M/2, M/2)
    double w = std::pow(circle, -k) / m;
    Mat2 mm;
    mm << bins[0][idx] * w, bins[1][idx] * w, bins[2][idx] * w, bins[3][idx] * w;
    coeffs[k + half] = mm;
  }
  MatrixLoop out(std::move(coeffs), -half, radius);
  return out.trimmed();
}

Mat2 MatrixLoop::eval(cplx lambda) const {
  if (k_min_ < 0 && lambda == cplx(0.0, 0.0)) {
    // Only a genuine pole if a negative coefficient is nonzero.
    for (int k = k_min_; k < 0; ++k) {
      if (coeff(k).cwiseAbs().maxCoeff() > 0.0)
        throw PoleError("eval: lambda = 0 with nonzero negative coefficients");
    }
  }
  // Two-sided Horner: nonneg part in lambda, negative part in 1/lambda.
  Mat2 pos = Mat2::Zero();
  for (int k = k_max(); k >= std::max(0, k_min_); --k) {
    pos = pos * lambda + coeff(k);
  }
  Mat2 neg = Mat2::Zero();
  if (k_min_ < 0) {
    cplx inv_l = 1.0 / lambda;
    for (int k = k_min_; k <= -1; ++k) {
      neg = (neg + coeff(k)) * inv_l;  // Horner in 1/lambda from the deep end
    }
  }
  return pos + neg;
}

std::vector<Mat2> MatrixLoop::samples(double circle, int m) const {
  if (m == 0) m = samples_hint;
  std::vector<Mat2> out(m);
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < m; ++j) {
    double th = 2.0 * pi * j / m;
    out[j] = eval(circle * cplx(std::cos(th), std::sin(th)));
  }
  return out;
}

Mat2 MatrixLoop::coeff(int k) const {
  if (k < k_min_ || k > k_max()) return Mat2::Zero();
  return c_[k - k_min_];
}

void MatrixLoop::set_coeff(int k, const Mat2& m) {
  if (k < k_min_) {
    std::vector<Mat2> nc(k_max() - k + 1, Mat2::Zero());
    std::copy(c_.begin(), c_.end(), nc.begin() + (k_min_ - k));
    c_ = std::move(nc);
    k_min_ = k;
  } else if (k > k_max()) {
    c_.resize(k - k_min_ + 1, Mat2::Zero());
  }
  c_[k - k_min_] = m;
}

double MatrixLoop::coeff_scale() const {
  double s = 0.0;
  for (const auto& m : c_) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

MatrixLoop MatrixLoop::trimmed(double tol) const {
  int lo = k_min_, hi = k_max();
  while (lo < hi && coeff(lo).cwiseAbs().maxCoeff() <= tol) ++lo;
  while (hi > lo && coeff(hi).cwiseAbs().maxCoeff() <= tol) --hi;
  std::vector<Mat2> nc(c_.begin() + (lo - k_min_), c_.begin() + (hi - k_min_ + 1));
  MatrixLoop out(std::move(nc), lo, radius);
  out.validity = validity;
  out.samples_hint = samples_hint;
  return out;
}

MatrixLoop MatrixLoop::truncated(int band, double* residual) const {
  double dropped = 0.0;
  int lo = std::max(k_min_, -band), hi = std::min(k_max(), band);
  if (lo > hi) {
    lo = 0;
    hi = 0;
  }
  for (int k = k_min_; k < lo; ++k) dropped += coeff(k).cwiseAbs().maxCoeff();
  for (int k = hi + 1; k <= k_max(); ++k) dropped += coeff(k).cwiseAbs().maxCoeff();
  if (residual) *residual = dropped;
  std::vector<Mat2> nc(c_.begin() + (lo - k_min_), c_.begin() + (hi - k_min_ + 1));
  MatrixLoop out(std::move(nc), lo, radius);
  out.validity = validity;
  out.samples_hint = samples_hint;
  return out;
}

MatrixLoop star(const MatrixLoop& x) {
  std::vector<Mat2> c(x.k_max() - x.k_min() + 1);
  for (int k = x.k_min(); k <= x.k_max(); ++k) {
    c[x.k_max() - k] = x.coeff(k).adjoint();  // (X*)_{-k} slot
  }
  MatrixLoop out(std::move(c), -x.k_max(), x.radius);
  out.validity = x.validity.inverted();
  out.samples_hint = x.samples_hint;
  return out;
}

MatrixLoop mul(const MatrixLoop& x, const MatrixLoop& y) {
  const int lo = x.k_min() + y.k_min();
  const int hi = x.k_max() + y.k_max();
  std::vector<Mat2> c(hi - lo + 1, Mat2::Zero());
  for (int i = x.k_min(); i <= x.k_max(); ++i) {
    const Mat2 xi = x.coeff(i);
    if (xi.cwiseAbs().maxCoeff() == 0.0) continue;
    for (int j = y.k_min(); j <= y.k_max(); ++j) {
      c[i + j - lo] += xi * y.coeff(j);
    }
  }
  MatrixLoop out(std::move(c), lo, x.radius);
  out.validity = x.validity.intersect(y.validity);
  out.samples_hint = std::max(x.samples_hint, y.samples_hint);
  const int band = loop_options().max_bandwidth * 4;
  if (out.k_max() > band || out.k_min() < -band) {
    double res = 0.0;
    MatrixLoop t = out.truncated(band, &res);
    double sc = std::max(1.0, out.coeff_scale());
    if (res / sc > loop_options().trunc_tol)
      throw BandwidthError("mul: truncation residual above tolerance");
    return t.trimmed();
  }
  return out.trimmed();
}

MatrixLoop add(const MatrixLoop& x, const MatrixLoop& y) {
  int lo = std::min(x.k_min(), y.k_min());
  int hi = std::max(x.k_max(), y.k_max());
  std::vector<Mat2> c(hi - lo + 1, Mat2::Zero());
  for (int k = lo; k <= hi; ++k) c[k - lo] = x.coeff(k) + y.coeff(k);
  MatrixLoop out(std::move(c), lo, x.radius);
  out.validity = x.validity.intersect(y.validity);
  out.samples_hint = std::max(x.samples_hint, y.samples_hint);
  return out;
}

MatrixLoop sub(const MatrixLoop& x, const MatrixLoop& y) {
  return add(x, scale(y, -1.0));
}

MatrixLoop scale(const MatrixLoop& x, cplx s) {
  std::vector<Mat2> c(x.k_max() - x.k_min() + 1);
  for (int k = x.k_min(); k <= x.k_max(); ++k) c[k - x.k_min()] = s * x.coeff(k);
  MatrixLoop out(std::move(c), x.k_min(), x.radius);
  out.validity = x.validity;
  out.samples_hint = x.samples_hint;
  return out;
}

MatrixLoop inv(const MatrixLoop& x) {
  // Sample-wise adjugate/det on the home circle, then inverse DFT.
  int m = std::max(x.samples_hint,
                   next_power_of_two(2 * (x.k_max() - x.k_min() + 1)));
  for (int attempt = 0; attempt < 4; ++attempt) {
    auto s = x.samples(x.radius, m);
    std::vector<Mat2> is(m);
    for (int j = 0; j < m; ++j) {
      cplx det = s[j].determinant();
      if (std::abs(det) < loop_options().singular_tol)
        throw SingularLoopError("inv: det below tolerance on samples");
      is[j] = adjugate(s[j]) / det;
    }
    MatrixLoop out = MatrixLoop::from_samples(is, x.radius, x.radius);
    out.validity = x.validity;
    out.samples_hint = x.samples_hint;
    // Verify: residual of x * out - id on a denser sample set.
    MatrixLoop prod = mul(x, out);
    double resid = 0.0;
    auto ps = prod.samples(x.radius, 2 * m);
    for (const auto& p : ps) resid = std::max(resid, op_norm(p - Mat2::Identity()));
    if (resid <= 1e3 * loop_options().trunc_tol || m >= 8192) {
      if (resid > std::sqrt(loop_options().trunc_tol))
        throw BandwidthError("inv: aliasing residual too large");
      return out;
    }
    m *= 2;  // doubling on demand
  }
  throw BandwidthError("inv: failed to reach tolerance");
}

double sup_norm_circle(const MatrixLoop& x, double circle, int m) {
  if (m == 0) m = x.samples_hint;
  double s = 0.0;
  for (const auto& v : x.samples(circle, m)) s = std::max(s, op_norm(v));
  return s;
}

double sup_norm_annulus(const MatrixLoop& x, const Annulus& a, int circles, int m) {
  double s = 0.0;
  for (int i = 0; i < circles; ++i) {
    double t = circles == 1 ? 0.5 : double(i) / (circles - 1);
    double rho = a.inner * std::pow(a.outer / a.inner, t);
    s = std::max(s, sup_norm_circle(x, rho, m));
  }
  return s;
}

double unitary_residual(const MatrixLoop& x, double circle, int m) {
  if (m == 0) m = x.samples_hint;
  const double pi = 3.14159265358979323846;
  double resid = 0.0;
  for (int j = 0; j < m; ++j) {
    double th = 2.0 * pi * j / m;
    cplx lam = circle * cplx(std::cos(th), std::sin(th));
    cplx lam_ref = 1.0 / std::conj(lam);
    Mat2 xs = x.eval(lam_ref).adjoint();  // conj(X(1/conj l))^t
    resid = std::max(resid, op_norm(xs * x.eval(lam) - Mat2::Identity()));
  }
  return resid;
}

double negative_tail(const MatrixLoop& x) {
  double tail = 0.0;
  for (int k = x.k_min(); k <= -1; ++k) tail += x.coeff(k).cwiseAbs().maxCoeff();
  double sc = std::max(1e-300, x.coeff_scale());
  return tail / sc;
}

bool is_positive_loop(const MatrixLoop& x, double tol) {
  if (negative_tail(x) > tol) return false;
  Mat2 x0 = x.coeff(0);
  if (std::abs(x0(1, 0)) > tol) return false;
  if (x0(0, 0).real() <= 0.0 || x0(1, 1).real() <= 0.0) return false;
  if (std::abs(x0(0, 0).imag()) > tol || std::abs(x0(1, 1).imag()) > tol) return false;
  return true;
}

nlohmann::json loop_to_json(const MatrixLoop& x) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int k = x.k_min(); k <= x.k_max(); ++k) {
    Mat2 m = x.coeff(k);
    nlohmann::json entries = nlohmann::json::array();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        entries.push_back({m(r, c).real(), m(r, c).imag()});
    coeffs.push_back({k, entries});
  }
  return {{"radius", x.radius}, {"coeffs", coeffs}};
}

MatrixLoop loop_from_json(const nlohmann::json& j) {
  MatrixLoop out = MatrixLoop::constant(Mat2::Zero(), j.at("radius").get<double>());
  for (const auto& item : j.at("coeffs")) {
    int k = item.at(0).get<int>();
    const auto& e = item.at(1);
    Mat2 m;
    int idx = 0;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        m(r, c) = cplx(e.at(idx).at(0).get<double>(), e.at(idx).at(1).get<double>());
        ++idx;
      }
    out.set_coeff(k, m);
  }
  return out.trimmed();
}

}  // namespace dpw
