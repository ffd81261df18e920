#include "dpw/iwasawa.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "dpw/fft.hpp"

namespace dpw {

namespace {

const double kPi = 3.14159265358979323846;

std::vector<cplx> circle_points(double rho, int m) {
  std::vector<cplx> pts(m);
  for (int j = 0; j < m; ++j) {
    double th = 2.0 * kPi * j / m;
    pts[j] = rho * cplx(std::cos(th), std::sin(th));
  }
  return pts;
}

// Fourier coefficients (k in [-m/2, m/2)) of samples on |lambda| = rho.
std::vector<Mat2> coeffs_from_circle(const std::vector<Mat2>& samples, double rho,
                                     int& k_min_out) {
  int m = static_cast<int>(samples.size());
  std::vector<std::vector<cplx>> bins(4, std::vector<cplx>(m));
  for (int j = 0; j < m; ++j) {
    bins[0][j] = samples[j](0, 0);
    bins[1][j] = samples[j](0, 1);
    bins[2][j] = samples[j](1, 0);
    bins[3][j] = samples[j](1, 1);
  }
  for (auto& b : bins) fft_radix2(b, -1);
  int half = m / 2;
  std::vector<Mat2> coeffs(m);
  for (int idx = 0; idx < m; ++idx) {
    int k = idx <= half - 1 ? idx : idx - m;
    double w = std::pow(rho, -k) / m;
    Mat2 mm;
    mm << bins[0][idx] * w, bins[1][idx] * w, bins[2][idx] * w, bins[3][idx] * w;
    coeffs[k + half] = mm;
  }
  k_min_out = -half;
  return coeffs;
}

// Bauer finite-section seed for the spectral factorization G = B^* B of a
// hermitian positive-definite symbol on S^1 given by Fourier coefficients
// g[k + gk], k in [-gk, gk]. Returns polynomial coefficients B_0..B_K.
std::vector<Mat2> bauer_seed(const std::vector<Mat2>& g, int gk, int out_k) {
  const int nblk = std::max(2 * out_k + 8, 3 * gk / 2 + 8);
  const int n = 2 * nblk;
  Eigen::MatrixXcd t(n, n);
  t.setZero();
  for (int i = 0; i < nblk; ++i) {
    for (int j = 0; j < nblk; ++j) {
      int k = j - i;
      Mat2 blk = Mat2::Zero();
      if (k >= -gk && k <= gk) blk = g[k + gk];
      t.block<2, 2>(2 * i, 2 * j) = blk;
    }
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(t);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("iwasawa: Gram loop not positive definite on samples");
  Eigen::MatrixXcd r = llt.matrixL().adjoint();  // upper triangular, T = R^* R
  // Rows in the bulk are near-Toeplitz with symbol B: take a middle row block.
  int row = nblk / 3;
  std::vector<Mat2> b(out_k + 1, Mat2::Zero());
  for (int k = 0; k <= out_k && row + k < nblk; ++k) {
    b[k] = r.block<2, 2>(2 * row, 2 * (row + k));
  }
  return b;
}

struct SampledPoly {
  // Polynomial B(lambda) = sum_{k>=0} b[k] lambda^k evaluated on S^1 samples.
  std::vector<Mat2> b;
  Mat2 eval(cplx lam) const {
    Mat2 acc = Mat2::Zero();
    for (int k = static_cast<int>(b.size()) - 1; k >= 0; --k) acc = acc * lam + b[k];
    return acc;
  }
};

}  // namespace

Mat2 shift_split(const Mat2& pos_x_at0, const Mat2& y_at0) {
  Mat2 u1, t1;
  qr_constant(y_at0, u1, t1);
  Mat2 u, t;
  qr_constant(pos_x_at0 * u1, u, t);
  return u;
}

IwasawaPair iwasawa_constant(const Mat2& m, double r) {
  Mat2 u, t;
  qr_constant(m, u, t);
  IwasawaPair out;
  out.unitary = MatrixLoop::constant(u, r);
  out.positive = MatrixLoop::constant(t, r);
  out.residual = op_norm(u * t - m);
  return out;
}

IwasawaPair iwasawa_eval(const std::function<Mat2(cplx)>& phi, double r,
                         const IwasawaOptions& opts) {
  const int kband = opts.bandwidth > 0 ? opts.bandwidth : loop_options().max_bandwidth;
  const int m = next_power_of_two(
      std::max(opts.samples > 0 ? opts.samples : loop_options().samples, 4 * kband));

  // Gram symbol on S^1: G = Phi^H Phi pointwise.
  auto s1 = circle_points(1.0, m);
  std::vector<Mat2> phi_s1(m), gram(m);
  for (int j = 0; j < m; ++j) {
    phi_s1[j] = phi(s1[j]);
    cplx det = phi_s1[j].determinant();
    if (std::abs(det - cplx(1.0, 0.0)) > 1e-6)
      throw DomainError("iwasawa: input loop det differs from 1 on samples");
    gram[j] = phi_s1[j].adjoint() * phi_s1[j];
  }
  int gkmin = 0;
  auto gc = coeffs_from_circle(gram, 1.0, gkmin);
  int half = m / 2;
  // Collapse to a symmetric band and enforce the star-hermitian symmetry
  // G_{-k} = G_k^H exactly.
  int gband = std::min(half - 1, 2 * kband);
  std::vector<Mat2> g(2 * gband + 1);
  for (int k = 0; k <= gband; ++k) {
    Mat2 gk = gc[k + half];
    Mat2 gmk = gc[-k + half];
    Mat2 sym = 0.5 * (gk + gmk.adjoint());
    g[k + gband] = sym;
    g[-k + gband] = sym.adjoint();
  }
  g[gband] = 0.5 * (g[gband] + g[gband].adjoint().eval());

  // Seed and Newton-refine the factor B.
  SampledPoly bpoly;
  bpoly.b = bauer_seed(g, gband, kband);
  std::vector<Mat2> b_s1(m), e_s1(m);
  double resid = 1e300;
  for (int it = 0; it < opts.max_iter; ++it) {
    for (int j = 0; j < m; ++j) b_s1[j] = bpoly.eval(s1[j]);
    double err = 0.0;
    for (int j = 0; j < m; ++j) {
      Mat2 binv = b_s1[j].inverse();
      e_s1[j] = binv.adjoint() * gram[j] * binv - Mat2::Identity();
      err = std::max(err, op_norm(e_s1[j]));
    }
    resid = err;
    if (err < opts.tol) break;
    int ekmin = 0;
    auto ec = coeffs_from_circle(e_s1, 1.0, ekmin);
    // Newton update B <- (I + P_+(E)) B with P_+ taking half of E_0.
    SampledPoly ypoly;
    ypoly.b.assign(kband + 1, Mat2::Zero());
    ypoly.b[0] = 0.5 * ec[half];
    for (int k = 1; k <= kband && k < half; ++k) ypoly.b[k] = ec[k + half];
    std::vector<Mat2> nb(kband + 1, Mat2::Zero());
    // (I + Y) B truncated to degree kband.
    for (int k = 0; k <= kband; ++k) {
      Mat2 acc = bpoly.b[k];
      for (int j = 0; j <= k; ++j) {
        if (j < static_cast<int>(ypoly.b.size()))
          acc += ypoly.b[j] * (k - j <= kband ? bpoly.b[k - j] : Mat2::Zero());
      }
      nb[k] = acc;
    }
    bpoly.b = nb;
    if (it == opts.max_iter - 1 && resid > 1e-8)
      throw FactorizationError("iwasawa: Newton refinement failed to converge");
  }

  // Normalize B(0) into the positive-diagonal triangular group.
  Mat2 u0, t0;
  qr_constant(bpoly.b[0], u0, t0);
  Mat2 u0inv = u0.adjoint();
  for (auto& bk : bpoly.b) bk = u0inv * bk;

  MatrixLoop bloop(bpoly.b, 0, r);
  bloop.validity = Annulus(0.0, 1e300);
  bloop.samples_hint = m;

  // F = Phi B^{-1}: coefficients assembled from two circles so that
  // evaluation anywhere in [r, 1/r] stays stable.
  double r_in = std::min(r, 1.0), r_out = std::max(1.0, 1.0 / r);
  std::vector<Mat2> f_in(m), f_out(m);
  auto pts_in = circle_points(r_in, m);
  auto pts_out = circle_points(r_out, m);
  for (int j = 0; j < m; ++j) {
    f_in[j] = phi(pts_in[j]) * bpoly.eval(pts_in[j]).inverse();
    f_out[j] = phi(pts_out[j]) * bpoly.eval(pts_out[j]).inverse();
  }
  int dummy = 0;
  auto cf_in = coeffs_from_circle(f_in, r_in, dummy);
  auto cf_out = coeffs_from_circle(f_out, r_out, dummy);
  MatrixLoop floop;
  floop.radius = r;
  for (int k = -kband; k <= kband; ++k) {
    floop.set_coeff(k, k < 0 ? cf_in[k + half] : cf_out[k + half]);
  }
  floop = floop.trimmed(1e-16);
  floop.validity = Annulus(r_in * 0.999, r_out * 1.001);
  floop.samples_hint = m;

  IwasawaPair out;
  out.unitary = floop;
  out.positive = bloop;
  double rec = 0.0;
  for (int j = 0; j < m; ++j) {
    cplx lam = pts_in[j];
    rec = std::max(rec, op_norm(floop.eval(lam) * bloop.eval(lam) - phi(lam)));
  }
  out.residual = rec;
  return out;
}

IwasawaPair iwasawa(const MatrixLoop& phi, double r, const IwasawaOptions& opts) {
  if (phi.k_min() == 0 && phi.k_max() == 0) {
    return iwasawa_constant(phi.coeff(0), r);
  }
  // Extension requirement: the factorization reads the loop on the closed
  // annulus [min(r,1), max(1,1/r)].
  double need_in = std::min(r, 1.0), need_out = std::max(1.0, 1.0 / r);
  if (!(phi.validity.inner < need_in && phi.validity.outer > need_out))
    throw DomainError("iwasawa: loop does not extend to the annulus [r, 1/r]");
  auto eval = [&phi](cplx lam) { return phi.eval(lam); };
  IwasawaOptions o = opts;
  if (o.samples == 0) o.samples = phi.samples_hint;
  return iwasawa_eval(eval, r, o);
}

// ---------------------------------------------------------------------------
// Annulus Gauss-Newton solver.

namespace {

struct CoeffVec {
  // F_k, k in [-kf, kf]
  std::vector<Mat2> f;
  int kf = 0;
  Mat2& at(int k) { return f[k + kf]; }
  const Mat2& at(int k) const { return f[k + kf]; }
};

}  // namespace

IwasawaPair iwasawa_annulus(const std::function<Mat2(cplx)>& phi, double r,
                            double outer, const MatrixLoop& seed_unitary,
                            const IwasawaOptions& opts) {
  const int kf = opts.bandwidth > 0 ? opts.bandwidth : 48;
  const int m = next_power_of_two(std::max(4 * kf, 256));
  const int half = m / 2;

  // Phi coefficients: negative side from C_r, nonnegative side from a circle
  // just inside the outer analyticity radius.
  double rho_out = 0.97 * outer;
  auto s_in = circle_points(r, m);
  auto s_out = circle_points(rho_out, m);
  std::vector<Mat2> p_in(m), p_out(m);
  for (int j = 0; j < m; ++j) {
    p_in[j] = phi(s_in[j]);
    p_out[j] = phi(s_out[j]);
  }
  int dmy = 0;
  auto c_in = coeffs_from_circle(p_in, r, dmy);
  auto c_out = coeffs_from_circle(p_out, rho_out, dmy);
  const int kp = std::min(half - 1, 2 * kf);
  std::vector<Mat2> pc(2 * kp + 1);
  for (int k = -kp; k <= kp; ++k) pc[k + kp] = k < 0 ? c_in[k + half] : c_out[k + half];

  CoeffVec fc;
  fc.kf = kf;
  fc.f.assign(2 * kf + 1, Mat2::Zero());
  for (int k = -kf; k <= kf; ++k) fc.at(k) = seed_unitary.coeff(k);

  // Residual layout:
  //   unitarity U_k = sum_m F_m^H F_{m+k} - delta_k, k = 0..2kf (complex 2x2)
  //   holomorphy H_k = (F^* Phi)_k, k = -(kf+kp)..-1 (complex 2x2)
  //   normalization: lower-left of (F^* Phi)_0 (complex), imag of diagonal (2 real)
  const int n_unit = (2 * kf + 1) * 8;           // real count (k=0..2kf, 2x2 complex)
  const int n_holo = (kf + kp) * 8;
  const int n_norm = 4;
  const int n_res = n_unit + n_holo + n_norm;
  const int n_var = (2 * kf + 1) * 8;

  auto fstar = [&](const CoeffVec& f, int k) -> Mat2 {  // (F^*)_k = F_{-k}^H
    if (-k < -f.kf || -k > f.kf) return Mat2::Zero();
    return f.at(-k).adjoint();
  };

  auto residual = [&](const CoeffVec& f, Eigen::VectorXd& res) {
    res.setZero(n_res);
    int idx = 0;
    for (int k = 0; k <= 2 * kf; ++k) {
      Mat2 u = Mat2::Zero();
      for (int mm = -kf; mm <= kf; ++mm) {
        int j = mm + k;
        if (j < -kf || j > kf) continue;
        u += f.at(mm).adjoint() * f.at(j);
      }
      if (k == 0) u -= Mat2::Identity();
      for (int rr = 0; rr < 2; ++rr)
        for (int cc = 0; cc < 2; ++cc) {
          res[idx++] = u(rr, cc).real();
          res[idx++] = u(rr, cc).imag();
        }
    }
    for (int k = -(kf + kp); k <= -1; ++k) {
      Mat2 h = Mat2::Zero();
      for (int mm = -kp; mm <= kp; ++mm) {
        int j = k - mm;  // (F^*)_j Phi_mm with j + mm = k
        Mat2 fs = fstar(f, j);
        if (fs.cwiseAbs().maxCoeff() == 0.0) continue;
        h += fs * pc[mm + kp];
      }
      for (int rr = 0; rr < 2; ++rr)
        for (int cc = 0; cc < 2; ++cc) {
          res[idx++] = h(rr, cc).real();
          res[idx++] = h(rr, cc).imag();
        }
    }
    Mat2 b0 = Mat2::Zero();
    for (int mm = -kp; mm <= kp; ++mm) {
      Mat2 fs = fstar(f, -mm);
      if (fs.cwiseAbs().maxCoeff() == 0.0) continue;
      b0 += fs * pc[mm + kp];
    }
    res[idx++] = b0(1, 0).real();
    res[idx++] = b0(1, 0).imag();
    res[idx++] = b0(0, 0).imag();
    res[idx++] = b0(1, 1).imag();
  };

  // Gauss-Newton with finite-difference Jacobian columns assembled from the
  // bilinear structure (exact: residual is quadratic, so directional
  // derivatives from two evaluations are exact).
  Eigen::VectorXd res(n_res), res_trial(n_res);
  residual(fc, res);
  double prev = res.norm();
  for (int it = 0; it < 25; ++it) {
    if (prev < opts.tol) break;
    Eigen::MatrixXd jac(n_res, n_var);
    CoeffVec fpert = fc;
    const double h = 1e-7;
    int col = 0;
    for (int k = -kf; k <= kf; ++k) {
      for (int rr = 0; rr < 2; ++rr)
        for (int cc = 0; cc < 2; ++cc)
          for (int part = 0; part < 2; ++part) {
            cplx delta = part == 0 ? cplx(h, 0.0) : cplx(0.0, h);
            fpert.at(k)(rr, cc) += delta;
            residual(fpert, res_trial);
            fpert.at(k)(rr, cc) -= delta;
            jac.col(col++) = (res_trial - res) / h;
          }
    }
    Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-res);
    // Line search (plain damping).
    double alpha = 1.0;
    for (int ls = 0; ls < 8; ++ls) {
      CoeffVec trial = fc;
      int v = 0;
      for (int k = -kf; k <= kf; ++k)
        for (int rr = 0; rr < 2; ++rr)
          for (int cc = 0; cc < 2; ++cc) {
            trial.at(k)(rr, cc) += alpha * cplx(step[v], step[v + 1]);
            v += 2;
          }
      residual(trial, res_trial);
      if (res_trial.norm() < prev) {
        fc = trial;
        res = res_trial;
        prev = res_trial.norm();
        break;
      }
      alpha *= 0.5;
      if (ls == 7) {
        it = 1000;  // stalled
      }
    }
  }
  if (prev > 1e-7)
    throw FactorizationError("iwasawa_annulus: Gauss-Newton did not converge");

  MatrixLoop floop;
  floop.radius = r;
  for (int k = -kf; k <= kf; ++k) floop.set_coeff(k, fc.at(k));
  floop = floop.trimmed(1e-16);
  floop.validity = Annulus(r * 0.999, (1.0 / r) * 1.001);

  // B = F^* Phi, truncated to the nonnegative range.
  MatrixLoop bloop;
  bloop.radius = r;
  for (int k = 0; k <= kp; ++k) {
    Mat2 b = Mat2::Zero();
    for (int mm = -kp; mm <= kp; ++mm) {
      int j = k - mm;
      if (-j < -kf || -j > kf) continue;
      b += fc.at(-j).adjoint() * pc[mm + kp];
    }
    bloop.set_coeff(k, b);
  }
  bloop = bloop.trimmed(1e-16);
  bloop.validity = Annulus(0.0, outer);

  // Exact normalization of B(0).
  Mat2 u0, t0;
  qr_constant(bloop.coeff(0), u0, t0);
  if (op_norm(u0 - Mat2::Identity()) > 1e-9) {
    MatrixLoop bn = mul(MatrixLoop::constant(u0.adjoint(), r), bloop);
    MatrixLoop fn = mul(floop, MatrixLoop::constant(u0, r));
    bloop = bn;
    floop = fn;
  }

  IwasawaPair out;
  out.unitary = floop;
  out.positive = bloop;
  double rec = 0.0;
  for (int j = 0; j < m; ++j) {
    cplx lam = s_in[j];
    rec = std::max(rec,
                   op_norm(floop.eval(lam) * bloop.eval(lam) - p_in[j]));
  }
  out.residual = rec;
  return out;
}

}  // namespace dpw
