#include "dpw/delaunay.hpp"

#include <algorithm>
#include <cmath>

namespace dpw {

namespace {
const double kPi = 3.14159265358979323846;
}

Mat2 DelaunayResidue::at(cplx lambda) const {
  if (lambda == cplx(0.0, 0.0)) throw PoleError("residue_matrix: lambda = 0");
  Mat2 m;
  m << cplx(c, 0.0), a / lambda + std::conj(b), b + std::conj(a) * lambda,
      cplx(-c, 0.0);
  return m;
}

cplx DelaunayResidue::mu_sq(cplx lambda) const {
  return cplx(c * c, 0.0) +
         (a / lambda + std::conj(b)) * (b + std::conj(a) * lambda);
}

cplx DelaunayResidue::mu(cplx lambda) const {
  cplx m = std::sqrt(mu_sq(lambda));
  if (m.real() < 0.0 || (m.real() == 0.0 && m.imag() < 0.0)) m = -m;
  return m;
}

MatrixLoop DelaunayResidue::loop(double radius) const {
  MatrixLoop out;
  out.radius = radius;
  Mat2 m_neg = Mat2::Zero(), m0 = Mat2::Zero(), m_pos = Mat2::Zero();
  m_neg(0, 1) = a;
  m0 << cplx(c, 0.0), std::conj(b), b, cplx(-c, 0.0);
  m_pos(1, 0) = std::conj(a);
  out.set_coeff(-1, m_neg);
  out.set_coeff(0, m0);
  out.set_coeff(1, m_pos);
  out.validity = Annulus(0.0, 1e300);
  return out;
}

double DelaunayResidue::q() const {
  return std::norm(a) + std::norm(b) + c * c;
}

bool DelaunayResidue::is_vacuum(double tol) const {
  return std::abs(std::abs(a) - std::abs(b)) < tol && std::abs(c) < tol;
}

cplx DelaunayResidue::p() const { return -a * b / std::abs(a * b); }

cplx DelaunayResidue::alpha() const { return a * b / std::abs(a * b); }

SpectralData spectral_data(const DelaunayResidue& res, double outer_radius,
                           double inner_radius) {
  SpectralData sd;
  sd.p = res.p();
  sd.alpha = res.alpha();
  sd.vacuum = res.is_vacuum();
  const double ab = std::abs(res.a * res.b);
  const double q = res.q();
  // nu's: conj(ab) l^2 + q l + ab = 0, i.e. l = p t with t > 0 solving
  // ab t^2 - q t + ab = 0 (note l = -pt gives |ab| t^2 - q t + |ab| = 0).
  {
    double disc = q * q - 4.0 * ab * ab;
    double sq = std::sqrt(std::max(0.0, disc));
    double t1 = (q - sq) / (2.0 * ab);
    double t2 = (q + sq) / (2.0 * ab);
    sd.nu1 = t1 * sd.p;
    sd.nu2 = t2 * sd.p;
  }
  // Resonances: mu^2 = k^2/4 with mu^2 lambda = ab + q lambda + conj(ab) l^2:
  //   conj(ab) l^2 + (q - k^2/4) l + ab = 0.
  // With l = alpha t: |ab| t^2 + (q - k^2/4) t + |ab| = 0 (roots t, 1/t), and
  // l = p s: |ab| s^2 - (q - k^2/4) s + |ab| = 0.
  // |mu| peaks on the two rays at the region boundary circles. For a disk
  // (inner_radius = 0) the resonance set accumulates at lambda = 0; cap the
  // half-integer level at 40 in that case.
  int kmax = 40;
  if (inner_radius > 0.0) {
    double mu2_max = std::abs(res.mu_sq(outer_radius * sd.alpha));
    mu2_max = std::max(mu2_max, std::abs(res.mu_sq(outer_radius * sd.p)));
    mu2_max = std::max(mu2_max, std::abs(res.mu_sq(inner_radius * sd.alpha)));
    mu2_max = std::max(mu2_max, std::abs(res.mu_sq(inner_radius * sd.p)));
    kmax = static_cast<int>(2.0 * std::sqrt(mu2_max)) + 2;
  }
  const cplx cab = std::conj(res.a * res.b);
  for (int k = 1; k <= kmax; ++k) {
    double e = q - 0.25 * k * k;
    // roots of conj(ab) l^2 + e l + ab = 0
    cplx disc = cplx(e * e, 0.0) - 4.0 * cab * (res.a * res.b);
    cplx sq = std::sqrt(disc);
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      cplx l = (-cplx(e, 0.0) + double(sgn) * sq) / (2.0 * cab);
      if (std::abs(l) < 1e-14) continue;
      // Newton polish on mu^2 - k^2/4 (guards round-off in the quadratic).
      for (int it = 0; it < 3; ++it) {
        cplx f = res.mu_sq(l) - cplx(0.25 * k * k, 0.0);
        cplx df = -res.a * res.b / (l * l) + cab;
        if (std::abs(df) < 1e-14) break;
        l -= f / df;
      }
      double m = std::abs(l);
      if (m > outer_radius + 1e-12 || m < inner_radius - 1e-12) continue;
      bool dup = false;
      for (auto& rp : sd.resonance_points) {
        if (std::abs(rp.lambda - l) < 1e-9) {
          dup = true;
          if (rp.k == k) rp.double_root = true;
        }
      }
      if (!dup) {
        ResonancePoint rp;
        rp.lambda = l;
        rp.k = k;
        rp.double_root = std::abs(sq) < 1e-9;
        sd.resonance_points.push_back(rp);
      }
    }
  }
  std::sort(sd.resonance_points.begin(), sd.resonance_points.end(),
            [](const ResonancePoint& x, const ResonancePoint& y) {
              return std::abs(x.lambda) < std::abs(y.lambda);
            });
  return sd;
}

double dist_to_JA(const DelaunayResidue& res, cplx lambda) {
  const double ab = std::abs(res.a * res.b);
  const double q = res.q();
  double sq = std::sqrt(std::max(0.0, q * q - 4.0 * ab * ab));
  cplx nu1 = (q - sq) / (2.0 * ab) * res.p();
  cplx nu2 = (q + sq) / (2.0 * ab) * res.p();
  cplx d = nu2 - nu1;
  double len2 = std::norm(d);
  if (len2 < 1e-28) return std::abs(lambda - nu1);
  double t = ((lambda - nu1) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(lambda - (nu1 + t * d));
}

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * (a + b); ++i) {
    double am = 0.5 * (a + b);
    double gm = std::sqrt(a * b);
    a = am;
    b = gm;
  }
  return 0.5 * (a + b);
}

double DelaunayProfile::v_at(double x) const {
  if (vacuum) return vmin;
  double t = std::fmod(x, rho);
  if (t < 0) t += rho;
  int i = std::min(n - 1, static_cast<int>(t / h));
  double s = (t - i * h) / h;
  // Cubic Hermite on [x_i, x_{i+1}].
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * v[i] + h10 * h * dv[i] + h01 * v[i + 1] + h11 * h * dv[i + 1];
}

double DelaunayProfile::dv_at(double x) const {
  if (vacuum) return 0.0;
  double t = std::fmod(x, rho);
  if (t < 0) t += rho;
  int i = std::min(n - 1, static_cast<int>(t / h));
  double s = (t - i * h) / h;
  double d00 = (6 * s * s - 6 * s) / h;
  double d10 = 3 * s * s - 4 * s + 1;
  double d01 = (6 * s - 6 * s * s) / h;
  double d11 = 3 * s * s - 2 * s;
  return d00 * v[i] + d10 * dv[i] + d01 * v[i + 1] + d11 * dv[i + 1];
}

namespace {

// One RK4 step of the second-order system v'' = -2 v^3 + 4 q v.
void rk4_step(double& v, double& w, double h, double q) {
  auto acc = [q](double vv) { return -2.0 * vv * vv * vv + 4.0 * q * vv; };
  double k1v = w, k1w = acc(v);
  double k2v = w + 0.5 * h * k1w, k2w = acc(v + 0.5 * h * k1v);
  double k3v = w + 0.5 * h * k2w, k3w = acc(v + 0.5 * h * k2v);
  double k4v = w + h * k3w, k4w = acc(v + h * k3v);
  v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
}

}  // namespace

DelaunayProfile profile(const DelaunayResidue& res, int table_size) {
  DelaunayProfile out;
  const double ab = std::abs(res.a * res.b);
  const double q = res.q();
  double disc = std::max(0.0, q * q - 4.0 * ab * ab);
  double sq = std::sqrt(disc);
  double vmin2 = 2.0 * (q - sq), vmax2 = 2.0 * (q + sq);
  if (vmin2 <= 0.0)
    throw DomainError("profile: quartic has no positive root interval");
  out.vmin = std::sqrt(vmin2);
  out.vmax = std::sqrt(vmax2);

  if (res.is_vacuum()) {
    out.vacuum = true;
    double v0 = 2.0 * std::abs(res.b);
    out.vmin = out.vmax = v0;
    out.rho = kPi / (2.0 * std::abs(res.b));  // continuous limit pi / agm(v, v)
    out.n = table_size;
    out.h = out.rho / table_size;
    out.v.assign(table_size + 1, v0);
    out.dv.assign(table_size + 1, 0.0);
    return out;
  }

  // Period by the complete integral: rho = pi / agm(vmin, vmax).
  out.rho = kPi / agm(out.vmin, out.vmax);

  double v0 = 2.0 * std::abs(res.b);
  double quartic0 = -std::pow(v0, 4) + 4.0 * q * v0 * v0 - 16.0 * ab * ab;
  double w0 = std::sqrt(std::max(0.0, quartic0));
  if (res.c > 0) w0 = -w0;  // sign(v'(0)) = -sign(c)
  // c == 0: v0 is a turning point, w0 = 0, direction set by v''.

  out.n = table_size;
  out.h = out.rho / table_size;
  out.v.resize(table_size + 1);
  out.dv.resize(table_size + 1);
  const int substeps = 8;
  double v = v0, w = w0;
  out.v[0] = v;
  out.dv[0] = w;
  for (int i = 1; i <= table_size; ++i) {
    for (int s = 0; s < substeps; ++s) rk4_step(v, w, out.h / substeps, q);
    out.v[i] = v;
    out.dv[i] = w;
  }
  out.period_mismatch = std::abs(v - v0) + std::abs(w - w0);

  double resid = 0.0;
  for (int i = 0; i <= table_size; ++i) {
    double vv = out.v[i], ww = out.dv[i];
    double r = ww * ww + std::pow(vv, 4) - 4.0 * q * vv * vv + 16.0 * ab * ab;
    resid = std::max(resid, std::abs(r));
  }
  out.ode_residual = resid;
  return out;
}

// ---------------------------------------------------------------------------
// psi / sigma

PsiEvaluator::PsiEvaluator(const DelaunayResidue& res, const DelaunayProfile& prof,
                           cplx lambda)
    : prof_(&prof) {
  integrand_scale_ = 4.0 * std::conj(res.a) * std::conj(res.b) * lambda;
  // Near-singularity guard: the integrand pole locus is v^2 = -scale, i.e.
  // lambda on J_A.
  double guard = 1e300;
  for (int i = 0; i <= prof.n; ++i) {
    double v2 = prof.v[i] * prof.v[i];
    guard = std::min(guard, std::abs(integrand_scale_ + cplx(v2, 0.0)));
  }
  if (guard < 1e-8 * std::abs(integrand_scale_))
    throw DomainError("psi: lambda too close to J_A (integrand pole)");

  // Cumulative integral at table nodes by composite Simpson over pairs.
  auto integrand = [this](double v2) {
    return 2.0 * integrand_scale_ / (integrand_scale_ + cplx(v2, 0.0));
  };
  cum_.assign(prof.n + 1, cplx(0.0, 0.0));
  for (int i = 0; i + 2 <= prof.n; i += 2) {
    double f0v = prof.v[i] * prof.v[i];
    double f1v = prof.v[i + 1] * prof.v[i + 1];
    double f2v = prof.v[i + 2] * prof.v[i + 2];
    cplx f0 = integrand(f0v), f1 = integrand(f1v), f2 = integrand(f2v);
    cum_[i + 1] = cum_[i] + prof.h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2);
    cum_[i + 2] = cum_[i] + prof.h / 3.0 * (f0 + 4.0 * f1 + f2);
  }
  if (prof.n % 2 == 1) {
    int i = prof.n - 1;
    double f0v = prof.v[i] * prof.v[i];
    double f1v = prof.v[i + 1] * prof.v[i + 1];
    cum_[i + 1] = cum_[i] + prof.h * 0.5 * (integrand(f0v) + integrand(f1v));
  }
  sigma_ = cum_[prof.n];
  err_ = std::pow(prof.h, 4);
}

cplx PsiEvaluator::psi(double x) const {
  const double rho = prof_->rho;
  double nper = std::floor(x / rho);
  double t = x - nper * rho;
  if (t >= rho) {
    t -= rho;
    nper += 1.0;
  }
  int i = std::min(prof_->n - 1, static_cast<int>(t / prof_->h));
  double x0 = i * prof_->h;
  // 5-point Gauss-Legendre on [x0, t] with the Hermite dense profile.
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  cplx local(0.0, 0.0);
  double hw = 0.5 * (t - x0);
  double mid = 0.5 * (t + x0);
  for (int g = 0; g < 5; ++g) {
    double xx = mid + hw * gx[g];
    double v2 = prof_->v_at(xx);
    v2 *= v2;
    local += gw[g] * 2.0 * integrand_scale_ / (integrand_scale_ + cplx(v2, 0.0));
  }
  local *= hw;
  return cum_[i] + local + nper * sigma_;
}

cplx psi(const DelaunayResidue& res, const DelaunayProfile& prof, double x,
         cplx lambda) {
  PsiEvaluator ev(res, prof, lambda);
  return ev.psi(x);
}

cplx sigma(const DelaunayResidue& res, const DelaunayProfile& prof, cplx lambda) {
  PsiEvaluator ev(res, prof, lambda);
  return ev.sigma();
}

// ---------------------------------------------------------------------------
// Closed-form frame

ClosedFormFrame::ClosedFormFrame(const DelaunayResidue& res,
                                 const DelaunayProfile& prof, cplx lambda)
    : res_(res), prof_(&prof), lambda_(lambda), psi_(res, prof, lambda) {
  a_mat_ = res.at(lambda);
  h11_ = std::sqrt(res.b / std::abs(res.b));
  const cplx cab = std::conj(res.a * res.b);
  // Unwrapped argument of w(x) = v^2(x) + 4 conj(ab) lambda along the table.
  theta_.resize(prof.n + 1);
  cplx w0 = cplx(prof.v[0] * prof.v[0], 0.0) + 4.0 * cab * lambda;
  theta0_ = std::arg(w0);
  theta_[0] = theta0_;
  for (int i = 1; i <= prof.n; ++i) {
    cplx w = cplx(prof.v[i] * prof.v[i], 0.0) + 4.0 * cab * lambda;
    cplx wprev = cplx(prof.v[i - 1] * prof.v[i - 1], 0.0) + 4.0 * cab * lambda;
    double d = std::arg(w / wprev);
    theta_[i] = theta_[i - 1] + d;
  }
  // No winding over a full period (v^2 retraces a real segment).
  s0_ = 4.0 * (cplx(std::norm(res.b), 0.0) + cab * lambda) * h11_;
}

cplx ClosedFormFrame::sqrt_det_s1(double x) const {
  const cplx cab = std::conj(res_.a * res_.b);
  double t = std::fmod(x, prof_->rho);
  if (t < 0) t += prof_->rho;
  int i = std::min(prof_->n - 1, static_cast<int>(t / prof_->h));
  double s = (t - i * prof_->h) / prof_->h;
  double th = theta_[i] * (1.0 - s) + theta_[i + 1] * s;
  double vv = prof_->v_at(x);
  cplx w = cplx(vv * vv, 0.0) + 4.0 * cab * lambda_;
  // Rectify the interpolated angle to the exact arg of w (mod 2 pi).
  double base = std::arg(w);
  double kwind = std::round((th - base) / (2.0 * kPi));
  th = base + 2.0 * kPi * kwind;
  cplx w0 = cplx(prof_->v[0] * prof_->v[0], 0.0) + 4.0 * cab * lambda_;
  double mag = std::sqrt(std::abs(w) / std::abs(w0)) *
               std::sqrt(vv / prof_->v[0]);
  return s0_ * mag * std::exp(cplx(0.0, 0.5 * (th - theta0_)));
}

Mat2 ClosedFormFrame::s_matrix(double x) const {
  const cplx cab = std::conj(res_.a * res_.b);
  double vv = prof_->v_at(x);
  double dvv = prof_->dv_at(x);
  Mat2 s1;
  s1 << cplx(vv * vv, 0.0) + 4.0 * cab * lambda_, cplx(dvv + 2.0 * res_.c * vv, 0.0),
      cplx(0.0, 0.0), 2.0 * (res_.b + std::conj(res_.a) * lambda_) * vv;
  Mat2 h;
  h << h11_, 0.0, 0.0, 1.0 / h11_;
  s1 = s1 * h;
  return s1 / sqrt_det_s1(x);
}

Mat2 ClosedFormFrame::unitary(double x, double y) const {
  cplx expo = cplx(x, y) - psi_.psi(x);
  return exp_traceless(expo * a_mat_) * s_matrix(x);
}

Mat2 ClosedFormFrame::positive(double x) const {
  Mat2 s = s_matrix(x);
  return s.inverse() * exp_traceless(psi_.psi(x) * a_mat_);
}

Mat2 ClosedFormFrame::floquet_R(double x) const {
  cplx expo = psi_.sigma() * x / prof_->rho - psi_.psi(x);
  return exp_traceless(expo * a_mat_) * s_matrix(x);
}

// ---------------------------------------------------------------------------
// tau

double tau_floquet(const DelaunayResidue& res, const DelaunayProfile& prof,
                   cplx lambda) {
  // Integrate B' = eta B over one period; eta is entire in lambda:
  //   eta = h^{-1} [[-v'/(2v), v], [4 conj(ab) lambda / v, v'/(2v)]] h.
  const cplx cab = std::conj(res.a * res.b);
  cplx h11 = std::sqrt(res.b / std::abs(res.b));
  Mat2 h, hinv;
  h << h11, 0.0, 0.0, 1.0 / h11;
  hinv << 1.0 / h11, 0.0, 0.0, h11;
  auto eta = [&](double x) -> Mat2 {
    double vv = prof.v_at(x);
    double dvv = prof.dv_at(x);
    Mat2 e;
    e << cplx(-dvv / (2.0 * vv), 0.0), cplx(vv, 0.0),
        4.0 * cab * lambda / vv, cplx(dvv / (2.0 * vv), 0.0);
    return hinv * e * h;
  };
  // RK4 over the profile table.
  Mat2 y = Mat2::Identity();
  int steps = std::max(512, prof.n / 4);
  double hstep = prof.rho / steps;
  for (int i = 0; i < steps; ++i) {
    double x = i * hstep;
    Mat2 k1 = eta(x) * y;
    Mat2 k2 = eta(x + 0.5 * hstep) * (y + 0.5 * hstep * k1);
    Mat2 k3 = eta(x + 0.5 * hstep) * (y + 0.5 * hstep * k2);
    Mat2 k4 = eta(x + hstep) * (y + hstep * k3);
    y += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  cplx w = 0.5 * y.trace();
  cplx root = std::sqrt(w * w - 1.0);
  cplx big = w + root;
  if (std::abs(big) < 1.0) big = w - root;
  return std::log(std::abs(big)) / prof.rho;
}

double tau(const DelaunayResidue& res, const DelaunayProfile& prof, cplx lambda) {
  if (res.is_vacuum()) {
    // Re(2|b| alpha^{-1/2} lambda^{1/2}), branch with Re >= 0.
    cplx val = 2.0 * std::abs(res.b) * std::sqrt(lambda / res.alpha());
    return std::abs(val.real());
  }
  double d = dist_to_JA(res, lambda);
  if (d > 0.05) {
    PsiEvaluator ev(res, prof, lambda);
    double t = (res.mu(lambda) * ev.sigma()).real() / prof.rho;
    return std::abs(t);
  }
  return tau_floquet(res, prof, lambda);
}

double exp_bound_certificate(const std::function<Mat2(cplx)>& x_map,
                             const std::function<cplx(cplx)>& mu_map,
                             const std::vector<cplx>& samples) {
  double cert = 0.0;
  for (cplx s : samples) {
    double n = op_norm(exp_traceless(x_map(s)));
    double e = std::exp(std::abs(mu_map(s).real()));
    cert = std::max(cert, n / e);
  }
  return cert;
}

GrowthFit growth_measure(const std::function<Mat2(double, cplx)>& pos_factor,
                         const DelaunayResidue& res, const DelaunayProfile& prof,
                         cplx lambda, double decades, int points) {
  GrowthFit fit;
  fit.lambda = lambda;
  fit.tau = tau(res, prof, lambda);
  fit.re_mu = res.mu(lambda).real();
  const double ln10 = std::log(10.0);
  // x = log|z| from -decades..-1 decades.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < points; ++i) {
    double dec = 1.0 + (decades - 1.0) * i / (points - 1);
    double x = -dec * ln10;
    double nrm = op_norm(pos_factor(x, lambda));
    double xi = -x;  // -log|z|
    double yi = std::log(std::max(nrm, 1e-300));
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  double n = points;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

}  // namespace dpw
