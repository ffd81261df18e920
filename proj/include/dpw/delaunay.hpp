#pragma once

#include <functional>
#include <vector>

#include "dpw/matrix_loop.hpp"

namespace dpw {

// Residue A of a Delaunay potential A dz/z:
//   A(lambda) = [[c, a/lambda + conj(b)], [b + conj(a) lambda, -c]],
// a, b nonzero complex, c real. Satisfies star(A) = A.
struct DelaunayResidue {
  cplx a{0.25, 0.0};
  cplx b{0.25, 0.0};
  double c = 0.0;

  Mat2 at(cplx lambda) const;           // residue_matrix
  cplx mu_sq(cplx lambda) const;        // c^2 + (a/l + conj b)(b + conj a l)
  cplx mu(cplx lambda) const;           // branch Re >= 0, ties Im >= 0
  MatrixLoop loop(double radius = 1.0) const;

  double q() const;                      // |a|^2 + |b|^2 + c^2
  bool is_vacuum(double tol = 1e-12) const;
  // Unit direction of the ray through the segment [nu1, nu2]: p = -ab/|ab|.
  cplx p() const;
  cplx alpha() const;                    // -p = ab/|ab|
};

struct ResonancePoint {
  cplx lambda;
  int k = 0;           // mu(lambda) = k/2
  bool double_root = false;
};

struct SpectralData {
  cplx nu1, nu2;       // zeros of det A, |nu1| <= |nu2|
  cplx p, alpha;
  bool vacuum = false;
  std::vector<ResonancePoint> resonance_points;
};

// Spectral data with resonance points inside |lambda| <= outer_radius
// (excluding lambda = 0). Resonances are the roots of
//   conj(ab) l^2 + (q - k^2/4) l + ab = 0,  k = 1, 2, ...
SpectralData spectral_data(const DelaunayResidue& res, double outer_radius = 1.0,
                           double inner_radius = 0.0);

// Distance from lambda to the segment J_A = [nu1, nu2] along the ray through p.
double dist_to_JA(const DelaunayResidue& res, cplx lambda);

// The elliptic profile v of (v')^2 = -v^4 + 4 q v^2 - 16|ab|^2, v(0) = 2|b|,
// tabulated over one period, plus the period rho.
struct DelaunayProfile {
  bool vacuum = false;
  double rho = 0.0;
  double vmin = 0.0, vmax = 0.0;
  double ode_residual = 0.0;     // sup of the defining ODE residual on the table
  double period_mismatch = 0.0;  // |v(rho)-v(0)| + |v'(rho)-v'(0)|

  // Uniform table on [0, rho] with n+1 nodes (cubic Hermite dense output).
  int n = 0;
  double h = 0.0;
  std::vector<double> v, dv;

  double v_at(double x) const;
  double dv_at(double x) const;
};

DelaunayProfile profile(const DelaunayResidue& res, int table_size = 4096);

// Elliptic integral of the third kind
//   psi(x, lambda) = int_0^x 2 dt / (1 + v(t)^2 / (4 conj(a) conj(b) lambda)),
// and sigma(lambda) = psi(rho, lambda). Throws DomainError near J_A.
struct PsiEvaluator {
  PsiEvaluator(const DelaunayResidue& res, const DelaunayProfile& prof,
               cplx lambda);
  cplx psi(double x) const;     // quasi-periodic: psi(x + n rho) = psi(x) + n sigma
  cplx sigma() const { return sigma_; }
  double error_estimate() const { return err_; }

 private:
  cplx integrand_scale_;        // 4 conj(a) conj(b) lambda
  const DelaunayProfile* prof_;
  cplx sigma_;
  double err_ = 0.0;
  std::vector<cplx> cum_;       // cumulative integral at table nodes
};

cplx psi(const DelaunayResidue& res, const DelaunayProfile& prof, double x,
         cplx lambda);
cplx sigma(const DelaunayResidue& res, const DelaunayProfile& prof, cplx lambda);

// Closed-form 1-Iwasawa factorization of exp((x+iy)A) at a fixed lambda
// off J_A:
//   F(x, y) = exp((x + iy - psi(x)) A) S(x),
//   B(x)    = S(x)^{-1} exp(psi(x) A),
// with S = S1 / sqrt(det S1), branch continuous in x, S(0) = id.
class ClosedFormFrame {
 public:
  ClosedFormFrame(const DelaunayResidue& res, const DelaunayProfile& prof,
                  cplx lambda);

  Mat2 unitary(double x, double y) const;   // F
  Mat2 positive(double x) const;            // B
  Mat2 floquet_R(double x) const;           // R = exp((sigma x / rho - psi) A) S
  cplx sigma() const { return psi_.sigma(); }

 private:
  Mat2 s_matrix(double x) const;            // S(x)
  cplx sqrt_det_s1(double x) const;

  DelaunayResidue res_;
  const DelaunayProfile* prof_;
  cplx lambda_;
  PsiEvaluator psi_;
  Mat2 a_mat_;
  cplx h11_;                                // sqrt(b/|b|), principal
  cplx s0_;                                 // sqrt(det S1)(0)
  std::vector<double> theta_;               // unwrapped arg of v^2 + 4 conj(ab) l
  double theta0_ = 0.0;
};

// Growth exponent tau = rho^{-1} Re(mu sigma), continued across J_A via the
// Floquet relation cosh(mu sigma) = tr B(rho, lambda) / 2.
double tau(const DelaunayResidue& res, const DelaunayProfile& prof, cplx lambda);

// Floquet route in isolation (valid for every lambda != 0).
double tau_floquet(const DelaunayResidue& res, const DelaunayProfile& prof,
                   cplx lambda);

// Certificate for ||exp X|| <= c e^{|Re mu|}: returns the max over samples of
// ||exp X(s)|| / e^{|Re mu(s)|}.
double exp_bound_certificate(const std::function<Mat2(cplx)>& x_map,
                             const std::function<cplx(cplx)>& mu_map,
                             const std::vector<cplx>& samples);

struct GrowthFit {
  cplx lambda;
  double slope = 0.0;    // least-squares slope of log||Pos|| vs -log|z|
  double tau = 0.0;
  double re_mu = 0.0;
};

// Fits the growth exponent of x -> ||pos_factor(x, lambda)|| for
// x = log|z| over |z| in [10^-decades, 10^-1].
GrowthFit growth_measure(const std::function<Mat2(double, cplx)>& pos_factor,
                         const DelaunayResidue& res, const DelaunayProfile& prof,
                         cplx lambda, double decades = 4.0, int points = 25);

double agm(double a, double b);

}  // namespace dpw
