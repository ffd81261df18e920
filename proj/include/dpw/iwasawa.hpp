#pragma once

#include <functional>

#include "dpw/matrix_loop.hpp"

namespace dpw {

// Result of the r-Iwasawa factorization Phi = F * B:
//   F star-unitary on the annulus A_r, B holomorphic on D_r with
//   B(0) upper triangular, positive diagonal.
struct IwasawaPair {
  MatrixLoop unitary;   // F
  MatrixLoop positive;  // B
  double residual = 0.0;  // sup ||F B - Phi|| over C_r samples
};

struct IwasawaOptions {
  int bandwidth = 0;      // 0: use loop_options().max_bandwidth
  int samples = 0;        // 0: use loop_options().samples
  double tol = 1e-12;     // Wilson/Newton stopping tolerance
  int max_iter = 60;
};

// r-Iwasawa factorization of a loop analytic on an annulus containing
// [r, 1/r]. Gram loop on S^1 + spectral factorization (Bauer seed,
// Newton refinement).
IwasawaPair iwasawa(const MatrixLoop& phi, double r,
                    const IwasawaOptions& opts = {});

// Same algorithm, but the loop is given as a pointwise evaluator
// (exact evaluation avoids coefficient round-trips for frames that are
// cheap to evaluate anywhere).
IwasawaPair iwasawa_eval(const std::function<Mat2(cplx)>& phi, double r,
                         const IwasawaOptions& opts = {});

// r-Iwasawa factorization for loops that need not extend past
// |lambda| = outer < 1 (e.g. frames dressed by simple factors whose
// singularity lies between C_r and S^1). Solves the defining equations
//   (F^* F)_k = delta_k id,  (F^* Phi)_k = 0 (k < 0),  (F^* Phi)(0) in T
// in truncated coefficient space by Gauss-Newton, seeded by `seed_unitary`.
IwasawaPair iwasawa_annulus(const std::function<Mat2(cplx)>& phi, double r,
                            double outer, const MatrixLoop& seed_unitary,
                            const IwasawaOptions& opts = {});

// QR factorization of a constant loop (see qr_constant in mat2.hpp);
// wrapper returning constant loops.
IwasawaPair iwasawa_constant(const Mat2& m, double r);

// Shift lemma: for X a loop and Y a positive (disk-holomorphic) loop,
// Uni(XY) = Uni(X) U and Pos(XY) = U^{-1} Pos(X) Y for a constant
// U in SU(2). Returns U given Pos(X)(0) and Y(0).
Mat2 shift_split(const Mat2& pos_x_at0, const Mat2& y_at0);

}  // namespace dpw
