#pragma once

#include "flproj/projection.hpp"

namespace flproj {

// Instrumented projection. Regressors U_t = (w_t, X_t), instruments
// Z_t = (zw_t, ZX_t) with matching block sizes. Cross-moment blocks
// (divided by T, demeaned by default):
//   d11 = sum zw_t w_t'   d12 = sum zw_t x_t'
//   d21 = sum zx_t w_t'   d22 = sum zx_t x_t'
// i.e. the dense form is T^{-1} sum Z_t U_t'.
struct IvBundle {
  int T = 0;
  int m = 0;
  BasisSpec basis;
  MatrixXd d11, d12, d21, d22;
  VectorXd c_zy;  // T^{-1} sum y_t Z_t
  double mean_y = 0.0;
  VectorXd mean_w, mean_x, mean_zw, mean_zx;
  bool demeaned = true;

  int J() const { return basis.dim(); }
  MatrixXd dense() const;
  double hs_norm() const;
};

IvBundle iv_covariances(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                        const MatrixXd& ZW, const MatrixXd& ZX,
                        const BasisSpec& basis, bool demean = true);

// S = d22 - d21 d11^{-1} d12 (not self-adjoint; truncated by singular values).
// Weak instruments: rcond(d11) < 1e-10 or leading singular value^2 < tau.
MatrixXd iv_schur_complement(const IvBundle& bundle);

struct IvEstimate {
  int h = 0;
  int T_eff = 0;
  int m = 0;
  BasisSpec basis;
  VectorXd alpha;
  FunctionElement beta;
  double tau = 0.0;
  int K = 0;
  TauSelection tau_sel;
  bool tau_auto = false;
  IvBundle bundle;
  // Blocks of the regularized inverse of the instrument-regressor cross-moment.
  MatrixXd b11, b12, b21, b22;
  VectorXd residuals;
  MatrixXd score_rows;  // rows u_hat_t * (zw_t, zx_t) (centered instruments)

  VectorXd theta() const;
  double theta_dot(const ProductElement& zeta) const;
  VectorXd apply_inverse(const VectorXd& stacked) const;          // Binv v
  VectorXd apply_inverse_adjoint(const VectorXd& stacked) const;  // Binv' v
  MatrixXd inverse_dense() const;
};

IvEstimate iv_estimate_aligned(const VectorXd& y, const MatrixXd& W,
                               const MatrixXd& X, const MatrixXd& ZW,
                               const MatrixXd& ZX, const BasisSpec& basis, int h,
                               const TauRule& rule, bool demean = true);

// Pairs y[t+h] with row t of the regressors and instruments.
IvEstimate iv_estimate(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                       const MatrixXd& ZW, const MatrixXd& ZX,
                       const BasisSpec& basis, int h, const TauRule& rule,
                       bool demean = true);

// omega = <Binv Lambda Binv' zeta, zeta> with Lambda the HAC long-run
// variance of u_hat_t Z_t; CI = point -/+ z sqrt(omega / T_eff).
IrfInference iv_inference(const IvEstimate& est, const ProductElement& zeta,
                          double level, const HacSpec& hac);

}  // namespace flproj
