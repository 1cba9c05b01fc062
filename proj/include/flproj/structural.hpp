#pragma once

#include <vector>

#include "flproj/projection.hpp"

namespace flproj {

// Structural VAR(1) on R x H (scalar y_t, functional X_t):
//   B U_t = A U_{t-1} + u_t,  B = [ 1, b12; b21, I ],  var(u) = diag(s11, S22).
// b12 is the coordinate row of the functional b12: H -> R; b21 the coordinate
// column of b21: R -> H.
struct StructuralModel {
  BasisSpec basis;
  VectorXd b12;
  VectorXd b21;
  OperatorMatrix A;
  double sigma11 = 0.0;
  MatrixXd sigma22;

  StructuralModel(BasisSpec b, VectorXd b12_, VectorXd b21_, OperatorMatrix A_,
                  double s11, MatrixXd S22);
  MatrixXd shock_covariance_dense() const;  // diag(s11, S22), (1+J)^2
};

// Reduced form U_t = Gamma U_{t-1} + eps_t with eps covariance Sigma_eps.
struct ReducedModel {
  OperatorMatrix gamma;
  MatrixXd sigma_eps;  // (1+J)^2 dense
};

// B^{-1} = [ s^{-1}, -s^{-1} b12; -b21 s^{-1}, I + b21 s^{-1} b12 ] with
// s = 1 - b12.b21; |s| below tolerance is a singular-structure error.
OperatorMatrix invert_B(const VectorXd& b12, const VectorXd& b21,
                        const BasisSpec& basis);

ReducedModel structural_to_reduced(const StructuralModel& s);

enum class IdScheme { Beta12Zero, Beta21Zero };

struct Identified {
  StructuralModel model;
  IdScheme scheme;
  int K = 0;                 // retained rank (Beta21Zero only)
  int unidentified_dim = 0;  // J - K, complement where b12 is set to zero
};

// Beta12Zero: s11 = se11, b21 = -se21/se11, S22 = Se22 - se21 se21'/se11,
//   A backed out from Gamma via A = B Gamma.
// Beta21Zero: S22 = Se22, b12 solves se12 = -b12 S22 on the top-K eigenspace
//   of Se22 (cutoff tau), s11 = se11 - b12 S22 b12', A = B Gamma.
Identified identify_structural(const ReducedModel& r, IdScheme scheme,
                               double tau = 0.0);

// Structural impulse responses M_h = Gamma^h B^{-1}, h = 0..H.
struct SirfTable {
  std::vector<OperatorMatrix> M;
  double spectral_radius = 0.0;
  bool stationary_warning = false;

  int horizons() const { return static_cast<int>(M.size()) - 1; }
};

SirfTable sirf(const ReducedModel& r, const OperatorMatrix& Binv, int H);

// Response of (y_{t+h}, X_{t+h}) to a one-off structural shock vector.
ProductElement sirf_apply(const SirfTable& table, int h, const ProductElement& shock);

// Reduced-form VAR(1) estimate on U_t = (y_t, X_t):
//   Gamma_hat = D_hat Cinv, D_hat = T^{-1} sum U_t U_{t-1}' (centered),
//   Cinv the Schur-cutoff regularized inverse of the lagged covariance;
//   Sigma_eps from the residuals.
ReducedModel estimate_rfvar(const VectorXd& y, const MatrixXd& X,
                            const BasisSpec& basis, const TauRule& rule,
                            bool demean = true);

// Function-on-function projection: functional response row Y_t regressed on
// (w_t, X_t) through the same regularized inverse; A_hat = C_YU Cinv.
struct FofEstimate {
  int h = 0;
  int T_eff = 0;
  int m = 0;
  BasisSpec basis;
  MatrixXd A;  // J x (m + J)
  double tau = 0.0;
  int K = 0;
  RegularizedInverse reginv;
  CovarianceBundle cov;
  MatrixXd residuals;      // T x J
  MatrixXd regressors_c;   // T x (m+J), centered (w_t, x_t) rows
  VectorXd mean_yrow;

  FunctionElement apply(const ProductElement& v) const;
  // Column block acting on the scalar covariates: the response curves to a
  // unit move in w_i are the columns of A.leftCols(m).
  FunctionElement scalar_response(int i) const;
};

FofEstimate fof_estimate_aligned(const MatrixXd& Y, const MatrixXd& W,
                                 const MatrixXd& X, const BasisSpec& basis, int h,
                                 const TauRule& rule,
                                 InverseMode mode = InverseMode::Schur,
                                 bool demean = true);

// Scalar inference for <A zeta, theta_dir>: scores are <resid_t, theta_dir> U_t.
IrfInference fof_inference(const FofEstimate& est, const ProductElement& zeta,
                           const FunctionElement& theta_dir, double level,
                           const HacSpec& hac);

}  // namespace flproj
