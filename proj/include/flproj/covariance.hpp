#pragma once

#include <Eigen/Dense>

#include "flproj/space.hpp"

namespace flproj {

// Sample second moments of the regressor tuple U_t = (w_t, X_t) and the
// response cross-moment. Block coordinates (all divided by T):
//   g11 = sum w_t w_t'        (m x m)
//   g12 = sum w_t x_t'        (m x J)   maps H -> R^m
//   g21 = sum x_t w_t'        (J x m)   maps R^m -> H
//   g22 = sum x_t x_t'        (J x J)
//   c_uy = sum y_t (w_t, x_t) (m + J)
// With demeaning on, moments are central (sample means removed first).
struct CovarianceBundle {
  int T = 0;
  int m = 0;
  BasisSpec basis;
  MatrixXd g11, g12, g21, g22;
  VectorXd c_uy;
  bool demeaned = true;
  double mean_y = 0.0;
  VectorXd mean_w, mean_x;

  int J() const { return basis.dim(); }
  MatrixXd dense() const;    // (m+J)^2 assembly of the regressor covariance
  double hs_norm() const;    // Hilbert-Schmidt norm of the block operator
};

CovarianceBundle empirical_covariances(const VectorXd& y, const MatrixXd& W,
                                       const MatrixXd& X, const BasisSpec& basis,
                                       bool demean = true);

// q x (m+J) cross-moment T^{-1} sum Y_t (w_t, x_t)'; demeaning removes both means.
MatrixXd cross_covariance(const MatrixXd& Y, const MatrixXd& WX, bool demean);

// Reciprocal 2-norm condition number; 0 for a singular or empty matrix.
double rcond(const MatrixXd& a);

// S = g22 - g21 g11^{-1} g12. Requires rcond(g11) >= 1e-12 (m = 0 gives g22).
MatrixXd schur_complement(const CovarianceBundle& cov);

// Spectral data with the cutoff applied. Symmetric case: values are
// eigenvalues (descending), left the eigenvectors, right empty. SVD case:
// values are singular values, left/right the singular vector pairs, with the
// joint sign convention anchored on the left vector.
struct EigenSystem {
  VectorXd values;
  MatrixXd left;
  MatrixXd right;
  int K = 0;
  double tau = 0.0;
  bool symmetric = true;
};

// K = max{ j : values_j^2 >= tau } (ties included); none -> degenerate-cutoff.
int cutoff_rank(const VectorXd& values_desc, double tau);

EigenSystem eigensystem_sym(const MatrixXd& S, double tau);
EigenSystem eigensystem_svd(const MatrixXd& S, double tau);
// No cutoff applied (K = n, tau = 0); for inspecting the full spectrum.
EigenSystem eigensystem_sym_full(const MatrixXd& S);
EigenSystem eigensystem_svd_full(const MatrixXd& S);
// Fixed-rank variants: tau is recorded as values(K-1)^2.
EigenSystem eigensystem_sym_fixed_k(const MatrixXd& S, int K);
EigenSystem eigensystem_svd_fixed_k(const MatrixXd& S, int K);

// Data-driven threshold from the decay of squared-value gaps:
//   rho*(j) = -log(v_j^2 - v_{j+1}^2)/log j - 1, evaluated at j = 2..min(5,n-1)
//   over positive gaps (j = 1 is excluded: log 1 = 0), rho~ = ceil(100 max rho*)/100,
//   tau = 0.01 * scale * T^{-rho~/(rho~+2)}.
struct TauSelection {
  double tau = 0.0;
  double rho_star = 0.0;
  double rho_tilde = 0.0;
  int j_star = 0;
};
double rho_star_at(const VectorXd& values_desc, int j);
TauSelection select_tau(const VectorXd& values_desc, int T, double scale);

// Blocks of the regularized inverse of the regressor covariance.
// Schur mode, with Sinv = sum_{j<=K} lambda_j^{-1} v_j v_j':
//   b11 = g11^{-1} + g11^{-1} g12 Sinv g21 g11^{-1}
//   b12 = -g11^{-1} g12 Sinv
//   b21 = -Sinv g21 g11^{-1}
//   b22 = Sinv
// PCA mode: least squares on (w, first-K principal scores of g22), embedded
// back into full coordinates (M N^{-1} M' with M = diag(I_m, V_K)).
struct RegularizedInverse {
  enum class Mode { SchurCutoff, PcaScores };
  Mode mode = Mode::SchurCutoff;
  int m = 0;
  BasisSpec basis;
  int K = 0;
  double tau = 0.0;
  MatrixXd b11, b12, b21, b22;

  int J() const { return basis.dim(); }
  VectorXd apply(const VectorXd& stacked) const;
  MatrixXd dense() const;
};

RegularizedInverse regularized_inverse(const CovarianceBundle& cov,
                                       const EigenSystem& schur_eig);
RegularizedInverse regularized_inverse_pca(const CovarianceBundle& cov,
                                           const EigenSystem& g22_eig);

}  // namespace flproj
