#include "flproj/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace flproj {

MatrixXd CovarianceBundle::dense() const {
  const int J = basis.dim();
  MatrixXd d(m + J, m + J);
  d.topLeftCorner(m, m) = g11;
  d.topRightCorner(m, J) = g12;
  d.bottomLeftCorner(J, m) = g21;
  d.bottomRightCorner(J, J) = g22;
  return d;
}

double CovarianceBundle::hs_norm() const {
  return std::sqrt(g11.squaredNorm() + g12.squaredNorm() + g21.squaredNorm() +
                   g22.squaredNorm());
}

CovarianceBundle empirical_covariances(const VectorXd& y, const MatrixXd& W,
                                       const MatrixXd& X, const BasisSpec& basis,
                                       bool demean) {
  const int T = static_cast<int>(y.size());
  const int m = static_cast<int>(W.cols());
  const int J = basis.dim();
  require(W.rows() == T && X.rows() == T, Errc::dimension_mismatch,
          "empirical_covariances: series lengths differ");
  require(X.cols() == J, Errc::dimension_mismatch,
          "empirical_covariances: X columns do not match basis dim");
  require(T >= 2, Errc::insufficient_data,
          "empirical_covariances: need at least 2 observations");

  CovarianceBundle cov;
  cov.T = T;
  cov.m = m;
  cov.basis = basis;
  cov.demeaned = demean;
  cov.mean_w = demean ? VectorXd(W.colwise().mean()) : VectorXd::Zero(m);
  cov.mean_x = demean ? VectorXd(X.colwise().mean()) : VectorXd::Zero(J);
  cov.mean_y = demean ? y.mean() : 0.0;

  MatrixXd Wc = W.rowwise() - cov.mean_w.transpose();
  MatrixXd Xc = X.rowwise() - cov.mean_x.transpose();
  VectorXd yc = y.array() - cov.mean_y;

  const double inv_t = 1.0 / static_cast<double>(T);
  cov.g11 = inv_t * (Wc.transpose() * Wc);
  cov.g12 = inv_t * (Wc.transpose() * Xc);
  cov.g21 = cov.g12.transpose();
  cov.g22 = inv_t * (Xc.transpose() * Xc);
  cov.c_uy = VectorXd(m + J);
  cov.c_uy.head(m) = inv_t * (Wc.transpose() * yc);
  cov.c_uy.tail(J) = inv_t * (Xc.transpose() * yc);
  return cov;
}

MatrixXd cross_covariance(const MatrixXd& Y, const MatrixXd& WX, bool demean) {
  require(Y.rows() == WX.rows(), Errc::dimension_mismatch,
          "cross_covariance: series lengths differ");
  require(Y.rows() >= 2, Errc::insufficient_data,
          "cross_covariance: need at least 2 observations");
  const double inv_t = 1.0 / static_cast<double>(Y.rows());
  if (!demean) return inv_t * (Y.transpose() * WX);
  MatrixXd Yc = Y.rowwise() - Y.colwise().mean();
  MatrixXd Uc = WX.rowwise() - WX.colwise().mean();
  return inv_t * (Yc.transpose() * Uc);
}

double rcond(const MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax <= 0.0) return 0.0;
  return smin / smax;
}

MatrixXd schur_complement(const CovarianceBundle& cov) {
  if (cov.m == 0) return cov.g22;
  require(rcond(cov.g11) >= 1e-12, Errc::ill_conditioned_covariates,
          "schur_complement: scalar covariate block is numerically singular");
  MatrixXd g11_inv_g12 = cov.g11.ldlt().solve(cov.g12);
  return cov.g22 - cov.g21 * g11_inv_g12;
}

int cutoff_rank(const VectorXd& values_desc, double tau) {
  require(tau > 0.0, Errc::invalid_argument, "cutoff: tau must be positive");
  int K = 0;
  for (int j = 0; j < values_desc.size(); ++j)
    if (values_desc(j) * values_desc(j) >= tau) K = j + 1;
  require(K >= 1, Errc::degenerate_cutoff,
          "cutoff: tau exceeds the largest squared eigenvalue");
  return K;
}

namespace {

// Largest-magnitude coefficient of the anchor column made positive; on a flip
// the paired column (if any) flips jointly. First index wins exact ties.
void fix_signs(MatrixXd& anchor, MatrixXd* paired) {
  for (int j = 0; j < anchor.cols(); ++j) {
    int imax = 0;
    double amax = -1.0;
    for (int i = 0; i < anchor.rows(); ++i) {
      double a = std::abs(anchor(i, j));
      if (a > amax) { amax = a; imax = i; }
    }
    if (anchor(imax, j) < 0) {
      anchor.col(j) = -anchor.col(j);
      if (paired) paired->col(j) = -paired->col(j);
    }
  }
}

EigenSystem sym_decompose(const MatrixXd& S) {
  require(S.rows() == S.cols(), Errc::dimension_mismatch,
          "eigensystem_sym: matrix not square");
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          Errc::invalid_argument, "eigensystem_sym: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  require(es.info() == Eigen::Success, Errc::internal_error,
          "eigensystem_sym: decomposition failed");
  EigenSystem sys;
  sys.symmetric = true;
  const int n = static_cast<int>(S.rows());
  sys.values = es.eigenvalues().reverse();
  sys.left = MatrixXd(n, n);
  for (int j = 0; j < n; ++j) sys.left.col(j) = es.eigenvectors().col(n - 1 - j);
  fix_signs(sys.left, nullptr);
  return sys;
}

EigenSystem svd_decompose(const MatrixXd& S) {
  Eigen::JacobiSVD<MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  EigenSystem sys;
  sys.symmetric = false;
  sys.values = svd.singularValues();
  sys.left = svd.matrixU();
  sys.right = svd.matrixV();
  fix_signs(sys.left, &sys.right);
  return sys;
}

EigenSystem with_tau(EigenSystem sys, double tau) {
  sys.tau = tau;
  sys.K = cutoff_rank(sys.values, tau);
  return sys;
}

EigenSystem with_fixed_k(EigenSystem sys, int K) {
  require(K >= 1 && K <= sys.values.size(), Errc::invalid_argument,
          "fixed K outside 1..n");
  require(sys.values(K - 1) > 0.0, Errc::degenerate_cutoff,
          "fixed K reaches a nonpositive eigenvalue");
  sys.K = K;
  sys.tau = sys.values(K - 1) * sys.values(K - 1);
  return sys;
}

}  // namespace

EigenSystem eigensystem_sym(const MatrixXd& S, double tau) {
  return with_tau(sym_decompose(S), tau);
}

EigenSystem eigensystem_svd(const MatrixXd& S, double tau) {
  return with_tau(svd_decompose(S), tau);
}

EigenSystem eigensystem_sym_full(const MatrixXd& S) {
  EigenSystem sys = sym_decompose(S);
  sys.K = static_cast<int>(sys.values.size());
  return sys;
}

EigenSystem eigensystem_svd_full(const MatrixXd& S) {
  EigenSystem sys = svd_decompose(S);
  sys.K = static_cast<int>(sys.values.size());
  return sys;
}

EigenSystem eigensystem_sym_fixed_k(const MatrixXd& S, int K) {
  return with_fixed_k(sym_decompose(S), K);
}

EigenSystem eigensystem_svd_fixed_k(const MatrixXd& S, int K) {
  return with_fixed_k(svd_decompose(S), K);
}

double rho_star_at(const VectorXd& values_desc, int j) {
  require(j >= 2 && j + 1 <= values_desc.size(), Errc::invalid_argument,
          "rho_star_at: j outside 2..n-1");
  double gap = values_desc(j - 1) * values_desc(j - 1) -
               values_desc(j) * values_desc(j);
  require(gap > 0.0, Errc::degenerate_gap, "rho_star_at: nonpositive gap");
  return -std::log(gap) / std::log(static_cast<double>(j)) - 1.0;
}

TauSelection select_tau(const VectorXd& values_desc, int T, double scale) {
  require(T >= 2, Errc::insufficient_data, "select_tau: T too small");
  require(scale > 0.0, Errc::invalid_argument, "select_tau: scale must be positive");
  const int n = static_cast<int>(values_desc.size());
  int jmax = std::min(5, n - 1);
  TauSelection sel;
  bool found = false;
  for (int j = 2; j <= jmax; ++j) {
    double gap = values_desc(j - 1) * values_desc(j - 1) -
                 values_desc(j) * values_desc(j);
    if (gap <= 0.0) continue;
    double r = -std::log(gap) / std::log(static_cast<double>(j)) - 1.0;
    if (!found || r > sel.rho_star) {
      sel.rho_star = r;
      sel.j_star = j;
      found = true;
    }
  }
  require(found, Errc::degenerate_gap,
          "select_tau: no positive eigenvalue gap among leading indices");
  sel.rho_tilde = std::ceil(100.0 * sel.rho_star) / 100.0;
  require(sel.rho_tilde + 2.0 > 0.0, Errc::degenerate_gap,
          "select_tau: decay exponent at or below -2");
  sel.tau = 0.01 * scale *
            std::pow(static_cast<double>(T), -sel.rho_tilde / (sel.rho_tilde + 2.0));
  return sel;
}

VectorXd RegularizedInverse::apply(const VectorXd& stacked) const {
  const int J = basis.dim();
  require(stacked.size() == m + J, Errc::dimension_mismatch,
          "regularized inverse: stacked vector mismatch");
  VectorXd out(m + J);
  out.head(m) = b11 * stacked.head(m) + b12 * stacked.tail(J);
  out.tail(J) = b21 * stacked.head(m) + b22 * stacked.tail(J);
  return out;
}

MatrixXd RegularizedInverse::dense() const {
  const int J = basis.dim();
  MatrixXd d(m + J, m + J);
  d.topLeftCorner(m, m) = b11;
  d.topRightCorner(m, J) = b12;
  d.bottomLeftCorner(J, m) = b21;
  d.bottomRightCorner(J, J) = b22;
  return d;
}

RegularizedInverse regularized_inverse(const CovarianceBundle& cov,
                                       const EigenSystem& schur_eig) {
  require(schur_eig.symmetric, Errc::invalid_argument,
          "regularized_inverse: needs a symmetric eigensystem");
  const int J = cov.J();
  require(schur_eig.left.rows() == J, Errc::dimension_mismatch,
          "regularized_inverse: eigensystem dim mismatch");
  RegularizedInverse inv;
  inv.mode = RegularizedInverse::Mode::SchurCutoff;
  inv.m = cov.m;
  inv.basis = cov.basis;
  inv.K = schur_eig.K;
  inv.tau = schur_eig.tau;

  MatrixXd vk = schur_eig.left.leftCols(schur_eig.K);
  VectorXd inv_vals = schur_eig.values.head(schur_eig.K).cwiseInverse();
  MatrixXd sinv = vk * inv_vals.asDiagonal() * vk.transpose();

  if (cov.m == 0) {
    inv.b11 = MatrixXd::Zero(0, 0);
    inv.b12 = MatrixXd::Zero(0, J);
    inv.b21 = MatrixXd::Zero(J, 0);
    inv.b22 = sinv;
    return inv;
  }
  require(rcond(cov.g11) >= 1e-12, Errc::ill_conditioned_covariates,
          "regularized_inverse: scalar covariate block is numerically singular");
  auto g11_ldlt = cov.g11.ldlt();
  MatrixXd g11_inv = g11_ldlt.solve(MatrixXd::Identity(cov.m, cov.m));
  MatrixXd g11_inv_g12 = g11_ldlt.solve(cov.g12);

  inv.b11 = g11_inv + g11_inv_g12 * sinv * g11_inv_g12.transpose();
  inv.b12 = -g11_inv_g12 * sinv;
  inv.b21 = inv.b12.transpose();
  inv.b22 = sinv;
  return inv;
}

RegularizedInverse regularized_inverse_pca(const CovarianceBundle& cov,
                                           const EigenSystem& g22_eig) {
  require(g22_eig.symmetric, Errc::invalid_argument,
          "regularized_inverse_pca: needs a symmetric eigensystem");
  const int J = cov.J();
  const int m = cov.m;
  const int K = g22_eig.K;
  require(g22_eig.left.rows() == J, Errc::dimension_mismatch,
          "regularized_inverse_pca: eigensystem dim mismatch");

  MatrixXd vk = g22_eig.left.leftCols(K);
  // Restricted normal matrix on (w, scores).
  MatrixXd nmat(m + K, m + K);
  nmat.topLeftCorner(m, m) = cov.g11;
  nmat.topRightCorner(m, K) = cov.g12 * vk;
  nmat.bottomLeftCorner(K, m) = nmat.topRightCorner(m, K).transpose();
  nmat.bottomRightCorner(K, K) = vk.transpose() * cov.g22 * vk;
  require(rcond(nmat) >= 1e-12, Errc::ill_conditioned_covariates,
          "regularized_inverse_pca: restricted normal matrix is singular");
  MatrixXd ninv = nmat.ldlt().solve(MatrixXd::Identity(m + K, m + K));

  RegularizedInverse inv;
  inv.mode = RegularizedInverse::Mode::PcaScores;
  inv.m = m;
  inv.basis = cov.basis;
  inv.K = K;
  inv.tau = g22_eig.tau;
  inv.b11 = ninv.topLeftCorner(m, m);
  inv.b12 = ninv.topRightCorner(m, K) * vk.transpose();
  inv.b21 = inv.b12.transpose();
  inv.b22 = vk * ninv.bottomRightCorner(K, K) * vk.transpose();
  return inv;
}

}  // namespace flproj
