#include "flproj/instruments.hpp"

#include <cmath>

#include "flproj/mathutil.hpp"

namespace flproj {

MatrixXd IvBundle::dense() const {
  const int J = basis.dim();
  MatrixXd d(m + J, m + J);
  d.topLeftCorner(m, m) = d11;
  d.topRightCorner(m, J) = d12;
  d.bottomLeftCorner(J, m) = d21;
  d.bottomRightCorner(J, J) = d22;
  return d;
}

double IvBundle::hs_norm() const {
  return std::sqrt(d11.squaredNorm() + d12.squaredNorm() + d21.squaredNorm() +
                   d22.squaredNorm());
}

IvBundle iv_covariances(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                        const MatrixXd& ZW, const MatrixXd& ZX,
                        const BasisSpec& basis, bool demean) {
  const int T = static_cast<int>(y.size());
  const int m = static_cast<int>(W.cols());
  const int J = basis.dim();
  require(W.rows() == T && X.rows() == T && ZW.rows() == T && ZX.rows() == T,
          Errc::dimension_mismatch, "iv_covariances: series lengths differ");
  require(ZW.cols() == m, Errc::dimension_mismatch,
          "iv_covariances: instrument scalar block must match w block");
  require(X.cols() == J && ZX.cols() == J, Errc::dimension_mismatch,
          "iv_covariances: functional blocks do not match basis dim");
  require(T >= 2, Errc::insufficient_data,
          "iv_covariances: need at least 2 observations");

  IvBundle b;
  b.T = T;
  b.m = m;
  b.basis = basis;
  b.demeaned = demean;
  b.mean_w = demean ? VectorXd(W.colwise().mean()) : VectorXd::Zero(m);
  b.mean_x = demean ? VectorXd(X.colwise().mean()) : VectorXd::Zero(J);
  b.mean_zw = demean ? VectorXd(ZW.colwise().mean()) : VectorXd::Zero(m);
  b.mean_zx = demean ? VectorXd(ZX.colwise().mean()) : VectorXd::Zero(J);
  b.mean_y = demean ? y.mean() : 0.0;

  MatrixXd Wc = W.rowwise() - b.mean_w.transpose();
  MatrixXd Xc = X.rowwise() - b.mean_x.transpose();
  MatrixXd Gc = ZW.rowwise() - b.mean_zw.transpose();
  MatrixXd Hc = ZX.rowwise() - b.mean_zx.transpose();
  VectorXd yc = y.array() - b.mean_y;

  const double inv_t = 1.0 / static_cast<double>(T);
  b.d11 = inv_t * (Gc.transpose() * Wc);
  b.d12 = inv_t * (Gc.transpose() * Xc);
  b.d21 = inv_t * (Hc.transpose() * Wc);
  b.d22 = inv_t * (Hc.transpose() * Xc);
  b.c_zy = VectorXd(m + J);
  b.c_zy.head(m) = inv_t * (Gc.transpose() * yc);
  b.c_zy.tail(J) = inv_t * (Hc.transpose() * yc);
  return b;
}

MatrixXd iv_schur_complement(const IvBundle& bundle) {
  if (bundle.m == 0) return bundle.d22;
  require(rcond(bundle.d11) >= 1e-10, Errc::weak_instrument,
          "iv: scalar instrument block is numerically singular");
  MatrixXd d11_inv_d12 =
      bundle.d11.fullPivLu().solve(bundle.d12);
  return bundle.d22 - bundle.d21 * d11_inv_d12;
}

VectorXd IvEstimate::theta() const {
  VectorXd v(m + basis.dim());
  v << alpha, beta.coef;
  return v;
}

double IvEstimate::theta_dot(const ProductElement& zeta) const {
  require(zeta.m() == m, Errc::dimension_mismatch,
          "theta_dot: shock scalar part mismatch");
  require_compatible(zeta.x.basis, basis, "theta_dot");
  return alpha.dot(zeta.w) + inner(beta, zeta.x);
}

VectorXd IvEstimate::apply_inverse(const VectorXd& stacked) const {
  const int J = basis.dim();
  require(stacked.size() == m + J, Errc::dimension_mismatch,
          "iv inverse: stacked vector mismatch");
  VectorXd out(m + J);
  out.head(m) = b11 * stacked.head(m) + b12 * stacked.tail(J);
  out.tail(J) = b21 * stacked.head(m) + b22 * stacked.tail(J);
  return out;
}

VectorXd IvEstimate::apply_inverse_adjoint(const VectorXd& stacked) const {
  const int J = basis.dim();
  require(stacked.size() == m + J, Errc::dimension_mismatch,
          "iv inverse adjoint: stacked vector mismatch");
  VectorXd out(m + J);
  out.head(m) = b11.transpose() * stacked.head(m) + b21.transpose() * stacked.tail(J);
  out.tail(J) = b12.transpose() * stacked.head(m) + b22.transpose() * stacked.tail(J);
  return out;
}

MatrixXd IvEstimate::inverse_dense() const {
  const int J = basis.dim();
  MatrixXd d(m + J, m + J);
  d.topLeftCorner(m, m) = b11;
  d.topRightCorner(m, J) = b12;
  d.bottomLeftCorner(J, m) = b21;
  d.bottomRightCorner(J, J) = b22;
  return d;
}

IvEstimate iv_estimate_aligned(const VectorXd& y, const MatrixXd& W,
                               const MatrixXd& X, const MatrixXd& ZW,
                               const MatrixXd& ZX, const BasisSpec& basis, int h,
                               const TauRule& rule, bool demean) {
  const int T = static_cast<int>(y.size());
  const int m = static_cast<int>(W.cols());
  const int J = basis.dim();

  IvEstimate est;
  est.h = h;
  est.T_eff = T;
  est.m = m;
  est.basis = basis;
  est.bundle = iv_covariances(y, W, X, ZW, ZX, basis, demean);

  MatrixXd schur = iv_schur_complement(est.bundle);
  EigenSystem eig = eigensystem_svd_full(schur);
  if (rule.kind == TauRule::Kind::FixedK) {
    require(rule.K >= 1 && rule.K <= eig.values.size(), Errc::invalid_argument,
            "iv: fixed K outside 1..J");
    require(eig.values(rule.K - 1) > 0.0, Errc::weak_instrument,
            "iv: fixed K reaches a zero singular value");
    eig.K = rule.K;
    eig.tau = eig.values(rule.K - 1) * eig.values(rule.K - 1);
  } else {
    double tau = rule.tau;
    if (rule.kind == TauRule::Kind::Auto) {
      est.tau_sel = select_tau(eig.values, T, est.bundle.hs_norm());
      est.tau_auto = true;
      tau = est.tau_sel.tau;
    }
    require(tau > 0.0, Errc::invalid_argument, "iv: tau must be positive");
    require(eig.values(0) * eig.values(0) >= tau, Errc::weak_instrument,
            "iv: leading singular value below the cutoff");
    eig.tau = tau;
    eig.K = cutoff_rank(eig.values, tau);
  }
  est.K = eig.K;
  est.tau = eig.tau;

  // Sinv = sum_{j<=K} nu_j^{-1} (right_j)(left_j)'
  MatrixXd uk = eig.left.leftCols(eig.K);
  MatrixXd vk = eig.right.leftCols(eig.K);
  VectorXd inv_vals = eig.values.head(eig.K).cwiseInverse();
  MatrixXd sinv = vk * inv_vals.asDiagonal() * uk.transpose();

  if (m == 0) {
    est.b11 = MatrixXd::Zero(0, 0);
    est.b12 = MatrixXd::Zero(0, J);
    est.b21 = MatrixXd::Zero(J, 0);
    est.b22 = sinv;
  } else {
    auto d11_lu = est.bundle.d11.fullPivLu();
    MatrixXd d11_inv = d11_lu.solve(MatrixXd::Identity(m, m));
    MatrixXd d11_inv_d12 = d11_lu.solve(est.bundle.d12);
    MatrixXd d21_d11_inv = est.bundle.d21 * d11_inv;
    est.b11 = d11_inv + d11_inv_d12 * sinv * d21_d11_inv;
    est.b12 = -d11_inv_d12 * sinv;
    est.b21 = -sinv * d21_d11_inv;
    est.b22 = sinv;
  }

  VectorXd theta = est.apply_inverse(est.bundle.c_zy);
  est.alpha = theta.head(m);
  est.beta = FunctionElement(basis, theta.tail(J));

  MatrixXd Wc = W.rowwise() - est.bundle.mean_w.transpose();
  MatrixXd Xc = X.rowwise() - est.bundle.mean_x.transpose();
  MatrixXd Gc = ZW.rowwise() - est.bundle.mean_zw.transpose();
  MatrixXd Hc = ZX.rowwise() - est.bundle.mean_zx.transpose();
  VectorXd yc = y.array() - est.bundle.mean_y;
  est.residuals = yc - Wc * est.alpha - Xc * est.beta.coef;
  est.score_rows = MatrixXd(T, m + J);
  est.score_rows.leftCols(m) = Gc.array().colwise() * est.residuals.array();
  est.score_rows.rightCols(J) = Hc.array().colwise() * est.residuals.array();
  return est;
}

IvEstimate iv_estimate(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                       const MatrixXd& ZW, const MatrixXd& ZX,
                       const BasisSpec& basis, int h, const TauRule& rule,
                       bool demean) {
  const int T = static_cast<int>(y.size());
  require(h >= 0, Errc::invalid_argument, "iv_estimate: horizon must be >= 0");
  require(W.rows() == T && X.rows() == T && ZW.rows() == T && ZX.rows() == T,
          Errc::dimension_mismatch, "iv_estimate: series lengths differ");
  require(T - h >= 8, Errc::insufficient_data,
          "iv_estimate: fewer than 8 usable pairs at this horizon");
  const int Te = T - h;
  return iv_estimate_aligned(y.tail(Te), W.topRows(Te), X.topRows(Te),
                             ZW.topRows(Te), ZX.topRows(Te), basis, h, rule,
                             demean);
}

IrfInference iv_inference(const IvEstimate& est, const ProductElement& zeta,
                          double level, const HacSpec& hac) {
  require(level > 0.0 && level < 1.0, Errc::invalid_argument,
          "iv_inference: level must lie in (0,1)");
  HacSpec spec = hac;
  if (spec.bandwidth < 0) spec.bandwidth = hac_auto_bandwidth(est.T_eff);

  IrfInference out;
  out.h = est.h;
  out.level = level;
  out.K = est.K;
  out.tau = est.tau;
  out.T_eff = est.T_eff;
  out.bandwidth = spec.bandwidth;
  out.point = est.theta_dot(zeta);

  MatrixXd lam = hac_longrun(est.score_rows, spec);
  VectorXd v = est.apply_inverse_adjoint(zeta.stacked());
  double omega = v.dot(lam * v);
  double znorm2 = inner(zeta, zeta);
  require(omega >= 0.0, Errc::degenerate_variance,
          "iv_inference: negative long-run variance");
  require(omega >= 1e-14 * znorm2, Errc::degenerate_variance,
          "iv_inference: long-run variance below the degeneracy floor");
  out.psi = omega;
  out.se = std::sqrt(omega / static_cast<double>(est.T_eff));
  double z = normal_quantile(0.5 * (1.0 + level));
  out.lo = out.point - z * out.se;
  out.hi = out.point + z * out.se;
  return out;
}

}  // namespace flproj
