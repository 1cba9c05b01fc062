#include "flproj/structural.hpp"

#include <cmath>

#include "flproj/mathutil.hpp"

namespace flproj {

StructuralModel::StructuralModel(BasisSpec b, VectorXd b12_, VectorXd b21_,
                                 OperatorMatrix A_, double s11, MatrixXd S22)
    : basis(std::move(b)),
      b12(std::move(b12_)),
      b21(std::move(b21_)),
      A(std::move(A_)),
      sigma11(s11),
      sigma22(std::move(S22)) {
  const int J = basis.dim();
  require(b12.size() == J && b21.size() == J, Errc::dimension_mismatch,
          "structural model: contemporaneous blocks do not match basis dim");
  require(A.m() == 1, Errc::dimension_mismatch,
          "structural model: transition operator must have scalar block 1");
  require_compatible(A.basis(), basis, "structural model");
  require(sigma22.rows() == J && sigma22.cols() == J, Errc::dimension_mismatch,
          "structural model: shock covariance does not match basis dim");
  require(sigma11 >= 0.0, Errc::invalid_argument,
          "structural model: negative shock variance");
}

MatrixXd StructuralModel::shock_covariance_dense() const {
  const int J = basis.dim();
  MatrixXd s = MatrixXd::Zero(1 + J, 1 + J);
  s(0, 0) = sigma11;
  s.bottomRightCorner(J, J) = sigma22;
  return s;
}

OperatorMatrix invert_B(const VectorXd& b12, const VectorXd& b21,
                        const BasisSpec& basis) {
  const int J = basis.dim();
  require(b12.size() == J && b21.size() == J, Errc::dimension_mismatch,
          "invert_B: blocks do not match basis dim");
  double s = 1.0 - b12.dot(b21);
  require(std::abs(s) >= 1e-12, Errc::singular_structure,
          "invert_B: 1 - b12.b21 is numerically zero");
  OperatorMatrix inv(1, basis);
  inv.a11()(0, 0) = 1.0 / s;
  inv.a12() = -b12.transpose() / s;
  inv.a21() = -b21 / s;
  inv.a22() = MatrixXd::Identity(J, J) + (b21 * b12.transpose()) / s;
  return inv;
}

ReducedModel structural_to_reduced(const StructuralModel& s) {
  OperatorMatrix binv = invert_B(s.b12, s.b21, s.basis);
  ReducedModel r{binv.compose(s.A), MatrixXd()};
  MatrixXd bi = binv.dense();
  r.sigma_eps = bi * s.shock_covariance_dense() * bi.transpose();
  return r;
}

Identified identify_structural(const ReducedModel& r, IdScheme scheme, double tau) {
  const BasisSpec& basis = r.gamma.basis();
  const int J = basis.dim();
  require(r.gamma.m() == 1, Errc::dimension_mismatch,
          "identify: reduced model must have scalar block 1");
  require(r.sigma_eps.rows() == 1 + J && r.sigma_eps.cols() == 1 + J,
          Errc::dimension_mismatch, "identify: innovation covariance mismatch");

  const double se11 = r.sigma_eps(0, 0);
  const VectorXd se21 = r.sigma_eps.block(1, 0, J, 1);
  const MatrixXd se22 = r.sigma_eps.bottomRightCorner(J, J);

  if (scheme == IdScheme::Beta12Zero) {
    require(se11 > 0.0, Errc::identification_failure,
            "identify: nonpositive innovation variance for the scalar block");
    VectorXd b12 = VectorXd::Zero(J);
    VectorXd b21 = -se21 / se11;
    MatrixXd S22 = se22 - (se21 * se21.transpose()) / se11;
    // A = B Gamma: row 1 is gamma's row; the H rows gain b21 * (row 1).
    OperatorMatrix A(1, basis);
    A.a11() = r.gamma.a11();
    A.a12() = r.gamma.a12();
    A.a21() = r.gamma.a21() + b21 * r.gamma.a11();
    A.a22() = r.gamma.a22() + b21 * r.gamma.a12();
    StructuralModel m(basis, b12, b21, A, se11, S22);
    return Identified{std::move(m), scheme, J, 0};
  }

  // Beta21Zero: se12 = -b12 S22 with S22 = se22; invert on the retained
  // eigenspace only, b12 = 0 on the complement.
  require(tau > 0.0, Errc::invalid_argument,
          "identify: Beta21Zero needs a positive cutoff tau");
  EigenSystem eig = eigensystem_sym(se22, tau);
  MatrixXd vk = eig.left.leftCols(eig.K);
  VectorXd inv_vals = eig.values.head(eig.K).cwiseInverse();
  VectorXd b12 = -(vk * (inv_vals.asDiagonal() * (vk.transpose() * se21)));
  double s11 = se11 - b12.dot(se22 * b12);
  require(s11 > 0.0, Errc::identification_failure,
          "identify: implied scalar shock variance is nonpositive");
  VectorXd b21 = VectorXd::Zero(J);
  OperatorMatrix A(1, basis);
  A.a11() = r.gamma.a11() + b12.transpose() * r.gamma.a21();
  A.a12() = r.gamma.a12() + b12.transpose() * r.gamma.a22();
  A.a21() = r.gamma.a21();
  A.a22() = r.gamma.a22();
  StructuralModel m(basis, b12, b21, A, s11, se22);
  return Identified{std::move(m), scheme, eig.K, J - eig.K};
}

SirfTable sirf(const ReducedModel& r, const OperatorMatrix& Binv, int H) {
  require(H >= 0, Errc::invalid_argument, "sirf: horizon must be >= 0");
  SirfTable table;
  table.M.reserve(H + 1);
  table.M.push_back(Binv);
  for (int h = 1; h <= H; ++h) table.M.push_back(r.gamma.compose(table.M.back()));
  table.spectral_radius = r.gamma.spectral_radius();
  table.stationary_warning = table.spectral_radius >= 1.0 - 1e-6;
  return table;
}

ProductElement sirf_apply(const SirfTable& table, int h, const ProductElement& shock) {
  require(h >= 0 && h < static_cast<int>(table.M.size()), Errc::invalid_argument,
          "sirf_apply: horizon outside the computed table");
  return table.M[h].apply(shock);
}

ReducedModel estimate_rfvar(const VectorXd& y, const MatrixXd& X,
                            const BasisSpec& basis, const TauRule& rule,
                            bool demean) {
  const int T = static_cast<int>(y.size());
  const int J = basis.dim();
  require(X.rows() == T, Errc::dimension_mismatch,
          "estimate_rfvar: series lengths differ");
  require(T >= 10, Errc::insufficient_data, "estimate_rfvar: sample too short");

  // Lagged regressors U_{t-1}, responses U_t, t = 1..T-1.
  const int Te = T - 1;
  MatrixXd W_lag = y.head(Te);
  MatrixXd X_lag = X.topRows(Te);
  MatrixXd U_now(Te, 1 + J);
  U_now.col(0) = y.tail(Te);
  U_now.rightCols(J) = X.bottomRows(Te);

  // The scalar response row reuses the scalar-projection machinery; the
  // functional rows share its regularized inverse.
  Estimate row1 = estimate_aligned(U_now.col(0), W_lag, X_lag, basis, 1, rule,
                                   InverseMode::Schur, demean);
  MatrixXd U_lag(Te, 1 + J);
  U_lag.col(0) = W_lag;
  U_lag.rightCols(J) = X_lag;
  MatrixXd dhat = cross_covariance(U_now, U_lag, demean);
  MatrixXd gam = dhat * row1.reginv.dense();

  ReducedModel r{OperatorMatrix::from_dense(1, basis, gam), MatrixXd()};
  // Residual covariance on centered data.
  Eigen::RowVectorXd mean_now = U_now.colwise().mean();
  Eigen::RowVectorXd mean_lag = U_lag.colwise().mean();
  MatrixXd Nc = demean ? MatrixXd(U_now.rowwise() - mean_now) : U_now;
  MatrixXd Lc = demean ? MatrixXd(U_lag.rowwise() - mean_lag) : U_lag;
  MatrixXd eps = Nc - Lc * gam.transpose();
  r.sigma_eps = (eps.transpose() * eps) / static_cast<double>(Te);
  return r;
}

FunctionElement FofEstimate::apply(const ProductElement& v) const {
  require(v.m() == m, Errc::dimension_mismatch, "fof apply: scalar part mismatch");
  require_compatible(v.x.basis, basis, "fof apply");
  return FunctionElement(basis, A * v.stacked());
}

FunctionElement FofEstimate::scalar_response(int i) const {
  require(i >= 0 && i < m, Errc::invalid_argument,
          "fof scalar_response: index outside 0..m-1");
  return FunctionElement(basis, A.col(i));
}

FofEstimate fof_estimate_aligned(const MatrixXd& Y, const MatrixXd& W,
                                 const MatrixXd& X, const BasisSpec& basis, int h,
                                 const TauRule& rule, InverseMode mode,
                                 bool demean) {
  const int T = static_cast<int>(Y.rows());
  const int m = static_cast<int>(W.cols());
  const int J = basis.dim();
  require(Y.cols() == J, Errc::dimension_mismatch,
          "fof_estimate: response columns do not match basis dim");
  require(W.rows() == T && X.rows() == T, Errc::dimension_mismatch,
          "fof_estimate: series lengths differ");

  FofEstimate est;
  est.h = h;
  est.T_eff = T;
  est.m = m;
  est.basis = basis;
  // Reuse the scalar machinery for the shared inverse; the response used for
  // c_uy is irrelevant here, pass the first response coordinate.
  Estimate core = estimate_aligned(Y.col(0), W, X, basis, h, rule, mode, demean);
  est.reginv = core.reginv;
  est.cov = core.cov;
  est.tau = core.tau;
  est.K = core.K;

  MatrixXd U(T, m + J);
  U.leftCols(m) = W;
  U.rightCols(J) = X;
  MatrixXd cyu = cross_covariance(Y, U, demean);
  est.A = cyu * est.reginv.dense();

  est.mean_yrow = demean ? VectorXd(Y.colwise().mean()) : VectorXd::Zero(J);
  MatrixXd Yc = Y.rowwise() - est.mean_yrow.transpose();
  Eigen::RowVectorXd mean_u(m + J);
  mean_u << est.cov.mean_w.transpose(), est.cov.mean_x.transpose();
  est.regressors_c = U.rowwise() - mean_u;
  est.residuals = Yc - est.regressors_c * est.A.transpose();
  return est;
}

IrfInference fof_inference(const FofEstimate& est, const ProductElement& zeta,
                           const FunctionElement& theta_dir, double level,
                           const HacSpec& hac) {
  require(level > 0.0 && level < 1.0, Errc::invalid_argument,
          "fof_inference: level must lie in (0,1)");
  require_compatible(theta_dir.basis, est.basis, "fof_inference");
  require(norm(theta_dir) > 0.0, Errc::invalid_argument,
          "fof_inference: direction must be nonzero");
  HacSpec spec = hac;
  if (spec.bandwidth < 0) spec.bandwidth = hac_auto_bandwidth(est.T_eff);

  IrfInference out;
  out.h = est.h;
  out.level = level;
  out.K = est.K;
  out.tau = est.tau;
  out.T_eff = est.T_eff;
  out.bandwidth = spec.bandwidth;
  FunctionElement resp(est.basis, est.A * zeta.stacked());
  out.point = inner(resp, theta_dir);

  // Scalar scores <resid_t, theta_dir> (w_t, x_t) on centered regressors.
  VectorXd proj = est.residuals * theta_dir.coef;
  MatrixXd scores = est.regressors_c.array().colwise() * proj.array();
  MatrixXd lam = hac_longrun(scores, spec);
  VectorXd v = est.reginv.apply(zeta.stacked());
  double psi = v.dot(lam * v);
  double znorm2 = inner(zeta, zeta) * inner(theta_dir, theta_dir);
  require(psi >= 0.0, Errc::degenerate_variance,
          "fof_inference: negative long-run variance");
  require(psi >= 1e-14 * znorm2, Errc::degenerate_variance,
          "fof_inference: long-run variance below the degeneracy floor");
  out.psi = psi;
  out.se = std::sqrt(psi / static_cast<double>(est.T_eff));
  double z = normal_quantile(0.5 * (1.0 + level));
  out.lo = out.point - z * out.se;
  out.hi = out.point + z * out.se;
  return out;
}

}  // namespace flproj
