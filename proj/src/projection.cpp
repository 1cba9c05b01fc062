#include "flproj/projection.hpp"

#include <cmath>
#include <numbers>

#include "flproj/mathutil.hpp"

namespace flproj {

int hac_auto_bandwidth(int T) {
  require(T >= 1, Errc::invalid_argument, "hac bandwidth: T must be positive");
  return static_cast<int>(std::floor(1.2 * std::cbrt(static_cast<double>(T))));
}

double kernel_weight(HacSpec::Kernel k, double x) {
  double a = std::abs(x);
  if (a > 1.0) return 0.0;
  switch (k) {
    case HacSpec::Kernel::Bartlett:
      return 1.0 - a;
    case HacSpec::Kernel::Parzen:
      if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
      return 2.0 * std::pow(1.0 - a, 3);
    case HacSpec::Kernel::TruncatedUniform:
      return 1.0;
  }
  return 0.0;
}

MatrixXd hac_longrun(const MatrixXd& U, const HacSpec& spec) {
  const int T = static_cast<int>(U.rows());
  require(T >= 2, Errc::insufficient_data, "hac: need at least 2 score rows");
  int b = spec.bandwidth < 0 ? hac_auto_bandwidth(T) : spec.bandwidth;
  require(b < T, Errc::invalid_bandwidth, "hac: bandwidth must be < T");

  const double inv_t = 1.0 / static_cast<double>(T);
  MatrixXd lam = inv_t * (U.transpose() * U);  // s = 0 term, k(0) = 1
  for (int s = 1; s <= b; ++s) {
    double wgt = kernel_weight(spec.kernel, static_cast<double>(s) / b);
    if (wgt == 0.0) continue;
    // sum over t with both t and t-s in range: U_t U_{t-s}' and its mirror
    MatrixXd cs = inv_t * (U.bottomRows(T - s).transpose() * U.topRows(T - s));
    lam.noalias() += wgt * (cs + cs.transpose());
  }
  return 0.5 * (lam + lam.transpose());
}

VectorXd Estimate::theta() const {
  VectorXd v(m + basis.dim());
  v << alpha, beta.coef;
  return v;
}

double Estimate::theta_dot(const ProductElement& zeta) const {
  require(zeta.m() == m, Errc::dimension_mismatch,
          "theta_dot: shock scalar part mismatch");
  require_compatible(zeta.x.basis, basis, "theta_dot");
  return alpha.dot(zeta.w) + inner(beta, zeta.x);
}

double Estimate::predict(const VectorXd& w, const VectorXd& x) const {
  require(w.size() == m && x.size() == basis.dim(), Errc::dimension_mismatch,
          "predict: regressor mismatch");
  return cov.mean_y + alpha.dot(w - cov.mean_w) + beta.coef.dot(x - cov.mean_x);
}

Estimate estimate_aligned(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                          const BasisSpec& basis, int h, const TauRule& rule,
                          InverseMode mode, bool demean) {
  const int T = static_cast<int>(y.size());
  const int m = static_cast<int>(W.cols());
  const int J = basis.dim();
  require(T > m + 1, Errc::insufficient_data,
          "estimate: sample smaller than scalar covariate count");

  Estimate est;
  est.h = h;
  est.T_eff = T;
  est.m = m;
  est.basis = basis;
  est.cov = empirical_covariances(y, W, X, basis, demean);

  MatrixXd schur = schur_complement(est.cov);
  if (mode == InverseMode::Schur) {
    EigenSystem eig;
    switch (rule.kind) {
      case TauRule::Kind::Auto: {
        eig = eigensystem_sym_full(schur);
        est.tau_sel = select_tau(eig.values, T, est.cov.hs_norm());
        est.tau_auto = true;
        eig.tau = est.tau_sel.tau;
        eig.K = cutoff_rank(eig.values, eig.tau);
        break;
      }
      case TauRule::Kind::FixedTau:
        eig = eigensystem_sym(schur, rule.tau);
        break;
      case TauRule::Kind::FixedK:
        eig = eigensystem_sym_fixed_k(schur, rule.K);
        break;
    }
    est.reginv = regularized_inverse(est.cov, eig);
  } else {
    require(rule.kind == TauRule::Kind::FixedK, Errc::invalid_argument,
            "estimate: pca mode requires a fixed score count");
    EigenSystem eig = eigensystem_sym_fixed_k(est.cov.g22, rule.K);
    est.reginv = regularized_inverse_pca(est.cov, eig);
  }
  est.K = est.reginv.K;
  est.tau = est.reginv.tau;

  VectorXd theta = est.reginv.apply(est.cov.c_uy);
  est.alpha = theta.head(m);
  est.beta = FunctionElement(basis, theta.tail(J));

  // Residuals and score rows on the centered sample.
  MatrixXd Wc = W.rowwise() - est.cov.mean_w.transpose();
  MatrixXd Xc = X.rowwise() - est.cov.mean_x.transpose();
  VectorXd yc = y.array() - est.cov.mean_y;
  est.residuals = yc - Wc * est.alpha - Xc * est.beta.coef;
  est.score_rows = MatrixXd(T, m + J);
  est.score_rows.leftCols(m) = Wc.array().colwise() * est.residuals.array();
  est.score_rows.rightCols(J) = Xc.array().colwise() * est.residuals.array();
  return est;
}

Estimate estimate(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                  const BasisSpec& basis, int h, const TauRule& rule,
                  InverseMode mode, bool demean) {
  const int T = static_cast<int>(y.size());
  require(h >= 0, Errc::invalid_argument, "estimate: horizon must be >= 0");
  require(W.rows() == T && X.rows() == T, Errc::dimension_mismatch,
          "estimate: series lengths differ");
  require(T - h >= 8, Errc::insufficient_data,
          "estimate: fewer than 8 usable pairs at this horizon");
  const int Te = T - h;
  return estimate_aligned(y.tail(Te), W.topRows(Te), X.topRows(Te), basis, h,
                          rule, mode, demean);
}

IrfInference irf_inference(const Estimate& est, const ProductElement& zeta,
                           double level, const HacSpec& hac) {
  require(level > 0.0 && level < 1.0, Errc::invalid_argument,
          "irf_inference: level must lie in (0,1)");
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
  VectorXd v = est.reginv.apply(zeta.stacked());
  double psi = v.dot(lam * v);
  double znorm2 = inner(zeta, zeta);
  require(psi >= 0.0, Errc::degenerate_variance,
          "irf_inference: negative long-run variance");
  require(psi >= 1e-14 * znorm2, Errc::degenerate_variance,
          "irf_inference: long-run variance below the degeneracy floor");
  out.psi = psi;
  out.se = std::sqrt(psi / static_cast<double>(est.T_eff));
  double z = normal_quantile(0.5 * (1.0 + level));
  out.lo = out.point - z * out.se;
  out.hi = out.point + z * out.se;
  return out;
}

std::vector<IrfInference> irf_profile(const VectorXd& y, const MatrixXd& W,
                                      const MatrixXd& X, const BasisSpec& basis,
                                      const std::vector<int>& horizons,
                                      const ProductElement& zeta, double level,
                                      const TauRule& rule, InverseMode mode,
                                      const HacSpec& hac, bool demean) {
  const int n = static_cast<int>(horizons.size());
  std::vector<IrfInference> out(n);
  std::vector<std::exception_ptr> errs(n);
  // Horizons are independent; slots keep the output order deterministic.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      Estimate est = estimate(y, W, X, basis, horizons[i], rule, mode, demean);
      out[i] = irf_inference(est, zeta, level, hac);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

FunctionElement make_const(const BasisSpec& basis, double c) {
  VectorXd coef = VectorXd::Zero(basis.dim());
  if (basis.kind() == BasisKind::Fourier) {
    coef(0) = c;
  } else {
    coef.setConstant(c);
  }
  return FunctionElement(basis, coef);
}

FunctionElement make_slope(const BasisSpec& basis, double a, double b) {
  VectorXd coef(basis.dim());
  if (basis.kind() == BasisKind::Fourier) {
    // <a + b r, 1> = a + b/2; <a + b r, sqrt2 sin(2 pi k r)> = -b sqrt2/(2 pi k);
    // cosine coordinates vanish.
    coef.setZero();
    coef(0) = a + 0.5 * b;
    const double sqrt2 = std::numbers::sqrt2;
    const double twopi = 2.0 * std::numbers::pi;
    for (int k = 1; 2 * k - 1 < basis.dim(); ++k)
      coef(2 * k - 1) = -b * sqrt2 / (twopi * k);
  } else {
    coef = a + b * basis.grid().array();
  }
  return FunctionElement(basis, coef);
}

ProductElement make_functional_shock(int m, FunctionElement f) {
  return ProductElement{VectorXd::Zero(m), std::move(f)};
}

}  // namespace flproj
