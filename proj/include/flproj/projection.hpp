#pragma once

#include <vector>

#include "flproj/covariance.hpp"
#include "flproj/space.hpp"

namespace flproj {

// Regularization choice: data-driven tau, explicit tau, or a fixed rank.
struct TauRule {
  enum class Kind { Auto, FixedTau, FixedK };
  Kind kind = Kind::Auto;
  double tau = 0.0;
  int K = 0;

  static TauRule automatic() { return TauRule{}; }
  static TauRule fixed_tau(double tau) {
    return TauRule{Kind::FixedTau, tau, 0};
  }
  static TauRule fixed_k(int K) { return TauRule{Kind::FixedK, 0.0, K}; }
};

enum class InverseMode { Schur, Pca };

// HAC long-run variance spec. Kernels are even, continuous on their support,
// k(0) = 1, and vanish outside [-1,1]. bandwidth < 0 means floor(1.2 T^{1/3}).
struct HacSpec {
  enum class Kernel { Bartlett, Parzen, TruncatedUniform };
  Kernel kernel = Kernel::Bartlett;
  int bandwidth = -1;
};

int hac_auto_bandwidth(int T);
double kernel_weight(HacSpec::Kernel k, double x);

// Lambda = T^{-1} sum_{s=-b}^{b} k(s/b) sum_t U_t U_{t-s}', symmetrized.
// Rows of U are the score vectors; b = 0 keeps only the s = 0 term.
MatrixXd hac_longrun(const MatrixXd& U, const HacSpec& spec);

struct Estimate {
  int h = 0;
  int T_eff = 0;
  int m = 0;
  BasisSpec basis;
  VectorXd alpha;        // scalar-covariate coefficients
  FunctionElement beta;  // functional coefficient
  double tau = 0.0;
  int K = 0;
  TauSelection tau_sel;  // populated when the rule was Auto
  bool tau_auto = false;
  RegularizedInverse reginv;
  CovarianceBundle cov;
  VectorXd residuals;    // u_hat_t over the aligned sample
  MatrixXd score_rows;   // rows u_hat_t * (w_t, x_t) (centered regressors)

  VectorXd theta() const;  // stacked (alpha, beta)
  double theta_dot(const ProductElement& zeta) const;
  // Fitted response for a new regressor tuple (adds back sample means).
  double predict(const VectorXd& w, const VectorXd& x) const;
};

// Projection of y on (w, X): pairs y[t] with row t of W and X. The horizon is
// metadata recorded on the estimate; use `estimate` for self-aligned series.
Estimate estimate_aligned(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                          const BasisSpec& basis, int h, const TauRule& rule,
                          InverseMode mode = InverseMode::Schur, bool demean = true);

// Pairs y[t+h] with (W.row(t), X.row(t)); effective sample T - h.
Estimate estimate(const VectorXd& y, const MatrixXd& W, const MatrixXd& X,
                  const BasisSpec& basis, int h, const TauRule& rule,
                  InverseMode mode = InverseMode::Schur, bool demean = true);

struct IrfInference {
  int h = 0;
  double point = 0.0;
  double psi = 0.0;  // long-run variance of the functional
  double se = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
  int K = 0;
  double tau = 0.0;
  int T_eff = 0;
  int bandwidth = 0;
};

// point = <theta_hat, zeta>; psi = <Lambda Cinv zeta, Cinv zeta>;
// CI = point -/+ z_{(1+level)/2} sqrt(psi / T_eff).
IrfInference irf_inference(const Estimate& est, const ProductElement& zeta,
                           double level, const HacSpec& hac);

std::vector<IrfInference> irf_profile(const VectorXd& y, const MatrixXd& W,
                                      const MatrixXd& X, const BasisSpec& basis,
                                      const std::vector<int>& horizons,
                                      const ProductElement& zeta, double level,
                                      const TauRule& rule, InverseMode mode,
                                      const HacSpec& hac, bool demean = true);

// Directions in H and R^m x H. Shock specs used by the CLI: the scalar block
// is zero and the functional part is constant c or affine a + b r.
FunctionElement make_const(const BasisSpec& basis, double c);
FunctionElement make_slope(const BasisSpec& basis, double a, double b);
ProductElement make_functional_shock(int m, FunctionElement f);

}  // namespace flproj
