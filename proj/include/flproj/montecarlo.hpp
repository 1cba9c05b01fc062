#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "flproj/structural.hpp"

namespace flproj {

// Experiment A: scalar response driven by an AR(1)-coordinate functional
// regressor. Coordinates x_{j,t} = alpha_x_j x_{j,t-1} + scale_j e_{j,t},
// scale_j = sigma_x_j for j = 1 and c_e1 * sigma_x_j for j >= 2. For each
// horizon h, y^{(h)}_{t+h} = alpha_h y_t + <beta_h, X_t> + c_u sigma_u_h u_t
// with iid standard normal noise, so (alpha_h, beta_h) is the exact
// projection target. The base y series follows the h = 1 law recursively.
// All default magnitudes are synthetic placeholders, user-overridable.
struct ExpAConfig {
  int T = 250;
  int J = 31;
  int H = 5;
  double c_e1 = 4.0;
  double c_u = 0.5;
  int burnin = 200;
  VectorXd alpha_x;  // J
  VectorXd sigma_x;  // J
  VectorXd alpha_h;  // H
  VectorXd sigma_u;  // H
  MatrixXd beta;     // H x J; rows decay geometrically past the first two

  static ExpAConfig synthetic_default(int T = 250, int H = 5, double c_e1 = 4.0,
                                      int J = 31);
  void validate() const;
};

struct DatasetA {
  VectorXd y;    // base series, length T
  MatrixXd X;    // T x J coordinates
  MatrixXd resp; // T x H; resp(t, h-1) = y^{(h)} paired with row t, valid t < T-h
};

DatasetA simulate_a(const ExpAConfig& cfg, uint64_t master_seed, uint64_t rep);

// Experiment B: three-variable structural VAR(1) with contemporaneous feedback
// from y into the first two functional coordinates, plus iid noise coordinates
// j = 3..J with variances sigma3 * decay^j. The full shock variance vector is
// rescaled by cstar so its largest entry is 1; c1 scales the y shock before
// normalization. Defaults are synthetic placeholders, user-overridable.
struct ExpBConfig {
  int T = 250;
  int J = 31;
  double c1 = 1.0;
  Eigen::Matrix3d alpha;
  double beta1 = 0.5;
  double beta2 = 0.3;
  double s1 = 1.0;  // base shock variances
  double s2 = 0.8;
  double s3 = 0.2;
  double noise_decay = 0.8;
  int burnin = 200;

  static ExpBConfig synthetic_default(int T = 250, double c1 = 1.0);
  void validate() const;
  double cstar() const;
  VectorXd shock_variances() const;  // length J + 1: y shock then X coordinates
  StructuralModel truth(const BasisSpec& basis) const;
  // True h-step response curve of y to a functional shock: row block of
  // Gamma^h B^{-1} (with b12 = 0 this is the (1,2) block of Gamma^h).
  VectorXd true_irf12(int h) const;
};

struct DatasetB {
  VectorXd y;
  MatrixXd X;  // T x J
};

DatasetB simulate_b(const ExpBConfig& cfg, uint64_t master_seed, uint64_t rep);

// Replication driver. threads == 1 runs the plain serial reference loop;
// threads == 0 uses the OpenMP default team; otherwise the requested count.
// Per-rep exceptions are captured in the returned slots (null = success), and
// results must be written to pre-allocated per-rep slots so aggregation order
// is independent of scheduling.
std::vector<std::exception_ptr> run_reps(int reps, int threads,
                                         const std::function<void(int)>& fn);

enum class EstimatorKind { ScInvAuto, ScInvFixedK, PcaFR, PcaSVAR };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::ScInvAuto;
  int K = 2;  // fixed-rank variants
  std::string label() const;
};

// h-step response-coefficient estimate of y_{t+h} on (y_t, X_t) for the
// chosen estimator; PcaSVAR fits a VAR(1) on (y_t, top-K scores) and iterates.
ProductElement fit_h_coefficient(const EstimatorSpec& spec, const VectorXd& y,
                                 const MatrixXd& X, const BasisSpec& basis, int h);

struct CoverageCell {
  int T = 0;
  int h = 0;
  double coverage = 0.0;
  double mean_k = 0.0;
  int failures = 0;
  int reps = 0;
};

struct CoverageReport {
  std::vector<CoverageCell> cells;
  double level = 0.0;
  uint64_t seed = 0;
};

// Per-horizon CI coverage of <beta_h, zeta> under the exact-projection DGP.
// Aborts with replication-failure if more than 1% of fits fail.
CoverageReport run_coverage(const ExpAConfig& cfg, const std::vector<int>& horizons,
                            const ProductElement& zeta, double level, int reps,
                            uint64_t seed, int threads);

struct BiasVarianceRow {
  std::string estimator;
  double bias_l2 = 0.0;
  double variance = 0.0;
  double bias_ratio = 1.0;  // this estimator / first estimator
  double var_ratio = 1.0;
};

struct BiasVarianceReport {
  std::vector<BiasVarianceRow> rows;
  int T = 0;
  int h = 0;
  int reps = 0;
  int failures = 0;
};

// L2 bias and variance of the h-step response-curve estimate, experiment B.
// The first estimator in the list is the ratio denominator.
BiasVarianceReport run_bias_variance(const ExpBConfig& cfg,
                                     const std::vector<EstimatorSpec>& estimators,
                                     int h, int reps, uint64_t seed, int threads);

struct ConsistencyReport {
  std::vector<int> Ts;
  std::vector<double> median_err;  // median ||theta_hat - theta|| per T
  int h = 0;
  int reps = 0;
};

ConsistencyReport run_consistency(const ExpAConfig& base, const std::vector<int>& Ts,
                                  int h, int reps, uint64_t seed, int threads);

struct MapeRow {
  std::string estimator;
  int h = 0;
  double mape = 0.0;
};

struct MapeReport {
  std::vector<MapeRow> rows;
  int T_train = 0;
  int T_test = 0;
};

// Train on the leading fraction, evaluate MAPE of per-horizon predictions on
// the held-out tail. Responses near zero are floored at eps in the divisor.
MapeReport run_mape(const ExpAConfig& cfg, const std::vector<EstimatorSpec>& estimators,
                    const std::vector<int>& horizons, double test_fraction,
                    uint64_t seed);

}  // namespace flproj
