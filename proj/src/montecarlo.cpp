#include "flproj/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "flproj/mathutil.hpp"

namespace flproj {

namespace {

void single_threaded_eigen() {
  // Eigen's own GEMM threading would make summation order depend on the
  // thread count; replications are the parallel unit here.
  static std::once_flag flag;
  std::call_once(flag, [] { Eigen::setNbThreads(1); });
}

}  // namespace

ExpAConfig ExpAConfig::synthetic_default(int T, int H, double c_e1, int J) {
  ExpAConfig cfg;
  cfg.T = T;
  cfg.H = H;
  cfg.c_e1 = c_e1;
  cfg.J = J;
  require(J >= 3, Errc::invalid_argument, "experiment A: J must be at least 3");
  cfg.alpha_x = VectorXd(J);
  cfg.sigma_x = VectorXd(J);
  for (int j = 0; j < J; ++j) {
    cfg.alpha_x(j) = 0.8 - 0.5 * static_cast<double>(j) / (J - 1);
    cfg.sigma_x(j) = (j == 0) ? 0.55 : 0.22 * std::pow(0.82, j);
  }
  cfg.alpha_h = VectorXd(H);
  cfg.sigma_u = VectorXd(H);
  cfg.beta = MatrixXd::Zero(H, J);
  for (int h = 1; h <= H; ++h) {
    double fade = std::pow(0.75, h - 1);
    cfg.alpha_h(h - 1) = 0.5 * std::pow(0.8, h - 1);
    cfg.sigma_u(h - 1) = 1.0;
    double b1 = 1.0 * fade;
    double b2 = 0.6 * fade;
    cfg.beta(h - 1, 0) = b1;
    cfg.beta(h - 1, 1) = b2;
    double base = std::min(std::abs(b1), std::abs(b2));
    for (int j = 1; j + 2 <= J; ++j)
      cfg.beta(h - 1, j + 1) = base * std::pow(0.7, j);
  }
  return cfg;
}

void ExpAConfig::validate() const {
  require(T >= 16, Errc::config_error, "experiment A: T too small");
  require(J >= 3 && J % 2 == 1, Errc::config_error,
          "experiment A: J must be odd and >= 3");
  require(H >= 1, Errc::config_error, "experiment A: H must be >= 1");
  require(alpha_x.size() == J && sigma_x.size() == J, Errc::config_error,
          "experiment A: coordinate parameter lengths must equal J");
  require(alpha_h.size() == H && sigma_u.size() == H, Errc::config_error,
          "experiment A: horizon parameter lengths must equal H");
  require(beta.rows() == H && beta.cols() == J, Errc::config_error,
          "experiment A: beta must be H x J");
  require(alpha_x.cwiseAbs().maxCoeff() < 1.0, Errc::config_error,
          "experiment A: coordinate AR coefficients must be inside (-1,1)");
  require(burnin >= 0, Errc::config_error, "experiment A: negative burn-in");
}

DatasetA simulate_a(const ExpAConfig& cfg, uint64_t master_seed, uint64_t rep) {
  cfg.validate();
  std::mt19937_64 gen = make_stream(master_seed, rep);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int total = cfg.burnin + cfg.T;
  const int J = cfg.J;

  // Coordinates: x_j AR(1), scale c_e1 on every coordinate except the first.
  MatrixXd Xfull(total, J);
  for (int j = 0; j < J; ++j) {
    double scale = (j == 0 ? 1.0 : cfg.c_e1) * cfg.sigma_x(j);
    double prev = 0.0;
    for (int t = 0; t < total; ++t) {
      prev = cfg.alpha_x(j) * prev + scale * normal(gen);
      Xfull(t, j) = prev;
    }
  }

  // Base series follows the h = 1 law recursively.
  VectorXd yfull(total);
  double yprev = 0.0;
  for (int t = 0; t < total; ++t) {
    double mean = cfg.alpha_h(0) * yprev;
    if (t > 0) mean += cfg.beta.row(0).dot(Xfull.row(t - 1));
    yprev = mean + cfg.c_u * cfg.sigma_u(0) * normal(gen);
    yfull(t) = yprev;
  }

  DatasetA data;
  data.X = Xfull.bottomRows(cfg.T);
  data.y = yfull.tail(cfg.T);
  data.resp = MatrixXd::Zero(cfg.T, cfg.H);
  for (int h = 1; h <= cfg.H; ++h) {
    for (int t = 0; t + h < cfg.T; ++t) {
      data.resp(t, h - 1) = cfg.alpha_h(h - 1) * data.y(t) +
                            cfg.beta.row(h - 1).dot(data.X.row(t)) +
                            cfg.c_u * cfg.sigma_u(h - 1) * normal(gen);
    }
  }
  return data;
}

ExpBConfig ExpBConfig::synthetic_default(int T, double c1) {
  ExpBConfig cfg;
  cfg.T = T;
  cfg.c1 = c1;
  // The second functional coordinate is a low-variance pure AR(1) that still
  // moves y one step ahead: rank-ordered component screens drop it while
  // cutoff-based regularization keeps it.
  cfg.alpha << 0.5, 0.05, 0.2,
               0.1, 0.4, 0.0,
               0.0, 0.0, 0.3;
  cfg.beta1 = 0.5;
  cfg.beta2 = 0.0;
  cfg.s1 = 1.0;
  cfg.s2 = 1.0;
  cfg.s3 = 0.05;
  return cfg;
}

void ExpBConfig::validate() const {
  require(T >= 16, Errc::config_error, "experiment B: T too small");
  require(J >= 5 && J % 2 == 1, Errc::config_error,
          "experiment B: J must be odd and >= 5");
  require(s1 > 0 && s2 > 0 && s3 > 0, Errc::config_error,
          "experiment B: base variances must be positive");
  require(c1 > 0, Errc::config_error, "experiment B: c1 must be positive");
  require(noise_decay > 0 && noise_decay < 1, Errc::config_error,
          "experiment B: noise decay must be inside (0,1)");
  require(burnin >= 0, Errc::config_error, "experiment B: negative burn-in");
}

VectorXd ExpBConfig::shock_variances() const {
  // Entries: y shock, then the J coordinate shocks. Noise coordinates j>=3
  // (1-based) carry variance sqrt(s3) * decay^j before normalization.
  VectorXd v(J + 1);
  v(0) = c1 * s1;
  v(1) = s2;
  v(2) = s3;
  double sig3 = std::sqrt(s3);
  for (int j = 3; j <= J; ++j) v(j) = sig3 * std::pow(noise_decay, j);
  return v;
}

double ExpBConfig::cstar() const {
  // Normalizes the largest shock variance (operator norm of the diagonal) to 1.
  return 1.0 / shock_variances().maxCoeff();
}

StructuralModel ExpBConfig::truth(const BasisSpec& basis) const {
  validate();
  require(basis.dim() == J, Errc::dimension_mismatch,
          "experiment B: basis dim must equal J");
  VectorXd b12 = VectorXd::Zero(J);
  VectorXd b21 = VectorXd::Zero(J);
  // Equation-form contemporaneous loadings move to the left-hand side.
  b21(0) = -beta1;
  b21(1) = -beta2;
  OperatorMatrix A(1, basis);
  A.a11()(0, 0) = alpha(0, 0);
  A.a12()(0, 0) = alpha(0, 1);
  A.a12()(0, 1) = alpha(0, 2);
  A.a21()(0, 0) = alpha(1, 0);
  A.a21()(1, 0) = alpha(2, 0);
  A.a22()(0, 0) = alpha(1, 1);
  A.a22()(0, 1) = alpha(1, 2);
  A.a22()(1, 0) = alpha(2, 1);
  A.a22()(1, 1) = alpha(2, 2);
  VectorXd v = cstar() * shock_variances();
  MatrixXd S22 = MatrixXd::Zero(J, J);
  for (int j = 1; j <= J; ++j) S22(j - 1, j - 1) = v(j);
  return StructuralModel(basis, b12, b21, A, v(0), S22);
}

VectorXd ExpBConfig::true_irf12(int h) const {
  BasisSpec basis = BasisSpec::fourier(J);
  ReducedModel r = structural_to_reduced(truth(basis));
  OperatorMatrix m = OperatorMatrix::identity(1, basis);
  for (int i = 0; i < h; ++i) m = r.gamma.compose(m);
  return m.a12().transpose();
}

DatasetB simulate_b(const ExpBConfig& cfg, uint64_t master_seed, uint64_t rep) {
  cfg.validate();
  std::mt19937_64 gen = make_stream(master_seed, rep);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int total = cfg.burnin + cfg.T;
  const int J = cfg.J;
  VectorXd sd = (cfg.cstar() * cfg.shock_variances()).cwiseSqrt();

  DatasetB data;
  data.y = VectorXd(cfg.T);
  data.X = MatrixXd::Zero(cfg.T, J);
  double y = 0.0, x1 = 0.0, x2 = 0.0;
  for (int t = 0; t < total; ++t) {
    double u1 = sd(0) * normal(gen);
    double u2 = sd(1) * normal(gen);
    double u3 = sd(2) * normal(gen);
    double y_new = cfg.alpha(0, 0) * y + cfg.alpha(0, 1) * x1 +
                   cfg.alpha(0, 2) * x2 + u1;
    double x1_new = cfg.beta1 * y_new + cfg.alpha(1, 0) * y +
                    cfg.alpha(1, 1) * x1 + cfg.alpha(1, 2) * x2 + u2;
    double x2_new = cfg.beta2 * y_new + cfg.alpha(2, 0) * y +
                    cfg.alpha(2, 1) * x1 + cfg.alpha(2, 2) * x2 + u3;
    y = y_new; x1 = x1_new; x2 = x2_new;
    int keep = t - cfg.burnin;
    if (keep >= 0) {
      data.y(keep) = y;
      data.X(keep, 0) = x1;
      data.X(keep, 1) = x2;
      for (int j = 2; j < J; ++j) data.X(keep, j) = sd(j + 1) * normal(gen);
    } else {
      for (int j = 2; j < J; ++j) normal(gen);  // keep the draw order fixed
    }
  }
  return data;
}

std::vector<std::exception_ptr> run_reps(int reps, int threads,
                                         const std::function<void(int)>& fn) {
  require(reps >= 1, Errc::invalid_argument, "run_reps: need at least 1 replication");
  single_threaded_eigen();
  std::vector<std::exception_ptr> errs(reps);
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) {
      try { fn(r); } catch (...) { errs[r] = std::current_exception(); }
    }
  } else if (threads <= 0) {
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
      try { fn(r); } catch (...) { errs[r] = std::current_exception(); }
    }
  } else {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int r = 0; r < reps; ++r) {
      try { fn(r); } catch (...) { errs[r] = std::current_exception(); }
    }
  }
  return errs;
}

std::string EstimatorSpec::label() const {
  switch (kind) {
    case EstimatorKind::ScInvAuto: return "scinv-auto";
    case EstimatorKind::ScInvFixedK: return "scinv-k" + std::to_string(K);
    case EstimatorKind::PcaFR: return "pca-fr-k" + std::to_string(K);
    case EstimatorKind::PcaSVAR: return "pca-svar-k" + std::to_string(K);
  }
  return "?";
}

namespace {

// VAR(1) on (y_t, top-K principal scores of X): the h-step response row of y
// mapped back to function coordinates.
ProductElement fit_pca_svar(const VectorXd& y, const MatrixXd& X,
                            const BasisSpec& basis, int h, int K) {
  const int T = static_cast<int>(y.size());
  require(h >= 1, Errc::invalid_argument, "pca-svar: horizon must be >= 1");
  require(T >= K + 10, Errc::insufficient_data, "pca-svar: sample too short");
  // Scores from the lag-window covariance so the h = 1 fit matches the
  // direct projection on identical data.
  const int n = T - 1;
  MatrixXd Xlag = X.topRows(n);
  Eigen::RowVectorXd xmean = Xlag.colwise().mean();
  MatrixXd Xc = Xlag.rowwise() - xmean;
  MatrixXd g22 = (Xc.transpose() * Xc) / static_cast<double>(n);
  EigenSystem eig = eigensystem_sym_fixed_k(g22, K);
  MatrixXd vk = eig.left.leftCols(K);

  const int p = K + 1;
  MatrixXd Zlag(n, p), Znow(n, p);
  Zlag.col(0) = y.head(n);
  Zlag.rightCols(K) = Xc * vk;
  Znow.col(0) = y.tail(n);
  MatrixXd Xnowc = (X.bottomRows(n).rowwise() - xmean);
  Znow.rightCols(K) = Xnowc * vk;
  Eigen::RowVectorXd ml = Zlag.colwise().mean(), mn = Znow.colwise().mean();
  MatrixXd Lc = Zlag.rowwise() - ml;
  MatrixXd Nc = Znow.rowwise() - mn;
  MatrixXd normal = Lc.transpose() * Lc;
  require(rcond(normal) >= 1e-12, Errc::ill_conditioned_covariates,
          "pca-svar: score design is numerically singular");
  MatrixXd phi_t = normal.ldlt().solve(Lc.transpose() * Nc);  // Phi'
  MatrixXd phi = phi_t.transpose();

  MatrixXd ph = MatrixXd::Identity(p, p);
  for (int i = 0; i < h; ++i) ph = phi * ph;
  ProductElement out;
  out.w = VectorXd::Constant(1, ph(0, 0));
  out.x = FunctionElement(basis, vk * ph.row(0).tail(K).transpose());
  return out;
}

}  // namespace

ProductElement fit_h_coefficient(const EstimatorSpec& spec, const VectorXd& y,
                                 const MatrixXd& X, const BasisSpec& basis, int h) {
  switch (spec.kind) {
    case EstimatorKind::ScInvAuto: {
      Estimate est = estimate(y, y, X, basis, h, TauRule::automatic());
      return ProductElement{est.alpha, est.beta};
    }
    case EstimatorKind::ScInvFixedK: {
      Estimate est = estimate(y, y, X, basis, h, TauRule::fixed_k(spec.K));
      return ProductElement{est.alpha, est.beta};
    }
    case EstimatorKind::PcaFR: {
      Estimate est = estimate(y, y, X, basis, h, TauRule::fixed_k(spec.K),
                              InverseMode::Pca);
      return ProductElement{est.alpha, est.beta};
    }
    case EstimatorKind::PcaSVAR:
      return fit_pca_svar(y, X, basis, h, spec.K);
  }
  raise(Errc::internal_error, "fit_h_coefficient: unknown estimator");
}

namespace {

int check_failures(const std::vector<std::exception_ptr>& errs, int budget_denom) {
  int failures = 0;
  std::exception_ptr first;
  for (const auto& e : errs)
    if (e) {
      ++failures;
      if (!first) first = e;
    }
  if (failures * 100 > budget_denom) {
    try {
      if (first) std::rethrow_exception(first);
    } catch (const std::exception& ex) {
      raise(Errc::replication_failure,
            std::string("more than 1% of replications failed; first: ") + ex.what());
    }
    raise(Errc::replication_failure, "more than 1% of replications failed");
  }
  return failures;
}

}  // namespace

CoverageReport run_coverage(const ExpAConfig& cfg, const std::vector<int>& horizons,
                            const ProductElement& zeta, double level, int reps,
                            uint64_t seed, int threads) {
  cfg.validate();
  require(zeta.m() == 1, Errc::dimension_mismatch,
          "run_coverage: shock must have a single scalar coordinate");
  require(!horizons.empty(), Errc::invalid_argument, "run_coverage: no horizons");
  for (int h : horizons)
    require(h >= 1 && h <= cfg.H, Errc::invalid_argument,
            "run_coverage: horizon outside 1..H");
  const int nh = static_cast<int>(horizons.size());
  const BasisSpec basis = BasisSpec::fourier(cfg.J);

  MatrixXd hits = MatrixXd::Zero(reps, nh);
  MatrixXd ks = MatrixXd::Zero(reps, nh);
  MatrixXd ok = MatrixXd::Zero(reps, nh);

  auto errs = run_reps(reps, threads, [&](int r) {
    DatasetA data = simulate_a(cfg, seed, static_cast<uint64_t>(r));
    for (int i = 0; i < nh; ++i) {
      int h = horizons[i];
      int Te = cfg.T - h;
      Estimate est = estimate_aligned(
          data.resp.col(h - 1).head(Te), data.y.head(Te), data.X.topRows(Te),
          basis, h, TauRule::automatic());
      IrfInference inf = irf_inference(est, zeta, level, HacSpec{});
      double truth = cfg.alpha_h(h - 1) * zeta.w(0) +
                     cfg.beta.row(h - 1).dot(zeta.x.coef);
      hits(r, i) = (truth >= inf.lo && truth <= inf.hi) ? 1.0 : 0.0;
      ks(r, i) = static_cast<double>(inf.K);
      ok(r, i) = 1.0;
    }
  });
  int failures = check_failures(errs, reps * nh);

  CoverageReport report;
  report.level = level;
  report.seed = seed;
  for (int i = 0; i < nh; ++i) {
    CoverageCell cell;
    cell.T = cfg.T;
    cell.h = horizons[i];
    cell.reps = reps;
    std::vector<double> hcol(reps), kcol(reps), ocol(reps);
    for (int r = 0; r < reps; ++r) {
      hcol[r] = hits(r, i);
      kcol[r] = ks(r, i);
      ocol[r] = ok(r, i);
    }
    double nok = pairwise_sum(ocol);
    require(nok > 0, Errc::replication_failure, "run_coverage: all replications failed");
    cell.coverage = pairwise_sum(hcol) / nok;
    cell.mean_k = pairwise_sum(kcol) / nok;
    cell.failures = failures;
    report.cells.push_back(cell);
  }
  return report;
}

BiasVarianceReport run_bias_variance(const ExpBConfig& cfg,
                                     const std::vector<EstimatorSpec>& estimators,
                                     int h, int reps, uint64_t seed, int threads) {
  cfg.validate();
  require(!estimators.empty(), Errc::invalid_argument,
          "run_bias_variance: no estimators");
  const int ne = static_cast<int>(estimators.size());
  const BasisSpec basis = BasisSpec::fourier(cfg.J);
  const VectorXd truth = cfg.true_irf12(h);

  std::vector<MatrixXd> coef(ne, MatrixXd::Zero(reps, cfg.J));
  VectorXd okv = VectorXd::Zero(reps);

  auto errs = run_reps(reps, threads, [&](int r) {
    DatasetB data = simulate_b(cfg, seed, static_cast<uint64_t>(r));
    for (int e = 0; e < ne; ++e) {
      ProductElement th = fit_h_coefficient(estimators[e], data.y, data.X, basis, h);
      coef[e].row(r) = th.x.coef.transpose();
    }
    okv(r) = 1.0;
  });
  int failures = check_failures(errs, reps);

  std::vector<double> oks(okv.data(), okv.data() + reps);
  double nok = pairwise_sum(oks);
  require(nok > 0, Errc::replication_failure,
          "run_bias_variance: all replications failed");

  BiasVarianceReport report;
  report.T = cfg.T;
  report.h = h;
  report.reps = reps;
  report.failures = failures;
  for (int e = 0; e < ne; ++e) {
    // Failed rows are zero; masking by the ok vector keeps sums order-stable.
    VectorXd mean(cfg.J);
    std::vector<double> buf(reps);
    for (int j = 0; j < cfg.J; ++j) {
      for (int r = 0; r < reps; ++r) buf[r] = coef[e](r, j) * okv(r);
      mean(j) = pairwise_sum(buf) / nok;
    }
    for (int r = 0; r < reps; ++r) {
      buf[r] = okv(r) > 0 ? (coef[e].row(r).transpose() - mean).squaredNorm() : 0.0;
    }
    BiasVarianceRow row;
    row.estimator = estimators[e].label();
    row.bias_l2 = (mean - truth).norm();
    row.variance = pairwise_sum(buf) / nok;
    report.rows.push_back(row);
  }
  for (int e = 0; e < ne; ++e) {
    report.rows[e].bias_ratio = report.rows[e].bias_l2 / report.rows[0].bias_l2;
    report.rows[e].var_ratio = report.rows[e].variance / report.rows[0].variance;
  }
  return report;
}

ConsistencyReport run_consistency(const ExpAConfig& base, const std::vector<int>& Ts,
                                  int h, int reps, uint64_t seed, int threads) {
  require(!Ts.empty(), Errc::invalid_argument, "run_consistency: no sample sizes");
  require(h >= 1 && h <= base.H, Errc::invalid_argument,
          "run_consistency: horizon outside 1..H");
  ConsistencyReport report;
  report.Ts = Ts;
  report.h = h;
  report.reps = reps;

  for (size_t i = 0; i < Ts.size(); ++i) {
    ExpAConfig cfg = base;
    cfg.T = Ts[i];
    cfg.validate();
    const BasisSpec basis = BasisSpec::fourier(cfg.J);
    VectorXd errsq = VectorXd::Constant(reps, -1.0);
    uint64_t rep_base = static_cast<uint64_t>(i) << 32;

    auto errs = run_reps(reps, threads, [&](int r) {
      DatasetA data = simulate_a(cfg, seed, rep_base + static_cast<uint64_t>(r));
      int Te = cfg.T - h;
      Estimate est = estimate_aligned(
          data.resp.col(h - 1).head(Te), data.y.head(Te), data.X.topRows(Te),
          basis, h, TauRule::automatic());
      double da = est.alpha(0) - cfg.alpha_h(h - 1);
      double db = (est.beta.coef - cfg.beta.row(h - 1).transpose()).squaredNorm();
      errsq(r) = da * da + db;
    });
    check_failures(errs, reps);

    std::vector<double> vals;
    vals.reserve(reps);
    for (int r = 0; r < reps; ++r)
      if (errsq(r) >= 0.0) vals.push_back(std::sqrt(errsq(r)));
    require(!vals.empty(), Errc::replication_failure,
            "run_consistency: all replications failed");
    report.median_err.push_back(median_inplace(vals));
  }
  return report;
}

MapeReport run_mape(const ExpAConfig& cfg, const std::vector<EstimatorSpec>& estimators,
                    const std::vector<int>& horizons, double test_fraction,
                    uint64_t seed) {
  cfg.validate();
  require(test_fraction > 0.0 && test_fraction < 0.5, Errc::invalid_argument,
          "run_mape: test fraction must lie in (0, 0.5)");
  require(!estimators.empty() && !horizons.empty(), Errc::invalid_argument,
          "run_mape: empty estimator or horizon list");
  for (int h : horizons)
    require(h >= 1 && h <= cfg.H, Errc::invalid_argument,
            "run_mape: horizon outside 1..H");
  single_threaded_eigen();

  DatasetA data = simulate_a(cfg, seed, 0);
  const BasisSpec basis = BasisSpec::fourier(cfg.J);
  const int T_train = static_cast<int>(std::floor((1.0 - test_fraction) * cfg.T));
  require(T_train >= 32, Errc::insufficient_data, "run_mape: training window too short");

  MapeReport report;
  report.T_train = T_train;
  report.T_test = cfg.T - T_train;
  VectorXd y_train = data.y.head(T_train);
  MatrixXd X_train = data.X.topRows(T_train);

  for (const auto& spec : estimators) {
    for (int h : horizons) {
      // Fit on aligned training pairs via the common coefficient interface.
      int Te = T_train - h;
      VectorXd resp_train = data.resp.col(h - 1).head(Te);
      ProductElement th = [&] {
        if (spec.kind == EstimatorKind::PcaSVAR)
          return fit_h_coefficient(spec, y_train, X_train, basis, h);
        EstimatorSpec s = spec;
        TauRule rule = s.kind == EstimatorKind::ScInvAuto
                           ? TauRule::automatic()
                           : TauRule::fixed_k(s.K);
        InverseMode mode = s.kind == EstimatorKind::PcaFR ? InverseMode::Pca
                                                          : InverseMode::Schur;
        Estimate est = estimate_aligned(resp_train, y_train.head(Te),
                                        X_train.topRows(Te), basis, h, rule, mode);
        return ProductElement{est.alpha, est.beta};
      }();

      double resp_mean = resp_train.mean();
      double y_mean = y_train.head(Te).mean();
      VectorXd x_mean = X_train.topRows(Te).colwise().mean();

      double acc = 0.0;
      int n = 0;
      for (int t = T_train; t + h < cfg.T; ++t) {
        double pred = resp_mean + th.w(0) * (data.y(t) - y_mean) +
                      th.x.coef.dot(data.X.row(t).transpose() - x_mean);
        double truth = data.resp(t, h - 1);
        acc += std::abs(pred - truth) / std::max(std::abs(truth), 1e-8);
        ++n;
      }
      require(n > 0, Errc::insufficient_data, "run_mape: empty test window");
      report.rows.push_back(MapeRow{spec.label(), h, acc / n});
    }
  }
  return report;
}

}  // namespace flproj
