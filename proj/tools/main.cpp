// flproj: functional linear projections, IRF inference, structural VARs,
// simulation experiments, and quantile-curve ingestion.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flproj/dataio.hpp"
#include "flproj/instruments.hpp"
#include "flproj/mathutil.hpp"
#include "flproj/montecarlo.hpp"
#include "flproj/structural.hpp"

using json = nlohmann::json;
using namespace flproj;

namespace {

double parse_double(const std::string& s, const std::string& what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  require(end != begin && *end == '\0' && std::isfinite(v), Errc::invalid_argument,
          what + ": not a finite number: '" + s + "'");
  return v;
}

std::string col_name(char prefix, int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03d", prefix, j);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream ofs(path);
  if (!ofs) raise(Errc::io_error, "cannot write " + path);
  ofs << text;
  if (!ofs) raise(Errc::io_error, "write failed: " + path);
}

// Shared dataset: response y, scalar covariates W (default: y itself), and
// the functional series X as Fourier coefficient rows.
struct CommonData {
  VectorXd y;
  MatrixXd W;
  MatrixXd X;
  BasisSpec basis = BasisSpec::fourier(1);
  std::vector<std::string> t;
};

VectorXd single_column(const ScalarTable& tab, const std::string& path) {
  require(tab.values.cols() == 1, Errc::io_error,
          path + ": expected a single value column, got " +
              std::to_string(tab.values.cols()));
  return tab.values.col(0);
}

void require_aligned(const std::vector<std::string>& a,
                     const std::vector<std::string>& b, const std::string& what) {
  require(a.size() == b.size(), Errc::io_error, what + ": row counts differ");
  for (size_t i = 0; i < a.size(); ++i)
    require(a[i] == b[i], Errc::io_error,
            what + ": t labels differ at row " + std::to_string(i + 1));
}

CommonData load_common(const std::string& y_path, const std::string& w_path,
                       const std::string& x_path) {
  CommonData d;
  WideSeries xs = read_wide_csv(x_path);
  require(xs.G() % 2 == 1, Errc::io_error,
          x_path + ": Fourier coefficient count must be odd, got " +
              std::to_string(xs.G()));
  d.basis = BasisSpec::fourier(xs.G());
  d.X = xs.values;
  d.t = xs.t;

  ScalarTable ys = read_scalar_csv(y_path);
  require_aligned(xs.t, ys.t, "y vs x");
  d.y = single_column(ys, y_path);

  if (w_path.empty()) {
    d.W = d.y;
  } else {
    ScalarTable ws = read_scalar_csv(w_path);
    require_aligned(xs.t, ws.t, "w vs x");
    require(ws.values.cols() >= 1, Errc::io_error, w_path + ": no covariate columns");
    d.W = ws.values;
  }
  return d;
}

FunctionElement parse_zeta_function(const std::string& spec, const BasisSpec& basis) {
  if (spec.rfind("const:", 0) == 0)
    return make_const(basis, parse_double(spec.substr(6), "--zeta const"));
  if (spec.rfind("slope:", 0) == 0) {
    std::string rest = spec.substr(6);
    size_t comma = rest.find(',');
    require(comma != std::string::npos, Errc::invalid_argument,
            "--zeta slope needs two comma-separated values");
    double a = parse_double(rest.substr(0, comma), "--zeta slope a");
    double b = parse_double(rest.substr(comma + 1), "--zeta slope b");
    return make_slope(basis, a, b);
  }
  if (spec.rfind("file:", 0) == 0) {
    WideSeries s = read_wide_csv(spec.substr(5));
    require(s.n() == 1, Errc::io_error, "--zeta file must hold exactly one row");
    require(s.G() == basis.dim(), Errc::dimension_mismatch,
            "--zeta file dimension does not match the functional series");
    return FunctionElement(basis, s.values.row(0).transpose());
  }
  raise(Errc::invalid_argument,
        "--zeta must be const:<c>, slope:<a,b>, or file:<path>, got '" + spec + "'");
}

HacSpec::Kernel parse_kernel(const std::string& s) {
  if (s == "bartlett") return HacSpec::Kernel::Bartlett;
  if (s == "parzen") return HacSpec::Kernel::Parzen;
  if (s == "trunc") return HacSpec::Kernel::TruncatedUniform;
  raise(Errc::invalid_argument,
        "--kernel must be bartlett, parzen or trunc, got '" + s + "'");
}

int parse_bandwidth(const std::string& s) {
  if (s == "auto") return -1;
  const char* begin = s.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  require(end != begin && *end == '\0' && v >= 0, Errc::invalid_argument,
          "--bandwidth must be a nonnegative integer or 'auto', got '" + s + "'");
  return static_cast<int>(v);
}

// Regularization flags shared by the estimation subcommands.
struct TauFlags {
  double tau = -1.0;
  std::string rule = "";
  int fixed_k = 0;
  std::string mode = "schur";

  void attach(CLI::App* cmd, bool with_mode = true) {
    cmd->add_option("--tau", tau, "explicit spectral cutoff (> 0)");
    cmd->add_option("--tau-rule", rule, "cutoff rule: auto");
    cmd->add_option("--fixed-k", fixed_k, "fixed retained rank (>= 1)");
    if (with_mode)
      cmd->add_option("--mode", mode, "regularized inverse: schur or pca");
  }
  TauRule make_rule() const {
    int chosen = (tau >= 0.0) + (fixed_k > 0) + (!rule.empty());
    require(chosen <= 1, Errc::invalid_argument,
            "--tau, --tau-rule and --fixed-k are mutually exclusive");
    if (tau >= 0.0) {
      require(tau > 0.0, Errc::invalid_argument, "--tau must be positive");
      return TauRule::fixed_tau(tau);
    }
    if (fixed_k > 0) return TauRule::fixed_k(fixed_k);
    require(rule.empty() || rule == "auto", Errc::invalid_argument,
            "--tau-rule only supports 'auto', got '" + rule + "'");
    return TauRule::automatic();
  }
  InverseMode make_mode() const {
    if (mode == "schur") return InverseMode::Schur;
    if (mode == "pca") return InverseMode::Pca;
    raise(Errc::invalid_argument, "--mode must be schur or pca, got '" + mode + "'");
  }
};

struct HacFlags {
  std::string kernel = "bartlett";
  std::string bandwidth = "auto";

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "HAC kernel: bartlett, parzen, trunc");
    cmd->add_option("--bandwidth", bandwidth, "HAC bandwidth: integer or 'auto'");
  }
  HacSpec make() const { return HacSpec{parse_kernel(kernel), parse_bandwidth(bandwidth)}; }
};

void apply_config_a(ExpAConfig& cfg, const std::string& path) {
  if (path.empty()) return;
  std::ifstream ifs(path);
  if (!ifs) raise(Errc::io_error, "cannot open " + path);
  json j;
  try {
    ifs >> j;
  } catch (const std::exception& e) {
    raise(Errc::config_error, path + ": " + e.what());
  }
  try {
    // dimension keys regenerate the closed-form defaults at the new sizes so
    // the remaining overrides land on consistently shaped fields
    if (j.contains("T") || j.contains("J") || j.contains("H") ||
        j.contains("c_e1")) {
      cfg = ExpAConfig::synthetic_default(
          j.value("T", cfg.T), j.value("H", cfg.H), j.value("c_e1", cfg.c_e1),
          j.value("J", cfg.J));
    }
    if (j.contains("c_u")) cfg.c_u = j["c_u"].get<double>();
    if (j.contains("burnin")) cfg.burnin = j["burnin"].get<int>();
    auto vec = [&](const char* key, VectorXd& out) {
      if (!j.contains(key)) return;
      auto v = j[key].get<std::vector<double>>();
      out = Eigen::Map<const VectorXd>(v.data(), static_cast<int>(v.size()));
    };
    vec("alpha_x", cfg.alpha_x);
    vec("sigma_x", cfg.sigma_x);
    vec("alpha_h", cfg.alpha_h);
    vec("sigma_u", cfg.sigma_u);
    if (j.contains("beta")) {
      auto rows = j["beta"].get<std::vector<std::vector<double>>>();
      cfg.beta = MatrixXd(static_cast<int>(rows.size()),
                          rows.empty() ? 0 : static_cast<int>(rows[0].size()));
      for (size_t i = 0; i < rows.size(); ++i) {
        require(static_cast<int>(rows[i].size()) == cfg.beta.cols(),
                Errc::config_error, "config: ragged beta rows");
        for (int k = 0; k < cfg.beta.cols(); ++k) cfg.beta(i, k) = rows[i][k];
      }
    }
  } catch (const json::exception& e) {
    raise(Errc::config_error, path + ": " + e.what());
  }
}

void apply_config_b(ExpBConfig& cfg, const std::string& path) {
  if (path.empty()) return;
  std::ifstream ifs(path);
  if (!ifs) raise(Errc::io_error, "cannot open " + path);
  json j;
  try {
    ifs >> j;
  } catch (const std::exception& e) {
    raise(Errc::config_error, path + ": " + e.what());
  }
  try {
    if (j.contains("T")) cfg.T = j["T"].get<int>();
    if (j.contains("J")) cfg.J = j["J"].get<int>();
    if (j.contains("c1")) cfg.c1 = j["c1"].get<double>();
    if (j.contains("beta1")) cfg.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) cfg.beta2 = j["beta2"].get<double>();
    if (j.contains("s1")) cfg.s1 = j["s1"].get<double>();
    if (j.contains("s2")) cfg.s2 = j["s2"].get<double>();
    if (j.contains("s3")) cfg.s3 = j["s3"].get<double>();
    if (j.contains("noise_decay")) cfg.noise_decay = j["noise_decay"].get<double>();
    if (j.contains("burnin")) cfg.burnin = j["burnin"].get<int>();
    if (j.contains("alpha")) {
      auto rows = j["alpha"].get<std::vector<std::vector<double>>>();
      require(rows.size() == 3 && rows[0].size() == 3 && rows[1].size() == 3 &&
                  rows[2].size() == 3,
              Errc::config_error, "config: alpha must be 3x3");
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) cfg.alpha(i, k) = rows[i][k];
    }
  } catch (const json::exception& e) {
    raise(Errc::config_error, path + ": " + e.what());
  }
}

std::vector<std::string> int_labels(int n) {
  std::vector<std::string> t(n);
  for (int i = 0; i < n; ++i) t[i] = std::to_string(i);
  return t;
}

// ---- subcommand bodies -----------------------------------------------------

struct IoFlags {
  std::string y_path, w_path, x_path, out = "-";
};

void cmd_estimate(const IoFlags& io, const TauFlags& tf, int horizons) {
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  CommonData d = load_common(io.y_path, io.w_path, io.x_path);
  TauRule rule = tf.make_rule();
  InverseMode mode = tf.make_mode();

  std::ostringstream out;
  out << "h,T_eff,K,tau";
  for (int i = 0; i < d.W.cols(); ++i) out << ',' << col_name('a', i);
  for (int j = 0; j < d.basis.dim(); ++j) out << ',' << col_name('b', j);
  out << '\n';
  for (int h = 1; h <= horizons; ++h) {
    Estimate est = estimate(d.y, d.W, d.X, d.basis, h, rule, mode);
    out << h << ',' << est.T_eff << ',' << est.K << ',' << fmt12(est.tau);
    for (int i = 0; i < est.alpha.size(); ++i) out << ',' << fmt12(est.alpha(i));
    for (int j = 0; j < d.basis.dim(); ++j) out << ',' << fmt12(est.beta.coef(j));
    out << '\n';
  }
  write_text(io.out, out.str());
}

void cmd_irf(const IoFlags& io, const TauFlags& tf, const HacFlags& hf, int horizons,
             const std::string& zeta_spec, double level) {
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  CommonData d = load_common(io.y_path, io.w_path, io.x_path);
  ProductElement zeta = make_functional_shock(
      static_cast<int>(d.W.cols()), parse_zeta_function(zeta_spec, d.basis));
  std::vector<int> hs(horizons);
  for (int h = 1; h <= horizons; ++h) hs[h - 1] = h;

  std::vector<IrfInference> prof =
      irf_profile(d.y, d.W, d.X, d.basis, hs, zeta, level, tf.make_rule(),
                  tf.make_mode(), hf.make());

  std::ostringstream out;
  out << "h,point,ci_low,ci_high,psi_hat,K,tau\n";
  for (const auto& r : prof)
    out << r.h << ',' << fmt12(r.point) << ',' << fmt12(r.lo) << ',' << fmt12(r.hi)
        << ',' << fmt12(r.psi) << ',' << r.K << ',' << fmt12(r.tau) << '\n';
  write_text(io.out, out.str());
}

void cmd_iv_estimate(const IoFlags& io, const std::string& zw_path,
                     const std::string& zx_path, const TauFlags& tf, int horizons) {
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  CommonData d = load_common(io.y_path, io.w_path, io.x_path);

  WideSeries zxs = read_wide_csv(zx_path);
  require_aligned(d.t, zxs.t, "zx vs x");
  require(zxs.G() == d.basis.dim(), Errc::dimension_mismatch,
          "--zx dimension does not match the functional series");
  MatrixXd ZW;
  if (zw_path.empty()) {
    ZW = d.W;
  } else {
    ScalarTable zws = read_scalar_csv(zw_path);
    require_aligned(d.t, zws.t, "zw vs x");
    ZW = zws.values;
  }
  require(ZW.cols() == d.W.cols(), Errc::dimension_mismatch,
          "--zw must have one instrument per scalar covariate");

  TauRule rule = tf.make_rule();
  std::ostringstream out;
  out << "h,T_eff,K,tau";
  for (int i = 0; i < d.W.cols(); ++i) out << ',' << col_name('a', i);
  for (int j = 0; j < d.basis.dim(); ++j) out << ',' << col_name('b', j);
  out << '\n';
  for (int h = 1; h <= horizons; ++h) {
    IvEstimate est = iv_estimate(d.y, d.W, d.X, ZW, zxs.values, d.basis, h, rule);
    out << h << ',' << est.T_eff << ',' << est.K << ',' << fmt12(est.tau);
    for (int i = 0; i < est.alpha.size(); ++i) out << ',' << fmt12(est.alpha(i));
    for (int j = 0; j < d.basis.dim(); ++j) out << ',' << fmt12(est.beta.coef(j));
    out << '\n';
  }
  write_text(io.out, out.str());
}

void cmd_svar_irf(const IoFlags& io, const TauFlags& tf, int horizons,
                  const std::string& scheme_name, double shock_y,
                  const std::string& zeta_spec, double tau_b21) {
  require(horizons >= 0, Errc::invalid_argument, "--horizons must be >= 0");
  CommonData d = load_common(io.y_path, "", io.x_path);
  IdScheme scheme;
  if (scheme_name == "beta12")
    scheme = IdScheme::Beta12Zero;
  else if (scheme_name == "beta21")
    scheme = IdScheme::Beta21Zero;
  else
    raise(Errc::invalid_argument,
          "--scheme must be beta12 or beta21, got '" + scheme_name + "'");

  ReducedModel r = estimate_rfvar(d.y, d.X, d.basis, tf.make_rule());
  Identified id = identify_structural(r, scheme, tau_b21);
  OperatorMatrix binv = invert_B(id.model.b12, id.model.b21, d.basis);
  SirfTable table = sirf(r, binv, horizons);
  if (table.stationary_warning) {
    json warn = {{"warning", "spectral-radius"},
                 {"message", "estimated transition is at or beyond the unit circle"},
                 {"spectral_radius", table.spectral_radius}};
    std::cerr << warn.dump() << '\n';
  }

  ProductElement shock;
  shock.w = VectorXd::Constant(1, shock_y);
  shock.x = parse_zeta_function(zeta_spec, d.basis);

  std::ostringstream out;
  out << "h,resp_w";
  for (int j = 0; j < d.basis.dim(); ++j) out << ',' << col_name('b', j);
  out << '\n';
  for (int h = 0; h <= horizons; ++h) {
    ProductElement resp = sirf_apply(table, h, shock);
    out << h << ',' << fmt12(resp.w(0));
    for (int j = 0; j < d.basis.dim(); ++j) out << ',' << fmt12(resp.x.coef(j));
    out << '\n';
  }
  write_text(io.out, out.str());
}

void cmd_fof_irf(const IoFlags& io, const TauFlags& tf, const HacFlags& hf,
                 int horizons, const std::string& theta_spec, double level) {
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  CommonData d = load_common(io.y_path, "", io.x_path);
  const int T = static_cast<int>(d.y.size());
  require(T >= horizons + 10, Errc::insufficient_data,
          "fof-irf: series too short for the horizon span");
  FunctionElement theta_dir = parse_zeta_function(theta_spec, d.basis);
  // Shock direction: the lead coordinate of w_t = (y_{t+1}, y_t).
  ProductElement zeta;
  zeta.w = VectorXd::Zero(2);
  zeta.w(0) = 1.0;
  zeta.x = make_const(d.basis, 0.0);

  std::ostringstream out;
  out << "h,point,ci_low,ci_high,psi_hat,K,tau";
  for (int j = 0; j < d.basis.dim(); ++j) out << ',' << col_name('b', j);
  out << '\n';
  for (int h = 1; h <= horizons; ++h) {
    const int n = T - h;  // t = 0..T-1-h; needs y_{t+1}, fine for h >= 1
    MatrixXd Y = d.X.bottomRows(n);
    MatrixXd W(n, 2);
    W.col(0) = d.y.segment(1, n);
    W.col(1) = d.y.head(n);
    FofEstimate est = fof_estimate_aligned(Y, W, d.X.topRows(n), d.basis, h,
                                           tf.make_rule(), tf.make_mode());
    IrfInference inf = fof_inference(est, zeta, theta_dir, level, hf.make());
    FunctionElement curve = est.scalar_response(0);
    out << h << ',' << fmt12(inf.point) << ',' << fmt12(inf.lo) << ','
        << fmt12(inf.hi) << ',' << fmt12(inf.psi) << ',' << est.K << ','
        << fmt12(est.tau);
    for (int j = 0; j < d.basis.dim(); ++j) out << ',' << fmt12(curve.coef(j));
    out << '\n';
  }
  write_text(io.out, out.str());
}

void cmd_simulate_a(int T, int H, double c_e1, double c_u, uint64_t seed,
                    uint64_t rep, const std::string& config,
                    const std::string& out_prefix) {
  ExpAConfig cfg = ExpAConfig::synthetic_default(T, H, c_e1);
  cfg.c_u = c_u;
  apply_config_a(cfg, config);
  DatasetA data = simulate_a(cfg, seed, rep);
  auto t = int_labels(cfg.T);
  write_scalar_csv(out_prefix + "_y.csv", t, {"y"}, data.y);
  write_scalar_csv(out_prefix + "_w.csv", t, {"w1"}, data.y);
  WideSeries xs;
  xs.t = t;
  xs.values = data.X;
  write_wide_csv(out_prefix + "_x.csv", xs);
}

void cmd_simulate_b(int T, double c1, uint64_t seed, uint64_t rep,
                    const std::string& config, const std::string& out_prefix) {
  ExpBConfig cfg = ExpBConfig::synthetic_default(T, c1);
  apply_config_b(cfg, config);
  DatasetB data = simulate_b(cfg, seed, rep);
  auto t = int_labels(cfg.T);
  write_scalar_csv(out_prefix + "_y.csv", t, {"y"}, data.y);
  WideSeries xs;
  xs.t = t;
  xs.values = data.X;
  write_wide_csv(out_prefix + "_x.csv", xs);
}

void cmd_coverage(int T, double c_e1, const std::string& config, int horizons,
                  const std::string& zeta_spec, double level, int reps,
                  uint64_t seed, int threads, const std::string& out_path) {
  ExpAConfig cfg = ExpAConfig::synthetic_default(T, std::max(horizons, 1), c_e1);
  apply_config_a(cfg, config);
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  require(reps >= 10, Errc::invalid_argument, "--reps must be >= 10");
  BasisSpec basis = BasisSpec::fourier(cfg.J);
  ProductElement zeta = make_functional_shock(1, parse_zeta_function(zeta_spec, basis));
  std::vector<int> hs(horizons);
  for (int h = 1; h <= horizons; ++h) hs[h - 1] = h;

  CoverageReport rep = run_coverage(cfg, hs, zeta, level, reps, seed, threads);
  std::ostringstream out;
  out << "T,h,coverage,mean_k,failures,reps\n";
  for (const auto& c : rep.cells)
    out << c.T << ',' << c.h << ',' << fmt12(c.coverage) << ',' << fmt12(c.mean_k)
        << ',' << c.failures << ',' << c.reps << '\n';
  write_text(out_path, out.str());
}

void cmd_mape(int T, const std::string& config, int horizons, double test_fraction,
              int fixed_k, uint64_t seed, const std::string& out_path) {
  require(horizons >= 1, Errc::invalid_argument, "--horizons must be >= 1");
  ExpAConfig cfg = ExpAConfig::synthetic_default(T, horizons);
  apply_config_a(cfg, config);
  std::vector<EstimatorSpec> estimators = {
      {EstimatorKind::ScInvAuto, fixed_k},
      {EstimatorKind::ScInvFixedK, fixed_k},
      {EstimatorKind::PcaFR, fixed_k},
      {EstimatorKind::PcaSVAR, fixed_k},
  };
  std::vector<int> hs(horizons);
  for (int h = 1; h <= horizons; ++h) hs[h - 1] = h;

  MapeReport rep = run_mape(cfg, estimators, hs, test_fraction, seed);
  std::ostringstream out;
  out << "estimator,h,mape\n";
  for (const auto& r : rep.rows)
    out << r.estimator << ',' << r.h << ',' << fmt12(r.mape) << '\n';
  write_text(out_path, out.str());
}

void cmd_ingest_quantiles(const std::string& input, const std::string& period,
                          int probs_n, int min_obs, bool strict, int smooth_j,
                          const std::string& out_path, const std::string& plot_path) {
  PeriodRule rule;
  if (period == "monthly")
    rule = PeriodRule::Monthly;
  else if (period == "custom")
    rule = PeriodRule::Custom;
  else
    raise(Errc::invalid_argument,
          "--period must be monthly or custom, got '" + period + "'");
  require(probs_n >= 2, Errc::invalid_argument, "--probs must be >= 2");

  LongPanel panel = read_long_csv(input);
  VectorXd probs(probs_n);
  for (int i = 0; i < probs_n; ++i)
    probs(i) = 0.005 + 0.99 * i / static_cast<double>(probs_n - 1);
  FunctionalSeries curves = build_quantile_curves(panel, rule, probs, min_obs, strict);
  if (!curves.skipped.empty()) {
    json warn = {{"warning", "sparse-period"},
                 {"message", "periods below the observation floor were skipped"},
                 {"skipped", curves.skipped}};
    std::cerr << warn.dump() << '\n';
  }
  FunctionalSeries result = curves;
  if (smooth_j > 0) result = smooth_to_basis(curves, BasisSpec::fourier(smooth_j));
  write_wide_csv(out_path, to_wide(result));

  if (!plot_path.empty()) {
    // Plot rows carry the raw quantile curves (x = probability level).
    std::vector<PlotRow> rows;
    for (int i = 0; i < curves.n(); ++i)
      for (int g = 0; g < probs.size(); ++g)
        rows.push_back(PlotRow{curves.labels[i], probs(g), curves.coef(i, g),
                               curves.coef(i, g), curves.coef(i, g)});
    emit_plot_data(plot_path, rows);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional linear projections toolkit"};
  app.require_subcommand(1);

  // estimate
  IoFlags est_io;
  TauFlags est_tau;
  int est_h = 1;
  auto* est = app.add_subcommand("estimate", "projection coefficients per horizon");
  est->add_option("--y", est_io.y_path, "response CSV (t,y)")->required();
  est->add_option("--x", est_io.x_path, "functional series CSV (t,g000,...)")->required();
  est->add_option("--w", est_io.w_path, "scalar covariates CSV (default: y itself)");
  est->add_option("--horizons", est_h, "fit h = 1..H");
  est->add_option("--out", est_io.out, "output CSV path ('-' = stdout)");
  est_tau.attach(est);
  est->callback([&] { cmd_estimate(est_io, est_tau, est_h); });

  // irf
  IoFlags irf_io;
  TauFlags irf_tau;
  HacFlags irf_hac;
  int irf_h = 12;
  std::string irf_zeta = "const:1";
  double irf_level = 0.95;
  auto* irf = app.add_subcommand("irf", "impulse-response profile with HAC bands");
  irf->add_option("--y", irf_io.y_path, "response CSV (t,y)")->required();
  irf->add_option("--x", irf_io.x_path, "functional series CSV")->required();
  irf->add_option("--w", irf_io.w_path, "scalar covariates CSV (default: y itself)");
  irf->add_option("--horizons", irf_h, "profile h = 1..H");
  irf->add_option("--zeta", irf_zeta, "shock: const:<c> | slope:<a,b> | file:<path>");
  irf->add_option("--level", irf_level, "confidence level in (0,1)");
  irf->add_option("--out", irf_io.out, "output CSV path ('-' = stdout)");
  irf_tau.attach(irf);
  irf_hac.attach(irf);
  irf->callback([&] {
    cmd_irf(irf_io, irf_tau, irf_hac, irf_h, irf_zeta, irf_level);
  });

  // iv-estimate
  IoFlags iv_io;
  TauFlags iv_tau;
  int iv_h = 1;
  std::string iv_zw, iv_zx;
  auto* ive = app.add_subcommand("iv-estimate", "instrumented projection coefficients");
  ive->add_option("--y", iv_io.y_path, "response CSV (t,y)")->required();
  ive->add_option("--x", iv_io.x_path, "functional series CSV")->required();
  ive->add_option("--w", iv_io.w_path, "scalar covariates CSV (default: y itself)");
  ive->add_option("--zx", iv_zx, "functional instrument CSV")->required();
  ive->add_option("--zw", iv_zw, "scalar instrument CSV (default: w)");
  ive->add_option("--horizons", iv_h, "fit h = 1..H");
  ive->add_option("--out", iv_io.out, "output CSV path ('-' = stdout)");
  iv_tau.attach(ive, /*with_mode=*/false);
  ive->callback([&] { cmd_iv_estimate(iv_io, iv_zw, iv_zx, iv_tau, iv_h); });

  // svar-irf
  IoFlags sv_io;
  TauFlags sv_tau;
  int sv_h = 12;
  std::string sv_scheme = "beta12";
  std::string sv_zeta = "const:0";
  double sv_shock_y = 1.0;
  double sv_tau_b21 = 0.0;
  auto* sv = app.add_subcommand("svar-irf", "structural IRFs from an operator VAR(1)");
  sv->add_option("--y", sv_io.y_path, "response CSV (t,y)")->required();
  sv->add_option("--x", sv_io.x_path, "functional series CSV")->required();
  sv->add_option("--horizons", sv_h, "responses at h = 0..H");
  sv->add_option("--scheme", sv_scheme, "identification: beta12 or beta21");
  sv->add_option("--shock-y", sv_shock_y, "scalar block of the structural shock");
  sv->add_option("--zeta", sv_zeta, "functional block of the shock");
  sv->add_option("--tau-b21", sv_tau_b21, "spectral cutoff for the beta21 scheme");
  sv->add_option("--out", sv_io.out, "output CSV path ('-' = stdout)");
  sv_tau.attach(sv, /*with_mode=*/false);
  sv->callback([&] {
    cmd_svar_irf(sv_io, sv_tau, sv_h, sv_scheme, sv_shock_y, sv_zeta, sv_tau_b21);
  });

  // fof-irf
  IoFlags fof_io;
  TauFlags fof_tau;
  HacFlags fof_hac;
  int fof_h = 12;
  std::string fof_theta = "const:1";
  double fof_level = 0.95;
  auto* fof = app.add_subcommand("fof-irf", "curve response to a lead-coordinate shock");
  fof->add_option("--y", fof_io.y_path, "response CSV (t,y)")->required();
  fof->add_option("--x", fof_io.x_path, "functional series CSV")->required();
  fof->add_option("--horizons", fof_h, "responses at h = 1..H");
  fof->add_option("--theta-dir", fof_theta, "projection direction for the CI");
  fof->add_option("--level", fof_level, "confidence level in (0,1)");
  fof->add_option("--out", fof_io.out, "output CSV path ('-' = stdout)");
  fof_tau.attach(fof);
  fof_hac.attach(fof);
  fof->callback([&] {
    cmd_fof_irf(fof_io, fof_tau, fof_hac, fof_h, fof_theta, fof_level);
  });

  // simulate-a
  int sa_T = 250, sa_H = 5;
  double sa_ce1 = 4.0, sa_cu = 0.5;
  uint64_t sa_seed = 1, sa_rep = 0;
  std::string sa_config, sa_out;
  auto* sa = app.add_subcommand("simulate-a", "draw one experiment-A dataset");
  sa->add_option("--T", sa_T, "sample length");
  sa->add_option("--H", sa_H, "number of horizons in the response law");
  sa->add_option("--c-e1", sa_ce1, "scale on coordinates j >= 2");
  sa->add_option("--c-u", sa_cu, "projection noise scale");
  sa->add_option("--seed", sa_seed, "master seed");
  sa->add_option("--rep", sa_rep, "replication index within the seed");
  sa->add_option("--config", sa_config, "JSON overrides for the DGP");
  sa->add_option("--out", sa_out, "output prefix (_y/_w/_x.csv)")->required();
  sa->callback([&] {
    cmd_simulate_a(sa_T, sa_H, sa_ce1, sa_cu, sa_seed, sa_rep, sa_config, sa_out);
  });

  // simulate-b
  int sb_T = 250;
  double sb_c1 = 1.0;
  uint64_t sb_seed = 1, sb_rep = 0;
  std::string sb_config, sb_out;
  auto* sb = app.add_subcommand("simulate-b", "draw one experiment-B dataset");
  sb->add_option("--T", sb_T, "sample length");
  sb->add_option("--c1", sb_c1, "scale on the structural y shock");
  sb->add_option("--seed", sb_seed, "master seed");
  sb->add_option("--rep", sb_rep, "replication index within the seed");
  sb->add_option("--config", sb_config, "JSON overrides for the DGP");
  sb->add_option("--out", sb_out, "output prefix (_y/_x.csv)")->required();
  sb->callback([&] {
    cmd_simulate_b(sb_T, sb_c1, sb_seed, sb_rep, sb_config, sb_out);
  });

  // coverage
  int cv_T = 250, cv_h = 5, cv_reps = 1000, cv_threads = 0;
  double cv_ce1 = 4.0, cv_level = 0.95;
  uint64_t cv_seed = 1;
  std::string cv_zeta = "const:1", cv_config, cv_out = "-";
  auto* cv = app.add_subcommand("coverage", "CI coverage study on experiment A");
  cv->add_option("--T", cv_T, "sample length");
  cv->add_option("--c-e1", cv_ce1, "scale on coordinates j >= 2");
  cv->add_option("--horizons", cv_h, "cells h = 1..H");
  cv->add_option("--zeta", cv_zeta, "shock direction");
  cv->add_option("--level", cv_level, "confidence level in (0,1)");
  cv->add_option("--reps", cv_reps, "replication count");
  cv->add_option("--seed", cv_seed, "master seed");
  cv->add_option("--threads", cv_threads, "1 = serial reference, 0 = all cores");
  cv->add_option("--config", cv_config, "JSON overrides for the DGP");
  cv->add_option("--out", cv_out, "output CSV path ('-' = stdout)");
  cv->callback([&] {
    cmd_coverage(cv_T, cv_ce1, cv_config, cv_h, cv_zeta, cv_level, cv_reps, cv_seed,
                 cv_threads, cv_out);
  });

  // mape
  int mp_T = 500, mp_h = 3, mp_k = 2;
  double mp_frac = 0.2;
  uint64_t mp_seed = 1;
  std::string mp_config, mp_out = "-";
  auto* mp = app.add_subcommand("mape", "held-out MAPE comparison of estimators");
  mp->add_option("--T", mp_T, "sample length");
  mp->add_option("--horizons", mp_h, "horizons h = 1..H");
  mp->add_option("--test-fraction", mp_frac, "held-out tail share in (0,0.5)");
  mp->add_option("--fixed-k", mp_k, "rank for the fixed-rank estimators");
  mp->add_option("--seed", mp_seed, "master seed");
  mp->add_option("--config", mp_config, "JSON overrides for the DGP");
  mp->add_option("--out", mp_out, "output CSV path ('-' = stdout)");
  mp->callback([&] {
    cmd_mape(mp_T, mp_config, mp_h, mp_frac, mp_k, mp_seed, mp_out);
  });

  // ingest-quantiles
  std::string iq_input, iq_period = "monthly", iq_out, iq_plot;
  int iq_probs = 101, iq_min_obs = 5, iq_smooth = 31;
  bool iq_strict = false;
  auto* iq = app.add_subcommand("ingest-quantiles",
                                "build per-period quantile curves from a panel");
  iq->add_option("--input", iq_input, "long CSV (t,value)")->required();
  iq->add_option("--period", iq_period, "grouping: monthly or custom");
  iq->add_option("--probs", iq_probs, "probability grid size");
  iq->add_option("--min-obs", iq_min_obs, "observation floor per period");
  iq->add_flag("--strict", iq_strict, "error out on sparse periods");
  iq->add_option("--smooth-j", iq_smooth, "Fourier dimension (0 = keep raw grid)");
  iq->add_option("--out", iq_out, "output wide CSV")->required();
  iq->add_option("--plot", iq_plot, "optional long-format plot CSV");
  iq->callback([&] {
    cmd_ingest_quantiles(iq_input, iq_period, iq_probs, iq_min_obs, iq_strict,
                         iq_smooth, iq_out, iq_plot);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err = {{"error", "invalid-argument"}, {"message", e.what()}, {"exit", 2}};
    std::cerr << err.dump() << '\n';
    return 2;
  } catch (const Error& e) {
    json err = {{"error", e.name()}, {"message", e.what()}, {"exit", e.exit_code()}};
    std::cerr << err.dump() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    json err = {{"error", "internal-error"}, {"message", e.what()}, {"exit", 4}};
    std::cerr << err.dump() << '\n';
    return 4;
  }
  return 0;
}
