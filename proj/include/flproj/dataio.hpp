#pragma once

#include <string>
#include <vector>

#include "flproj/space.hpp"

namespace flproj {

// Wide functional series: header `t,g000,...,gNNN`, one grid snapshot per row.
struct WideSeries {
  std::vector<std::string> t;
  MatrixXd values;  // n x G

  int n() const { return static_cast<int>(t.size()); }
  int G() const { return static_cast<int>(values.cols()); }
};

// Scalar covariate table: header `t,<name>,...`, numeric columns after `t`.
struct ScalarTable {
  std::vector<std::string> t;
  std::vector<std::string> names;
  MatrixXd values;  // n x m
};

// High-frequency panel: header `t,<name>`, one (timestamp, value) per row.
struct LongPanel {
  std::vector<std::string> t;
  std::vector<double> value;
};

// CSV layer: comma-separated, no quoting, numeric cells must be finite.
// Malformed content and unreadable paths raise io-error.
WideSeries read_wide_csv(const std::string& path);
ScalarTable read_scalar_csv(const std::string& path);
LongPanel read_long_csv(const std::string& path);
void write_wide_csv(const std::string& path, const WideSeries& s);
void write_scalar_csv(const std::string& path, const std::vector<std::string>& t,
                      const std::vector<std::string>& names, const MatrixXd& values);

// Equispaced inclusive grid 0, 1/(G-1), ..., 1 as a RawGrid basis.
BasisSpec grid_basis_for(int G);

// Functional time series over a shared basis, one coefficient row per period.
struct FunctionalSeries {
  std::vector<std::string> labels;
  BasisSpec basis;
  MatrixXd coef;  // n x basis.dim()
  std::string method;
  VectorXd residual_norm;            // smoothing residual per element
  std::vector<std::string> skipped;  // sparse periods left out of the series

  int n() const { return static_cast<int>(labels.size()); }
};

enum class PeriodRule { Monthly, Custom };

// 101 equispaced probabilities in [0.005, 0.995].
VectorXd default_prob_grid();

// Group the panel by period (Monthly: the leading YYYY-MM of the timestamp;
// Custom: the timestamp verbatim), then evaluate type-7 empirical quantiles
// on the probs grid. Periods with fewer than min_obs observations are skipped
// and listed (strict mode raises sparse-period instead). Curves are checked
// to be nondecreasing in r. Output periods are sorted by label.
FunctionalSeries build_quantile_curves(const LongPanel& panel, PeriodRule rule,
                                       const VectorXd& probs, int min_obs = 5,
                                       bool strict = false);

// Weighted least-squares projection of RawGrid elements onto a Fourier basis;
// requires grid size >= target dimension (underdetermined-grid otherwise).
FunctionalSeries smooth_to_basis(const FunctionalSeries& raw, const BasisSpec& basis);

WideSeries to_wide(const FunctionalSeries& s);

// Long-format plot rows (series, x, y, lo, hi); lo/hi mirror y when no band.
struct PlotRow {
  std::string series;
  double x = 0.0;
  double y = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

void emit_plot_data(const std::string& path, const std::vector<PlotRow>& rows);

}  // namespace flproj
