#include "flproj/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "flproj/covariance.hpp"
#include "flproj/mathutil.hpp"

namespace flproj {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    size_t i = 0;
    while (i < cell.size() && cell[i] == ' ') ++i;
    cells.push_back(cell.substr(i));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, int lineno) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    raise(Errc::io_error, path + ":" + std::to_string(lineno) +
                              ": not a finite number: '" + cell + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream ifs(path);
  if (!ifs) raise(Errc::io_error, "cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(ifs, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) raise(Errc::io_error, path + ": empty file");
  return rows;
}

void check_width(const std::vector<std::string>& row, size_t want,
                 const std::string& path, int lineno) {
  if (row.size() != want)
    raise(Errc::io_error, path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(want) + " cells, got " +
                              std::to_string(row.size()));
}

}  // namespace

WideSeries read_wide_csv(const std::string& path) {
  auto rows = read_rows(path);
  const auto& header = rows[0];
  if (header.size() < 2 || header[0] != "t")
    raise(Errc::io_error, path + ": wide header must be t,g000,...");
  const int G = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < G; ++j) {
    const std::string& cell = header[j + 1];
    bool ok = cell.size() >= 2 && cell[0] == 'g';
    long idx = -1;
    if (ok) {
      char* end = nullptr;
      idx = std::strtol(cell.c_str() + 1, &end, 10);
      ok = end && *end == '\0';
    }
    if (!ok || idx != j)
      raise(Errc::io_error,
            path + ": grid column " + std::to_string(j + 1) + " must be g" +
                std::to_string(j) + " (zero padding allowed), got '" + cell + "'");
  }
  WideSeries out;
  out.values = MatrixXd(static_cast<int>(rows.size()) - 1, G);
  for (size_t r = 1; r < rows.size(); ++r) {
    check_width(rows[r], header.size(), path, static_cast<int>(r) + 1);
    out.t.push_back(rows[r][0]);
    for (int j = 0; j < G; ++j)
      out.values(static_cast<int>(r) - 1, j) =
          parse_cell(rows[r][j + 1], path, static_cast<int>(r) + 1);
  }
  return out;
}

ScalarTable read_scalar_csv(const std::string& path) {
  auto rows = read_rows(path);
  const auto& header = rows[0];
  if (header.empty() || header[0] != "t")
    raise(Errc::io_error, path + ": scalar header must start with t");
  const int m = static_cast<int>(header.size()) - 1;
  ScalarTable out;
  out.names.assign(header.begin() + 1, header.end());
  out.values = MatrixXd(static_cast<int>(rows.size()) - 1, m);
  for (size_t r = 1; r < rows.size(); ++r) {
    check_width(rows[r], header.size(), path, static_cast<int>(r) + 1);
    out.t.push_back(rows[r][0]);
    for (int j = 0; j < m; ++j)
      out.values(static_cast<int>(r) - 1, j) =
          parse_cell(rows[r][j + 1], path, static_cast<int>(r) + 1);
  }
  return out;
}

LongPanel read_long_csv(const std::string& path) {
  auto rows = read_rows(path);
  const auto& header = rows[0];
  if (header.size() != 2 || header[0] != "t")
    raise(Errc::io_error, path + ": long header must be t,<name>");
  LongPanel out;
  for (size_t r = 1; r < rows.size(); ++r) {
    check_width(rows[r], 2, path, static_cast<int>(r) + 1);
    out.t.push_back(rows[r][0]);
    out.value.push_back(parse_cell(rows[r][1], path, static_cast<int>(r) + 1));
  }
  return out;
}

void write_wide_csv(const std::string& path, const WideSeries& s) {
  require(static_cast<int>(s.t.size()) == s.values.rows(), Errc::dimension_mismatch,
          "write_wide_csv: label count must match row count");
  std::ofstream ofs(path);
  if (!ofs) raise(Errc::io_error, "cannot write " + path);
  ofs << "t";
  for (int j = 0; j < s.values.cols(); ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "g%03d", j);
    ofs << ',' << buf;
  }
  ofs << '\n';
  for (int i = 0; i < s.values.rows(); ++i) {
    ofs << s.t[i];
    for (int j = 0; j < s.values.cols(); ++j) ofs << ',' << fmt12(s.values(i, j));
    ofs << '\n';
  }
  if (!ofs) raise(Errc::io_error, "write failed: " + path);
}

void write_scalar_csv(const std::string& path, const std::vector<std::string>& t,
                      const std::vector<std::string>& names, const MatrixXd& values) {
  require(static_cast<int>(t.size()) == values.rows() &&
              static_cast<int>(names.size()) == values.cols(),
          Errc::dimension_mismatch, "write_scalar_csv: shape mismatch");
  std::ofstream ofs(path);
  if (!ofs) raise(Errc::io_error, "cannot write " + path);
  ofs << "t";
  for (const auto& n : names) ofs << ',' << n;
  ofs << '\n';
  for (int i = 0; i < values.rows(); ++i) {
    ofs << t[i];
    for (int j = 0; j < values.cols(); ++j) ofs << ',' << fmt12(values(i, j));
    ofs << '\n';
  }
  if (!ofs) raise(Errc::io_error, "write failed: " + path);
}

BasisSpec grid_basis_for(int G) {
  require(G >= 2, Errc::invalid_argument, "grid_basis_for: need at least 2 points");
  VectorXd grid(G);
  for (int i = 0; i < G; ++i) grid(i) = static_cast<double>(i) / (G - 1);
  return BasisSpec::raw_grid(grid);
}

VectorXd default_prob_grid() {
  VectorXd probs(101);
  for (int i = 0; i <= 100; ++i) probs(i) = 0.005 + 0.99 * i / 100.0;
  return probs;
}

FunctionalSeries build_quantile_curves(const LongPanel& panel, PeriodRule rule,
                                       const VectorXd& probs, int min_obs,
                                       bool strict) {
  require(!panel.t.empty(), Errc::insufficient_data, "quantile build: empty panel");
  require(panel.t.size() == panel.value.size(), Errc::dimension_mismatch,
          "quantile build: timestamp and value counts differ");
  require(probs.size() >= 2, Errc::invalid_argument,
          "quantile build: need at least 2 probabilities");
  for (int i = 0; i < probs.size(); ++i) {
    require(probs(i) > 0.0 && probs(i) < 1.0, Errc::invalid_argument,
            "quantile build: probabilities must lie inside (0,1)");
    require(i == 0 || probs(i) > probs(i - 1), Errc::invalid_argument,
            "quantile build: probabilities must be strictly increasing");
  }
  require(min_obs >= 5, Errc::invalid_argument,
          "quantile build: need at least 5 observations per period");

  std::map<std::string, std::vector<double>> groups;
  for (size_t i = 0; i < panel.t.size(); ++i) {
    std::string label = panel.t[i];
    if (rule == PeriodRule::Monthly) {
      if (label.size() < 7 || label[4] != '-')
        raise(Errc::io_error,
              "quantile build: monthly grouping needs YYYY-MM... timestamps, got '" +
                  label + "'");
      label = label.substr(0, 7);
    }
    groups[label].push_back(panel.value[i]);
  }

  FunctionalSeries out;
  out.basis = BasisSpec::raw_grid(probs);
  out.method = "quantile-type7";
  std::vector<VectorXd> curves;
  for (auto& [label, values] : groups) {
    if (static_cast<int>(values.size()) < min_obs) {
      if (strict)
        raise(Errc::sparse_period, "period " + label + " has " +
                                       std::to_string(values.size()) +
                                       " observations, need " +
                                       std::to_string(min_obs));
      out.skipped.push_back(label);
      continue;
    }
    std::sort(values.begin(), values.end());
    VectorXd curve(probs.size());
    for (int i = 0; i < probs.size(); ++i)
      curve(i) = quantile_type7_sorted(values, probs(i));
    for (int i = 1; i < probs.size(); ++i)
      require(curve(i) >= curve(i - 1), Errc::internal_error,
              "quantile build: non-monotone curve for period " + label);
    out.labels.push_back(label);
    curves.push_back(std::move(curve));
  }
  require(!out.labels.empty(), Errc::sparse_period,
          "quantile build: every period was below the observation floor");
  out.coef = MatrixXd(static_cast<int>(curves.size()), probs.size());
  for (size_t i = 0; i < curves.size(); ++i)
    out.coef.row(static_cast<int>(i)) = curves[i].transpose();
  out.residual_norm = VectorXd::Zero(out.n());
  return out;
}

FunctionalSeries smooth_to_basis(const FunctionalSeries& raw, const BasisSpec& basis) {
  require(raw.basis.kind() == BasisKind::RawGrid, Errc::invalid_argument,
          "smooth_to_basis: input must live on a raw grid");
  require(basis.kind() == BasisKind::Fourier, Errc::invalid_argument,
          "smooth_to_basis: target must be a Fourier basis");
  const int G = raw.basis.dim();
  const int J = basis.dim();
  require(G >= J, Errc::underdetermined_grid,
          "smooth_to_basis: grid size " + std::to_string(G) +
              " is below the target dimension " + std::to_string(J));

  const MatrixXd design = basis.evaluate(raw.basis.grid());  // G x J
  const VectorXd& w = raw.basis.weights();
  MatrixXd dw = design.transpose() * w.asDiagonal();  // J x G
  MatrixXd normal = dw * design;
  require(rcond(normal) >= 1e-12, Errc::underdetermined_grid,
          "smooth_to_basis: weighted design is numerically singular");
  Eigen::LDLT<MatrixXd> solver(normal);

  FunctionalSeries out;
  out.labels = raw.labels;
  out.basis = basis;
  out.method = "wls-fourier";
  out.skipped = raw.skipped;
  out.coef = MatrixXd(raw.coef.rows(), J);
  out.residual_norm = VectorXd(raw.coef.rows());
  for (int i = 0; i < raw.coef.rows(); ++i) {
    VectorXd y = raw.coef.row(i).transpose();
    VectorXd c = solver.solve(dw * y);
    out.coef.row(i) = c.transpose();
    VectorXd r = y - design * c;
    out.residual_norm(i) = std::sqrt(r.cwiseAbs2().dot(w));
  }
  return out;
}

WideSeries to_wide(const FunctionalSeries& s) {
  WideSeries out;
  out.t = s.labels;
  out.values = s.coef;
  return out;
}

void emit_plot_data(const std::string& path, const std::vector<PlotRow>& rows) {
  std::ofstream ofs(path);
  if (!ofs) raise(Errc::io_error, "cannot write " + path);
  ofs << "series,x,y,lo,hi\n";
  for (const auto& r : rows)
    ofs << r.series << ',' << fmt12(r.x) << ',' << fmt12(r.y) << ','
        << fmt12(r.lo) << ',' << fmt12(r.hi) << '\n';
  if (!ofs) raise(Errc::io_error, "write failed: " + path);
}

}  // namespace flproj
