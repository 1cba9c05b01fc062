#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string bin_path() {
  const char* p = std::getenv("FLPROJ_BIN");
  REQUIRE_MESSAGE(p != nullptr, "FLPROJ_BIN must point at the executable");
  return p;
}

struct RunResult {
  int exit = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream ifs(path);
  std::ostringstream ss;
  ss << ifs.rdbuf();
  return ss.str();
}

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/flproj_cli_XXXXXX";
    path = mkdtemp(tmpl);
  }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

RunResult run(const TempDir& dir, const std::string& args) {
  std::string out_f = dir.file("_stdout"), err_f = dir.file("_stderr");
  std::string cmd = bin_path() + " " + args + " >" + out_f + " 2>" + err_f;
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_f);
  r.err = slurp(err_f);
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

int commas(const std::string& s) {
  int n = 0;
  for (char c : s) n += (c == ',');
  return n;
}

void put(const std::string& path, const std::string& content) {
  std::ofstream ofs(path);
  ofs << content;
}

// one shared simulated dataset for the estimation commands
struct Fixture {
  TempDir dir;
  std::string y, w, x;
  Fixture() {
    RunResult r = run(dir, "simulate-a --T 220 --H 4 --seed 9 --out " +
                               dir.file("sim"));
    REQUIRE(r.exit == 0);
    y = dir.file("sim_y.csv");
    w = dir.file("sim_w.csv");
    x = dir.file("sim_x.csv");
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("no subcommand is a usage error with a json diagnostic") {
  TempDir dir;
  RunResult r = run(dir, "");
  CHECK(r.exit == 2);
  CHECK(r.err.find("\"error\"") != std::string::npos);
  CHECK(r.err.find("invalid-argument") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("help exits cleanly") {
  TempDir dir;
  RunResult r = run(dir, "--help");
  CHECK(r.exit == 0);
  CHECK(r.out.find("estimate") != std::string::npos);
  CHECK(r.out.find("ingest-quantiles") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
  TempDir dir;
  RunResult r = run(dir, "estimate --nope 3");
  CHECK(r.exit == 2);
  CHECK(r.err.find("invalid-argument") != std::string::npos);
}

TEST_CASE("simulate-a writes a readable dataset triple") {
  Fixture& f = fixture();
  std::string y = slurp(f.y);
  CHECK(y.substr(0, 4) == "t,y\n");
  CHECK(lines_of(y).size() == 221);  // header + T rows
  std::string w = slurp(f.w);
  CHECK(w.substr(0, 5) == "t,w1\n");
  std::string x = slurp(f.x);
  CHECK(x.substr(0, 7) == "t,g000,");
  auto xl = lines_of(x);
  CHECK(xl.size() == 221);
  CHECK(commas(xl[0]) == 31);  // t plus J = 31 grid columns

  // same seed and rep reproduce byte-identical files
  TempDir dir2;
  RunResult r2 = run(dir2, "simulate-a --T 220 --H 4 --seed 9 --out " +
                               dir2.file("sim"));
  REQUIRE(r2.exit == 0);
  CHECK(slurp(dir2.file("sim_x.csv")) == x);
  // a different rep index diverges
  RunResult r3 = run(dir2, "simulate-a --T 220 --H 4 --seed 9 --rep 1 --out " +
                               dir2.file("rep1"));
  REQUIRE(r3.exit == 0);
  CHECK(slurp(dir2.file("rep1_x.csv")) != x);
}

TEST_CASE("estimate emits one row per horizon") {
  Fixture& f = fixture();
  RunResult r = run(f.dir, "estimate --y " + f.y + " --x " + f.x +
                               " --horizons 3 --out -");
  REQUIRE(r.exit == 0);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].substr(0, 14) == "h,T_eff,K,tau,");
  CHECK(ls[0].find(",a000,") != std::string::npos);
  CHECK(ls[0].find(",b000,") != std::string::npos);
  CHECK(ls[1].substr(0, 2) == "1,");
  CHECK(ls[3].substr(0, 2) == "3,");
  // every data row has the full column count
  for (size_t i = 1; i < ls.size(); ++i) CHECK(commas(ls[i]) == commas(ls[0]));
}

TEST_CASE("irf profile has exactly the documented columns") {
  Fixture& f = fixture();
  RunResult r = run(f.dir, "irf --y " + f.y + " --x " + f.x +
                               " --horizons 12 --zeta const:1 --level 0.90 --out -");
  REQUIRE(r.exit == 0);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 13);
  CHECK(ls[0] == "h,point,ci_low,ci_high,psi_hat,K,tau");
  for (size_t i = 1; i < ls.size(); ++i) CHECK(commas(ls[i]) == 6);

  // a slope shock parses too
  RunResult r2 = run(f.dir, "irf --y " + f.y + " --x " + f.x +
                                " --horizons 2 --zeta slope:-2,2 --out -");
  CHECK(r2.exit == 0);
  // and an unknown shock spec is a usage error
  RunResult r3 = run(f.dir, "irf --y " + f.y + " --x " + f.x +
                                " --zeta wavelet:3 --out -");
  CHECK(r3.exit == 2);
}

TEST_CASE("missing input files are data errors") {
  TempDir dir;
  RunResult r = run(dir, "estimate --y " + dir.file("absent.csv") + " --x " +
                             dir.file("absent2.csv") + " --out -");
  CHECK(r.exit == 3);
  CHECK(r.err.find("io-error") != std::string::npos);
  CHECK(r.err.find("\"exit\":3") != std::string::npos);
}

TEST_CASE("conflicting cutoff flags are rejected") {
  Fixture& f = fixture();
  RunResult r = run(f.dir, "estimate --y " + f.y + " --x " + f.x +
                               " --tau 0.5 --fixed-k 2 --out -");
  CHECK(r.exit == 2);
  CHECK(r.err.find("invalid-argument") != std::string::npos);
}

TEST_CASE("negative bandwidth is rejected") {
  Fixture& f = fixture();
  RunResult r = run(f.dir, "irf --y " + f.y + " --x " + f.x +
                               " --bandwidth=-3 --out -");
  CHECK(r.exit == 2);
}

TEST_CASE("misaligned series are data errors") {
  Fixture& f = fixture();
  TempDir dir;
  std::string y2 = dir.file("short_y.csv");
  put(y2, "t,y\n0,0.5\n1,0.25\n");
  RunResult r = run(dir, "estimate --y " + y2 + " --x " + f.x + " --out -");
  CHECK(r.exit == 3);
}

TEST_CASE("svar-irf emits horizons 0..H and validates its scheme") {
  TempDir dir;
  RunResult sim = run(dir, "simulate-b --T 260 --seed 3 --out " + dir.file("b"));
  REQUIRE(sim.exit == 0);
  std::string y = dir.file("b_y.csv"), x = dir.file("b_x.csv");

  RunResult r = run(dir, "svar-irf --y " + y + " --x " + x +
                             " --horizons 6 --scheme beta12 --fixed-k 3 --out -");
  REQUIRE(r.exit == 0);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 8);
  CHECK(ls[0].substr(0, 11) == "h,resp_w,b0");
  CHECK(ls[1].substr(0, 2) == "0,");
  CHECK(ls[7].substr(0, 2) == "6,");

  RunResult r2 = run(dir, "svar-irf --y " + y + " --x " + x +
                              " --scheme beta21 --fixed-k 3 --out -");
  CHECK(r2.exit == 2);  // beta21 needs --tau-b21
  RunResult r3 = run(dir, "svar-irf --y " + y + " --x " + x +
                              " --scheme beta21 --tau-b21 0.001 --fixed-k 3 --out -");
  CHECK(r3.exit == 0);
  RunResult r4 = run(dir, "svar-irf --y " + y + " --x " + x +
                              " --scheme sideways --fixed-k 3 --out -");
  CHECK(r4.exit == 2);
}

TEST_CASE("fof-irf reports the scalar projection and the response curve") {
  Fixture& f = fixture();
  RunResult r = run(f.dir, "fof-irf --y " + f.y + " --x " + f.x +
                               " --horizons 3 --fixed-k 4 --out -");
  REQUIRE(r.exit == 0);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].substr(0, 38) == "h,point,ci_low,ci_high,psi_hat,K,tau,b");
  CHECK(commas(ls[1]) == 7 + 31 - 1);  // 7 scalars + 31 curve coefficients
}

TEST_CASE("iv-estimate accepts instrument files") {
  Fixture& f = fixture();
  // self-instrumenting reproduces the plain projection
  RunResult r = run(f.dir, "iv-estimate --y " + f.y + " --x " + f.x + " --zx " +
                               f.x + " --horizons 2 --fixed-k 4 --out -");
  REQUIRE(r.exit == 0);
  RunResult plain = run(f.dir, "estimate --y " + f.y + " --x " + f.x +
                                   " --horizons 2 --fixed-k 4 --out -");
  REQUIRE(plain.exit == 0);
  CHECK(lines_of(r.out)[1] == lines_of(plain.out)[1]);

  // instrument width must match the covariate block
  TempDir dir;
  std::string zw = dir.file("zw.csv");
  put(zw, "t,z1,z2\n0,1,2\n");
  RunResult bad = run(dir, "iv-estimate --y " + f.y + " --x " + f.x + " --zx " +
                               f.x + " --zw " + zw + " --out -");
  CHECK(bad.exit == 3);
}

TEST_CASE("coverage runs a small study end to end") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json");
  put(cfg, "{\"J\": 9}\n");
  RunResult r = run(dir, "coverage --T 100 --horizons 1 --reps 10 --seed 4 "
                         "--threads 1 --config " + cfg + " --out -");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "T,h,coverage,mean_k,failures,reps");
  CHECK(ls[1].substr(0, 6) == "100,1,");
}

TEST_CASE("mape compares all four estimators per horizon") {
  TempDir dir;
  std::string cfg = dir.file("cfg.json");
  put(cfg, "{\"J\": 9}\n");
  RunResult r = run(dir, "mape --T 160 --horizons 2 --fixed-k 2 --seed 5 "
                         "--config " + cfg + " --out -");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 9);  // header + 4 estimators x 2 horizons
  CHECK(ls[0] == "estimator,h,mape");
  CHECK(ls[1].substr(0, 11) == "scinv-auto,");
  CHECK(ls[5].substr(0, 9) == "pca-fr-k2");
}

TEST_CASE("degenerate regressors surface as numerical errors") {
  TempDir dir;
  std::string y = dir.file("y.csv"), x = dir.file("x.csv");
  std::ostringstream ys, xs;
  ys << "t,y\n";
  xs << "t,g000,g001,g002\n";
  for (int t = 0; t < 60; ++t) {
    ys << t << ',' << (t % 7) * 0.25 << '\n';
    xs << t << ",1.0,2.0,3.0\n";  // constant functional regressor
  }
  put(y, ys.str());
  put(x, xs.str());
  RunResult r = run(dir, "estimate --y " + y + " --x " + x + " --out -");
  CHECK(r.exit == 4);
  CHECK(r.err.find("\"exit\":4") != std::string::npos);
}

TEST_CASE("ingest-quantiles groups, smooths, skips, and plots") {
  TempDir dir;
  std::ostringstream panel;
  panel << "t,ret\n";
  for (int d = 1; d <= 20; ++d) {
    panel << "2003-01-" << (d < 10 ? "0" : "") << d << ',' << 0.01 * d << '\n';
    panel << "2003-02-" << (d < 10 ? "0" : "") << d << ',' << -0.01 * d << '\n';
  }
  panel << "2003-03-01,0.5\n";  // sparse month
  std::string in = dir.file("panel.csv");
  put(in, panel.str());

  std::string out = dir.file("curves.csv"), plot = dir.file("plot.csv");
  RunResult r = run(dir, "ingest-quantiles --input " + in +
                             " --probs 51 --smooth-j 7 --out " + out +
                             " --plot " + plot);
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  CHECK(r.err.find("sparse-period") != std::string::npos);
  auto curves = lines_of(slurp(out));
  REQUIRE(curves.size() == 3);  // header + two retained months
  CHECK(curves[0].substr(0, 7) == "t,g000,");
  CHECK(commas(curves[0]) == 7);  // smoothed to 7 Fourier coordinates
  CHECK(curves[1].substr(0, 8) == "2003-01,");
  auto plot_ls = lines_of(slurp(plot));
  CHECK(plot_ls[0] == "series,x,y,lo,hi");
  CHECK(plot_ls.size() == 1 + 2 * 51);

  // raw grid output when smoothing is disabled
  RunResult raw = run(dir, "ingest-quantiles --input " + in +
                               " --probs 51 --smooth-j 0 --out " + out);
  REQUIRE(raw.exit == 0);
  CHECK(commas(lines_of(slurp(out))[0]) == 51);

  // strict mode turns the sparse month into a data error
  RunResult strict = run(dir, "ingest-quantiles --input " + in +
                                  " --probs 51 --strict --out " + out);
  CHECK(strict.exit == 3);
  CHECK(strict.err.find("sparse-period") != std::string::npos);
}
