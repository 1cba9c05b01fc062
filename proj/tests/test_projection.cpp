#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flproj/mathutil.hpp"
#include "flproj/projection.hpp"

using namespace flproj;

namespace {

struct Sample {
  VectorXd y;
  MatrixXd W, X;
};

// y_t = w_t'a + x_t'b + sd * e_t with well-conditioned regressors.
Sample draw(int T, int m, int J, const VectorXd& a, const VectorXd& b, double sd,
            uint64_t seed) {
  std::mt19937_64 gen = make_stream(seed, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  Sample s;
  s.y = VectorXd(T);
  s.W = MatrixXd(T, m);
  s.X = MatrixXd(T, J);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < m; ++i) s.W(t, i) = n(gen) + 0.5;
    for (int j = 0; j < J; ++j) s.X(t, j) = (1.0 + 0.5 * j) * n(gen) - 0.2;
    s.y(t) = s.W.row(t).dot(a) + s.X.row(t).dot(b) + sd * n(gen);
  }
  return s;
}

VectorXd dense_ls(const Sample& s) {
  MatrixXd Z(s.y.size(), s.W.cols() + s.X.cols());
  Z << s.W, s.X;
  MatrixXd Zc = Z.rowwise() - Z.colwise().mean();
  VectorXd yc = s.y.array() - s.y.mean();
  return (Zc.transpose() * Zc).ldlt().solve(Zc.transpose() * yc);
}

}  // namespace

TEST_CASE("automatic HAC bandwidth: floor of 1.2 T^{1/3}") {
  CHECK(hac_auto_bandwidth(250) == 7);
  CHECK(hac_auto_bandwidth(500) == 9);
  CHECK(hac_auto_bandwidth(1000) == 12);  // 1.2 * cbrt(1000) = 12 exactly
  CHECK(hac_auto_bandwidth(8) == 2);
}

TEST_CASE("kernel weights: bartlett, parzen, truncated uniform") {
  CHECK(kernel_weight(HacSpec::Kernel::Bartlett, 0.0) == 1.0);
  CHECK(kernel_weight(HacSpec::Kernel::Bartlett, 0.25) == doctest::Approx(0.75));
  CHECK(kernel_weight(HacSpec::Kernel::Bartlett, 1.5) == 0.0);
  CHECK(kernel_weight(HacSpec::Kernel::Parzen, 0.25) ==
        doctest::Approx(1.0 - 6 * 0.0625 + 6 * 0.015625));
  CHECK(kernel_weight(HacSpec::Kernel::Parzen, 0.75) ==
        doctest::Approx(2.0 * std::pow(0.25, 3)));
  CHECK(kernel_weight(HacSpec::Kernel::Parzen, 2.0) == 0.0);
  CHECK(kernel_weight(HacSpec::Kernel::TruncatedUniform, 0.99) == 1.0);
  CHECK(kernel_weight(HacSpec::Kernel::TruncatedUniform, 1.01) == 0.0);
}

TEST_CASE("hac long-run variance: b = 0 term, symmetry, psd") {
  std::mt19937_64 gen = make_stream(3, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd U(150, 4);
  for (int t = 0; t < 150; ++t)
    for (int j = 0; j < 4; ++j) U(t, j) = n(gen);

  MatrixXd lam0 = hac_longrun(U, HacSpec{HacSpec::Kernel::Bartlett, 0});
  CHECK((lam0 - U.transpose() * U / 150.0).cwiseAbs().maxCoeff() < 1e-12);

  for (auto k : {HacSpec::Kernel::Bartlett, HacSpec::Kernel::Parzen,
                 HacSpec::Kernel::TruncatedUniform}) {
    MatrixXd lam = hac_longrun(U, HacSpec{k, 8});
    CHECK((lam - lam.transpose()).cwiseAbs().maxCoeff() == 0.0);
    if (k != HacSpec::Kernel::TruncatedUniform) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(lam);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }

  CHECK_THROWS_AS(hac_longrun(U, HacSpec{HacSpec::Kernel::Bartlett, 150}), Error);
  MatrixXd lam_auto = hac_longrun(U, HacSpec{});  // bandwidth -1 = auto
  MatrixXd lam_b6 = hac_longrun(U, HacSpec{HacSpec::Kernel::Bartlett,
                                           hac_auto_bandwidth(150)});
  CHECK((lam_auto - lam_b6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("full-rank estimate equals dense least squares (both modes)") {
  VectorXd a(2), b(5);
  a << 0.7, -0.3;
  b << 1.0, -0.5, 0.25, 0.1, -0.05;
  Sample s = draw(300, 2, 5, a, b, 0.4, 11);
  BasisSpec basis = BasisSpec::fourier(5);
  VectorXd ls = dense_ls(s);

  Estimate schur = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(5));
  CHECK((schur.theta() - ls).cwiseAbs().maxCoeff() < 1e-8);

  Estimate pca = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(5),
                                  InverseMode::Pca);
  CHECK((pca.theta() - ls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("noiseless data recovers the coefficients exactly") {
  VectorXd a(1), b(7);
  a << -0.4;
  b << 0.8, 0.4, -0.2, 0.1, 0.05, -0.3, 0.15;
  Sample s = draw(200, 1, 7, a, b, 0.0, 13);
  BasisSpec basis = BasisSpec::fourier(7);
  Estimate est = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(7));
  CHECK(std::abs(est.alpha(0) - a(0)) < 1e-8);
  CHECK((est.beta.coef - b).cwiseAbs().maxCoeff() < 1e-8);
  // residuals vanish
  CHECK(est.residuals.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("estimate() pairs y_{t+h} with regressors at t") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, -0.25, 0.1;
  Sample s = draw(120, 1, 3, a, b, 0.3, 17);
  BasisSpec basis = BasisSpec::fourier(3);
  const int h = 4;
  Estimate shifted = estimate(s.y, s.W, s.X, basis, h, TauRule::fixed_k(3));
  Estimate manual = estimate_aligned(s.y.tail(120 - h), s.W.topRows(120 - h),
                                     s.X.topRows(120 - h), basis, h,
                                     TauRule::fixed_k(3));
  CHECK((shifted.theta() - manual.theta()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(shifted.T_eff == 116);
  CHECK(shifted.h == 4);
  CHECK_THROWS_AS(estimate(s.y, s.W, s.X, basis, 119, TauRule::fixed_k(3)), Error);
}

TEST_CASE("automatic cutoff populates the selection record") {
  // decaying coordinate scales keep the squared-eigenvalue gaps inside the
  // healthy range of the data-driven cutoff rule
  std::mt19937_64 gen = make_stream(19, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  const int T = 400, J = 9;
  Sample s;
  s.y = VectorXd(T);
  s.W = MatrixXd(T, 1);
  s.X = MatrixXd(T, J);
  VectorXd a(1), b(J);
  a << 0.2;
  b.setZero();
  b(0) = 1.0;
  b(1) = 0.5;
  for (int t = 0; t < T; ++t) {
    s.W(t, 0) = n(gen);
    for (int j = 0; j < J; ++j) s.X(t, j) = 0.9 * std::pow(0.8, j) * n(gen);
    s.y(t) = s.W.row(t).dot(a) + s.X.row(t).dot(b) + 0.5 * n(gen);
  }
  BasisSpec basis = BasisSpec::fourier(9);
  Estimate est = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::automatic());
  CHECK(est.tau_auto);
  CHECK(est.tau > 0.0);
  CHECK(est.K >= 1);
  CHECK(est.K <= 9);
  CHECK(est.tau_sel.tau == est.tau);
  CHECK(est.tau_sel.j_star >= 2);
  // explicit fixed tau reproduces the same estimate
  Estimate fixed = estimate_aligned(s.y, s.W, s.X, basis, 0,
                                    TauRule::fixed_tau(est.tau));
  CHECK((fixed.theta() - est.theta()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(fixed.tau_auto);
}

TEST_CASE("pca mode requires a fixed rank") {
  VectorXd a(1), b(3);
  a << 0.1;
  b << 1, 0, 0;
  Sample s = draw(60, 1, 3, a, b, 0.2, 23);
  BasisSpec basis = BasisSpec::fourier(3);
  CHECK_THROWS_AS(estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::automatic(),
                                   InverseMode::Pca),
                  Error);
}

TEST_CASE("theta_dot and predict are consistent with the coefficients") {
  VectorXd a(2), b(3);
  a << 0.3, -0.6;
  b << 0.9, 0.2, -0.4;
  Sample s = draw(150, 2, 3, a, b, 0.1, 29);
  BasisSpec basis = BasisSpec::fourier(3);
  Estimate est = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(3));

  ProductElement zeta{(VectorXd(2) << 1.0, 0.5).finished(),
                      FunctionElement(basis, (VectorXd(3) << 0.2, 0, -1).finished())};
  double want = est.alpha.dot(zeta.w) + est.beta.coef.dot(zeta.x.coef);
  CHECK(est.theta_dot(zeta) == doctest::Approx(want).epsilon(1e-14));

  // predict on a training row stays close to the observed response
  double pred = est.predict(s.W.row(5), s.X.row(5));
  CHECK(pred == doctest::Approx(s.y(5)).epsilon(0.2));
}

TEST_CASE("irf inference: interval geometry and level monotonicity") {
  VectorXd a(1), b(5);
  a << 0.4;
  b << 1.0, -0.3, 0.2, 0.0, 0.1;
  Sample s = draw(300, 1, 5, a, b, 0.8, 31);
  BasisSpec basis = BasisSpec::fourier(5);
  Estimate est = estimate_aligned(s.y, s.W, s.X, basis, 2, TauRule::fixed_k(5));
  ProductElement zeta = make_functional_shock(1, make_const(basis, 1.0));

  IrfInference i90 = irf_inference(est, zeta, 0.90, HacSpec{});
  IrfInference i99 = irf_inference(est, zeta, 0.99, HacSpec{});
  CHECK(i90.point == doctest::Approx(est.theta_dot(zeta)).epsilon(1e-14));
  CHECK(i90.lo < i90.point);
  CHECK(i90.point < i90.hi);
  CHECK(i99.hi - i99.lo > i90.hi - i90.lo);
  CHECK(i90.point == i99.point);
  CHECK(i90.psi == i99.psi);
  CHECK(i90.se == doctest::Approx(std::sqrt(i90.psi / est.T_eff)).epsilon(1e-14));
  // CI symmetric around the point at the normal quantile
  double z = normal_quantile(0.95);
  CHECK(i90.hi - i90.point == doctest::Approx(z * i90.se).epsilon(1e-12));
  CHECK(i90.bandwidth == hac_auto_bandwidth(est.T_eff));

  CHECK_THROWS_AS(irf_inference(est, zeta, 0.0, HacSpec{}), Error);
  CHECK_THROWS_AS(irf_inference(est, zeta, 1.0, HacSpec{}), Error);
}

TEST_CASE("degenerate variance is flagged on an exact-fit model") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, 0.5, -0.2;
  Sample s = draw(100, 1, 3, a, b, 0.0, 37);  // zero noise
  BasisSpec basis = BasisSpec::fourier(3);
  Estimate est = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(3));
  ProductElement zeta = make_functional_shock(1, make_const(basis, 1.0));
  CHECK_THROWS_AS(irf_inference(est, zeta, 0.95, HacSpec{}), Error);
}

TEST_CASE("irf profile equals per-horizon inference and is deterministic") {
  VectorXd a(1), b(5);
  a << 0.3;
  b << 0.8, -0.2, 0.3, 0.1, 0.0;
  Sample s = draw(260, 1, 5, a, b, 0.6, 41);
  BasisSpec basis = BasisSpec::fourier(5);
  ProductElement zeta = make_functional_shock(1, make_const(basis, 1.0));
  std::vector<int> hs = {1, 2, 3, 5};

  auto prof = irf_profile(s.y, s.W, s.X, basis, hs, zeta, 0.95,
                          TauRule::fixed_k(5), InverseMode::Schur, HacSpec{});
  REQUIRE(prof.size() == hs.size());
  for (size_t i = 0; i < hs.size(); ++i) {
    Estimate est = estimate(s.y, s.W, s.X, basis, hs[i], TauRule::fixed_k(5));
    IrfInference one = irf_inference(est, zeta, 0.95, HacSpec{});
    CHECK(prof[i].h == hs[i]);
    CHECK(prof[i].point == one.point);
    CHECK(prof[i].lo == one.lo);
    CHECK(prof[i].hi == one.hi);
  }
  auto prof2 = irf_profile(s.y, s.W, s.X, basis, hs, zeta, 0.95,
                           TauRule::fixed_k(5), InverseMode::Schur, HacSpec{});
  for (size_t i = 0; i < hs.size(); ++i) CHECK(prof[i].point == prof2[i].point);
}

TEST_CASE("shock constructors: constant and affine slope") {
  BasisSpec basis = BasisSpec::fourier(7);
  FunctionElement c = make_const(basis, 2.5);
  VectorXd pts(5);
  pts << 0.0, 0.25, 0.5, 0.75, 1.0;
  CHECK((c.evaluate(pts).array() - 2.5).abs().maxCoeff() < 1e-12);

  FunctionElement sl = make_slope(basis, -2.0, 2.0);
  VectorXd got = sl.evaluate(pts);
  // truncated Fourier series of a + b r: exact at interior points up to the
  // truncation error; check the L2 projection identities instead
  CHECK(inner(sl, make_const(basis, 1.0)) == doctest::Approx(-1.0).epsilon(1e-12));
  // <a + br, sqrt2 sin(2 pi k r)> = -b sqrt2/(2 pi k)
  FunctionElement s1(basis, VectorXd::Unit(7, 1));
  CHECK(inner(sl, s1) ==
        doctest::Approx(-2.0 * std::sqrt(2.0) / (2 * M_PI)).epsilon(1e-12));
  FunctionElement c1(basis, VectorXd::Unit(7, 2));
  CHECK(inner(sl, c1) == doctest::Approx(0.0).epsilon(1e-12));
  // slope evaluations bracket the line (Gibbs aside) at mid points
  CHECK(got(2) == doctest::Approx(-1.0).epsilon(1e-6));

  ProductElement shock = make_functional_shock(3, sl);
  CHECK(shock.m() == 3);
  CHECK(shock.w.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("insufficient data and bad horizons are rejected") {
  BasisSpec basis = BasisSpec::fourier(3);
  VectorXd a(1), b(3);
  a << 0.1;
  b << 1, 0, 0;
  Sample s = draw(30, 1, 3, a, b, 0.1, 43);
  CHECK_THROWS_AS(estimate(s.y, s.W, s.X, basis, -1, TauRule::fixed_k(3)), Error);
  CHECK_THROWS_AS(estimate(s.y, s.W, s.X, basis, 25, TauRule::fixed_k(3)), Error);
}
