#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "flproj/instruments.hpp"
#include "flproj/mathutil.hpp"

using namespace flproj;

namespace {

struct IvSample {
  VectorXd y;
  MatrixXd W, X, ZW, ZX;
};

// Just-identified design: latent signal Xi, regressors contaminated with e,
// instruments contaminated with an independent e'; the disturbance is
// correlated with e so plain least squares is inconsistent.
IvSample draw_iv(int T, int m, int J, const VectorXd& a, const VectorXd& b,
                 double endo, double sd, uint64_t seed) {
  std::mt19937_64 gen = make_stream(seed, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  IvSample s;
  s.y = VectorXd(T);
  s.W = MatrixXd(T, m);
  s.X = MatrixXd(T, J);
  s.ZW = MatrixXd(T, m);
  s.ZX = MatrixXd(T, J);
  for (int t = 0; t < T; ++t) {
    double u = 0.0;
    for (int i = 0; i < m; ++i) {
      double xi = n(gen), e = n(gen), ep = n(gen);
      s.W(t, i) = xi + 0.4 * e;
      s.ZW(t, i) = xi + 0.4 * ep;
      u += endo * e;
    }
    for (int j = 0; j < J; ++j) {
      double scale = 0.9 * std::pow(0.8, j);
      double xi = scale * n(gen), e = scale * 0.5 * n(gen),
             ep = scale * 0.5 * n(gen);
      s.X(t, j) = xi + e;
      s.ZX(t, j) = xi + ep;
      u += endo * e * b(j);
    }
    s.y(t) = s.W.row(t).dot(a) + s.X.row(t).dot(b) + u + sd * n(gen);
  }
  return s;
}

VectorXd dense_iv(const IvSample& s) {
  const int T = static_cast<int>(s.y.size());
  MatrixXd U(T, s.W.cols() + s.X.cols()), Z(T, s.ZW.cols() + s.ZX.cols());
  U << s.W, s.X;
  Z << s.ZW, s.ZX;
  MatrixXd Uc = U.rowwise() - U.colwise().mean();
  MatrixXd Zc = Z.rowwise() - Z.colwise().mean();
  VectorXd yc = s.y.array() - s.y.mean();
  return (Zc.transpose() * Uc).partialPivLu().solve(Zc.transpose() * yc);
}

template <typename Fn>
Errc thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::internal_error;
}

}  // namespace

TEST_CASE("instrumenting with the regressors themselves reproduces least squares") {
  BasisSpec basis = BasisSpec::fourier(5);
  VectorXd a(1), b(5);
  a << 0.6;
  b << 1.0, -0.4, 0.2, 0.1, -0.05;
  IvSample t = draw_iv(400, 1, 5, a, b, 0.0, 0.5, 7);
  t.ZW = t.W;  // self-instrumented
  t.ZX = t.X;
  IvEstimate iv = iv_estimate_aligned(t.y, t.W, t.X, t.ZW, t.ZX, basis, 0,
                                      TauRule::fixed_k(5));
  // ordinary projection on the same data
  Estimate ols = estimate_aligned(t.y, t.W, t.X, basis, 0, TauRule::fixed_k(5));
  CHECK((iv.theta() - ols.theta()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("full-rank instrumented estimate matches the dense oracle") {
  VectorXd a(2), b(3);
  a << 0.7, -0.2;
  b << 0.8, 0.3, -0.1;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(600, 2, 3, a, b, 0.6, 0.4, 21);
  IvEstimate iv = iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                      TauRule::fixed_k(3));
  VectorXd oracle = dense_iv(s);
  CHECK((iv.theta() - oracle).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(iv.m == 2);
  CHECK(iv.K == 3);

  // the regularized inverse at full rank is a true inverse of the
  // cross-moment operator
  MatrixXd Binv = iv.inverse_dense();
  MatrixXd Delta = iv.bundle.dense();
  MatrixXd I5 = MatrixXd::Identity(5, 5);
  CHECK((Binv * Delta - I5).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("instrumenting removes errors-in-variables attenuation") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, 0.6, -0.4;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(20000, 1, 3, a, b, 0.8, 0.3, 33);
  IvEstimate iv = iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                      TauRule::fixed_k(3));
  Estimate ols = estimate_aligned(s.y, s.W, s.X, basis, 0, TauRule::fixed_k(3));
  VectorXd truth(4);
  truth << a, b;
  double err_iv = (iv.theta() - truth).norm();
  double err_ols = (ols.theta() - truth).norm();
  CHECK(err_iv < 0.5 * err_ols);
  CHECK(err_iv < 0.1);
}

TEST_CASE("weak instruments are detected") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, 0.6, -0.4;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(300, 1, 3, a, b, 0.3, 0.4, 41);

  SUBCASE("degenerate scalar instruments") {
    // a constant instrument is exactly zero after centering, so the scalar
    // cross-moment block is singular
    s.ZW.col(0).setConstant(3.0);
    CHECK(thrown_code([&] {
            iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                TauRule::fixed_k(3));
          }) == Errc::weak_instrument);
  }

  SUBCASE("functional instruments carrying no signal at the chosen cutoff") {
    // pure-noise functional instruments leave the leading singular value of
    // the instrumented cross-moment far below a fixed threshold
    std::mt19937_64 gen = make_stream(99, 0);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 300; ++t)
      for (int j = 0; j < 3; ++j) s.ZX(t, j) = 0.3 * n(gen);
    CHECK(thrown_code([&] {
            iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                TauRule::fixed_tau(0.01));
          }) == Errc::weak_instrument);
  }
}

TEST_CASE("shifting pairs the response h steps ahead of the instruments") {
  VectorXd a(1), b(3);
  a << 0.4;
  b << 0.9, -0.2, 0.1;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(500, 1, 3, a, b, 0.5, 0.4, 55);
  const int h = 3, T = 500;
  IvEstimate shifted = iv_estimate(s.y, s.W, s.X, s.ZW, s.ZX, basis, h,
                                   TauRule::fixed_k(3));
  IvEstimate manual = iv_estimate_aligned(
      s.y.tail(T - h), s.W.topRows(T - h), s.X.topRows(T - h),
      s.ZW.topRows(T - h), s.ZX.topRows(T - h), basis, h, TauRule::fixed_k(3));
  CHECK((shifted.theta() - manual.theta()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(shifted.T_eff == T - h);
}

TEST_CASE("theta_dot is linear in the shock") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, 0.6, -0.4;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(400, 1, 3, a, b, 0.5, 0.4, 61);
  IvEstimate iv = iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                      TauRule::fixed_k(3));
  ProductElement z1{(VectorXd(1) << 1.0).finished(),
                    FunctionElement(basis, (VectorXd(3) << 0.5, 0, 0).finished())};
  ProductElement z2{(VectorXd(1) << -2.0).finished(),
                    FunctionElement(basis, (VectorXd(3) << 0, 1, -1).finished())};
  ProductElement zsum{z1.w + z2.w, FunctionElement(basis, z1.x.coef + z2.x.coef)};
  CHECK(iv.theta_dot(zsum) ==
        doctest::Approx(iv.theta_dot(z1) + iv.theta_dot(z2)).epsilon(1e-12));
  CHECK(iv.theta_dot(z1) ==
        doctest::Approx(1.0 * iv.alpha(0) + 0.5 * iv.beta.coef(0))
            .epsilon(1e-12));
}

TEST_CASE("instrumented inference produces an interval around the point") {
  VectorXd a(1), b(3);
  a << 0.5;
  b << 1.0, 0.6, -0.4;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(800, 1, 3, a, b, 0.6, 0.5, 71);
  IvEstimate iv = iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                      TauRule::fixed_k(3));
  ProductElement zeta = make_functional_shock(1, make_const(basis, 1.0));
  IrfInference inf = iv_inference(iv, zeta, 0.95, HacSpec{});
  CHECK(inf.point == doctest::Approx(iv.theta_dot(zeta)).epsilon(1e-14));
  CHECK(inf.lo < inf.point);
  CHECK(inf.point < inf.hi);
  CHECK(inf.se > 0.0);
  CHECK(inf.hi - inf.point == doctest::Approx(inf.point - inf.lo).epsilon(1e-10));
  // interval covers the truth in this comfortable design
  VectorXd truth(4);
  truth << a, b;
  double target = a(0) * 0 + b(0);  // <beta, const> = first coefficient
  CHECK(inf.lo < target + 0.5);
  CHECK(inf.hi > target - 0.5);
}

TEST_CASE("apply_inverse and its adjoint agree with the dense inverse") {
  VectorXd a(1), b(3);
  a << 0.3;
  b << 0.7, 0.2, -0.1;
  BasisSpec basis = BasisSpec::fourier(3);
  IvSample s = draw_iv(500, 1, 3, a, b, 0.4, 0.4, 81);
  IvEstimate iv = iv_estimate_aligned(s.y, s.W, s.X, s.ZW, s.ZX, basis, 0,
                                      TauRule::fixed_k(3));
  MatrixXd Binv = iv.inverse_dense();
  VectorXd v(4);
  v << 0.4, -1.0, 0.3, 2.0;
  CHECK((iv.apply_inverse(v) - Binv * v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((iv.apply_inverse_adjoint(v) - Binv.transpose() * v).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("dimension mismatches are rejected") {
  BasisSpec basis = BasisSpec::fourier(3);
  VectorXd y = VectorXd::Zero(50);
  MatrixXd W = MatrixXd::Zero(50, 1), X = MatrixXd::Zero(50, 3);
  MatrixXd ZW = MatrixXd::Zero(50, 2);  // wrong width
  MatrixXd ZX = MatrixXd::Zero(50, 3);
  CHECK_THROWS_AS(
      iv_estimate_aligned(y, W, X, ZW, ZX, basis, 0, TauRule::fixed_k(3)), Error);
  MatrixXd ZWs = MatrixXd::Zero(40, 1);  // wrong length
  CHECK_THROWS_AS(
      iv_estimate_aligned(y, W, X, ZWs, ZX, basis, 0, TauRule::fixed_k(3)), Error);
}
