#include "flproj/space.hpp"

#include <cmath>
#include <numbers>

namespace flproj {

BasisSpec BasisSpec::fourier(int dim) {
  require(dim >= 1, Errc::invalid_argument, "fourier basis: dim must be >= 1");
  require(dim % 2 == 1, Errc::invalid_argument, "fourier basis: dim must be odd");
  BasisSpec b;
  b.kind_ = BasisKind::Fourier;
  b.dim_ = dim;
  return b;
}

BasisSpec BasisSpec::raw_grid(VectorXd grid) {
  const int n = static_cast<int>(grid.size());
  require(n >= 2, Errc::invalid_argument, "raw grid: need at least 2 points");
  require(grid(0) >= 0.0 && grid(n - 1) <= 1.0, Errc::invalid_argument,
          "raw grid: points must lie in [0,1]");
  for (int i = 1; i < n; ++i)
    require(grid(i) > grid(i - 1), Errc::invalid_argument,
            "raw grid: points must be strictly increasing");
  BasisSpec b;
  b.kind_ = BasisKind::RawGrid;
  b.dim_ = n;
  b.grid_ = std::move(grid);
  // Trapezoid weights; end cells absorb [0, g0] and [g_{n-1}, 1] so the
  // weights are positive and sum to exactly 1.
  b.weights_ = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double lo = (i == 0) ? 0.0 : 0.5 * (b.grid_(i) + b.grid_(i - 1));
    double hi = (i == n - 1) ? 1.0 : 0.5 * (b.grid_(i) + b.grid_(i + 1));
    b.weights_(i) = hi - lo;
  }
  return b;
}

bool BasisSpec::compatible(const BasisSpec& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_) return false;
  if (kind_ == BasisKind::RawGrid && grid_ != o.grid_) return false;
  return true;
}

MatrixXd BasisSpec::evaluate(const VectorXd& pts) const {
  require(kind_ == BasisKind::Fourier, Errc::invalid_argument,
          "evaluate: only the Fourier basis has analytic functions");
  const double sqrt2 = std::numbers::sqrt2;
  const double twopi = 2.0 * std::numbers::pi;
  MatrixXd phi(pts.size(), dim_);
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    phi(i, 0) = 1.0;
    for (int k = 1; 2 * k - 1 < dim_; ++k) {
      double a = twopi * k * pts(i);
      phi(i, 2 * k - 1) = sqrt2 * std::sin(a);
      if (2 * k < dim_) phi(i, 2 * k) = sqrt2 * std::cos(a);
    }
  }
  return phi;
}

double BasisSpec::inner(const VectorXd& a, const VectorXd& b) const {
  require(a.size() == dim_ && b.size() == dim_, Errc::dimension_mismatch,
          "inner: coefficient length does not match basis dim");
  if (kind_ == BasisKind::Fourier) return a.dot(b);
  return (a.array() * b.array() * weights_.array()).sum();
}

void require_compatible(const BasisSpec& a, const BasisSpec& b, const char* where) {
  if (!a.compatible(b))
    raise(Errc::dimension_mismatch,
          std::string(where) + ": elements live in different bases");
}

FunctionElement::FunctionElement(BasisSpec b, VectorXd c)
    : basis(std::move(b)), coef(std::move(c)) {
  require(coef.size() == basis.dim(), Errc::dimension_mismatch,
          "function element: coefficient length does not match basis dim");
}

VectorXd FunctionElement::evaluate(const VectorXd& pts) const {
  if (basis.kind() == BasisKind::Fourier) return basis.evaluate(pts) * coef;
  require(pts == basis.grid(), Errc::invalid_argument,
          "evaluate: raw-grid elements are defined on their own grid only");
  return coef;
}

double inner(const FunctionElement& a, const FunctionElement& b) {
  require_compatible(a.basis, b.basis, "inner");
  return a.basis.inner(a.coef, b.coef);
}

double norm(const FunctionElement& a) { return std::sqrt(inner(a, a)); }

FunctionElement operator+(const FunctionElement& a, const FunctionElement& b) {
  require_compatible(a.basis, b.basis, "operator+");
  return FunctionElement(a.basis, a.coef + b.coef);
}

FunctionElement operator-(const FunctionElement& a, const FunctionElement& b) {
  require_compatible(a.basis, b.basis, "operator-");
  return FunctionElement(a.basis, a.coef - b.coef);
}

FunctionElement operator*(double s, const FunctionElement& a) {
  return FunctionElement(a.basis, s * a.coef);
}

VectorXd ProductElement::stacked() const {
  VectorXd v(w.size() + x.coef.size());
  v << w, x.coef;
  return v;
}

double inner(const ProductElement& a, const ProductElement& b) {
  require(a.w.size() == b.w.size(), Errc::dimension_mismatch,
          "inner: scalar parts have different lengths");
  return a.w.dot(b.w) + inner(a.x, b.x);
}

double norm(const ProductElement& a) { return std::sqrt(inner(a, a)); }

ProductElement operator+(const ProductElement& a, const ProductElement& b) {
  require(a.w.size() == b.w.size(), Errc::dimension_mismatch,
          "operator+: scalar parts have different lengths");
  return ProductElement{a.w + b.w, a.x + b.x};
}

ProductElement operator-(const ProductElement& a, const ProductElement& b) {
  require(a.w.size() == b.w.size(), Errc::dimension_mismatch,
          "operator-: scalar parts have different lengths");
  return ProductElement{a.w - b.w, a.x - b.x};
}

ProductElement operator*(double s, const ProductElement& a) {
  return ProductElement{s * a.w, s * a.x};
}

MatrixXd tensor(const FunctionElement& a, const FunctionElement& b) {
  require_compatible(a.basis, b.basis, "tensor");
  require(a.basis.kind() == BasisKind::Fourier, Errc::invalid_argument,
          "tensor: operator coordinates require the Fourier basis");
  return b.coef * a.coef.transpose();
}

OperatorMatrix::OperatorMatrix(int m, BasisSpec basis)
    : m_(m), basis_(std::move(basis)) {
  require(m >= 0, Errc::invalid_argument, "operator: m must be >= 0");
  require(basis_.kind() == BasisKind::Fourier, Errc::invalid_argument,
          "operator: block algebra requires the Fourier basis");
  const int J = basis_.dim();
  a11_ = MatrixXd::Zero(m_, m_);
  a12_ = MatrixXd::Zero(m_, J);
  a21_ = MatrixXd::Zero(J, m_);
  a22_ = MatrixXd::Zero(J, J);
}

OperatorMatrix OperatorMatrix::identity(int m, BasisSpec basis) {
  OperatorMatrix op(m, std::move(basis));
  op.a11_.setIdentity();
  op.a22_.setIdentity();
  return op;
}

OperatorMatrix OperatorMatrix::from_dense(int m, BasisSpec basis, const MatrixXd& dense) {
  OperatorMatrix op(m, std::move(basis));
  const int J = op.J();
  require(dense.rows() == m + J && dense.cols() == m + J, Errc::dimension_mismatch,
          "from_dense: matrix does not match m + J");
  op.a11_ = dense.topLeftCorner(m, m);
  op.a12_ = dense.topRightCorner(m, J);
  op.a21_ = dense.bottomLeftCorner(J, m);
  op.a22_ = dense.bottomRightCorner(J, J);
  return op;
}

ProductElement OperatorMatrix::apply(const ProductElement& v) const {
  require(v.m() == m_, Errc::dimension_mismatch, "apply: scalar part mismatch");
  require_compatible(v.x.basis, basis_, "apply");
  ProductElement out;
  out.w = a11_ * v.w + a12_ * v.x.coef;
  out.x = FunctionElement(basis_, a21_ * v.w + a22_ * v.x.coef);
  return out;
}

VectorXd OperatorMatrix::apply(const VectorXd& stacked) const {
  const int J = basis_.dim();
  require(stacked.size() == m_ + J, Errc::dimension_mismatch,
          "apply: stacked vector mismatch");
  VectorXd out(m_ + J);
  out.head(m_) = a11_ * stacked.head(m_) + a12_ * stacked.tail(J);
  out.tail(J) = a21_ * stacked.head(m_) + a22_ * stacked.tail(J);
  return out;
}

OperatorMatrix OperatorMatrix::compose(const OperatorMatrix& rhs) const {
  require(m_ == rhs.m_, Errc::dimension_mismatch, "compose: m mismatch");
  require_compatible(basis_, rhs.basis_, "compose");
  OperatorMatrix out(m_, basis_);
  out.a11_ = a11_ * rhs.a11_ + a12_ * rhs.a21_;
  out.a12_ = a11_ * rhs.a12_ + a12_ * rhs.a22_;
  out.a21_ = a21_ * rhs.a11_ + a22_ * rhs.a21_;
  out.a22_ = a21_ * rhs.a12_ + a22_ * rhs.a22_;
  return out;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out(m_, basis_);
  out.a11_ = a11_.transpose();
  out.a12_ = a21_.transpose();
  out.a21_ = a12_.transpose();
  out.a22_ = a22_.transpose();
  return out;
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& o) const {
  require(m_ == o.m_, Errc::dimension_mismatch, "operator+: m mismatch");
  require_compatible(basis_, o.basis_, "operator+");
  OperatorMatrix out(m_, basis_);
  out.a11_ = a11_ + o.a11_;
  out.a12_ = a12_ + o.a12_;
  out.a21_ = a21_ + o.a21_;
  out.a22_ = a22_ + o.a22_;
  return out;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
  return *this + o.scaled(-1.0);
}

OperatorMatrix OperatorMatrix::scaled(double s) const {
  OperatorMatrix out(m_, basis_);
  out.a11_ = s * a11_;
  out.a12_ = s * a12_;
  out.a21_ = s * a21_;
  out.a22_ = s * a22_;
  return out;
}

MatrixXd OperatorMatrix::dense() const {
  const int J = basis_.dim();
  MatrixXd d(m_ + J, m_ + J);
  d.topLeftCorner(m_, m_) = a11_;
  d.topRightCorner(m_, J) = a12_;
  d.bottomLeftCorner(J, m_) = a21_;
  d.bottomRightCorner(J, J) = a22_;
  return d;
}

double OperatorMatrix::hs_norm() const {
  return std::sqrt(a11_.squaredNorm() + a12_.squaredNorm() + a21_.squaredNorm() +
                   a22_.squaredNorm());
}

double OperatorMatrix::spectral_radius(int iters) const {
  MatrixXd d = dense();
  const int n = static_cast<int>(d.rows());
  if (n == 0) return 0.0;
  // Fixed pseudo-random start so the estimate is deterministic.
  VectorXd v(n);
  uint64_t s = 0x9E3779B97F4A7C15ULL;
  for (int i = 0; i < n; ++i) {
    s ^= s << 13; s ^= s >> 7; s ^= s << 17;
    v(i) = 0.5 + static_cast<double>(s % 1000003) / 1000003.0;
  }
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    VectorXd w = d * v;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    lambda = nw;
  }
  return lambda;
}

OperatorMatrix tensor(const ProductElement& a, const ProductElement& b) {
  require(a.m() == b.m(), Errc::dimension_mismatch, "tensor: scalar part mismatch");
  require_compatible(a.x.basis, b.x.basis, "tensor");
  OperatorMatrix out(a.m(), a.x.basis);
  // (a (x) b) c = <a, c> b
  out.a11() = b.w * a.w.transpose();
  out.a12() = b.w * a.x.coef.transpose();
  out.a21() = b.x.coef * a.w.transpose();
  out.a22() = b.x.coef * a.x.coef.transpose();
  return out;
}

}  // namespace flproj
