#pragma once

#include <Eigen/Dense>

#include "flproj/errors.hpp"

namespace flproj {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class BasisKind { Fourier, RawGrid };

// Coordinate system for L2[0,1]. Fourier: orthonormal
// {1, sqrt2 sin(2 pi k r), sqrt2 cos(2 pi k r)}_{k>=1}, odd dimension.
// RawGrid: pointwise values on a strictly increasing grid in [0,1] with
// positive trapezoid quadrature weights summing to 1 (end intervals extended
// to the boundary so the rule covers all of [0,1]). RawGrid exists for
// ingestion and cross-checks; operator algebra requires Fourier.
class BasisSpec {
 public:
  BasisSpec() = default;  // empty sentinel; operations validate dimensions
  static BasisSpec fourier(int dim);
  static BasisSpec raw_grid(VectorXd grid);

  BasisKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const VectorXd& grid() const { return grid_; }
  const VectorXd& weights() const { return weights_; }

  bool compatible(const BasisSpec& o) const;
  // Fourier design matrix: rows are evaluation points, columns basis functions.
  MatrixXd evaluate(const VectorXd& pts) const;
  double inner(const VectorXd& a, const VectorXd& b) const;

 private:
  BasisKind kind_ = BasisKind::Fourier;
  int dim_ = 0;
  VectorXd grid_;     // RawGrid only
  VectorXd weights_;  // RawGrid only
};

void require_compatible(const BasisSpec& a, const BasisSpec& b, const char* where);

// Element of H = L2[0,1] in a fixed basis.
struct FunctionElement {
  BasisSpec basis;
  VectorXd coef;

  FunctionElement() = default;
  FunctionElement(BasisSpec b, VectorXd c);
  VectorXd evaluate(const VectorXd& pts) const;
};

double inner(const FunctionElement& a, const FunctionElement& b);
double norm(const FunctionElement& a);
FunctionElement operator+(const FunctionElement& a, const FunctionElement& b);
FunctionElement operator-(const FunctionElement& a, const FunctionElement& b);
FunctionElement operator*(double s, const FunctionElement& a);

// Element of the product space R^m x H; inner product is the sum of parts.
struct ProductElement {
  VectorXd w;
  FunctionElement x;

  int m() const { return static_cast<int>(w.size()); }
  VectorXd stacked() const;  // (w, coef), length m + J
};

double inner(const ProductElement& a, const ProductElement& b);
double norm(const ProductElement& a);
ProductElement operator+(const ProductElement& a, const ProductElement& b);
ProductElement operator-(const ProductElement& a, const ProductElement& b);
ProductElement operator*(double s, const ProductElement& a);

// rank-one map c |-> <a, c> b  (Fourier coordinates: b a^T)
MatrixXd tensor(const FunctionElement& a, const FunctionElement& b);

// Bounded operator on R^m x H_J in block-matrix coordinates (Fourier only):
//   [ a11 (m x m)   a12 (m x J) ]
//   [ a21 (J x m)   a22 (J x J) ]
class OperatorMatrix {
 public:
  OperatorMatrix(int m, BasisSpec basis);  // zero operator
  static OperatorMatrix identity(int m, BasisSpec basis);
  static OperatorMatrix from_dense(int m, BasisSpec basis, const MatrixXd& dense);

  int m() const { return m_; }
  int J() const { return basis_.dim(); }
  const BasisSpec& basis() const { return basis_; }

  MatrixXd& a11() { return a11_; }
  MatrixXd& a12() { return a12_; }
  MatrixXd& a21() { return a21_; }
  MatrixXd& a22() { return a22_; }
  const MatrixXd& a11() const { return a11_; }
  const MatrixXd& a12() const { return a12_; }
  const MatrixXd& a21() const { return a21_; }
  const MatrixXd& a22() const { return a22_; }

  ProductElement apply(const ProductElement& v) const;
  VectorXd apply(const VectorXd& stacked) const;
  OperatorMatrix compose(const OperatorMatrix& rhs) const;  // this after rhs
  OperatorMatrix adjoint() const;
  OperatorMatrix operator+(const OperatorMatrix& o) const;
  OperatorMatrix operator-(const OperatorMatrix& o) const;
  OperatorMatrix scaled(double s) const;

  MatrixXd dense() const;
  double hs_norm() const;
  // Largest |eigenvalue| estimate (power iteration on the dense form).
  double spectral_radius(int iters = 300) const;

 private:
  int m_ = 0;
  BasisSpec basis_;
  MatrixXd a11_, a12_, a21_, a22_;
};

// rank-one map on the product space: c |-> <a, c> b
OperatorMatrix tensor(const ProductElement& a, const ProductElement& b);

}  // namespace flproj
