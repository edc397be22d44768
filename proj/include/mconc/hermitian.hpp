#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mconc/errors.hpp"

namespace mconc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Relative hermiticity tolerance: |a_ij - conj(a_ji)| <= kHermitianTol * max|a|.
inline constexpr double kHermitianTol = 1e-12;

// Dense complex square matrix certified Hermitian at construction. Immutable.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  // Certifies the input. Asymmetry below tolerance is removed by (A + A*)/2;
  // anything larger throws NotHermitianError.
  explicit HermitianMatrix(const CMatrix& entries, double rel_tol = kHermitianTol);

  static HermitianMatrix identity(Eigen::Index d);
  static HermitianMatrix zero(Eigen::Index d);
  static HermitianMatrix diagonal(std::span<const double> values);
  static HermitianMatrix diagonal(std::initializer_list<double> values);
  static HermitianMatrix scalar(double value) { return diagonal({value}); }
  static HermitianMatrix from_real(const Eigen::MatrixXd& entries, double rel_tol = kHermitianTol);

  // For products known to be Hermitian in exact arithmetic (A*A, U D U*): symmetrizes
  // without the tolerance check.
  static HermitianMatrix symmetrized(const CMatrix& entries);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator-() const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return a * s; }

  HermitianMatrix squared() const;
  // Adds s * I.
  HermitianMatrix shifted(double s) const;

  double max_abs_entry() const;

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix m, Trusted) : m_(std::move(m)) {}
  CMatrix m_;
};

// Largest |a_ij - conj(a_ji)|.
double max_asymmetry(const CMatrix& m);

struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns

  CMatrix reconstruct() const;
};

SpectralDecomposition spectral_decompose(const HermitianMatrix& a);

RVector eigenvalues(const HermitianMatrix& a);

// U diag(f(lambda_i)) U*. A non-finite f(lambda) throws DomainError naming lambda.
HermitianMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f);
HermitianMatrix matrix_function(const SpectralDecomposition& eig, const std::function<double(double)>& f);

HermitianMatrix matrix_exp(const HermitianMatrix& a);

// A^p for PSD A. Eigenvalues in [-tol * ||A||, 0) are clamped to 0; more negative
// eigenvalues throw DomainError.
HermitianMatrix matrix_power(const HermitianMatrix& a, double p, double rel_tol = 1e-10);

HermitianMatrix positive_part(const HermitianMatrix& a);
HermitianMatrix negative_part(const HermitianMatrix& a);

struct LoewnerCheck {
  bool holds;
  double min_eigenvalue;  // lambda_min(B - A)
};

// A <= B in Loewner order, up to an absolute tolerance on lambda_min(B - A).
LoewnerCheck psd_order_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol);

double spectral_norm(const HermitianMatrix& a);
double lambda_max(const HermitianMatrix& a);
double lambda_min(const HermitianMatrix& a);

// Sum of the diagonal; an imaginary residue above 1e-10 * max(1, sum|a_ii|) is an error.
double trace_real(const HermitianMatrix& a);

// Tr(XY) for Hermitian X, Y; real in exact arithmetic.
double trace_product(const HermitianMatrix& x, const HermitianMatrix& y);

// Operator 2-norm of a general complex matrix.
double operator_norm(const CMatrix& m);

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b, const char* what);

}  // namespace mconc
