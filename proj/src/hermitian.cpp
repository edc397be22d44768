#include "mconc/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mconc {

double max_asymmetry(const CMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

HermitianMatrix::HermitianMatrix(const CMatrix& entries, double rel_tol) {
  if (entries.rows() != entries.cols()) {
    throw DimensionMismatch("Hermitian matrix must be square, got " + std::to_string(entries.rows()) + "x" +
                            std::to_string(entries.cols()));
  }
  if (entries.rows() < 1) throw DimensionMismatch("Hermitian matrix must have dim >= 1");
  if (!entries.allFinite()) throw DomainError("matrix has non-finite entries");
  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = max_asymmetry(entries);
  const double tol = rel_tol * scale;
  if (asym > tol) throw NotHermitianError(asym, tol);
  m_ = (entries + entries.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::symmetrized(const CMatrix& entries) {
  return HermitianMatrix(CMatrix((entries + entries.adjoint()) * 0.5), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index d) {
  if (d < 1) throw DimensionMismatch("dim must be >= 1");
  return HermitianMatrix(CMatrix::Identity(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index d) {
  if (d < 1) throw DimensionMismatch("dim must be >= 1");
  return HermitianMatrix(CMatrix::Zero(d, d), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  if (values.empty()) throw DimensionMismatch("dim must be >= 1");
  const auto d = static_cast<Eigen::Index>(values.size());
  CMatrix m = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return HermitianMatrix(std::move(m), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

HermitianMatrix HermitianMatrix::from_real(const Eigen::MatrixXd& entries, double rel_tol) {
  return HermitianMatrix(CMatrix(entries.cast<Complex>()), rel_tol);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  require_same_dim(*this, o, "sum");
  return HermitianMatrix(CMatrix(m_ + o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  require_same_dim(*this, o, "difference");
  return HermitianMatrix(CMatrix(m_ - o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-() const { return HermitianMatrix(CMatrix(-m_), Trusted{}); }

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(CMatrix(m_ * s), Trusted{}); }

HermitianMatrix HermitianMatrix::squared() const { return symmetrized(m_ * m_); }

HermitianMatrix HermitianMatrix::shifted(double s) const {
  CMatrix m = m_;
  m.diagonal().array() += s;
  return HermitianMatrix(std::move(m), Trusted{});
}

double HermitianMatrix::max_abs_entry() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVector eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

HermitianMatrix matrix_function(const SpectralDecomposition& eig, const std::function<double(double)>& f) {
  const Eigen::Index d = eig.eigenvalues.size();
  RVector fv(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lam = eig.eigenvalues(i);
    fv(i) = f(lam);
    if (!std::isfinite(fv(i))) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "matrix function undefined at eigenvalue " << lam;
      throw DomainError(msg.str());
    }
  }
  return HermitianMatrix::symmetrized(eig.eigenvectors * fv.cast<Complex>().asDiagonal() *
                                      eig.eigenvectors.adjoint());
}

HermitianMatrix matrix_function(const HermitianMatrix& a, const std::function<double(double)>& f) {
  return matrix_function(spectral_decompose(a), f);
}

HermitianMatrix matrix_exp(const HermitianMatrix& a) {
  return matrix_function(a, [](double x) { return std::exp(x); });
}

HermitianMatrix matrix_power(const HermitianMatrix& a, double p, double rel_tol) {
  const SpectralDecomposition eig = spectral_decompose(a);
  const double scale = std::max(std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(eig.eigenvalues.size() - 1)));
  const double floor = -rel_tol * std::max(scale, 1.0);
  return matrix_function(eig, [&](double x) {
    if (x < 0.0) {
      if (x < floor) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "power " << p << " undefined at negative eigenvalue " << x;
        throw DomainError(msg.str());
      }
      x = 0.0;
    }
    return std::pow(x, p);
  });
}

HermitianMatrix positive_part(const HermitianMatrix& a) {
  return matrix_function(a, [](double x) { return std::max(x, 0.0); });
}

HermitianMatrix negative_part(const HermitianMatrix& a) {
  return matrix_function(a, [](double x) { return std::max(-x, 0.0); });
}

LoewnerCheck psd_order_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  require_same_dim(a, b, "psd_order_leq");
  const double m = lambda_min(b - a);
  return {m >= -tol, m};
}

double lambda_max(const HermitianMatrix& a) { return eigenvalues(a).maxCoeff(); }
double lambda_min(const HermitianMatrix& a) { return eigenvalues(a).minCoeff(); }

double spectral_norm(const HermitianMatrix& a) { return eigenvalues(a).cwiseAbs().maxCoeff(); }

double trace_real(const HermitianMatrix& a) {
  const Complex t = a.matrix().trace();
  const double mag = a.matrix().diagonal().cwiseAbs().sum();
  if (std::abs(t.imag()) > 1e-10 * std::max(1.0, mag)) {
    throw NumericalError("trace has imaginary residue " + std::to_string(t.imag()));
  }
  return t.real();
}

double trace_product(const HermitianMatrix& x, const HermitianMatrix& y) {
  require_same_dim(x, y, "trace_product");
  return x.matrix().cwiseProduct(y.matrix().transpose()).sum().real();
}

double operator_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace mconc
