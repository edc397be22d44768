#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mconc/ensemble.hpp"
#include "mconc/errors.hpp"
#include "mconc/hermitian.hpp"

using namespace mconc;

namespace {

HermitianMatrix swap2() { return HermitianMatrix::from_real((Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished()); }

double dist(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(HermitianMatrix, RejectsAsymmetricInputAndReportsAsymmetry) {
  CMatrix m(2, 2);
  m << 1, 2, 0, 1;
  try {
    HermitianMatrix h(m);
    FAIL() << "expected rejection";
  } catch (const NotHermitianError& e) {
    EXPECT_DOUBLE_EQ(e.max_asymmetry(), 2.0);
  }
}

TEST(HermitianMatrix, SymmetrizesBelowTolerance) {
  CMatrix m(2, 2);
  m << 1, Complex(2, 1e-14), Complex(2, -1e-14 + 1e-15), 3;
  const HermitianMatrix h(m);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}

TEST(HermitianMatrix, RejectsNonSquareEmptyAndNonFinite) {
  EXPECT_THROW(HermitianMatrix(CMatrix(2, 3)), DimensionMismatch);
  EXPECT_THROW(HermitianMatrix(CMatrix(0, 0)), DimensionMismatch);
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(HermitianMatrix{m}, Error);
}

TEST(SpectralDecompose, DiagonalCase) {
  const auto e = spectral_decompose(HermitianMatrix::diagonal({2.0, -1.0}));
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), -1.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 2.0);
  // Columns are a permutation of the identity columns, up to phase.
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 1)), 1.0, 1e-15);
}

TEST(SpectralDecompose, IdentityAndSwap) {
  const auto e = eigenvalues(HermitianMatrix::identity(3));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(e(i), 1.0);
  const auto s = eigenvalues(swap2());
  EXPECT_NEAR(s(0), -1.0, 1e-15);
  EXPECT_NEAR(s(1), 1.0, 1e-15);
}

TEST(SpectralDecompose, ReconstructionOverEnsembles) {
  int checked = 0;
  for (EnsembleKind kind : kAllEnsembleKinds) {
    for (Eigen::Index d = 1; d <= 8; ++d) {
      for (std::uint64_t s = 0; s < 21; ++s) {
        const HermitianMatrix a = sample_family({kind, d, 1.0, s * 131 + static_cast<std::uint64_t>(d)}, 1).front();
        const auto e = spectral_decompose(a);
        for (Eigen::Index i = 1; i < d; ++i) EXPECT_LE(e.eigenvalues(i - 1), e.eigenvalues(i));
        const double norm = std::max(spectral_norm(a), 1e-300);
        EXPECT_LE((e.reconstruct() - a.matrix()).norm(), 1e-10 * d * norm);
        EXPECT_LE((e.eigenvectors.adjoint() * e.eigenvectors - CMatrix::Identity(d, d)).norm(), 1e-10);
        ++checked;
      }
    }
  }
  EXPECT_GE(checked, 1000);
}

TEST(MatrixFunction, Examples) {
  const auto a = matrix_function(HermitianMatrix::diagonal({0.0, std::log(2.0)}), [](double x) { return std::exp(x); });
  EXPECT_NEAR(dist(a.matrix(), HermitianMatrix::diagonal({1.0, 2.0}).matrix()), 0.0, 1e-15);
  const auto b = matrix_function(HermitianMatrix::identity(2), [](double x) { return x * x * x; });
  EXPECT_NEAR(dist(b.matrix(), CMatrix::Identity(2, 2)), 0.0, 1e-15);
  const auto c = matrix_function(HermitianMatrix::diagonal({4.0, 9.0}), [](double x) { return std::sqrt(x); });
  EXPECT_NEAR(dist(c.matrix(), HermitianMatrix::diagonal({2.0, 3.0}).matrix()), 0.0, 1e-15);
}

TEST(MatrixFunction, DomainErrorNamesEigenvalue) {
  try {
    matrix_function(HermitianMatrix::diagonal({-4.0, 1.0}), [](double x) { return std::sqrt(x); });
    FAIL() << "expected domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("-4"), std::string::npos);
  }
  EXPECT_THROW(matrix_power(HermitianMatrix::diagonal({-1.0, 1.0}), 0.5), DomainError);
}

TEST(MatrixFunction, CompositionHomomorphism) {
  const std::vector<std::function<double(double)>> fs = {[](double x) { return std::exp(x); },
                                                          [](double x) { return x * x; },
                                                          [](double x) { return x + 1.0; }};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const HermitianMatrix a = sample_family({EnsembleKind::gaussian_hermitian, 4, 0.5, s}, 1).front();
    for (const auto& f : fs) {
      for (const auto& g : fs) {
        const auto lhs = matrix_function(a, [&](double x) { return f(g(x)); });
        const auto rhs = matrix_function(matrix_function(a, g), f);
        EXPECT_LE(dist(lhs.matrix(), rhs.matrix()), 1e-9 * std::max(1.0, spectral_norm(lhs)));
      }
    }
  }
}

TEST(MatrixExp, Examples) {
  EXPECT_NEAR(dist(matrix_exp(HermitianMatrix::zero(2)).matrix(), CMatrix::Identity(2, 2)), 0.0, 1e-15);
  const auto e = matrix_exp(HermitianMatrix::diagonal({1.0, -1.0}));
  EXPECT_NEAR(e(0, 0).real(), std::numbers::e, 1e-15);
  EXPECT_NEAR(e(1, 1).real(), 1.0 / std::numbers::e, 1e-15);
  const auto s = matrix_exp(swap2());
  EXPECT_NEAR(s(0, 0).real(), std::cosh(1.0), 1e-14);
  EXPECT_NEAR(s(0, 1).real(), std::sinh(1.0), 1e-14);
  EXPECT_NEAR(s(1, 0).real(), std::sinh(1.0), 1e-14);
  EXPECT_NEAR(s(1, 1).real(), std::cosh(1.0), 1e-14);
}

TEST(PositiveNegativeParts, Examples) {
  const auto a = HermitianMatrix::diagonal({1.0, -2.0});
  EXPECT_NEAR(dist(positive_part(a).matrix(), HermitianMatrix::diagonal({1.0, 0.0}).matrix()), 0.0, 1e-15);
  EXPECT_NEAR(dist(negative_part(a).matrix(), HermitianMatrix::diagonal({0.0, 2.0}).matrix()), 0.0, 1e-15);
  const auto p = HermitianMatrix::diagonal({3.0, 0.5});
  EXPECT_NEAR(dist(positive_part(p).matrix(), p.matrix()), 0.0, 1e-15);
  EXPECT_NEAR(negative_part(p).max_abs_entry(), 0.0, 1e-15);
  const auto sp = positive_part(swap2());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(sp(i, j).real(), 0.5, 1e-15);
  }
}

TEST(PositiveNegativeParts, DecompositionProperties) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const HermitianMatrix a = sample_family({EnsembleKind::gaussian_hermitian, 5, 1.0, s}, 1).front();
    const HermitianMatrix p = positive_part(a), n = negative_part(a);
    EXPECT_LE(dist((p - n).matrix(), a.matrix()), 1e-9);
    EXPECT_LE((p.matrix() * n.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_GE(lambda_min(p), -1e-12);
    EXPECT_GE(lambda_min(n), -1e-12);
  }
}

TEST(PsdOrder, Examples) {
  EXPECT_TRUE(psd_order_leq(HermitianMatrix::zero(2), HermitianMatrix::identity(2), 1e-10).holds);
  const auto f = psd_order_leq(HermitianMatrix::identity(2), HermitianMatrix::zero(2), 1e-10);
  EXPECT_FALSE(f.holds);
  EXPECT_NEAR(f.min_eigenvalue, -1.0, 1e-15);
  const auto g = psd_order_leq(HermitianMatrix::diagonal({1.0, 3.0}), HermitianMatrix::diagonal({2.0, 2.0}), 1e-10);
  EXPECT_FALSE(g.holds);
  EXPECT_NEAR(g.min_eigenvalue, -1.0, 1e-15);
  EXPECT_THROW(psd_order_leq(HermitianMatrix::zero(2), HermitianMatrix::zero(3), 1e-10), DimensionMismatch);
}

TEST(PsdOrder, ReflexiveAndAntisymmetric) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto fam = sample_family({EnsembleKind::gaussian_hermitian, 4, 1.0, s}, 2);
    EXPECT_TRUE(psd_order_leq(fam[0], fam[0], 1e-10).holds);
    const bool ab = psd_order_leq(fam[0], fam[1], 1e-10).holds;
    const bool ba = psd_order_leq(fam[1], fam[0], 1e-10).holds;
    // Both directions only when the matrices coincide up to tolerance.
    if (ab && ba) {
      EXPECT_LE(spectral_norm(fam[0] - fam[1]), 1e-9);
    }
  }
}

TEST(Norms, Examples) {
  EXPECT_DOUBLE_EQ(spectral_norm(HermitianMatrix::diagonal({-3.0, 2.0})), 3.0);
  EXPECT_DOUBLE_EQ(trace_real(HermitianMatrix::identity(4)), 4.0);
  EXPECT_NEAR(spectral_norm(swap2() * 2.0), 2.0, 1e-15);
  EXPECT_NEAR(lambda_max(HermitianMatrix::diagonal({-3.0, 2.0})), 2.0, 1e-15);
  EXPECT_NEAR(lambda_min(HermitianMatrix::diagonal({-3.0, 2.0})), -3.0, 1e-15);
}

TEST(TraceProduct, MatchesDenseProduct) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto fam = sample_family({EnsembleKind::gaussian_hermitian, 5, 1.0, s}, 2);
    const Complex dense = (fam[0].matrix() * fam[1].matrix()).trace();
    EXPECT_NEAR(trace_product(fam[0], fam[1]), dense.real(), 1e-12);
    EXPECT_NEAR(dense.imag(), 0.0, 1e-12);
  }
}

TEST(Arithmetic, StaysHermitian) {
  const auto fam = sample_family({EnsembleKind::gaussian_hermitian, 3, 1.0, 5}, 2);
  const HermitianMatrix s = (fam[0] + fam[1] * 2.0 - fam[0].squared()).shifted(0.5);
  EXPECT_LE(max_asymmetry(s.matrix()), 1e-15);
  EXPECT_NEAR(trace_real(HermitianMatrix::identity(3).shifted(1.0)), 6.0, 1e-15);
}
