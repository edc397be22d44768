#include "mconc/ensemble.hpp"

#include <cmath>

namespace mconc {

namespace {

CMatrix ginibre(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  return g;
}

HermitianMatrix sample_one(EnsembleKind kind, Eigen::Index d, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (kind) {
    case EnsembleKind::gaussian_hermitian: {
      const CMatrix g = ginibre(d, rng);
      return HermitianMatrix::symmetrized(g * scale);
    }
    case EnsembleKind::diagonal: {
      std::vector<double> v(static_cast<std::size_t>(d));
      for (auto& x : v) x = scale * normal(rng);
      return HermitianMatrix::diagonal(v);
    }
    case EnsembleKind::psd: {
      const CMatrix g = ginibre(d, rng);
      return HermitianMatrix::symmetrized(g * g.adjoint() * (scale / static_cast<double>(d)));
    }
    case EnsembleKind::low_rank: {
      const Eigen::Index rank = std::max<Eigen::Index>(1, d / 2);
      CMatrix m = CMatrix::Zero(d, d);
      for (Eigen::Index r = 0; r < rank; ++r) {
        const CMatrix v = ginibre(d, rng).col(0);
        const double sign = (rng() & 1U) ? 1.0 : -1.0;
        m += sign * v * v.adjoint();
      }
      return HermitianMatrix::symmetrized(m * (scale / static_cast<double>(d)));
    }
    case EnsembleKind::integer_entry: {
      std::uniform_int_distribution<int> entry(-3, 3);
      CMatrix m(d, d);
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
          const int re = entry(rng);
          const int im = entry(rng);
          m(i, j) = Complex(re, im);
        }
      }
      return HermitianMatrix::symmetrized(m * scale);
    }
    case EnsembleKind::commuting_pair:
      break;
  }
  throw Error("sample_one: commuting-pair handled by family sampler");
}

}  // namespace

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::gaussian_hermitian: return "gaussian-hermitian";
    case EnsembleKind::diagonal: return "diagonal";
    case EnsembleKind::psd: return "psd";
    case EnsembleKind::low_rank: return "low-rank";
    case EnsembleKind::commuting_pair: return "commuting-pair";
    case EnsembleKind::integer_entry: return "integer-entry";
  }
  return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  for (EnsembleKind k : kAllEnsembleKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown ensemble kind '" + std::string(name) + "'");
}

void EnsembleSpec::validate() const {
  if (dim < 1) throw ConfigError("ensemble dim must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("ensemble scale must be positive");
}

CMatrix random_unitary(Eigen::Index d, Rng& rng) {
  const CMatrix g = ginibre(d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

std::vector<HermitianMatrix> sample_family(const EnsembleSpec& spec, std::size_t count) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(spec.kind), static_cast<std::uint64_t>(spec.dim)));
  std::vector<HermitianMatrix> out;
  out.reserve(count);
  const Eigen::Index d = spec.dim;
  if (spec.kind == EnsembleKind::commuting_pair) {
    const CMatrix u = random_unitary(d, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t c = 0; c < count; ++c) {
      RVector lam(d);
      for (Eigen::Index i = 0; i < d; ++i) lam(i) = spec.scale * normal(rng);
      out.push_back(HermitianMatrix::symmetrized(u * lam.cast<Complex>().asDiagonal() * u.adjoint()));
    }
    return out;
  }
  for (std::size_t c = 0; c < count; ++c) out.push_back(sample_one(spec.kind, d, spec.scale, rng));
  return out;
}

EnsembleSample sample_ensemble(const EnsembleSpec& spec) {
  if (spec.kind == EnsembleKind::commuting_pair) {
    auto fam = sample_family(spec, 2);
    return {fam[0], fam[1]};
  }
  return {sample_family(spec, 1)[0], std::nullopt};
}

HermitianMatrix psd_variant(const HermitianMatrix& h, double scale) { return h.squared() * (1.0 / scale); }

}  // namespace mconc
