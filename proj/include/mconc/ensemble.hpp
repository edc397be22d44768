#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mconc/hermitian.hpp"
#include "mconc/rng.hpp"

namespace mconc {

enum class EnsembleKind { gaussian_hermitian, diagonal, psd, low_rank, commuting_pair, integer_entry };

inline constexpr std::array<EnsembleKind, 6> kAllEnsembleKinds = {
    EnsembleKind::gaussian_hermitian, EnsembleKind::diagonal,       EnsembleKind::psd,
    EnsembleKind::low_rank,           EnsembleKind::commuting_pair, EnsembleKind::integer_entry};

std::string_view to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gaussian_hermitian;
  Eigen::Index dim = 2;
  double scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EnsembleSample {
  HermitianMatrix first;
  std::optional<HermitianMatrix> second;  // commuting-pair only
};

// Deterministic in spec.seed.
//   gaussian-hermitian  scale * (G + G*)/2, G complex Ginibre
//   diagonal            scale * diag(N(0,1))
//   psd                 scale * G G* / d
//   low-rank            scale * sum_{r < max(1, d/2)} s_r v_r v_r* / d, s_r = +-1
//   commuting-pair      U diag(a) U*, U diag(b) U*, U Haar, a, b ~ scale * N(0,1)
//   integer-entry       scale * (M + M*)/2 with M integer entries in [-3, 3] (real and imaginary)
EnsembleSample sample_ensemble(const EnsembleSpec& spec);

// Draws `count` Hermitian matrices of the given kind from one stream. For
// commuting-pair every member shares one Haar eigenbasis; other kinds draw members
// independently.
std::vector<HermitianMatrix> sample_family(const EnsembleSpec& spec, std::size_t count);

// Haar-distributed unitary (QR of complex Ginibre with phase correction).
CMatrix random_unitary(Eigen::Index d, Rng& rng);

// H^2 / scale: PSD, keeps the kind's structure (diagonal, low rank, commuting).
HermitianMatrix psd_variant(const HermitianMatrix& h, double scale);

}  // namespace mconc
