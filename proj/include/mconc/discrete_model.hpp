#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mconc/rng.hpp"

namespace mconc {

// Alphabet indices, one per site. Observables see alphabet values (model.values(cfg)).
using Config = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

// n-site model on a finite product space with strictly positive weights. The joint
// pmf is materialized when the product space fits under the enumeration cap; product
// models additionally keep exact per-site marginals so they can be sampled at any size.
class DiscreteModel {
 public:
  using LogWeight = std::function<double(std::span<const int>)>;

  static DiscreteModel from_log_weight(std::vector<std::vector<int>> alphabets, LogWeight log_weight,
                                       std::uint64_t cap = kDefaultEnumerationCap);
  // weights indexed by configuration index (site 0 most significant).
  static DiscreteModel table(std::vector<std::vector<int>> alphabets, std::vector<double> weights,
                             std::uint64_t cap = kDefaultEnumerationCap);
  // Spins in {-1, +1}; weight exp(sum_{i<j} beta_ij x_i x_j + sum_i h_i x_i).
  static DiscreteModel ising(const Eigen::MatrixXd& beta, const Eigen::VectorXd& field,
                             std::uint64_t cap = kDefaultEnumerationCap);
  // Independent sites; marginal weights need not be normalized.
  static DiscreteModel product(std::vector<std::vector<int>> alphabets, std::vector<std::vector<double>> marginals,
                               std::uint64_t cap = kDefaultEnumerationCap);
  static DiscreteModel uniform(std::vector<std::vector<int>> alphabets, std::uint64_t cap = kDefaultEnumerationCap);
  // n independent uniform +-1 sites.
  static DiscreteModel rademacher(std::size_t n, std::uint64_t cap = kDefaultEnumerationCap);

  std::size_t sites() const { return alphabets_.size(); }
  const std::vector<int>& alphabet(std::size_t i) const { return alphabets_[i]; }
  std::size_t alphabet_size(std::size_t i) const { return alphabets_[i].size(); }

  // Saturates at UINT64_MAX.
  std::uint64_t state_count() const { return state_count_; }
  bool enumerable() const { return pmf_.has_value(); }
  bool is_product() const { return marginals_.has_value(); }
  std::uint64_t enumeration_cap() const { return cap_; }

  // Throws EnumerationCapError when not enumerable.
  const std::vector<double>& joint_pmf() const;
  void require_enumerable(const char* what) const;

  std::size_t encode(const Config& x) const;
  Config decode(std::size_t index) const;
  std::vector<int> values(const Config& x) const;

  double log_weight(const Config& x) const;

  // mu_i(. | x_{-i}); ignores x[i].
  std::vector<double> conditional(std::size_t i, const Config& x) const;
  std::vector<double> marginal(std::size_t i) const;

  // Exact draw from mu (product sampling or the enumerated pmf).
  Config sample(Rng& rng) const;

 private:
  DiscreteModel() = default;
  void finalize();

  std::vector<std::vector<int>> alphabets_;
  LogWeight log_weight_;
  std::uint64_t cap_ = kDefaultEnumerationCap;
  std::uint64_t state_count_ = 0;
  std::optional<std::vector<double>> pmf_;
  std::optional<std::vector<double>> cdf_;
  std::optional<std::vector<std::vector<double>>> marginals_;
};

// Draws an index from a pmf by inversion.
std::size_t sample_index(std::span<const double> pmf, Rng& rng);

// Model file: { "n", "alphabets": [[values]...], "weight": {"kind": "table"|"ising"|"product", ...} }.
//   table:   "weights": [w_0, ..., w_{S-1}] by configuration index
//   ising:   "beta": n x n coupling matrix, "h": [fields] (alphabets must be [-1, 1])
//   product: "marginals": [[w_i(v) ...] ...]
DiscreteModel model_from_json(const nlohmann::json& j, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace mconc
