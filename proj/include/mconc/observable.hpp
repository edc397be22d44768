#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mconc/bounds.hpp"
#include "mconc/discrete_model.hpp"
#include "mconc/hermitian.hpp"

namespace mconc {

// H: configuration values -> Hermitian matrix of fixed dimension.
struct MatrixObservable {
  Eigen::Index dim = 1;
  std::function<HermitianMatrix(std::span<const int>)> evaluate;
  // Per-site bounds A_k with (H(.., z_k, ..) - H(.., z_k', ..))^2 <= A_k^2.
  std::optional<DifferenceBoundSet> difference_bounds;
  // Nonempty when H(z) = sum_k z_k T_k; lets the mean be computed exactly.
  std::vector<HermitianMatrix> linear_terms;

  HermitianMatrix operator()(const DiscreteModel& model, const Config& x) const;
};

// H(z) = sum_k z_k A_k for z_k in {-1, +1}; difference bounds 2 A_k.
MatrixObservable rademacher_sum(std::vector<HermitianMatrix> terms);

// One matrix per configuration index of `model`.
MatrixObservable table_observable(const DiscreteModel& model, std::vector<HermitianMatrix> table);

// 1x1 observable from a scalar function of the values.
MatrixObservable scalar_observable(std::function<double(std::span<const int>)> f);

// E H(Z): exact over the enumerated pmf, or from linear terms and exact marginals.
// Returns nullopt when neither is available.
std::optional<HermitianMatrix> exact_mean(const DiscreteModel& model, const MatrixObservable& h);

struct DifferenceBoundCheck {
  bool holds = true;
  double min_slack = 0.0;  // min lambda_min(A_k^2 - (H - H')^2) over checked swaps
  std::size_t swaps_checked = 0;
};

// Checks the bounded-differences condition on every single-site swap of every
// configuration (enumerable models), or on `samples` random configurations.
DifferenceBoundCheck check_difference_bounds(const DiscreteModel& model, const MatrixObservable& h,
                                             const DifferenceBoundSet& bounds, double tol,
                                             std::size_t samples = 0, std::uint64_t seed = 0);

}  // namespace mconc
