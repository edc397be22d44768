#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mconc/hermitian.hpp"

namespace mconc {

// Fixed difference bounds {A_k} and the variance parameter ||sum_k A_k^2||.
class DifferenceBoundSet {
 public:
  explicit DifferenceBoundSet(std::vector<HermitianMatrix> matrices);

  const std::vector<HermitianMatrix>& matrices() const { return matrices_; }
  const HermitianMatrix& sum_of_squares() const { return sum_of_squares_; }
  double sigma_sq() const { return sigma_sq_; }
  Eigen::Index dim() const { return sum_of_squares_.dim(); }

  // Every A_k multiplied by s (sigma^2 scales by s^2).
  DifferenceBoundSet scaled(double s) const;

 private:
  std::vector<HermitianMatrix> matrices_;
  HermitianMatrix sum_of_squares_;
  double sigma_sq_ = 0.0;
};

double variance_parameter(const DifferenceBoundSet& set);

// (1/(1 - norm1) + 1/(1 - norm_inf)) / 2; both norms must lie in [0, 1).
double dobrushin_constant(double norm1, double norm_inf);

// The bound d * exp(-t^2 / (factor * sigma^2)). factor is 1 for the independent
// bounded-differences bound, c for the dependent one, 4 (resp. 4c) for Hoeffding and
// 8 for the Tropp comparison. Unclamped; use clamp_display for probabilities.
double exponential_tail(double d, double sigma_sq, double factor, double t);

inline constexpr double kIndependentFactor = 1.0;
inline constexpr double kHoeffdingFactor = 4.0;
inline constexpr double kTroppFactor = 8.0;

double tail_bound_independent(double d, double sigma_sq, double t);
double tail_bound_dependent(double d, double sigma_sq, double c, double t);
double hoeffding_bound(double d, double sigma_sq, double t);
double hoeffding_bound_dependent(double d, double sigma_sq, double c, double t);
double tropp_bound(double d, double sigma_sq, double t);

inline double clamp_display(double bound) { return bound < 1.0 ? bound : 1.0; }

enum class LaplaceMode { lambda_max, lambda_min };

struct LaplaceResult {
  double bound = 0.0;
  double argmin_theta = 0.0;
  // Quadratic profile only.
  std::optional<double> closed_form_bound;
  std::optional<double> closed_form_theta;
  bool consistent = true;  // grid minimum >= closed form - tolerance
};

// d * min over grid of exp(-theta t + log m(theta)). lambda_max mode needs a positive
// grid, lambda_min mode a negative one.
LaplaceResult laplace_infimum(const std::function<double(double)>& log_mgf, double d, double t,
                              std::span<const double> theta_grid, LaplaceMode mode = LaplaceMode::lambda_max);

// Quadratic profile log m(theta) = theta^2 v / 4, with the closed-form optimum
// theta* = 2t/v, bound d * exp(-t^2 / v).
LaplaceResult laplace_infimum_quadratic(double d, double v, double t, std::span<const double> theta_grid);

std::vector<double> linear_grid(double lo, double hi, std::size_t count);

struct TrMgfEstimate {
  std::vector<double> theta_grid;
  std::vector<double> values;           // (1/d) E Tr e^{theta X}
  std::vector<double> standard_errors;  // per grid point
  std::vector<bool> overflow;           // non-finite sample value at this point
  std::size_t sample_count = 0;
};

TrMgfEstimate trace_mgf_estimate(std::span<const HermitianMatrix> samples, std::span<const double> theta_grid,
                                 unsigned threads = 1);

}  // namespace mconc
