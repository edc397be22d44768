#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mconc/discrete_model.hpp"
#include "mconc/hermitian.hpp"
#include "mconc/observable.hpp"

namespace mconc {

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct WilsonInterval {
  double low;
  double high;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kWilsonZ95);

enum class MeanSource { exact, linear_terms, pilot };

const char* to_string(MeanSource source);

struct McTailOptions {
  std::size_t pilot_samples = 100'000;  // used only when the mean cannot be computed exactly
  unsigned threads = 0;
};

struct McTailPoint {
  double t;
  double empirical;
  double ci_low;
  double ci_high;
  std::size_t exceedances;
};

struct McTailResult {
  std::vector<McTailPoint> points;
  std::size_t samples = 0;
  MeanSource mean_source = MeanSource::exact;
  HermitianMatrix mean = HermitianMatrix::zero(1);
  double max_lambda = 0.0;
  double min_lambda = 0.0;
};

// Fraction of N draws Z ~ mu with lambda_max(H(Z) - E H) >= t, per t, with Wilson
// 95% intervals. Sample j uses stream (seed, j, 0); the pilot uses (seed, j, 1).
McTailResult mc_tail_estimate(const DiscreteModel& model, const MatrixObservable& h, const std::vector<double>& t_grid,
                              std::size_t samples, std::uint64_t seed, const McTailOptions& options = {});

// P(lambda_max(H(Z) - E H) >= t) by enumeration; intervals collapse to the value.
McTailResult exact_tail(const DiscreteModel& model, const MatrixObservable& h, const std::vector<double>& t_grid);

}  // namespace mconc
