#include "mconc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mconc/parallel.hpp"

namespace mconc {

DifferenceBoundSet::DifferenceBoundSet(std::vector<HermitianMatrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw ConfigError("difference bound set must be nonempty");
  HermitianMatrix sum = HermitianMatrix::zero(matrices_.front().dim());
  for (const auto& a : matrices_) {
    require_same_dim(sum, a, "difference bound set");
    sum = sum + a.squared();
  }
  sum_of_squares_ = sum;
  sigma_sq_ = spectral_norm(sum_of_squares_);
}

DifferenceBoundSet DifferenceBoundSet::scaled(double s) const {
  std::vector<HermitianMatrix> m;
  m.reserve(matrices_.size());
  for (const auto& a : matrices_) m.push_back(a * s);
  return DifferenceBoundSet(std::move(m));
}

double variance_parameter(const DifferenceBoundSet& set) { return set.sigma_sq(); }

double dobrushin_constant(double norm1, double norm_inf) {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0)) throw HypothesisViolation(std::string(name) + " must be nonnegative");
    if (!(v < 1.0)) {
      throw HypothesisViolation(std::string("Dobrushin condition requires max(||D||_1, ||D||_inf) < 1; ") + name +
                                " = " + std::to_string(v));
    }
  };
  check(norm1, "||D||_1");
  check(norm_inf, "||D||_inf");
  return (1.0 / (1.0 - norm1) + 1.0 / (1.0 - norm_inf)) / 2.0;
}

double exponential_tail(double d, double sigma_sq, double factor, double t) {
  if (!(d >= 1.0)) throw ConfigError("dimension must be >= 1");
  if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
  if (!(sigma_sq >= 0.0)) throw ConfigError("sigma^2 must be >= 0");
  if (!(factor > 0.0)) throw ConfigError("exponent factor must be positive");
  if (t == 0.0) return d;
  if (sigma_sq == 0.0) return 0.0;
  const double b = d * std::exp(-(t * t) / (factor * sigma_sq));
  return std::min(std::max(b, 0.0), d);
}

double tail_bound_independent(double d, double sigma_sq, double t) {
  return exponential_tail(d, sigma_sq, kIndependentFactor, t);
}

double tail_bound_dependent(double d, double sigma_sq, double c, double t) {
  if (!(c >= 1.0)) throw HypothesisViolation("Dobrushin constant c must be >= 1");
  return exponential_tail(d, sigma_sq, c, t);
}

double hoeffding_bound(double d, double sigma_sq, double t) {
  return exponential_tail(d, sigma_sq, kHoeffdingFactor, t);
}

double hoeffding_bound_dependent(double d, double sigma_sq, double c, double t) {
  if (!(c >= 1.0)) throw HypothesisViolation("Dobrushin constant c must be >= 1");
  return exponential_tail(d, sigma_sq, kHoeffdingFactor * c, t);
}

double tropp_bound(double d, double sigma_sq, double t) { return exponential_tail(d, sigma_sq, kTroppFactor, t); }

LaplaceResult laplace_infimum(const std::function<double(double)>& log_mgf, double d, double t,
                              std::span<const double> theta_grid, LaplaceMode mode) {
  if (theta_grid.empty()) throw ConfigError("laplace_infimum: empty theta grid");
  LaplaceResult r;
  double best = std::numeric_limits<double>::infinity();
  for (double theta : theta_grid) {
    if (mode == LaplaceMode::lambda_max ? !(theta > 0.0) : !(theta < 0.0)) {
      throw ConfigError("laplace_infimum: theta grid has wrong sign for the requested mode");
    }
    const double lm = log_mgf(theta);
    if (std::isnan(lm)) throw NumericalError("laplace_infimum: log mgf is NaN at theta = " + std::to_string(theta));
    const double exponent = -theta * t + lm;
    if (exponent < best) {
      best = exponent;
      r.argmin_theta = theta;
    }
  }
  r.bound = d * std::exp(best);
  return r;
}

LaplaceResult laplace_infimum_quadratic(double d, double v, double t, std::span<const double> theta_grid) {
  if (!(v > 0.0)) throw ConfigError("laplace_infimum_quadratic: v must be positive");
  LaplaceResult r = laplace_infimum([v](double th) { return 0.25 * th * th * v; }, d, t, theta_grid);
  r.closed_form_theta = 2.0 * t / v;
  r.closed_form_bound = d * std::exp(-(t * t) / v);
  r.consistent = r.bound >= *r.closed_form_bound * (1.0 - 1e-12);
  return r;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw ConfigError("grid count must be >= 1");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

TrMgfEstimate trace_mgf_estimate(std::span<const HermitianMatrix> samples, std::span<const double> theta_grid,
                                 unsigned threads) {
  if (samples.empty()) throw ConfigError("trace_mgf_estimate: no samples");
  const Eigen::Index d = samples.front().dim();
  for (const auto& s : samples) require_same_dim(samples.front(), s, "trace_mgf_estimate");
  const std::size_t n = samples.size();
  const std::size_t g = theta_grid.size();

  // values[point * n + sample]
  std::vector<double> values(g * n);
  parallel_for(n, threads, [&](std::size_t s) {
    const RVector ev = eigenvalues(samples[s]);
    for (std::size_t p = 0; p < g; ++p) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) acc += std::exp(theta_grid[p] * ev(i));
      values[p * n + s] = acc / static_cast<double>(d);
    }
  });

  TrMgfEstimate out;
  out.theta_grid.assign(theta_grid.begin(), theta_grid.end());
  out.sample_count = n;
  std::vector<double> sq(n);
  for (std::size_t p = 0; p < g; ++p) {
    std::span<const double> row(values.data() + p * n, n);
    bool overflow = false;
    for (double v : row) overflow = overflow || !std::isfinite(v);
    const bool constant = std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; });
    double mean = constant ? row[0] : pairwise_sum(row) / static_cast<double>(n);
    if (theta_grid[p] == 0.0) mean = 1.0;
    double se = 0.0;
    if (!overflow && !constant && n > 1 && theta_grid[p] != 0.0) {
      for (std::size_t s = 0; s < n; ++s) sq[s] = (row[s] - mean) * (row[s] - mean);
      const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
      se = std::sqrt(var / static_cast<double>(n));
    }
    out.values.push_back(mean);
    out.standard_errors.push_back(overflow ? std::numeric_limits<double>::quiet_NaN() : se);
    out.overflow.push_back(overflow);
  }
  return out;
}

}  // namespace mconc
