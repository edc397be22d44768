#include "mconc/mc_tail.hpp"

#include <algorithm>
#include <cmath>

#include "mconc/errors.hpp"
#include "mconc/parallel.hpp"

namespace mconc {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw DomainError("wilson_interval: no trials");
  if (successes > trials) throw DomainError("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Rounding can push an endpoint past the point estimate at p = 0 or 1.
  return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

const char* to_string(MeanSource source) {
  switch (source) {
    case MeanSource::exact:
      return "exact";
    case MeanSource::linear_terms:
      return "linear-terms";
    case MeanSource::pilot:
      return "pilot";
  }
  return "?";
}

McTailResult mc_tail_estimate(const DiscreteModel& model, const MatrixObservable& h, const std::vector<double>& t_grid,
                              std::size_t samples, std::uint64_t seed, const McTailOptions& options) {
  if (samples == 0) throw ConfigError("mc_tail_estimate: N must be >= 1");
  for (double t : t_grid) {
    if (!std::isfinite(t)) throw ConfigError("mc_tail_estimate: t grid must be finite");
  }
  const unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;
  McTailResult out;
  out.samples = samples;

  if (auto m = exact_mean(model, h)) {
    out.mean = *m;
    out.mean_source = model.enumerable() ? MeanSource::exact : MeanSource::linear_terms;
  } else {
    if (options.pilot_samples == 0) throw ConfigError("mc_tail_estimate: pilot sample size must be >= 1");
    std::vector<CMatrix> draws(options.pilot_samples);
    parallel_for(options.pilot_samples, threads, [&](std::size_t j) {
      Rng rng = make_rng(seed, j, 1);
      draws[j] = h(model, model.sample(rng)).matrix();
    });
    CMatrix acc = CMatrix::Zero(h.dim, h.dim);
    for (const auto& d : draws) acc += d;
    out.mean = HermitianMatrix::symmetrized(acc / static_cast<double>(options.pilot_samples));
    out.mean_source = MeanSource::pilot;
  }

  std::vector<double> lam(samples);
  parallel_for(samples, threads, [&](std::size_t j) {
    Rng rng = make_rng(seed, j, 0);
    lam[j] = lambda_max(h(model, model.sample(rng)) - out.mean);
  });
  out.max_lambda = *std::max_element(lam.begin(), lam.end());
  out.min_lambda = *std::min_element(lam.begin(), lam.end());
  std::vector<double> sorted = lam;
  std::sort(sorted.begin(), sorted.end());
  for (double t : t_grid) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    const auto count = static_cast<std::size_t>(sorted.end() - it);
    const WilsonInterval ci = wilson_interval(count, samples);
    out.points.push_back({t, static_cast<double>(count) / static_cast<double>(samples), ci.low, ci.high, count});
  }
  return out;
}

McTailResult exact_tail(const DiscreteModel& model, const MatrixObservable& h, const std::vector<double>& t_grid) {
  model.require_enumerable("exact_tail");
  const auto& pmf = model.joint_pmf();
  McTailResult out;
  out.samples = pmf.size();
  out.mean_source = MeanSource::exact;
  out.mean = *exact_mean(model, h);
  std::vector<double> lam(pmf.size());
  for (std::size_t k = 0; k < pmf.size(); ++k) lam[k] = lambda_max(h(model, model.decode(k)) - out.mean);
  out.max_lambda = *std::max_element(lam.begin(), lam.end());
  out.min_lambda = *std::min_element(lam.begin(), lam.end());
  for (double t : t_grid) {
    double p = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      if (lam[k] >= t) {
        p += pmf[k];
        ++count;
      }
    }
    p = std::min(1.0, p);
    out.points.push_back({t, p, p, p, count});
  }
  return out;
}

}  // namespace mconc
