#include <cmath>

#include <gtest/gtest.h>

#include "mconc/bounds.hpp"
#include "mconc/ensemble.hpp"
#include "mconc/errors.hpp"
#include "mconc/mc_tail.hpp"
#include "mconc/observable.hpp"

using namespace mconc;

namespace {

std::vector<HermitianMatrix> terms(std::size_t n, std::uint64_t seed) {
  return sample_family({EnsembleKind::gaussian_hermitian, 2, 1.0, seed}, n);
}

WilsonInterval wilson_oracle(double k, double n, double z) {
  const double p = k / n;
  const double denom = 1 + z * z / n;
  const double center = (p + z * z / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {center - half, center + half};
}

}  // namespace

TEST(Observable, RademacherSumBoundsAreDoubled) {
  const auto t = terms(3, 1);
  const auto h = rademacher_sum(t);
  ASSERT_TRUE(h.difference_bounds.has_value());
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(h.difference_bounds->matrices()[k].matrix(), (t[k] * 2.0).matrix());
  }
  const auto model = DiscreteModel::rademacher(3);
  const auto ok = check_difference_bounds(model, h, *h.difference_bounds, 1e-10);
  EXPECT_TRUE(ok.holds);
  EXPECT_EQ(ok.swaps_checked, 8u * 3u);
  EXPECT_NEAR(ok.min_slack, 0.0, 1e-10);
  const auto half = check_difference_bounds(model, h, DifferenceBoundSet(t), 1e-10);
  EXPECT_FALSE(half.holds);
  const auto sampled = check_difference_bounds(model, h, *h.difference_bounds, 1e-10, 50, 3);
  EXPECT_TRUE(sampled.holds);
}

TEST(Observable, ExactMeanSources) {
  const auto t = terms(4, 2);
  const auto h = rademacher_sum(t);
  const auto fair = DiscreteModel::rademacher(4);
  EXPECT_LE(exact_mean(fair, h)->max_abs_entry(), 1e-15);
  // Biased spins: E H = sum_k (2 p_k - 1) T_k.
  const auto biased = DiscreteModel::product({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}},
                                             {{0.25, 0.75}, {0.5, 0.5}, {0.9, 0.1}, {0.4, 0.6}});
  HermitianMatrix want = t[0] * 0.5 + t[2] * -0.8 + t[3] * 0.2;
  EXPECT_LE((*exact_mean(biased, h) - want).max_abs_entry(), 1e-14);
  const auto big = DiscreteModel::rademacher(40);
  const auto nonlinear = scalar_observable([](std::span<const int> v) { return v[0] * v[1]; });
  EXPECT_FALSE(exact_mean(big, nonlinear).has_value());
  EXPECT_TRUE(exact_mean(DiscreteModel::rademacher(40), rademacher_sum(terms(40, 3))).has_value());
}

TEST(Wilson, MatchesClosedForm) {
  for (std::size_t n : {10u, 100u, 100000u}) {
    for (std::size_t k : {std::size_t{0}, n / 3, n}) {
      const auto w = wilson_interval(k, n);
      const auto o = wilson_oracle(double(k), double(n), kWilsonZ95);
      EXPECT_NEAR(w.low, std::max(0.0, o.low), 1e-14);
      EXPECT_NEAR(w.high, std::min(1.0, o.high), 1e-14);
      EXPECT_LE(w.low, double(k) / n);
      EXPECT_GE(w.high, double(k) / n);
    }
  }
}

TEST(McTail, ConstantObservable) {
  const auto model = DiscreteModel::rademacher(5);
  const std::vector<HermitianMatrix> table(32, HermitianMatrix::diagonal({2.0, -1.0}));
  const auto h = table_observable(model, table);
  const std::vector<double> grid = {0.0, 0.1, 1.0};
  const auto r = mc_tail_estimate(model, h, grid, 1000, 1);
  EXPECT_EQ(r.mean_source, MeanSource::exact);
  EXPECT_NEAR(r.max_lambda, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.points[0].empirical, 1.0);
  EXPECT_DOUBLE_EQ(r.points[1].empirical, 0.0);
  EXPECT_DOUBLE_EQ(r.points[2].empirical, 0.0);
}

TEST(McTail, BelowMinimumGivesOne) {
  const auto model = DiscreteModel::rademacher(6);
  const auto h = rademacher_sum(terms(6, 4));
  const auto probe = mc_tail_estimate(model, h, {0.0}, 2000, 9);
  const std::vector<double> grid = {probe.min_lambda - 1e-9, probe.min_lambda - 1.0};
  const auto r = mc_tail_estimate(model, h, grid, 2000, 9);
  for (const auto& p : r.points) {
    EXPECT_DOUBLE_EQ(p.empirical, 1.0);
    EXPECT_EQ(p.exceedances, 2000u);
  }
}

TEST(McTail, AgreesWithExactTail) {
  const auto model = DiscreteModel::rademacher(8);
  const auto h = rademacher_sum(terms(8, 5));
  const std::vector<double> grid = linear_grid(0.0, 3.0, 13);
  const auto ex = exact_tail(model, h, grid);
  const auto mc = mc_tail_estimate(model, h, grid, 20000, 6);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(ex.points[i].ci_low, ex.points[i].empirical);
    const double p = ex.points[i].empirical;
    EXPECT_LE(std::abs(mc.points[i].empirical - p), 4 * std::sqrt(p * (1 - p) / 20000) + 1e-12);
  }
}

TEST(McTail, DeterministicAndThreadIndependent) {
  const auto model = DiscreteModel::rademacher(10);
  const auto h = rademacher_sum(terms(10, 6));
  const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0};
  McTailOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = mc_tail_estimate(model, h, grid, 5000, 7, one);
  const auto b = mc_tail_estimate(model, h, grid, 5000, 7, four);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(a.points[i].exceedances, b.points[i].exceedances);
    EXPECT_EQ(a.points[i].ci_high, b.points[i].ci_high);
  }
  EXPECT_EQ(a.max_lambda, b.max_lambda);
}

TEST(McTail, PilotMeanForNonlinearLargeModel) {
  const auto model = DiscreteModel::rademacher(40);
  const auto h = scalar_observable([](std::span<const int> v) { return v[0] * v[1] + 0.5; });
  McTailOptions opt;
  opt.pilot_samples = 20000;
  const auto r = mc_tail_estimate(model, h, {0.0, 1.0}, 1000, 8, opt);
  EXPECT_EQ(r.mean_source, MeanSource::pilot);
  EXPECT_NEAR(r.mean(0, 0).real(), 0.5, 0.05);
}

TEST(McTail, RademacherSumDominatedByHoeffding) {
  const std::size_t n = 20;
  const auto t = terms(n, 7);
  const auto h = rademacher_sum(t);
  const double sigma_sq = DifferenceBoundSet(t).sigma_sq();
  const double sigma = std::sqrt(sigma_sq);
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.25 * i * sigma);
  const auto r = mc_tail_estimate(DiscreteModel::rademacher(n), h, grid, 20000, 11);
  EXPECT_EQ(r.mean_source, MeanSource::linear_terms);
  for (const auto& p : r.points) {
    EXPECT_LE(p.empirical, hoeffding_bound(2, sigma_sq, p.t) + (p.ci_high - p.ci_low) / 2) << p.t;
  }
}

TEST(McTail, RejectsZeroSamples) {
  EXPECT_THROW(mc_tail_estimate(DiscreteModel::rademacher(2), rademacher_sum(terms(2, 1)), {0.0}, 0, 1), ConfigError);
}
