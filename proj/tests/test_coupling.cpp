#include <cmath>

#include <gtest/gtest.h>

#include "mconc/coupling.hpp"
#include "mconc/dobrushin.hpp"
#include "mconc/ensemble.hpp"
#include "mconc/errors.hpp"

using namespace mconc;

namespace {

DiscreteModel ising(std::size_t n, double beta) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i + 1 < b.rows(); ++i) b(i, i + 1) = b(i + 1, i) = beta;
  return DiscreteModel::ising(b, Eigen::VectorXd::Zero(b.rows()));
}

MatrixObservable sum_observable() {
  return scalar_observable([](std::span<const int> v) {
    double s = 0.0;
    for (int x : v) s += x;
    return s;
  });
}

std::vector<HermitianMatrix> random_terms(std::size_t n, std::uint64_t seed) {
  return sample_family({EnsembleKind::gaussian_hermitian, 2, 1.0, seed}, n);
}

}  // namespace

TEST(MaximalCoupling, Examples) {
  Rng rng = make_rng(1, 0);
  const std::vector<double> p = {0.3, 0.7};
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = maximal_coupling(p, p, rng);
    EXPECT_EQ(a, b);
  }
  const std::vector<double> e0 = {1.0, 0.0}, e1 = {0.0, 1.0};
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = maximal_coupling(e0, e1, rng);
    EXPECT_EQ(a, 0u);
    EXPECT_EQ(b, 1u);
  }
  const std::vector<double> three = {0.2, 0.3, 0.5};
  EXPECT_THROW(maximal_coupling(p, three, rng), DimensionMismatch);
}

TEST(MaximalCoupling, BernoulliStatistics) {
  const std::vector<double> p = {0.2, 0.8}, q = {0.5, 0.5};
  Rng rng = make_rng(2, 0);
  const int n = 100000;
  int equal = 0, a1 = 0, b1 = 0;
  for (int t = 0; t < n; ++t) {
    const auto [a, b] = maximal_coupling(p, q, rng);
    equal += a == b;
    a1 += a == 1;
    b1 += b == 1;
  }
  const double se = std::sqrt(0.7 * 0.3 / n);
  EXPECT_LE(std::abs(equal / double(n) - 0.7), 3 * se);
  EXPECT_LE(std::abs(a1 / double(n) - 0.8), 3 * std::sqrt(0.16 / n));
  EXPECT_LE(std::abs(b1 / double(n) - 0.5), 3 * std::sqrt(0.25 / n));
}

TEST(MaximalCoupling, JointHasRightMarginalsAndDiagonal) {
  const std::vector<double> p = {0.1, 0.6, 0.3}, q = {0.4, 0.4, 0.2};
  const Eigen::MatrixXd j = maximal_coupling_joint(p, q);
  for (int a = 0; a < 3; ++a) {
    EXPECT_NEAR(j.row(a).sum(), p[a], 1e-15);
    EXPECT_NEAR(j.col(a).sum(), q[a], 1e-15);
  }
  EXPECT_NEAR(j.trace(), 1.0 - tv_distance(p, q), 1e-15);
  EXPECT_GE(j.minCoeff(), 0.0);
}

TEST(ExchangeablePair, SingleSiteAndProductStructure) {
  const auto one = DiscreteModel::product({{0, 1, 2}}, {{1, 2, 3}});
  Rng rng = make_rng(3, 0);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(make_exchangeable_pair(one, rng).site, 0u);
  const auto prod = DiscreteModel::rademacher(5);
  for (int t = 0; t < 1000; ++t) {
    const auto pr = make_exchangeable_pair(prod, rng);
    int diff = 0;
    for (std::size_t i = 0; i < 5; ++i) diff += pr.x[i] != pr.xp[i];
    EXPECT_LE(diff, 1);
    if (diff == 1) EXPECT_NE(pr.x[pr.site], pr.xp[pr.site]);
  }
}

TEST(ExchangeablePair, JointIsSymmetric) {
  for (const auto& model : {ising(2, 0.25), ising(3, 0.4), DiscreteModel::product({{0, 1}, {0, 1, 2}}, {{1, 3}, {1, 2, 4}})}) {
    const Eigen::MatrixXd j = exchangeable_pair_joint(model);
    EXPECT_NEAR(j.sum(), 1.0, 1e-12);
    EXPECT_LE((j - j.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExchangeablePair, SamplerMatchesExactJoint) {
  const auto model = ising(2, 0.25);
  const Eigen::MatrixXd j = exchangeable_pair_joint(model);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(4, 4);
  Rng rng = make_rng(5, 0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto pr = make_exchangeable_pair(model, rng);
    counts(static_cast<Eigen::Index>(model.encode(pr.x)), static_cast<Eigen::Index>(model.encode(pr.xp))) += 1.0;
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double p = j(a, b);
      EXPECT_LE(std::abs(counts(a, b) / n - p), 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
  }
}

TEST(StepIndependent, AgreementIsAbsorbing) {
  const auto model = DiscreteModel::rademacher(4);
  Rng rng = make_rng(6, 0);
  for (int r = 0; r < 200; ++r) {
    CouplingState s = initial_state(make_exchangeable_pair(model, rng));
    std::vector<int> prev = s.disagreement();
    const auto zero = run_coupling(CouplingKind::independent, s, model, 0, rng);
    EXPECT_EQ(zero.x, s.x);
    EXPECT_EQ(zero.xp, s.xp);
    for (int k = 0; k < 15; ++k) {
      s = step_independent(s, model, rng);
      const auto l = s.disagreement();
      EXPECT_EQ(l[s.history.back()], 0);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(l[i], prev[i]);
      prev = l;
    }
  }
  EXPECT_THROW(step_independent(initial_state({0, 0}, {1, 1}), ising(2, 0.3), rng), HypothesisViolation);
}

TEST(StepIndependent, CouponCollectorSurvival) {
  const std::size_t n = 4, k = 5;
  const auto model = DiscreteModel::rademacher(n);
  Rng rng = make_rng(7, 0);
  const int runs = 100000;
  int never = 0;
  for (int r = 0; r < runs; ++r) {
    const auto s = run_coupling(CouplingKind::independent, initial_state({0, 0, 0, 0}, {1, 0, 0, 0}), model, k, rng);
    bool hit = false;
    for (std::size_t t = 1; t < s.history.size(); ++t) hit = hit || s.history[t] == 0;
    never += !hit;
    EXPECT_EQ(s.disagreement()[0], hit ? 0 : 1);
  }
  const double p = coupon_collector_survival(n, k);
  EXPECT_NEAR(p, std::pow(0.75, 5), 1e-15);
  EXPECT_LE(std::abs(never / double(runs) - p), 3 * std::sqrt(p * (1 - p) / runs));
}

TEST(StepGreedy, EqualStatesStayEqualAndProductReduces) {
  const auto model = ising(3, 0.5);
  Rng rng = make_rng(8, 0);
  CouplingState s = initial_state({0, 1, 0}, {0, 1, 0});
  for (int k = 0; k < 50; ++k) {
    s = step_greedy(s, model, rng);
    EXPECT_EQ(s.x, s.xp);
  }
  // On a product model the greedy kernel equals the independent one.
  const auto prod = DiscreteModel::product({{0, 1}, {0, 1, 2}}, {{1, 3}, {2, 1, 1}});
  PairDistribution g(prod, CouplingKind::greedy), ind(prod, CouplingKind::independent);
  g.reset(1, 4);
  ind.reset(1, 4);
  for (int k = 0; k < 5; ++k) {
    g.advance();
    ind.advance();
    for (std::size_t i = 0; i < g.mass().size(); ++i) EXPECT_NEAR(g.mass()[i], ind.mass()[i], 1e-15);
  }
}

TEST(StepGreedy, MarginalKernelIsGibbs) {
  for (const auto& model : {ising(2, 0.25), ising(3, 0.6)}) {
    const Eigen::MatrixXd p = gibbs_kernel(model);
    const std::size_t s = model.state_count();
    PairDistribution pd(model, CouplingKind::greedy);
    for (std::size_t x = 0; x < s; ++x) {
      for (std::size_t y = 0; y < s; ++y) {
        pd.reset(x, y);
        pd.advance();
        const auto m1 = pd.first_marginal(), m2 = pd.second_marginal();
        for (std::size_t z = 0; z < s; ++z) {
          EXPECT_NEAR(m1[z], p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z)), 1e-12);
          EXPECT_NEAR(m2[z], p(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z)), 1e-12);
        }
      }
    }
  }
}

TEST(StepGreedy, SampledStepMatchesPairDistribution) {
  const auto model = ising(2, 0.7);
  PairDistribution pd(model, CouplingKind::greedy);
  pd.reset(0, 3);
  pd.advance();
  std::vector<double> counts(16, 0.0);
  Rng rng = make_rng(9, 0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto s = step_greedy(initial_state(model.decode(0), model.decode(3)), model, rng);
    counts[model.encode(s.x) * 4 + model.encode(s.xp)] += 1.0;
  }
  for (std::size_t i = 0; i < 16; ++i) {
    const double p = pd.mass()[i];
    EXPECT_LE(std::abs(counts[i] / n - p), 4 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
}

TEST(PropertyP, Examples) {
  const auto indep = DiscreteModel::rademacher(2);
  const auto r = verify_property_P(indep, CouplingKind::independent, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.max_deviation, 1e-12);
  EXPECT_LE(r.max_kernel_deviation, 1e-12);
  const auto g = verify_property_P(ising(2, 0.25), CouplingKind::greedy, 2);
  EXPECT_TRUE(g.holds);
  EXPECT_EQ(g.start_pairs, 16u);
  const auto k0 = verify_property_P(ising(2, 0.25), CouplingKind::greedy, 0);
  EXPECT_TRUE(k0.holds);
  EXPECT_EQ(k0.max_deviation, 0.0);
  EXPECT_TRUE(verify_property_P(ising(3, 0.4), CouplingKind::greedy, 6).holds);
}

TEST(AntisymmetricF, DiagonalVanishesAndAntisymmetry) {
  const auto model = ising(2, 0.25);
  const auto f = sum_observable();
  const auto zero = antisymmetric_F(model, CouplingKind::greedy, f, {0, 1}, {0, 1});
  EXPECT_EQ(zero.value.max_abs_entry(), 0.0);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      const auto fxy = antisymmetric_F(model, CouplingKind::greedy, f, model.decode(a), model.decode(b));
      const auto fyx = antisymmetric_F(model, CouplingKind::greedy, f, model.decode(b), model.decode(a));
      EXPECT_TRUE(fxy.exact);
      EXPECT_LE(fxy.tail_estimate, 1e-8);
      EXPECT_LE((fxy.value + fyx.value).max_abs_entry(), 1e-10);
    }
  }
}

TEST(AntisymmetricF, IndependentBinaryLemma) {
  const auto model = DiscreteModel::rademacher(2);
  const auto lc = check_antisymmetric_F(model, CouplingKind::independent, sum_observable());
  EXPECT_LE(lc.max_antisymmetry, 1e-10);
  EXPECT_LE(lc.max_mean_residual, 1e-8);
  EXPECT_GT(lc.pairs_evaluated, 0u);
  // Oracle: from (x, y) differing at one site j, the independent chain keeps the
  // disagreement until j is refreshed (geometric with mean n), so F = n (x_j - y_j).
  const auto f = antisymmetric_F(model, CouplingKind::independent, sum_observable(), {1, 0}, {0, 0});
  EXPECT_NEAR(f.value(0, 0).real(), 2.0 * 2.0, 1e-8);
}

TEST(AntisymmetricF, GreedyLemmaOnDependentModels) {
  for (const auto& model : {ising(2, 0.25), ising(3, 0.3)}) {
    const auto lc = check_antisymmetric_F(model, CouplingKind::greedy, sum_observable());
    EXPECT_LE(lc.max_antisymmetry, 1e-10);
    EXPECT_LE(lc.max_mean_residual, 1e-8);
  }
  const auto table = sample_family({EnsembleKind::gaussian_hermitian, 2, 1.0, 3}, 8);
  const auto model = ising(3, 0.3);
  const auto lc = check_antisymmetric_F(model, CouplingKind::greedy, table_observable(model, table));
  EXPECT_LE(lc.max_antisymmetry, 1e-10);
  EXPECT_LE(lc.max_mean_residual, 1e-8);
}

TEST(AntisymmetricF, TruncationFailureIsReported) {
  AntisymmetricFOptions opt;
  opt.max_steps = 2;
  EXPECT_THROW(antisymmetric_F(ising(2, 0.25), CouplingKind::greedy, sum_observable(), {0, 0}, {1, 1}, opt),
               NumericalError);
}

TEST(AntisymmetricF, MonteCarloModeAgreesWithExact) {
  const auto model = ising(2, 0.25);
  const auto exact = antisymmetric_F(model, CouplingKind::greedy, sum_observable(), {1, 1}, {0, 0});
  AntisymmetricFOptions opt;
  opt.runs = 20000;
  opt.seed = 11;
  const auto mc = antisymmetric_F(model, CouplingKind::greedy, sum_observable(), {1, 1}, {0, 0}, opt);
  EXPECT_FALSE(mc.exact);
  EXPECT_NEAR(mc.value(0, 0).real(), exact.value(0, 0).real(), 0.1);
}

TEST(SteinPair, RademacherSumHasScaleOneOverN) {
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    const auto model = DiscreteModel::rademacher(n);
    SteinPairSpec spec{&model, rademacher_sum(random_terms(n, n)), 1.0 / static_cast<double>(n)};
    const auto r = verify_stein_pair(spec);
    ASSERT_TRUE(r.alpha_hat.has_value());
    EXPECT_NEAR(*r.alpha_hat, 1.0 / static_cast<double>(n), 1e-12);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_TRUE(r.is_stein_pair);
    EXPECT_LT(*r.claimed_residual, 1e-10);
  }
}

TEST(SteinPair, DegenerateAndCentered) {
  const auto model = DiscreteModel::rademacher(3);
  const auto constant = scalar_observable([](std::span<const int>) { return 2.5; });
  const auto r = verify_stein_pair({&model, constant, std::nullopt});
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.alpha_hat.has_value());
  EXPECT_FALSE(r.is_stein_pair);
  // A shifted sum keeps the same scale after centering.
  const auto shifted = scalar_observable([](std::span<const int> v) { return 3.0 + v[0] + v[1] + v[2]; });
  const auto s = verify_stein_pair({&model, shifted, std::nullopt});
  ASSERT_TRUE(s.alpha_hat.has_value());
  EXPECT_NEAR(*s.alpha_hat, 1.0 / 3.0, 1e-12);
  // Degree-two terms contract twice as fast as linear ones, so no single scale fits.
  const auto quad = scalar_observable([](std::span<const int> v) { return v[0] + v[0] * v[1]; });
  const auto q = verify_stein_pair({&model, quad, std::nullopt});
  EXPECT_FALSE(q.is_stein_pair);
  EXPECT_GT(q.residual, 1e-3);
}

TEST(SteinPair, RejectsBadAlpha) {
  const auto model = DiscreteModel::rademacher(2);
  EXPECT_THROW(verify_stein_pair({&model, sum_observable(), 1.5}), ConfigError);
  EXPECT_THROW(verify_stein_pair({nullptr, sum_observable(), std::nullopt}), ConfigError);
}

TEST(Telescoping, Examples) {
  const auto model = DiscreteModel::uniform({{0, 1, 2}, {0, 1}, {0, 1, 2}, {0, 1}});
  const auto terms = sample_family({EnsembleKind::gaussian_hermitian, 3, 1.0, 12}, 4);
  const MatrixObservable f{3, [terms](std::span<const int> v) {
                             HermitianMatrix s = HermitianMatrix::zero(3);
                             for (std::size_t i = 0; i < v.size(); ++i) s = s + terms[i] * (v[i] * v[i] + 0.5 * v[i]);
                             return matrix_exp(s * 0.3);
                           }, std::nullopt, {}};
  const Config x = {0, 1, 2, 0};
  for (const auto& z : telescoping_decomposition(model, f, x, x)) EXPECT_EQ(z.max_abs_entry(), 0.0);
  Config y = x;
  y[2] = 1;
  const auto one = telescoping_decomposition(model, f, x, y);
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == 2) {
      EXPECT_GT(one[i].max_abs_entry(), 0.0);
    } else {
      EXPECT_EQ(one[i].max_abs_entry(), 0.0);
    }
  }
  Rng rng = make_rng(13, 0);
  for (int t = 0; t < 100; ++t) {
    const Config a = model.sample(rng), b = model.sample(rng);
    const auto zs = telescoping_decomposition(model, f, a, b);
    HermitianMatrix sum = HermitianMatrix::zero(3);
    for (const auto& z : zs) sum = sum + z;
    EXPECT_LT(spectral_norm(sum - (f(model, a) - f(model, b))), 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      if (a[i] == b[i]) EXPECT_EQ(zs[i].max_abs_entry(), 0.0);
    }
  }
}

TEST(CouponCollector, Examples) {
  EXPECT_DOUBLE_EQ(coupon_collector_survival(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(coupon_collector_survival(7, 0), 1.0);
  EXPECT_DOUBLE_EQ(coupon_collector_weighted(4, 0), 0.25);
  for (std::size_t n : {1u, 2u, 5u, 10u}) {
    double s = 0.0;
    for (std::size_t k = 0; k < 2000; ++k) s += coupon_collector_weighted(n, k);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Disagreement, TwoSiteIsingDominatedByBPowers) {
  const auto model = ising(2, 0.25);
  const auto b = b_matrix(dobrushin_matrix(model).entries);
  const auto prof = disagreement_profile(model, CouplingKind::greedy, 20, 20000, 5, 1);
  EXPECT_EQ(prof.runs[0] + prof.runs[1], 20000u);
  const auto rep = check_disagreement_domination(prof, b, 3.0);
  EXPECT_TRUE(rep.holds) << rep.max_excess;
}

TEST(Disagreement, ProfileIsThreadIndependent) {
  const auto model = ising(3, 0.3);
  const auto a = disagreement_profile(model, CouplingKind::greedy, 5, 3000, 9, 1);
  const auto c = disagreement_profile(model, CouplingKind::greedy, 5, 3000, 9, 3);
  EXPECT_EQ(a.runs, c.runs);
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    EXPECT_EQ(a.mean[i], c.mean[i]);
    EXPECT_EQ(a.standard_error[i], c.standard_error[i]);
  }
}

TEST(Disagreement, ViolatedBoundIsDetected) {
  const auto model = ising(2, 0.25);
  const auto prof = disagreement_profile(model, CouplingKind::greedy, 3, 5000, 5, 1);
  const auto rep = check_disagreement_domination(prof, Eigen::MatrixXd::Zero(2, 2), 3.0);
  EXPECT_FALSE(rep.holds);
  EXPECT_GT(rep.max_excess, 0.0);
}

TEST(IndependentCase, SquaredDifferenceDominatedByBound) {
  const std::size_t n = 4;
  const auto model = DiscreteModel::rademacher(n);
  const auto h = rademacher_sum(random_terms(n, 21));
  const auto& bounds = h.difference_bounds->matrices();
  Rng rng = make_rng(22, 0);
  for (int r = 0; r < 500; ++r) {
    const auto pair = make_exchangeable_pair(model, rng);
    CouplingState s = initial_state(pair);
    for (int k = 0; k <= 10; ++k) {
      const HermitianMatrix diff = h(model, s.x) - h(model, s.xp);
      const HermitianMatrix a = bounds[pair.site];
      EXPECT_TRUE(psd_order_leq(diff.squared(), a.squared(), 1e-10).holds);
      s = step_independent(s, model, rng);
    }
  }
}

TEST(CouplingKind, Names) {
  EXPECT_EQ(parse_coupling_kind("greedy"), CouplingKind::greedy);
  EXPECT_EQ(parse_coupling_kind(to_string(CouplingKind::independent)), CouplingKind::independent);
  EXPECT_THROW(parse_coupling_kind("maximal"), ConfigError);
}
