#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mconc/discrete_model.hpp"
#include "mconc/hermitian.hpp"
#include "mconc/observable.hpp"
#include "mconc/rng.hpp"

namespace mconc {

enum class CouplingKind { independent, greedy };

const char* to_string(CouplingKind kind);
CouplingKind parse_coupling_kind(const std::string& name);

// Draws (a, b) with a ~ p, b ~ q and P(a = b) = 1 - tv(p, q).
std::pair<std::size_t, std::size_t> maximal_coupling(std::span<const double> p, std::span<const double> q, Rng& rng);

// Exact joint law of maximal_coupling; entry (a, b).
Eigen::MatrixXd maximal_coupling_joint(std::span<const double> p, std::span<const double> q);

struct CouplingState {
  std::size_t step = 0;
  Config x;
  Config xp;
  // history[0] is the site I of the exchangeable pair, history[k] is I_k.
  std::vector<std::size_t> history;

  std::vector<int> disagreement() const;  // L_i(k)
  std::size_t disagreement_count() const;
};

struct ExchangeablePair {
  Config x;
  Config xp;
  std::size_t site = 0;
};

// X ~ mu, I uniform, X'_I redrawn from mu_I(. | X_{-I}).
ExchangeablePair make_exchangeable_pair(const DiscreteModel& model, Rng& rng);

CouplingState initial_state(const ExchangeablePair& pair);
// history[0] is the first site where x and xp differ (0 when they agree).
CouplingState initial_state(Config x, Config xp);

// Random-scan single-site Gibbs kernel P(x, y) = (1/n) sum_i P_i(x, y) over configuration indices.
Eigen::MatrixXd gibbs_kernel(const DiscreteModel& model);
Eigen::MatrixXd single_site_kernel(const DiscreteModel& model, std::size_t site);

// mu(x) P(x, y): the law of make_exchangeable_pair.
Eigen::MatrixXd exchangeable_pair_joint(const DiscreteModel& model);

// Both chains take the same fresh value at the refreshed site. Product models only.
CouplingState step_independent(const CouplingState& state, const DiscreteModel& model, Rng& rng);

// The refreshed site is drawn from the maximal coupling of the two conditionals.
CouplingState step_greedy(const CouplingState& state, const DiscreteModel& model, Rng& rng);

CouplingState step(CouplingKind kind, const CouplingState& state, const DiscreteModel& model, Rng& rng);

// Applies `steps` coupled updates.
CouplingState run_coupling(CouplingKind kind, CouplingState state, const DiscreteModel& model, std::size_t steps,
                           Rng& rng);

// Exact law of the coupled pair (X(k), X'(k)) as a dense vector over index pairs
// (x * S + y), propagated one step at a time.
class PairDistribution {
 public:
  // Refuses product spaces with more than `max_pairs` index pairs.
  PairDistribution(const DiscreteModel& model, CouplingKind kind, std::uint64_t max_pairs = 4'000'000);

  void reset(std::size_t x, std::size_t y);
  void advance();

  std::size_t state_count() const { return s_; }
  const std::vector<double>& mass() const { return mass_; }
  std::vector<double> first_marginal() const;
  std::vector<double> second_marginal() const;
  double disagreement_probability() const;

 private:
  const DiscreteModel* model_;
  CouplingKind kind_;
  std::size_t s_ = 0;
  std::vector<double> mass_;
  std::vector<double> next_;
  // conds_[i][k]: conditional of site i at configuration k.
  std::vector<std::vector<std::vector<double>>> conds_;
  std::vector<std::vector<std::size_t>> neighbor_;  // neighbor_[i][k * A_i + v]: k with site i set to v
};

struct PropertyPReport {
  bool holds = true;
  std::size_t steps = 0;
  std::size_t start_pairs = 0;
  // Largest difference between marginals of X(k) from (x, y) and (x, y'), and likewise for X'(k).
  double max_deviation = 0.0;
  // Largest difference between the marginal of X(k) and the row x of P^k.
  double max_kernel_deviation = 0.0;
};

PropertyPReport verify_property_P(const DiscreteModel& model, CouplingKind kind, std::size_t steps,
                                  double tol = 1e-12);

struct AntisymmetricFOptions {
  std::size_t max_steps = 10'000;
  double tail_tolerance = 1e-8;
  double safety_factor = 10.0;
  // Monte Carlo mode only.
  std::size_t runs = 0;
  std::uint64_t seed = 0;
};

struct AntisymmetricFResult {
  HermitianMatrix value = HermitianMatrix::zero(1);
  std::size_t steps = 0;       // terms summed: k = 0..steps-1
  double tail_estimate = 0.0;  // bound used to stop
  bool exact = true;
};

// F(x, y) = sum_k E(f(X(k)) - f(X'(k)) | X(0) = x, X'(0) = y), f centered. Exact by pair
// propagation when the pair space fits, otherwise averaged over options.runs coupled runs.
AntisymmetricFResult antisymmetric_F(const DiscreteModel& model, CouplingKind kind, const MatrixObservable& f,
                                     const Config& x, const Config& y, const AntisymmetricFOptions& options = {});

struct LemmaCheck {
  double max_antisymmetry = 0.0;   // max ||F(x, y) + F(y, x)||
  double max_mean_residual = 0.0;  // max_x ||E(F(X, X') | X = x) - (f(x) - E f)||
  std::size_t pairs_evaluated = 0;
};

// Both conclusions of the lemma over every pair in the support of the exchangeable pair.
LemmaCheck check_antisymmetric_F(const DiscreteModel& model, CouplingKind kind, const MatrixObservable& f,
                                 const AntisymmetricFOptions& options = {});

struct SteinPairSpec {
  const DiscreteModel* model = nullptr;
  MatrixObservable psi;
  std::optional<double> claimed_alpha;

  void validate() const;
};

struct SteinPairReport {
  std::optional<double> alpha_hat;   // least-squares scale; empty when degenerate
  double residual = 0.0;             // max_z ||E(Psi(Z) - Psi(Z') | z) - alpha_hat Psi(z)||
  std::optional<double> claimed_residual;
  bool degenerate = false;
  bool is_stein_pair = false;
};

SteinPairReport verify_stein_pair(const SteinPairSpec& spec, double tol = 1e-10);

// Z_i = f(w_{i-1}) - f(w_i), where w_i takes sites 0..i-1 from y and the rest from x.
std::vector<HermitianMatrix> telescoping_decomposition(const DiscreteModel& model, const MatrixObservable& f,
                                                       const Config& x, const Config& y);

// (1 - 1/n)^k and (1/n)(1 - 1/n)^k.
double coupon_collector_survival(std::size_t n, std::size_t k);
double coupon_collector_weighted(std::size_t n, std::size_t k);

struct DisagreementProfile {
  std::size_t steps = 0;
  // Indexed by the exchangeable-pair site I: runs with that I, mean and standard
  // error of L(k) as (steps + 1) x n matrices.
  std::vector<std::size_t> runs;
  std::vector<Eigen::MatrixXd> mean;
  std::vector<Eigen::MatrixXd> standard_error;
};

// Greedy (or independent) coupled runs started from exchangeable pairs.
DisagreementProfile disagreement_profile(const DiscreteModel& model, CouplingKind kind, std::size_t steps,
                                         std::size_t runs, std::uint64_t seed, unsigned threads = 0);

struct DominationReport {
  bool holds = true;
  double max_excess = 0.0;  // max of mean - bound - z * se
};

// mean L_i(k) <= [B^k e(I)]_i + z * se for every I, i and k.
DominationReport check_disagreement_domination(const DisagreementProfile& profile, const Eigen::MatrixXd& b,
                                               double z = 3.0);

}  // namespace mconc
