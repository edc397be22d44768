#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mconc/discrete_model.hpp"
#include "mconc/ensemble.hpp"
#include "mconc/hermitian.hpp"
#include "mconc/matrix_io.hpp"
#include "mconc/observable.hpp"
#include "mconc/trace_ineq.hpp"

namespace mconc {

// Monotone increasing convex f with closed-form derivative on [lo, hi].
struct ConvexCatalogEntry {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  double lo;
  double hi;
  // Range used for grid checks when the domain is unbounded.
  double grid_lo;
  double grid_hi;

  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

// exp on the real line; pow2, pow3, pow4 (x^p) on [0, inf).
const std::vector<ConvexCatalogEntry>& convex_catalog();
const ConvexCatalogEntry& catalog_entry(const std::string& name);

struct CatalogSanity {
  bool f_increasing = true;
  bool f_prime_nondecreasing = true;
  double max_derivative_error = 0.0;  // relative, against central differences
};

CatalogSanity check_catalog_entry(const ConvexCatalogEntry& entry, std::size_t points = 100);

TraceGapReport gap_conjecture_exp(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c);

// Throws DomainError when an eigenvalue of A or B lies outside entry's domain.
TraceGapReport gap_conjecture_f(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                                const ConvexCatalogEntry& entry);

// Scalar form summed over eigenvalue triples; equals the matrix gap when A, B, C
// are diagonal in a common basis.
double scalar_conjecture_gap(const ConvexCatalogEntry& entry, double a, double b, double c);
double scalar_reduction_gap(const ConvexCatalogEntry& entry, const RVector& a, const RVector& b, const RVector& c);

enum class SelfBoundingMode { strong, weak };

const char* to_string(SelfBoundingMode mode);

struct SelfBoundingReport {
  SelfBoundingMode mode = SelfBoundingMode::strong;
  double a = 0.0;
  double b = 0.0;
  bool holds = false;
  // min lambda_min(I - (H(Z) - H(Z^(i)))) over all single-site replacements (strong only).
  std::optional<double> difference_slack;
  // min lambda_min(a H(Z) + b I - sum_i (.)_+ or (.)_+^2) over all (Z, Z').
  double sum_slack = 0.0;
  std::size_t configurations_checked = 0;
  std::size_t worst_z = 0;
  std::size_t worst_z_prime = 0;
};

// Exhaustive over every configuration Z and every replacement vector Z'.
SelfBoundingReport check_self_bounding(const MatrixObservable& h, const DiscreteModel& model, double a, double b,
                                       SelfBoundingMode mode, double tol = 1e-12);

struct SearchConfig {
  InequalityId id = InequalityId::expconj;
  std::string entry = "exp";  // catalog entry for fconj
  Eigen::Index dim_lo = 2;
  Eigen::Index dim_hi = 6;
  std::size_t budget = 10'000;                 // random-phase evaluations
  std::optional<std::size_t> descent_budget;   // defaults to budget - 1
  std::uint64_t seed = 0;
  double scale = 1.0;
  unsigned threads = 0;

  void validate() const;
};

enum class Verdict { supported, counterexample_candidate };

const char* to_string(Verdict v);

struct SearchResult {
  InequalityId id = InequalityId::expconj;
  std::string entry;
  double best_gap = 0.0;
  double best_relative_gap = 0.0;
  double error_bound = 0.0;  // certified evaluation-error bound at the witness
  // Witness inputs A, B, C.
  std::vector<CMatrix> witness;
  std::string witness_kind;
  Eigen::Index witness_dim = 0;
  std::size_t witness_trial = 0;
  // Trajectory.
  std::size_t random_evaluations = 0;
  double random_best_relative_gap = 0.0;
  std::size_t descent_evaluations = 0;
  std::size_t descent_improvements = 0;
  double final_step = 0.0;
  bool stationary = false;
  Verdict verdict = Verdict::supported;
};

// 100 d^2 eps anchor (1 + ||A|| + ||B||).
double certified_error_bound(const TraceGapReport& report, const HermitianMatrix& a, const HermitianMatrix& b);

SearchResult counterexample_search(const SearchConfig& config);

json search_result_to_json(const SearchResult& r);
json search_witness_to_json(const SearchResult& r);
TraceGapReport replay_search_witness(const json& witness);

}  // namespace mconc
