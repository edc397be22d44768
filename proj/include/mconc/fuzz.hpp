#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mconc/ensemble.hpp"
#include "mconc/matrix_io.hpp"
#include "mconc/trace_ineq.hpp"

namespace mconc {

// Fixes a per-trial parameter that is otherwise drawn at random.
struct FuzzOverrides {
  std::optional<double> theta;
  std::optional<int> k;
  std::optional<int> n;
  std::optional<double> p;
};

struct FuzzOptions {
  FuzzOverrides overrides;
  std::optional<std::filesystem::path> witness_dir;  // violations are written here
  unsigned threads = 1;
};

struct FuzzSummary {
  InequalityId id = InequalityId::exchangeable;
  EnsembleSpec ensemble;
  std::size_t trials = 0;
  double min_gap = 0.0;           // raw gap of the trial with the smallest relative gap
  double min_relative_gap = 0.0;  // gap / anchor
  std::string argmin_digest;
  std::size_t argmin_trial = 0;
  std::size_t violations = 0;  // trials with gap < -tolerance * anchor
  double tolerance = 0.0;
  double max_anchor = 0.0;
  std::vector<std::string> witness_files;
};

// Random inputs of one trial, reproducible from (spec.seed, trial).
struct FuzzInstance {
  std::vector<CMatrix> inputs;  // Hermitian except for sqrm (general complex P, Q)
  std::map<std::string, double> params;
  TraceGapReport report;
};

FuzzInstance fuzz_trial(InequalityId id, const EnsembleSpec& spec, std::size_t trial,
                        const FuzzOverrides& overrides = {});

// Deterministic in (spec.seed, trials); independent of options.threads.
FuzzSummary fuzz_inequality(InequalityId id, const EnsembleSpec& spec, std::size_t trials, double tol,
                            const FuzzOptions& options = {});

// Splits `total_trials` evenly over every (kind, dim) combination, seeding each
// combination from (seed, combination index). Returns one summary per combination.
std::vector<FuzzSummary> fuzz_sweep(InequalityId id, std::span<const EnsembleKind> kinds, Eigen::Index dim_lo,
                                    Eigen::Index dim_hi, double scale, std::size_t total_trials, std::uint64_t seed,
                                    double tol, const FuzzOptions& options = {});

json summary_to_json(const FuzzSummary& s);
json report_to_json(const TraceGapReport& r);

json witness_to_json(const FuzzInstance& inst, const EnsembleSpec& spec, std::size_t trial);
// Re-evaluates a witness file produced by fuzz_inequality.
TraceGapReport replay_witness(const json& witness);

}  // namespace mconc
