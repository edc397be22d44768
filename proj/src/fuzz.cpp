#include "mconc/fuzz.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mconc/parallel.hpp"

namespace mconc {

namespace {

constexpr std::array<double, 6> kHolderExponents = {0.0, 0.25, 0.5, 0.75, 1.0, std::numbers::sqrt2 / 2.0};

// Floor added to H^2 / scale so symmetric-term inputs are positive definite.
constexpr double kDefiniteFloor = 1e-2;

std::size_t input_count(InequalityId id) {
  switch (id) {
    case InequalityId::mackey: return 2;
    case InequalityId::holder:
    case InequalityId::sqrm:
    case InequalityId::sqrm4: return 4;
    default: return 3;
  }
}

HermitianMatrix herm(const CMatrix& m) { return HermitianMatrix(m); }

double param(const std::map<std::string, double>& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(std::string("missing parameter '") + key + "'");
  return it->second;
}

TraceGapReport evaluate(InequalityId id, const std::vector<CMatrix>& in, const std::map<std::string, double>& params) {
  auto need = [&](std::size_t n) {
    if (in.size() != n) throw ConfigError("inequality " + std::string(to_string(id)) + " expects " +
                                          std::to_string(n) + " input matrices");
  };
  switch (id) {
    case InequalityId::exchangeable:
      need(3);
      return gap_exchangeable(herm(in[0]), herm(in[1]), herm(in[2]));
    case InequalityId::exchangeable_scaled:
      need(3);
      return gap_exchangeable_scaled(herm(in[0]), herm(in[1]), herm(in[2]), param(params, "theta"));
    case InequalityId::mackey:
      need(2);
      return gap_mackey(herm(in[0]), herm(in[1]), param(params, "theta"));
    case InequalityId::power:
      need(3);
      return gap_power(herm(in[0]), herm(in[1]), herm(in[2]), static_cast<int>(param(params, "k")));
    case InequalityId::symmetric_term:
      need(3);
      return gap_symmetric_term(herm(in[0]), herm(in[1]), herm(in[2]), static_cast<int>(param(params, "k")),
                                static_cast<int>(param(params, "n")));
    case InequalityId::holder:
      need(4);
      return gap_holder(herm(in[0]), herm(in[1]), herm(in[2]), herm(in[3]), param(params, "p"));
    case InequalityId::sqrm:
      need(2);
      return gap_sqrm(in[0], in[1]);
    case InequalityId::sqrm4:
      need(4);
      return gap_sqrm4(herm(in[0]), herm(in[1]), herm(in[2]), herm(in[3]));
    default:
      break;
  }
  throw ConfigError("fuzzing supports proven inequalities only, got '" + std::string(to_string(id)) + "'");
}

}  // namespace

FuzzInstance fuzz_trial(InequalityId id, const EnsembleSpec& spec, std::size_t trial, const FuzzOverrides& overrides) {
  if (!is_proven(id)) {
    throw ConfigError("fuzzing supports proven inequalities only, got '" + std::string(to_string(id)) + "'");
  }
  EnsembleSpec sub = spec;
  sub.seed = derive_seed(spec.seed, trial, 1);
  Rng prng = make_rng(spec.seed, trial, 2);
  const std::vector<HermitianMatrix> fam = sample_family(sub, input_count(id));

  FuzzInstance inst;
  auto push = [&](const HermitianMatrix& h) { inst.inputs.push_back(h.matrix()); };
  switch (id) {
    case InequalityId::exchangeable:
    case InequalityId::sqrm4:
      for (const auto& h : fam) push(h);
      break;
    case InequalityId::exchangeable_scaled: {
      for (const auto& h : fam) push(h);
      const double mag = 0.1 + 1.9 * uniform01(prng);
      const double sign = (prng() & 1U) ? 1.0 : -1.0;
      inst.params["theta"] = overrides.theta.value_or(sign * mag);
      break;
    }
    case InequalityId::mackey:
      for (const auto& h : fam) push(h);
      inst.params["theta"] = overrides.theta.value_or(3.0 * (1.0 - uniform01(prng)));
      break;
    case InequalityId::power:
      push(psd_variant(fam[0], spec.scale));
      push(psd_variant(fam[1], spec.scale));
      push(fam[2]);
      inst.params["k"] = overrides.k.value_or(1 + static_cast<int>(uniform_index(prng, 6)));
      break;
    case InequalityId::symmetric_term: {
      push(psd_variant(fam[0], spec.scale).shifted(kDefiniteFloor * spec.scale));
      push(psd_variant(fam[1], spec.scale).shifted(kDefiniteFloor * spec.scale));
      push(fam[2]);
      const int n = overrides.n.value_or(static_cast<int>(uniform_index(prng, 7)));
      inst.params["n"] = n;
      inst.params["k"] = overrides.k.value_or(static_cast<int>(uniform_index(prng, static_cast<std::size_t>(n) + 1)));
      break;
    }
    case InequalityId::holder:
      push(psd_variant(fam[0], spec.scale));
      push(psd_variant(fam[1], spec.scale));
      push(fam[2]);
      push(fam[3]);
      inst.params["p"] = overrides.p.value_or(kHolderExponents[trial % kHolderExponents.size()]);
      break;
    case InequalityId::sqrm: {
      const Complex i1(0.0, 1.0);
      inst.inputs.push_back(fam[0].matrix() + i1 * fam[1].matrix());
      inst.inputs.push_back(fam[2].matrix() + i1 * fam[3].matrix());
      break;
    }
    default:
      break;
  }
  inst.report = evaluate(id, inst.inputs, inst.params);
  inst.report.seed = sub.seed;
  return inst;
}

json report_to_json(const TraceGapReport& r) {
  json j{{"inequality_id", to_string(r.id)}, {"lhs", r.lhs},       {"rhs", r.rhs},
         {"gap", r.gap},                     {"anchor", r.anchor}, {"inputs_digest", r.inputs_digest},
         {"params", r.params}};
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

json witness_to_json(const FuzzInstance& inst, const EnsembleSpec& spec, std::size_t trial) {
  json inputs = json::array();
  for (const auto& m : inst.inputs) inputs.push_back(complex_matrix_to_json(m));
  return json{{"inequality_id", to_string(inst.report.id)},
              {"params", inst.params},
              {"gap", inst.report.gap},
              {"lhs", inst.report.lhs},
              {"rhs", inst.report.rhs},
              {"anchor", inst.report.anchor},
              {"ensemble", {{"kind", to_string(spec.kind)}, {"dim", spec.dim}, {"scale", spec.scale}, {"seed", spec.seed}}},
              {"trial", trial},
              {"inputs", std::move(inputs)}};
}

TraceGapReport replay_witness(const json& witness) {
  const InequalityId id = parse_inequality_id(witness.at("inequality_id").get<std::string>());
  std::vector<CMatrix> inputs;
  for (const auto& m : witness.at("inputs")) inputs.push_back(complex_matrix_from_json(m));
  std::map<std::string, double> params = witness.value("params", std::map<std::string, double>{});
  return evaluate(id, inputs, params);
}

FuzzSummary fuzz_inequality(InequalityId id, const EnsembleSpec& spec, std::size_t trials, double tol,
                            const FuzzOptions& options) {
  if (trials < 1) throw ConfigError("fuzz_inequality: trials must be >= 1");
  if (!is_proven(id)) {
    throw ConfigError("fuzzing supports proven inequalities only, got '" + std::string(to_string(id)) + "'");
  }
  spec.validate();

  struct TrialResult {
    double gap, rel, anchor;
    std::string digest;
    bool violates;
  };
  std::vector<TrialResult> results(trials);
  parallel_for(trials, options.threads, [&](std::size_t t) {
    const FuzzInstance inst = fuzz_trial(id, spec, t, options.overrides);
    const auto& r = inst.report;
    results[t] = {r.gap, r.relative_gap(), r.anchor, r.inputs_digest, r.violates(tol)};
    if (results[t].violates && options.witness_dir) {
      const auto path = *options.witness_dir / (std::string(to_string(id)) + "_" + std::string(to_string(spec.kind)) +
                                                "_d" + std::to_string(spec.dim) + "_t" + std::to_string(t) + ".json");
      write_json_file(path, witness_to_json(inst, spec, t));
    }
  });

  FuzzSummary s;
  s.id = id;
  s.ensemble = spec;
  s.trials = trials;
  s.tolerance = tol;
  s.min_relative_gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    if (r.rel < s.min_relative_gap) {
      s.min_relative_gap = r.rel;
      s.min_gap = r.gap;
      s.argmin_digest = r.digest;
      s.argmin_trial = t;
    }
    s.max_anchor = std::max(s.max_anchor, r.anchor);
    if (r.violates) {
      ++s.violations;
      if (options.witness_dir) {
        s.witness_files.push_back(std::string(to_string(id)) + "_" + std::string(to_string(spec.kind)) + "_d" +
                                  std::to_string(spec.dim) + "_t" + std::to_string(t) + ".json");
      }
    }
  }
  return s;
}

std::vector<FuzzSummary> fuzz_sweep(InequalityId id, std::span<const EnsembleKind> kinds, Eigen::Index dim_lo,
                                    Eigen::Index dim_hi, double scale, std::size_t total_trials, std::uint64_t seed,
                                    double tol, const FuzzOptions& options) {
  if (dim_lo < 1 || dim_hi < dim_lo) throw ConfigError("fuzz_sweep: invalid dimension range");
  if (kinds.empty()) throw ConfigError("fuzz_sweep: no ensemble kinds");
  const std::size_t combos = kinds.size() * static_cast<std::size_t>(dim_hi - dim_lo + 1);
  const std::size_t base = total_trials / combos;
  const std::size_t extra = total_trials % combos;
  std::vector<FuzzSummary> out;
  std::size_t c = 0;
  for (EnsembleKind kind : kinds) {
    for (Eigen::Index d = dim_lo; d <= dim_hi; ++d, ++c) {
      const std::size_t trials = base + (c < extra ? 1 : 0);
      if (trials == 0) continue;
      EnsembleSpec spec{kind, d, scale, derive_seed(seed, c, static_cast<std::uint64_t>(id))};
      out.push_back(fuzz_inequality(id, spec, trials, tol, options));
    }
  }
  return out;
}

json summary_to_json(const FuzzSummary& s) {
  return json{{"inequality_id", to_string(s.id)},
              {"ensemble", {{"kind", to_string(s.ensemble.kind)},
                            {"dim", s.ensemble.dim},
                            {"scale", s.ensemble.scale},
                            {"seed", s.ensemble.seed}}},
              {"trials", s.trials},
              {"min_gap", s.min_gap},
              {"min_relative_gap", s.min_relative_gap},
              {"argmin_digest", s.argmin_digest},
              {"argmin_trial", s.argmin_trial},
              {"violations", s.violations},
              {"tolerance", s.tolerance},
              {"max_anchor", s.max_anchor},
              {"witness_files", s.witness_files}};
}

}  // namespace mconc
