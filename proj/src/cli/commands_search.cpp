#include <algorithm>
#include <ostream>

#include "common.hpp"
#include "mconc/cli.hpp"
#include "mconc/conjecture.hpp"
#include "mconc/fuzz.hpp"
#include "mconc/parallel.hpp"

namespace mconc::cli {

namespace {

fs::path sibling(const fs::path& out, const char* suffix) {
  fs::path p = out;
  p += suffix;
  return p;
}

// ---- verify-traces ----

json verify_defaults() {
  json ids = json::array();
  for (InequalityId id : kProvenInequalities) ids.push_back(std::string(to_string(id)));
  json kinds = json::array();
  for (EnsembleKind k : kAllEnsembleKinds) kinds.push_back(std::string(to_string(k)));
  return {{"inequalities", ids}, {"trials", 10000}, {"dims", "1..6"}, {"kinds", kinds}, {"scale", 1.0}};
}

void verify_flags(CLI::App& sub, json& o) {
  sub.add_option_function<std::vector<std::string>>(
      "--ineq", [&o](const std::vector<std::string>& v) { o["inequalities"] = v; }, "inequality ids (default: all proven)");
  sub.add_option_function<long long>("--trials", [&o](long long v) { o["trials"] = v; }, "trials per inequality");
  sub.add_option_function<std::string>("--dims", [&o](const std::string& v) { o["dims"] = v; }, "dimension range lo..hi");
  sub.add_option_function<std::vector<std::string>>(
      "--kinds", [&o](const std::vector<std::string>& v) { o["kinds"] = v; }, "ensemble kinds (default: all)");
  sub.add_option_function<double>("--scale", [&o](double v) { o["scale"] = v; }, "ensemble scale");
}

int verify_execute(RunContext& ctx) {
  const json& cfg = ctx.config;
  const long long trials = get_param<long long>(cfg, "trials");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const auto [lo, hi] = parse_range(get_param<std::string>(cfg, "dims"));
  if (lo < 1) throw ConfigError("dims must start at 1 or above");
  std::vector<EnsembleKind> kinds;
  for (const auto& k : get_param<std::vector<std::string>>(cfg, "kinds")) kinds.push_back(parse_ensemble_kind(k));
  if (kinds.empty()) throw ConfigError("kinds must not be empty");
  std::vector<InequalityId> ids;
  for (const auto& name : get_param<std::vector<std::string>>(cfg, "inequalities")) {
    const InequalityId id = parse_inequality_id(name);
    if (!is_proven(id)) throw ConfigError("verify-traces covers proven inequalities only; '" + name + "' is a conjecture");
    ids.push_back(id);
  }
  if (ids.empty()) throw ConfigError("inequalities must not be empty");

  FuzzOptions options;
  options.threads = ctx.threads;
  options.witness_dir = sibling(ctx.out, ".witnesses");

  json results = json::array();
  std::size_t total_violations = 0;
  for (InequalityId id : ids) {
    const auto summaries = fuzz_sweep(id, kinds, lo, hi, get_param<double>(cfg, "scale"),
                                      static_cast<std::size_t>(trials), ctx.seed, ctx.tol, options);
    json combos = json::array();
    std::size_t violations = 0, done = 0;
    double min_rel = std::numeric_limits<double>::infinity();
    for (const auto& s : summaries) {
      combos.push_back(summary_to_json(s));
      violations += s.violations;
      done += s.trials;
      min_rel = std::min(min_rel, s.min_relative_gap);
    }
    total_violations += violations;
    results.push_back({{"inequality_id", to_string(id)},
                       {"trials", done},
                       {"violations", violations},
                       {"min_relative_gap", min_rel},
                       {"combinations", combos}});
    *ctx.log << to_string(id) << ": " << done << " trials, " << violations << " violations, min relative gap "
             << format_double(min_rel) << "\n";
  }
  const json doc = {{"run_digest", ctx.run_digest},
                    {"tolerance", ctx.tol},
                    {"total_violations", total_violations},
                    {"inequalities", results}};
  write_json_output(ctx, ctx.out, doc);
  if (fs::exists(*options.witness_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(*options.witness_dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) ctx.outputs.push_back(f);
  }
  return total_violations > 0 ? kViolation : kOk;
}

// ---- conjecture ----

json conjecture_defaults() {
  return {{"inequality", "expconj"},
          {"entries", json::array()},
          {"dims", "2..6"},
          {"budget", 10000},
          {"descent_budget", nullptr},
          {"scale", 1.0}};
}

void conjecture_flags(CLI::App& sub, json& o) {
  sub.add_option_function<std::string>("--ineq", [&o](const std::string& v) { o["inequality"] = v; }, "expconj | fconj");
  sub.add_option_function<std::vector<std::string>>(
      "--entry", [&o](const std::vector<std::string>& v) { o["entries"] = v; }, "catalog entries for fconj (default: all)");
  sub.add_option_function<std::string>("--dims", [&o](const std::string& v) { o["dims"] = v; }, "dimension range lo..hi");
  sub.add_option_function<long long>("--budget", [&o](long long v) { o["budget"] = v; }, "random-phase evaluations");
  sub.add_option_function<long long>("--descent-budget", [&o](long long v) { o["descent_budget"] = v; },
                                     "descent evaluations (default: budget - 1)");
  sub.add_option_function<double>("--scale", [&o](double v) { o["scale"] = v; }, "ensemble scale");
}

int conjecture_execute(RunContext& ctx) {
  const json& cfg = ctx.config;
  SearchConfig base;
  base.id = parse_inequality_id(get_param<std::string>(cfg, "inequality"));
  if (base.id != InequalityId::expconj && base.id != InequalityId::fconj) {
    throw ConfigError("conjecture --ineq must be expconj or fconj");
  }
  const long long budget = get_param<long long>(cfg, "budget");
  if (budget < 1) throw ConfigError("budget must be >= 1");
  base.budget = static_cast<std::size_t>(budget);
  if (!cfg.at("descent_budget").is_null()) {
    const long long db = get_param<long long>(cfg, "descent_budget");
    if (db < 0) throw ConfigError("descent_budget must be >= 0");
    base.descent_budget = static_cast<std::size_t>(db);
  }
  const auto [lo, hi] = parse_range(get_param<std::string>(cfg, "dims"));
  base.dim_lo = lo;
  base.dim_hi = hi;
  base.scale = get_param<double>(cfg, "scale");
  base.seed = ctx.seed;
  base.threads = ctx.threads;

  std::vector<std::string> entries = get_param<std::vector<std::string>>(cfg, "entries");
  if (base.id == InequalityId::expconj) {
    entries = {"exp"};
  } else if (entries.empty()) {
    for (const auto& e : convex_catalog()) entries.push_back(e.name);
  }

  json results = json::array();
  bool candidate = false;
  const fs::path wdir = sibling(ctx.out, ".witnesses");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    SearchConfig c = base;
    c.entry = entries[i];
    c.seed = derive_seed(ctx.seed, i, 0xc0);
    const SearchResult r = counterexample_search(c);
    json j = search_result_to_json(r);
    const std::string wname = std::string(to_string(r.id)) + "_" + r.entry + ".json";
    j["witness_file"] = wname;
    results.push_back(j);
    write_json_output(ctx, wdir / wname, search_witness_to_json(r));
    candidate = candidate || r.verdict == Verdict::counterexample_candidate;
    *ctx.log << to_string(r.id) << "/" << r.entry << ": " << to_string(r.verdict) << ", best gap "
             << format_double(r.best_gap) << " (error bound " << format_double(r.error_bound) << ")\n";
  }
  write_json_output(ctx, ctx.out, {{"run_digest", ctx.run_digest}, {"results", results}});
  // The primary file goes first in the manifest.
  std::rotate(ctx.outputs.begin(), ctx.outputs.end() - 1, ctx.outputs.end());
  return candidate ? kViolation : kOk;
}

}  // namespace

Command verify_traces_command() {
  return {"verify-traces", "fuzz every proven trace inequality", "verify_traces.json", verify_defaults, verify_flags,
          verify_execute};
}

Command conjecture_command() {
  return {"conjecture", "counterexample search for the conjectured inequalities", "conjecture.json",
          conjecture_defaults, conjecture_flags, conjecture_execute};
}

}  // namespace mconc::cli
