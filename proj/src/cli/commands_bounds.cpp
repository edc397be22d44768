#include <cmath>
#include <ostream>

#include "common.hpp"
#include "mconc/bounds.hpp"
#include "mconc/cli.hpp"
#include "mconc/coupling.hpp"
#include "mconc/dobrushin.hpp"
#include "mconc/mc_tail.hpp"

namespace mconc::cli {

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& rows) {
  const auto v = rows.get<std::vector<std::vector<double>>>();
  if (v.empty()) throw ConfigError("dependency matrix must be nonempty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].size() != v.size()) throw ConfigError("dependency matrix must be square");
    for (std::size_t j = 0; j < v.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j];
  }
  return m;
}

struct Dependency {
  MatrixNorms norms{0.0, 0.0};
  double c = 1.0;
};

// {"D": rows} or {"model": spec}; throws HypothesisViolation when a norm reaches 1.
Dependency dependency_from(const json& spec) {
  Eigen::MatrixXd d;
  if (spec.contains("D")) {
    d = matrix_from_rows(spec.at("D"));
  } else if (spec.contains("model")) {
    d = dobrushin_matrix(model_from_spec(spec.at("model"))).entries;
  } else {
    throw ConfigError("dependency needs \"D\" or \"model\"");
  }
  if ((d.array() < 0.0).any()) throw ConfigError("dependency matrix entries must be nonnegative");
  Dependency dep;
  dep.norms = matrix_norms(d);
  dep.c = dobrushin_constant(dep.norms.norm1, dep.norms.norm_inf);
  return dep;
}

json read_param_file(const std::string& path) {
  try {
    return read_json_file(path);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

// ---- bound ----

json bound_defaults() {
  return {{"sigma2", 1.0},   {"matrices", nullptr},   {"dim", 2},
          {"t", json::array({0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0})}, {"dependency", nullptr}, {"unclamped", false}};
}

void bound_flags(CLI::App& sub, json& o) {
  sub.add_option_function<double>("--sigma2", [&o](double v) { o["sigma2"] = v; }, "variance parameter");
  sub.add_option_function<long long>("--dim", [&o](long long v) { o["dim"] = v; }, "matrix dimension d");
  sub.add_option_function<std::vector<double>>("--t", [&o](const std::vector<double>& v) { o["t"] = v; }, "t grid");
  sub.add_option_function<std::string>(
      "--dependency", [&o](const std::string& p) { o["dependency"] = read_param_file(p); },
      "JSON file with a dependency matrix \"D\" or a \"model\"");
  sub.add_flag_function("--unclamped", [&o](std::int64_t) { o["unclamped"] = true; }, "print raw bounds above 1");
}

int bound_execute(RunContext& ctx) {
  const json& cfg = ctx.config;
  double sigma2 = get_param<double>(cfg, "sigma2");
  double d = static_cast<double>(get_param<long long>(cfg, "dim"));
  if (!cfg.at("matrices").is_null()) {
    std::vector<HermitianMatrix> ms;
    for (const auto& m : cfg.at("matrices")) ms.push_back(matrix_from_json(m));
    const DifferenceBoundSet set(std::move(ms));
    sigma2 = set.sigma_sq();
    d = static_cast<double>(set.dim());
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be finite and >= 0");
  if (d < 1) throw ConfigError("dim must be >= 1");
  std::optional<Dependency> dep;
  if (!cfg.at("dependency").is_null()) dep = dependency_from(cfg.at("dependency"));
  const bool unclamped = get_param<bool>(cfg, "unclamped");
  auto show = [&](double b) { return format_double(unclamped ? b : clamp_display(b)); };

  CsvWriter csv({"t", "independent", "dependent", "hoeffding", "hoeffding_dependent", "tropp", "run_digest"});
  for (double t : get_param<std::vector<double>>(cfg, "t")) {
    if (t < 0.0) throw ConfigError("t must be >= 0");
    csv.row({format_double(t), show(tail_bound_independent(d, sigma2, t)),
             dep ? show(tail_bound_dependent(d, sigma2, dep->c, t)) : kNA, show(hoeffding_bound(d, sigma2, t)),
             dep ? show(hoeffding_bound_dependent(d, sigma2, dep->c, t)) : kNA, show(tropp_bound(d, sigma2, t)),
             ctx.run_digest});
  }
  write_text_output(ctx, ctx.out, csv.text());
  *ctx.log << "wrote " << ctx.out.string() << "\n";
  return kOk;
}

// ---- mc-tail ----

json mc_defaults() {
  return {{"model", {{"kind", "rademacher"}, {"n", 20}}},
          {"observable",
           {{"kind", "rademacher-sum"},
            {"random_terms", {{"dim", 2}, {"ensemble", "gaussian-hermitian"}, {"scale", 1.0}, {"seed", 7}}}}},
          {"N", 100000},
          {"t", nullptr},
          {"mode", "mc"},
          {"pilot", 100000},
          {"difference_check_samples", 1000}};
}

void mc_flags(CLI::App& sub, json& o) {
  sub.add_option_function<long long>("-N,--samples", [&o](long long v) { o["N"] = v; }, "Monte Carlo samples");
  sub.add_option_function<std::vector<double>>("--t", [&o](const std::vector<double>& v) { o["t"] = v; },
                                               "t grid (default 0, 0.25 sigma, ..., 3 sigma)");
  sub.add_option_function<std::string>("--mode", [&o](const std::string& v) { o["mode"] = v; }, "mc | exhaustive")
      ->check(CLI::IsMember({"mc", "exhaustive"}));
  sub.add_option_function<long long>("--pilot", [&o](long long v) { o["pilot"] = v; }, "pilot samples for the mean");
  sub.add_option_function<long long>("--sites", [&o](long long v) { o["model"] = {{"kind", "rademacher"}, {"n", v}}; },
                                     "Rademacher model with this many sites");
}

int mc_execute(RunContext& ctx) {
  const json& cfg = ctx.config;
  const DiscreteModel model = model_from_spec(cfg.at("model"));
  const MatrixObservable h = observable_from_spec(cfg.at("observable"), model);
  const long long n_samples = get_param<long long>(cfg, "N");
  if (n_samples < 1) throw ConfigError("N must be >= 1");
  const std::string mode = get_param<std::string>(cfg, "mode");
  if (mode != "mc" && mode != "exhaustive") throw ConfigError("mode must be mc or exhaustive");

  if (h.difference_bounds) {
    const long long checks = get_param<long long>(cfg, "difference_check_samples");
    const DifferenceBoundCheck chk =
        model.enumerable() ? check_difference_bounds(model, h, *h.difference_bounds, 1e-10)
                           : check_difference_bounds(model, h, *h.difference_bounds, 1e-10,
                                                     static_cast<std::size_t>(std::max(1LL, checks)), ctx.seed);
    if (!chk.holds) {
      throw HypothesisViolation("difference bounds fail on a single-site swap (slack " + format_double(chk.min_slack) +
                                ")");
    }
  }
  double c = 1.0;
  if (!model.is_product()) {
    const MatrixNorms nm = matrix_norms(dobrushin_matrix(model).entries);
    c = dobrushin_constant(nm.norm1, nm.norm_inf);
  }
  const double d = static_cast<double>(h.dim);
  std::optional<double> sigma2_diff, sigma2_terms;
  if (h.difference_bounds) sigma2_diff = h.difference_bounds->sigma_sq();
  if (!h.linear_terms.empty()) sigma2_terms = DifferenceBoundSet(h.linear_terms).sigma_sq();

  std::vector<double> grid;
  if (cfg.at("t").is_null()) {
    const std::optional<double> s2 = sigma2_terms ? sigma2_terms : sigma2_diff;
    if (!s2) throw ConfigError("t grid is required when the observable has no difference bounds");
    const double sigma = std::sqrt(*s2);
    for (int k = 0; k <= 12; ++k) grid.push_back(0.25 * k * sigma);
  } else {
    grid = get_param<std::vector<double>>(cfg, "t");
  }

  McTailResult res;
  if (mode == "exhaustive") {
    res = exact_tail(model, h, grid);
  } else {
    McTailOptions opt;
    opt.pilot_samples = static_cast<std::size_t>(std::max(0LL, get_param<long long>(cfg, "pilot")));
    opt.threads = ctx.threads;
    res = mc_tail_estimate(model, h, grid, static_cast<std::size_t>(n_samples), ctx.seed, opt);
  }

  CsvWriter csv({"t", "empirical", "ci_low", "ci_high", "hoeffding", "bounded_differences", "dominated", "run_digest"});
  bool all_dominated = true;
  for (const auto& p : res.points) {
    std::optional<double> hoeff, bd;
    if (sigma2_terms) hoeff = hoeffding_bound_dependent(d, *sigma2_terms, c, std::max(0.0, p.t));
    if (sigma2_diff) bd = tail_bound_dependent(d, *sigma2_diff, c, std::max(0.0, p.t));
    std::string dominated = kNA;
    if (hoeff || bd) {
      const double bound = std::min(hoeff.value_or(INFINITY), bd.value_or(INFINITY));
      const double half = 0.5 * (p.ci_high - p.ci_low);
      const bool ok = p.empirical <= bound + half;
      all_dominated = all_dominated && ok;
      dominated = ok ? "1" : "0";
    }
    csv.row({format_double(p.t), format_double(p.empirical), format_double(p.ci_low), format_double(p.ci_high),
             hoeff ? format_double(*hoeff) : kNA, bd ? format_double(*bd) : kNA, dominated, ctx.run_digest});
  }
  write_text_output(ctx, ctx.out, csv.text());
  *ctx.log << "mean from " << to_string(res.mean_source) << ", " << res.samples << " samples; "
           << (all_dominated ? "empirical tail within the bounds" : "empirical tail EXCEEDS a bound") << "\n";
  return all_dominated ? kOk : kViolation;
}

// ---- dobrushin ----

json dobrushin_defaults() {
  return {{"model", {{"kind", "ising"}, {"n", 2}, {"beta", 0.25}}},
          {"kmax", 20},
          {"coupling_runs", 100000},
          {"coupling_steps", 20},
          {"z", 3.0}};
}

void dobrushin_flags(CLI::App& sub, json& o) {
  auto ising = [&o]() -> json& {
    if (!o.contains("model")) o["model"] = {{"kind", "ising"}, {"n", 2}, {"beta", 0.25}};
    return o["model"];
  };
  sub.add_option_function<double>("--beta", [ising](double v) { ising()["beta"] = v; }, "Ising coupling (all pairs)");
  sub.add_option_function<long long>("--sites", [ising](long long v) { ising()["n"] = v; }, "Ising sites");
  sub.add_option_function<long long>("--kmax", [&o](long long v) { o["kmax"] = v; }, "norm recursion depth");
  sub.add_option_function<long long>("--runs", [&o](long long v) { o["coupling_runs"] = v; },
                                     "greedy coupling runs (0 skips the check)");
  sub.add_option_function<long long>("--steps", [&o](long long v) { o["coupling_steps"] = v; }, "coupling steps");
}

int dobrushin_execute(RunContext& ctx) {
  const json& cfg = ctx.config;
  const DiscreteModel model = model_from_spec(cfg.at("model"));
  const long long kmax = get_param<long long>(cfg, "kmax");
  const long long runs = get_param<long long>(cfg, "coupling_runs");
  const long long steps = get_param<long long>(cfg, "coupling_steps");
  if (kmax < 0 || runs < 0 || steps < 0) throw ConfigError("kmax, coupling_runs and coupling_steps must be >= 0");

  const InterdependenceMatrix dm = dobrushin_matrix(model);
  const MatrixNorms nm = matrix_norms(dm.entries);
  const Eigen::MatrixXd b = b_matrix(dm.entries);
  json doc;
  doc["run_digest"] = ctx.run_digest;
  doc["sites"] = model.sites();
  doc["states"] = model.state_count();
  doc["D"] = matrix_rows(dm.entries);
  doc["certification_excess"] = dm.max_certification_excess;
  doc["norms"] = {{"norm1", nm.norm1}, {"norm_inf", nm.norm_inf}};
  try {
    doc["c"] = dobrushin_constant(nm.norm1, nm.norm_inf);
    doc["dobrushin_condition"] = true;
  } catch (const HypothesisViolation& e) {
    doc["c"] = nullptr;
    doc["dobrushin_condition"] = false;
    doc["c_message"] = e.what();
  }
  doc["B"] = matrix_rows(b);
  const NormRecursionReport nr = norm_recursion_check(dm.entries, static_cast<int>(kmax));
  doc["norm_recursion"] = {{"b_norm1", nr.b_norm1},
                           {"b_norm_inf", nr.b_norm_inf},
                           {"b_norm1_bound_holds", nr.b_norm1_bound_holds},
                           {"b_norm_inf_bound_holds", nr.b_norm_inf_bound_holds},
                           {"kmax", nr.kmax},
                           {"partial_sum", nr.partial_sum},
                           {"limit", std::isfinite(nr.limit) ? json(nr.limit) : json(nullptr)},
                           {"tail_bound_holds", nr.tail_bound_holds},
                           {"column_norm_bound_holds", nr.column_norm_bound_holds}};
  int code = kOk;
  if (runs > 0) {
    const DisagreementProfile prof = disagreement_profile(model, CouplingKind::greedy, static_cast<std::size_t>(steps),
                                                          static_cast<std::size_t>(runs), ctx.seed, ctx.threads);
    const DominationReport dr = check_disagreement_domination(prof, b, get_param<double>(cfg, "z"));
    json by_site = json::array();
    for (std::size_t s = 0; s < prof.mean.size(); ++s) {
      json rows = json::array();
      for (std::size_t k = 0; k <= prof.steps; ++k) {
        const Eigen::VectorXd bound = b_power_column(b, static_cast<int>(k), static_cast<Eigen::Index>(s));
        const auto ki = static_cast<Eigen::Index>(k);
        rows.push_back({{"k", k},
                        {"mean", matrix_rows(prof.mean[s].row(ki))[0]},
                        {"se", matrix_rows(prof.standard_error[s].row(ki))[0]},
                        {"bound", matrix_rows(bound.transpose())[0]}});
      }
      by_site.push_back({{"I", s}, {"runs", prof.runs[s]}, {"profile", rows}});
    }
    doc["coupling"] = {{"runs", runs},
                       {"steps", steps},
                       {"holds", dr.holds},
                       {"max_excess", dr.max_excess},
                       {"by_site", by_site}};
    if (!dr.holds) code = kViolation;
  }
  write_json_output(ctx, ctx.out, doc);
  *ctx.log << "||D||_1 = " << format_double(nm.norm1) << ", ||D||_inf = " << format_double(nm.norm_inf);
  if (doc["c"].is_number()) *ctx.log << ", c = " << format_double(doc["c"].get<double>());
  *ctx.log << "\n";
  return code;
}

}  // namespace

Command bound_command() {
  return {"bound", "tail bounds over a t grid", "bound.csv", bound_defaults, bound_flags, bound_execute};
}

Command mc_tail_command() {
  return {"mc-tail", "empirical tail against the bounds", "mc_tail.csv", mc_defaults, mc_flags, mc_execute};
}

Command dobrushin_command() {
  return {"dobrushin", "interdependence matrix, norms, c and coupling check", "dobrushin.json", dobrushin_defaults,
          dobrushin_flags, dobrushin_execute};
}

}  // namespace mconc::cli
