#include "mconc/conjecture.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "mconc/errors.hpp"
#include "mconc/parallel.hpp"

namespace mconc {

namespace {

ConvexCatalogEntry power_entry(int p) {
  const double pd = p;
  return {"pow" + std::to_string(p),
          [pd](double x) { return std::pow(x, pd); },
          [pd](double x) { return pd * std::pow(x, pd - 1.0); },
          0.0,
          std::numeric_limits<double>::infinity(),
          0.0,
          3.0};
}

std::vector<ConvexCatalogEntry> build_catalog() {
  std::vector<ConvexCatalogEntry> c;
  c.push_back({"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
               -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), -5.0, 5.0});
  for (int p : {2, 3, 4}) c.push_back(power_entry(p));
  return c;
}

void require_domain(const RVector& lambda, const ConvexCatalogEntry& entry, const char* name) {
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!entry.contains(lambda(i), tol)) {
      throw DomainError(std::string(name) + " has eigenvalue " + std::to_string(lambda(i)) + " outside the domain of " +
                        entry.name);
    }
  }
}

double pos(double x) { return x > 0.0 ? x : 0.0; }
double neg(double x) { return x < 0.0 ? -x : 0.0; }

TraceGapReport conjecture_gap(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                              const ConvexCatalogEntry& entry, InequalityId id) {
  require_same_dim(a, b, "conjecture gap");
  require_same_dim(a, c, "conjecture gap");
  const SpectralDecomposition ea = spectral_decompose(a);
  const SpectralDecomposition eb = spectral_decompose(b);
  require_domain(ea.eigenvalues, entry, "A");
  require_domain(eb.eigenvalues, entry, "B");
  const SpectralDecomposition ec = spectral_decompose(c);
  const SpectralDecomposition ed = spectral_decompose(a - b);

  const HermitianMatrix fa = matrix_function(ea, entry.f);
  const HermitianMatrix fb = matrix_function(eb, entry.f);
  const HermitianMatrix dfa = matrix_function(ea, entry.f_prime);
  const HermitianMatrix dfb = matrix_function(eb, entry.f_prime);
  auto sq = [](double (*part)(double)) { return [part](double x) { return part(x) * part(x); }; };
  const HermitianMatrix cp2 = matrix_function(ec, sq(pos));
  const HermitianMatrix cn2 = matrix_function(ec, sq(neg));
  const HermitianMatrix dp2 = matrix_function(ed, sq(pos));
  const HermitianMatrix dn2 = matrix_function(ed, sq(neg));

  TraceGapReport r;
  r.id = id;
  r.lhs = trace_product(c, fa - fb);
  r.rhs = 0.5 * trace_product(cp2 + dp2, dfa) + 0.5 * trace_product(cn2 + dn2, dfb);
  r.gap = r.rhs - r.lhs;
  const double d = static_cast<double>(a.dim());
  const double nc = spectral_norm(c);
  const double nd = spectral_norm(a - b);
  r.anchor = d * (nc * (spectral_norm(fa) + spectral_norm(fb)) +
                  0.5 * (nc * nc + nd * nd) * (spectral_norm(dfa) + spectral_norm(dfb)));
  Digest g;
  g.add(a).add(b).add(c).add(std::string_view(entry.name));
  r.inputs_digest = g.hex();
  return r;
}

}  // namespace

const std::vector<ConvexCatalogEntry>& convex_catalog() {
  static const std::vector<ConvexCatalogEntry> catalog = build_catalog();
  return catalog;
}

const ConvexCatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : convex_catalog()) {
    if (e.name == name) return e;
  }
  // "x2" is accepted as a synonym of pow2.
  if (name == "x2" || name == "square") return catalog_entry("pow2");
  throw ConfigError("unknown catalog entry '" + name + "' (expected exp, pow2, pow3 or pow4)");
}

CatalogSanity check_catalog_entry(const ConvexCatalogEntry& entry, std::size_t points) {
  if (points < 3) throw ConfigError("check_catalog_entry: need at least 3 grid points");
  CatalogSanity s;
  const double lo = entry.grid_lo;
  const double hi = entry.grid_hi;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  double prev_f = -std::numeric_limits<double>::infinity();
  double prev_df = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    const double x = lo + step * static_cast<double>(k);
    const double fx = entry.f(x);
    const double dfx = entry.f_prime(x);
    if (fx < prev_f - 1e-9 * std::max(1.0, std::abs(fx))) s.f_increasing = false;
    if (dfx < prev_df - 1e-9 * std::max(1.0, std::abs(dfx))) s.f_prime_nondecreasing = false;
    if (dfx < -1e-9) s.f_increasing = false;
    prev_f = fx;
    prev_df = dfx;
    // One-sided neighbourhood at a closed domain end.
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    const double xl = std::max(x - h, entry.lo);
    const double xr = std::min(x + h, entry.hi);
    const double fd = (entry.f(xr) - entry.f(xl)) / (xr - xl);
    const double mid = entry.f_prime(0.5 * (xl + xr));
    const double err = std::abs(fd - mid) / std::max(1.0, std::abs(mid));
    s.max_derivative_error = std::max(s.max_derivative_error, err);
  }
  return s;
}

TraceGapReport gap_conjecture_exp(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c) {
  return conjecture_gap(a, b, c, catalog_entry("exp"), InequalityId::expconj);
}

TraceGapReport gap_conjecture_f(const HermitianMatrix& a, const HermitianMatrix& b, const HermitianMatrix& c,
                                const ConvexCatalogEntry& entry) {
  return conjecture_gap(a, b, c, entry, InequalityId::fconj);
}

double scalar_conjecture_gap(const ConvexCatalogEntry& entry, double a, double b, double c) {
  if (!entry.contains(a) || !entry.contains(b)) throw DomainError("scalar_conjecture_gap: argument outside domain");
  const double lhs = c * (entry.f(a) - entry.f(b));
  const double dp = pos(a - b), dn = neg(a - b);
  const double rhs = 0.5 * (pos(c) * pos(c) + dp * dp) * entry.f_prime(a) + 0.5 * (neg(c) * neg(c) + dn * dn) * entry.f_prime(b);
  return rhs - lhs;
}

double scalar_reduction_gap(const ConvexCatalogEntry& entry, const RVector& a, const RVector& b, const RVector& c) {
  if (a.size() != b.size() || a.size() != c.size()) throw DimensionMismatch("scalar_reduction_gap: lengths differ");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += scalar_conjecture_gap(entry, a(i), b(i), c(i));
  return s;
}

const char* to_string(SelfBoundingMode mode) { return mode == SelfBoundingMode::strong ? "strong" : "weak"; }

SelfBoundingReport check_self_bounding(const MatrixObservable& h, const DiscreteModel& model, double a, double b,
                                       SelfBoundingMode mode, double tol) {
  model.require_enumerable("check_self_bounding");
  const std::size_t s = static_cast<std::size_t>(model.state_count());
  if (static_cast<double>(s) * static_cast<double>(s) > 1e8) {
    throw EnumerationCapError("check_self_bounding: " + std::to_string(s) + "^2 (Z, Z') pairs above 1e8");
  }
  const std::size_t n = model.sites();
  const Eigen::Index d = h.dim;
  std::vector<CMatrix> values(s);
  for (std::size_t k = 0; k < s; ++k) values[k] = h(model, model.decode(k)).matrix();

  SelfBoundingReport r;
  r.mode = mode;
  r.a = a;
  r.b = b;
  r.sum_slack = std::numeric_limits<double>::infinity();
  double diff_slack = std::numeric_limits<double>::infinity();
  const CMatrix id = CMatrix::Identity(d, d);
  // terms[i][v]: (H(Z) - H(Z with site i set to v))_+ (squared in weak mode).
  std::vector<std::vector<CMatrix>> terms(n);
  for (std::size_t z = 0; z < s; ++z) {
    const Config x = model.decode(z);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i].resize(model.alphabet_size(i));
      for (std::size_t v = 0; v < model.alphabet_size(i); ++v) {
        Config y = x;
        y[i] = v;
        const HermitianMatrix diff = HermitianMatrix::symmetrized(values[z] - values[model.encode(y)]);
        if (mode == SelfBoundingMode::strong) {
          diff_slack = std::min(diff_slack, lambda_min(HermitianMatrix::symmetrized(id - diff.matrix())));
          terms[i][v] = positive_part(diff).matrix();
        } else {
          terms[i][v] = positive_part(diff).squared().matrix();
        }
      }
    }
    const CMatrix target = a * values[z] + b * id;
    for (std::size_t zp = 0; zp < s; ++zp) {
      const Config xp = model.decode(zp);
      CMatrix sum = CMatrix::Zero(d, d);
      for (std::size_t i = 0; i < n; ++i) sum += terms[i][xp[i]];
      const double slack = lambda_min(HermitianMatrix::symmetrized(target - sum));
      if (slack < r.sum_slack) {
        r.sum_slack = slack;
        r.worst_z = z;
        r.worst_z_prime = zp;
      }
      ++r.configurations_checked;
    }
  }
  if (mode == SelfBoundingMode::strong) r.difference_slack = diff_slack;
  r.holds = r.sum_slack >= -tol && (!r.difference_slack || *r.difference_slack >= -tol);
  return r;
}

void SearchConfig::validate() const {
  if (id != InequalityId::expconj && id != InequalityId::fconj) {
    throw ConfigError("counterexample search supports expconj and fconj only");
  }
  if (budget < 1) throw ConfigError("search budget must be >= 1");
  if (dim_lo < 1 || dim_hi < dim_lo) throw ConfigError("search dims must satisfy 1 <= lo <= hi");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("search scale must be positive");
  if (id == InequalityId::fconj) catalog_entry(entry);
}

const char* to_string(Verdict v) { return v == Verdict::supported ? "supported" : "counterexample-candidate"; }

double certified_error_bound(const TraceGapReport& report, const HermitianMatrix& a, const HermitianMatrix& b) {
  const double d = static_cast<double>(a.dim());
  return 100.0 * d * d * DBL_EPSILON * report.anchor * (1.0 + spectral_norm(a) + spectral_norm(b));
}

namespace {

struct Candidate {
  bool valid = false;
  double relative_gap = std::numeric_limits<double>::infinity();
  double gap = 0.0;
  std::vector<CMatrix> inputs;
  std::size_t kind = 0;
  Eigen::Index dim = 0;
};

std::optional<TraceGapReport> try_evaluate(const SearchConfig& cfg, const ConvexCatalogEntry& entry,
                                           const std::vector<CMatrix>& in) {
  try {
    const HermitianMatrix a(in[0]), b(in[1]), c(in[2]);
    TraceGapReport r = cfg.id == InequalityId::expconj ? gap_conjecture_exp(a, b, c) : gap_conjecture_f(a, b, c, entry);
    if (!std::isfinite(r.gap) || !std::isfinite(r.anchor)) return std::nullopt;
    return r;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const NotHermitianError&) {
    return std::nullopt;
  }
}

}  // namespace

SearchResult counterexample_search(const SearchConfig& config) {
  config.validate();
  const ConvexCatalogEntry& entry = catalog_entry(config.id == InequalityId::expconj ? "exp" : config.entry);
  const bool needs_psd = entry.lo >= 0.0;
  const std::size_t kinds = kAllEnsembleKinds.size();
  const auto dims = static_cast<std::size_t>(config.dim_hi - config.dim_lo + 1);
  const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;

  std::vector<Candidate> trials(config.budget);
  parallel_for(config.budget, threads, [&](std::size_t t) {
    Candidate& cand = trials[t];
    cand.kind = t % kinds;
    cand.dim = config.dim_lo + static_cast<Eigen::Index>((t / kinds) % dims);
    EnsembleSpec spec{kAllEnsembleKinds[cand.kind], cand.dim, config.scale, derive_seed(config.seed, t, 7)};
    auto family = sample_family(spec, 3);
    if (needs_psd) {
      family[0] = psd_variant(family[0], config.scale);
      family[1] = psd_variant(family[1], config.scale);
    }
    cand.inputs = {family[0].matrix(), family[1].matrix(), family[2].matrix()};
    if (auto r = try_evaluate(config, entry, cand.inputs)) {
      cand.valid = true;
      cand.gap = r->gap;
      cand.relative_gap = r->relative_gap();
    }
  });

  SearchResult out;
  out.id = config.id;
  out.entry = entry.name;
  out.random_evaluations = config.budget;
  std::size_t best = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].valid && (!trials[best].valid || trials[t].relative_gap < trials[best].relative_gap)) best = t;
  }
  if (!trials[best].valid) throw NumericalError("counterexample_search: no random trial produced a finite gap");
  out.random_best_relative_gap = trials[best].relative_gap;
  out.witness_trial = best;
  out.witness_kind = std::string(to_string(kAllEnsembleKinds[trials[best].kind]));
  out.witness_dim = trials[best].dim;

  // Coordinate descent on the relative gap over the Hermitian degrees of freedom.
  std::vector<CMatrix> cur = trials[best].inputs;
  double cur_rel = trials[best].relative_gap;
  const std::size_t budget = config.descent_budget.value_or(config.budget - 1);
  double max_abs = 1e-3;
  for (const auto& m : cur) max_abs = std::max(max_abs, m.cwiseAbs().maxCoeff());
  const double initial_step = 0.1 * max_abs;
  double step = initial_step;
  const Eigen::Index d = cur[0].rows();
  std::size_t evals = 0;
  while (evals < budget) {
    bool improved = false;
    for (std::size_t m = 0; m < 3 && evals < budget; ++m) {
      for (Eigen::Index i = 0; i < d && evals < budget; ++i) {
        for (Eigen::Index j = i; j < d && evals < budget; ++j) {
          for (int part = 0; part < (i == j ? 1 : 2) && evals < budget; ++part) {
            for (double sign : {1.0, -1.0}) {
              if (evals >= budget) break;
              std::vector<CMatrix> trial = cur;
              const Complex delta = part == 0 ? Complex(sign * step, 0.0) : Complex(0.0, sign * step);
              trial[m](i, j) += delta;
              if (i != j) trial[m](j, i) += std::conj(delta);
              ++evals;
              const auto r = try_evaluate(config, entry, trial);
              if (r && r->relative_gap() < cur_rel) {
                cur = std::move(trial);
                cur_rel = r->relative_gap();
                ++out.descent_improvements;
                improved = true;
                break;
              }
            }
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-10 * initial_step) {
        out.stationary = true;
        break;
      }
    }
  }
  out.descent_evaluations = evals;
  out.final_step = step;

  const HermitianMatrix a(cur[0]), b(cur[1]), c(cur[2]);
  const TraceGapReport final_report = *try_evaluate(config, entry, cur);
  out.best_gap = final_report.gap;
  out.best_relative_gap = final_report.relative_gap();
  out.error_bound = certified_error_bound(final_report, a, b);
  out.witness = cur;
  out.verdict = out.best_gap < -out.error_bound ? Verdict::counterexample_candidate : Verdict::supported;
  return out;
}

json search_result_to_json(const SearchResult& r) {
  json j;
  j["inequality"] = std::string(to_string(r.id));
  j["entry"] = r.entry;
  j["best_gap"] = r.best_gap;
  j["best_relative_gap"] = r.best_relative_gap;
  j["error_bound"] = r.error_bound;
  j["verdict"] = to_string(r.verdict);
  j["witness_kind"] = r.witness_kind;
  j["witness_dim"] = r.witness_dim;
  j["witness_trial"] = r.witness_trial;
  j["trajectory"] = {{"random_evaluations", r.random_evaluations},
                     {"random_best_relative_gap", r.random_best_relative_gap},
                     {"descent_evaluations", r.descent_evaluations},
                     {"descent_improvements", r.descent_improvements},
                     {"final_step", r.final_step},
                     {"stationary", r.stationary}};
  return j;
}

json search_witness_to_json(const SearchResult& r) {
  json j;
  j["inequality"] = std::string(to_string(r.id));
  j["entry"] = r.entry;
  j["gap"] = r.best_gap;
  j["error_bound"] = r.error_bound;
  j["inputs"] = {{"A", complex_matrix_to_json(r.witness.at(0))},
                 {"B", complex_matrix_to_json(r.witness.at(1))},
                 {"C", complex_matrix_to_json(r.witness.at(2))}};
  return j;
}

TraceGapReport replay_search_witness(const json& witness) {
  try {
    const InequalityId id = parse_inequality_id(witness.at("inequality").get<std::string>());
    const auto& in = witness.at("inputs");
    const HermitianMatrix a = matrix_from_json(in.at("A"));
    const HermitianMatrix b = matrix_from_json(in.at("B"));
    const HermitianMatrix c = matrix_from_json(in.at("C"));
    if (id == InequalityId::expconj) return gap_conjecture_exp(a, b, c);
    if (id == InequalityId::fconj) return gap_conjecture_f(a, b, c, catalog_entry(witness.at("entry").get<std::string>()));
    throw ConfigError("witness inequality is not a conjecture");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid conjecture witness: ") + e.what());
  }
}

}  // namespace mconc
