#include "mconc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mconc/dobrushin.hpp"
#include "mconc/errors.hpp"
#include "mconc/parallel.hpp"

namespace mconc {

const char* to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::independent:
      return "independent";
    case CouplingKind::greedy:
      return "greedy";
  }
  return "?";
}

CouplingKind parse_coupling_kind(const std::string& name) {
  if (name == "independent") return CouplingKind::independent;
  if (name == "greedy") return CouplingKind::greedy;
  throw ConfigError("unknown coupling '" + name + "' (expected independent or greedy)");
}

namespace {

void require_pmf_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw DimensionMismatch("maximal_coupling: supports differ");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw DomainError("maximal_coupling: negative or NaN probability");
  }
}

std::size_t sample_scaled(const std::vector<double>& w, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

std::vector<std::size_t> strides(const DiscreteModel& model) {
  std::vector<std::size_t> s(model.sites(), 1);
  for (std::size_t i = model.sites() - 1; i-- > 0;) s[i] = s[i + 1] * model.alphabet_size(i + 1);
  return s;
}

// Sparse row x of the random-scan Gibbs kernel (duplicates merged).
std::vector<std::pair<std::size_t, double>> gibbs_row(const DiscreteModel& model, std::size_t k,
                                                      const std::vector<std::size_t>& stride) {
  const Config x = model.decode(k);
  const double inv_n = 1.0 / static_cast<double>(model.sites());
  std::map<std::size_t, double> row;
  for (std::size_t i = 0; i < model.sites(); ++i) {
    const auto c = model.conditional(i, x);
    const std::size_t base = k - x[i] * stride[i];
    for (std::size_t v = 0; v < c.size(); ++v) row[base + v * stride[i]] += inv_n * c[v];
  }
  return {row.begin(), row.end()};
}

std::vector<CMatrix> centered_values(const DiscreteModel& model, const MatrixObservable& f) {
  model.require_enumerable("centered observable");
  const auto& pmf = model.joint_pmf();
  std::vector<CMatrix> vals(pmf.size());
  CMatrix mean = CMatrix::Zero(f.dim, f.dim);
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    vals[k] = f(model, model.decode(k)).matrix();
    if (vals[k].rows() != f.dim) throw DimensionMismatch("observable returned a matrix of the wrong dimension");
    mean += pmf[k] * vals[k];
  }
  for (auto& v : vals) v -= mean;
  return vals;
}

double herm_norm(const CMatrix& m) { return spectral_norm(HermitianMatrix::symmetrized(m)); }

}  // namespace

std::pair<std::size_t, std::size_t> maximal_coupling(std::span<const double> p, std::span<const double> q, Rng& rng) {
  require_pmf_pair(p, q);
  std::vector<double> overlap(p.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    overlap[i] = std::min(p[i], q[i]);
    mass += overlap[i];
  }
  const double u = uniform01(rng);
  if (u < mass) {
    const std::size_t a = sample_scaled(overlap, mass, rng);
    return {a, a};
  }
  std::vector<double> rp(p.size()), rq(q.size());
  double tp = 0.0, tq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    rp[i] = p[i] - overlap[i];
    rq[i] = q[i] - overlap[i];
    tp += rp[i];
    tq += rq[i];
  }
  if (!(tp > 0.0) || !(tq > 0.0)) {
    // Only reachable through rounding when p and q nearly coincide.
    const std::size_t a = sample_scaled(overlap, mass, rng);
    return {a, a};
  }
  return {sample_scaled(rp, tp, rng), sample_scaled(rq, tq, rng)};
}

Eigen::MatrixXd maximal_coupling_joint(std::span<const double> p, std::span<const double> q) {
  require_pmf_pair(p, q);
  const auto m = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rp(m), rq(m);
  double tv = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double o = std::min(p[static_cast<std::size_t>(a)], q[static_cast<std::size_t>(a)]);
    j(a, a) = o;
    rp(a) = p[static_cast<std::size_t>(a)] - o;
    rq(a) = q[static_cast<std::size_t>(a)] - o;
    tv += rp(a);
  }
  if (tv > 0.0) j += rp * rq.transpose() / tv;
  return j;
}

std::vector<int> CouplingState::disagreement() const {
  std::vector<int> l(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) l[i] = x[i] != xp[i] ? 1 : 0;
  return l;
}

std::size_t CouplingState::disagreement_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) c += x[i] != xp[i];
  return c;
}

ExchangeablePair make_exchangeable_pair(const DiscreteModel& model, Rng& rng) {
  ExchangeablePair pair;
  pair.x = model.sample(rng);
  pair.site = uniform_index(rng, model.sites());
  pair.xp = pair.x;
  const auto c = model.conditional(pair.site, pair.x);
  pair.xp[pair.site] = sample_index(c, rng);
  return pair;
}

CouplingState initial_state(const ExchangeablePair& pair) {
  CouplingState s;
  s.x = pair.x;
  s.xp = pair.xp;
  s.history = {pair.site};
  return s;
}

CouplingState initial_state(Config x, Config xp) {
  if (x.size() != xp.size()) throw DimensionMismatch("initial_state: configurations differ in length");
  std::size_t site = 0;
  while (site < x.size() && x[site] == xp[site]) ++site;
  CouplingState s;
  s.history = {site < x.size() ? site : 0};
  s.x = std::move(x);
  s.xp = std::move(xp);
  return s;
}

Eigen::MatrixXd single_site_kernel(const DiscreteModel& model, std::size_t site) {
  model.require_enumerable("single_site_kernel");
  if (site >= model.sites()) throw DimensionMismatch("single_site_kernel: site out of range");
  const std::size_t s = static_cast<std::size_t>(model.state_count());
  if (s > 4096) throw EnumerationCapError("single_site_kernel: dense kernel limited to 4096 states");
  const auto stride = strides(model);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  for (std::size_t k = 0; k < s; ++k) {
    const Config x = model.decode(k);
    const auto c = model.conditional(site, x);
    const std::size_t base = k - x[site] * stride[site];
    for (std::size_t v = 0; v < c.size(); ++v) {
      p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(base + v * stride[site])) += c[v];
    }
  }
  return p;
}

Eigen::MatrixXd gibbs_kernel(const DiscreteModel& model) {
  Eigen::MatrixXd p = single_site_kernel(model, 0);
  for (std::size_t i = 1; i < model.sites(); ++i) p += single_site_kernel(model, i);
  return p / static_cast<double>(model.sites());
}

Eigen::MatrixXd exchangeable_pair_joint(const DiscreteModel& model) {
  const Eigen::MatrixXd p = gibbs_kernel(model);
  const auto& pmf = model.joint_pmf();
  Eigen::MatrixXd j = p;
  for (Eigen::Index k = 0; k < j.rows(); ++k) j.row(k) *= pmf[static_cast<std::size_t>(k)];
  return j;
}

CouplingState step_independent(const CouplingState& state, const DiscreteModel& model, Rng& rng) {
  if (!model.is_product()) throw HypothesisViolation("step_independent requires a model with independent sites");
  CouplingState next = state;
  const std::size_t i = uniform_index(rng, model.sites());
  const std::size_t v = sample_index(model.marginal(i), rng);
  next.x[i] = v;
  next.xp[i] = v;
  next.history.push_back(i);
  ++next.step;
  return next;
}

CouplingState step_greedy(const CouplingState& state, const DiscreteModel& model, Rng& rng) {
  CouplingState next = state;
  const std::size_t i = uniform_index(rng, model.sites());
  const auto p = model.conditional(i, state.x);
  const auto q = model.conditional(i, state.xp);
  const auto [a, b] = maximal_coupling(p, q, rng);
  next.x[i] = a;
  next.xp[i] = b;
  next.history.push_back(i);
  ++next.step;
  return next;
}

CouplingState step(CouplingKind kind, const CouplingState& state, const DiscreteModel& model, Rng& rng) {
  return kind == CouplingKind::independent ? step_independent(state, model, rng) : step_greedy(state, model, rng);
}

CouplingState run_coupling(CouplingKind kind, CouplingState state, const DiscreteModel& model, std::size_t steps,
                           Rng& rng) {
  for (std::size_t k = 0; k < steps; ++k) state = step(kind, state, model, rng);
  return state;
}

PairDistribution::PairDistribution(const DiscreteModel& model, CouplingKind kind, std::uint64_t max_pairs)
    : model_(&model), kind_(kind) {
  model.require_enumerable("PairDistribution");
  if (kind == CouplingKind::independent && !model.is_product()) {
    throw HypothesisViolation("independent coupling requires a model with independent sites");
  }
  s_ = static_cast<std::size_t>(model.state_count());
  if (static_cast<std::uint64_t>(s_) * s_ > max_pairs) {
    throw EnumerationCapError("pair distribution needs " + std::to_string(s_ * s_) + " index pairs, above the cap " +
                              std::to_string(max_pairs));
  }
  const auto stride = strides(model);
  const std::size_t n = model.sites();
  conds_.resize(n);
  neighbor_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = model.alphabet_size(i);
    conds_[i].resize(s_);
    neighbor_[i].resize(s_ * a);
    for (std::size_t k = 0; k < s_; ++k) {
      const Config x = model.decode(k);
      if (x[i] == 0) {
        conds_[i][k] = model.conditional(i, x);
      } else {
        conds_[i][k] = conds_[i][k - x[i] * stride[i]];
      }
      const std::size_t base = k - x[i] * stride[i];
      for (std::size_t v = 0; v < a; ++v) neighbor_[i][k * a + v] = base + v * stride[i];
    }
  }
  mass_.assign(s_ * s_, 0.0);
  next_.assign(s_ * s_, 0.0);
}

void PairDistribution::reset(std::size_t x, std::size_t y) {
  if (x >= s_ || y >= s_) throw DimensionMismatch("PairDistribution::reset: index out of range");
  std::fill(mass_.begin(), mass_.end(), 0.0);
  mass_[x * s_ + y] = 1.0;
}

void PairDistribution::advance() {
  std::fill(next_.begin(), next_.end(), 0.0);
  const std::size_t n = model_->sites();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rp, rq;
  for (std::size_t pi = 0; pi < mass_.size(); ++pi) {
    const double m = mass_[pi];
    if (m == 0.0) continue;
    const std::size_t a = pi / s_;
    const std::size_t b = pi % s_;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t alph = model_->alphabet_size(i);
      const auto& p = conds_[i][a];
      const auto& q = conds_[i][b];
      const std::size_t* na = &neighbor_[i][a * alph];
      const std::size_t* nb = &neighbor_[i][b * alph];
      const double w = m * inv_n;
      if (kind_ == CouplingKind::independent) {
        for (std::size_t v = 0; v < alph; ++v) next_[na[v] * s_ + nb[v]] += w * p[v];
        continue;
      }
      rp.assign(alph, 0.0);
      rq.assign(alph, 0.0);
      double tv = 0.0;
      for (std::size_t v = 0; v < alph; ++v) {
        const double o = std::min(p[v], q[v]);
        next_[na[v] * s_ + nb[v]] += w * o;
        rp[v] = p[v] - o;
        rq[v] = q[v] - o;
        tv += rp[v];
      }
      if (tv <= 0.0) continue;
      for (std::size_t u = 0; u < alph; ++u) {
        if (rp[u] == 0.0) continue;
        for (std::size_t v = 0; v < alph; ++v) {
          if (rq[v] == 0.0) continue;
          next_[na[u] * s_ + nb[v]] += w * rp[u] * rq[v] / tv;
        }
      }
    }
  }
  mass_.swap(next_);
}

std::vector<double> PairDistribution::first_marginal() const {
  std::vector<double> m(s_, 0.0);
  for (std::size_t a = 0; a < s_; ++a) {
    for (std::size_t b = 0; b < s_; ++b) m[a] += mass_[a * s_ + b];
  }
  return m;
}

std::vector<double> PairDistribution::second_marginal() const {
  std::vector<double> m(s_, 0.0);
  for (std::size_t a = 0; a < s_; ++a) {
    for (std::size_t b = 0; b < s_; ++b) m[b] += mass_[a * s_ + b];
  }
  return m;
}

double PairDistribution::disagreement_probability() const {
  double total = 0.0;
  for (std::size_t a = 0; a < s_; ++a) {
    for (std::size_t b = 0; b < s_; ++b) {
      if (a != b) total += mass_[a * s_ + b];
    }
  }
  return total;
}

PropertyPReport verify_property_P(const DiscreteModel& model, CouplingKind kind, std::size_t steps, double tol) {
  PairDistribution dist(model, kind);
  const std::size_t s = dist.state_count();
  const std::uint64_t work = static_cast<std::uint64_t>(s) * s * s * s * (steps + 1);
  if (work > 4'000'000'000ULL) {
    throw EnumerationCapError("verify_property_P: " + std::to_string(work) + " propagation updates requested");
  }
  const Eigen::MatrixXd p = s <= 4096 ? gibbs_kernel(model) : Eigen::MatrixXd();
  std::vector<Eigen::MatrixXd> p_pow;
  if (p.size() > 0) {
    p_pow.push_back(Eigen::MatrixXd::Identity(p.rows(), p.cols()));
    for (std::size_t k = 1; k <= steps; ++k) p_pow.push_back(p_pow.back() * p);
  }
  // ref_x[x][k]: marginal of X(k) from (x, 0); ref_y[y][k]: marginal of X'(k) from (0, y).
  std::vector<std::vector<std::vector<double>>> ref_x(s), ref_y(s);
  PropertyPReport r;
  r.steps = steps;
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) {
      dist.reset(x, y);
      for (std::size_t k = 0; k <= steps; ++k) {
        if (k > 0) dist.advance();
        const auto m1 = dist.first_marginal();
        const auto m2 = dist.second_marginal();
        if (y == 0) ref_x[x].push_back(m1);
        if (x == 0) ref_y[y].push_back(m2);
        for (std::size_t z = 0; z < s; ++z) {
          r.max_deviation = std::max(r.max_deviation, std::abs(m1[z] - ref_x[x][k][z]));
          r.max_deviation = std::max(r.max_deviation, std::abs(m2[z] - ref_y[y][k][z]));
          if (!p_pow.empty()) {
            const auto zi = static_cast<Eigen::Index>(z);
            r.max_kernel_deviation =
                std::max(r.max_kernel_deviation, std::abs(m1[z] - p_pow[k](static_cast<Eigen::Index>(x), zi)));
            r.max_kernel_deviation =
                std::max(r.max_kernel_deviation, std::abs(m2[z] - p_pow[k](static_cast<Eigen::Index>(y), zi)));
          }
        }
      }
      ++r.start_pairs;
    }
  }
  r.holds = r.max_deviation <= tol && r.max_kernel_deviation <= tol;
  return r;
}

namespace {

AntisymmetricFResult f_exact(PairDistribution& dist, const DiscreteModel& model, const std::vector<CMatrix>& fc,
                             double diam, std::size_t x, std::size_t y, const AntisymmetricFOptions& options) {
  const Eigen::Index d = fc.front().rows();
  CMatrix acc = CMatrix::Zero(d, d);
  AntisymmetricFResult out;
  dist.reset(x, y);
  std::vector<double> q;
  constexpr std::size_t window = 5;
  for (std::size_t k = 0; k < options.max_steps; ++k) {
    if (k > 0) dist.advance();
    const auto m1 = dist.first_marginal();
    const auto m2 = dist.second_marginal();
    for (std::size_t z = 0; z < m1.size(); ++z) {
      const double w = m1[z] - m2[z];
      if (w != 0.0) acc += w * fc[z];
    }
    q.push_back(dist.disagreement_probability());
    out.steps = k + 1;
    if (q.back() == 0.0 || diam == 0.0) {
      out.tail_estimate = 0.0;
      break;
    }
    if (k < window) {
      out.tail_estimate = std::numeric_limits<double>::infinity();
      continue;
    }
    double ratio = 0.0;
    for (std::size_t j = k - window + 1; j <= k; ++j) ratio = std::max(ratio, q[j] / q[j - 1]);
    out.tail_estimate =
        ratio < 1.0 ? options.safety_factor * diam * q.back() * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    if (out.tail_estimate < options.tail_tolerance) break;
  }
  if (!(out.tail_estimate < options.tail_tolerance) && out.tail_estimate != 0.0) {
    throw NumericalError("antisymmetric_F: tail estimate " + std::to_string(out.tail_estimate) + " after " +
                         std::to_string(out.steps) + " steps exceeds " + std::to_string(options.tail_tolerance));
  }
  (void)model;
  out.value = HermitianMatrix::symmetrized(acc);
  out.exact = true;
  return out;
}

double observable_diameter(const std::vector<CMatrix>& fc) {
  double mx = 0.0;
  for (const auto& v : fc) mx = std::max(mx, herm_norm(v));
  return 2.0 * mx;
}

}  // namespace

AntisymmetricFResult antisymmetric_F(const DiscreteModel& model, CouplingKind kind, const MatrixObservable& f,
                                     const Config& x, const Config& y, const AntisymmetricFOptions& options) {
  if (x.size() != model.sites() || y.size() != model.sites()) throw DimensionMismatch("antisymmetric_F: bad configuration");
  if (options.runs == 0) {
    PairDistribution dist(model, kind);
    const auto fc = centered_values(model, f);
    return f_exact(dist, model, fc, observable_diameter(fc), model.encode(x), model.encode(y), options);
  }
  // Monte Carlo: coupled runs until coalescence; centering cancels in the differences.
  std::vector<CMatrix> sums(options.runs);
  std::vector<char> coalesced(options.runs, 0);
  std::vector<double> diam(options.runs, 0.0);
  parallel_for(options.runs, default_thread_count(), [&](std::size_t r) {
    Rng rng = make_rng(options.seed, r);
    CouplingState st = initial_state(x, y);
    CMatrix acc = CMatrix::Zero(f.dim, f.dim);
    for (std::size_t k = 0; k < options.max_steps; ++k) {
      if (k > 0) st = step(kind, st, model, rng);
      if (st.disagreement_count() == 0) {
        coalesced[r] = 1;
        break;
      }
      const CMatrix diff = f(model, st.x).matrix() - f(model, st.xp).matrix();
      diam[r] = std::max(diam[r], herm_norm(diff));
      acc += diff;
    }
    sums[r] = acc;
  });
  CMatrix total = CMatrix::Zero(f.dim, f.dim);
  std::size_t open = 0;
  double dmax = 0.0;
  for (std::size_t r = 0; r < options.runs; ++r) {
    total += sums[r];
    open += coalesced[r] == 0;
    dmax = std::max(dmax, diam[r]);
  }
  AntisymmetricFResult out;
  out.exact = false;
  out.steps = options.max_steps;
  out.tail_estimate = options.safety_factor * dmax * static_cast<double>(open) / static_cast<double>(options.runs);
  if (open > 0 && out.tail_estimate >= options.tail_tolerance) {
    throw NumericalError("antisymmetric_F: " + std::to_string(open) + " coupled runs did not coalesce within " +
                         std::to_string(options.max_steps) + " steps");
  }
  out.value = HermitianMatrix::symmetrized(total / static_cast<double>(options.runs));
  return out;
}

LemmaCheck check_antisymmetric_F(const DiscreteModel& model, CouplingKind kind, const MatrixObservable& f,
                                 const AntisymmetricFOptions& options) {
  PairDistribution dist(model, kind);
  const auto fc = centered_values(model, f);
  const double diam = observable_diameter(fc);
  const auto stride = strides(model);
  const std::size_t s = dist.state_count();
  std::map<std::pair<std::size_t, std::size_t>, CMatrix> cache;
  auto get = [&](std::size_t a, std::size_t b) -> const CMatrix& {
    auto it = cache.find({a, b});
    if (it == cache.end()) {
      it = cache.emplace(std::make_pair(a, b), f_exact(dist, model, fc, diam, a, b, options).value.matrix()).first;
    }
    return it->second;
  };
  LemmaCheck out;
  for (std::size_t a = 0; a < s; ++a) {
    CMatrix mean = CMatrix::Zero(f.dim, f.dim);
    for (const auto& [b, w] : gibbs_row(model, a, stride)) {
      const CMatrix& fab = get(a, b);
      const CMatrix& fba = get(b, a);
      out.max_antisymmetry = std::max(out.max_antisymmetry, herm_norm(fab + fba));
      mean += w * fab;
      ++out.pairs_evaluated;
    }
    out.max_mean_residual = std::max(out.max_mean_residual, herm_norm(mean - fc[a]));
  }
  return out;
}

void SteinPairSpec::validate() const {
  if (model == nullptr) throw ConfigError("Stein pair spec needs a model");
  if (!psi.evaluate) throw ConfigError("Stein pair spec needs an observable");
  if (claimed_alpha && !(*claimed_alpha > 0.0 && *claimed_alpha <= 1.0)) {
    throw ConfigError("claimed scale factor must lie in (0, 1]");
  }
}

SteinPairReport verify_stein_pair(const SteinPairSpec& spec, double tol) {
  spec.validate();
  const DiscreteModel& model = *spec.model;
  const auto fc = centered_values(model, spec.psi);
  const auto stride = strides(model);
  const std::size_t s = fc.size();
  std::vector<CMatrix> drift(s);
  double num = 0.0, den = 0.0, scale = 0.0;
  for (std::size_t z = 0; z < s; ++z) {
    CMatrix acc = CMatrix::Zero(spec.psi.dim, spec.psi.dim);
    for (const auto& [y, w] : gibbs_row(model, z, stride)) acc += w * (fc[z] - fc[y]);
    drift[z] = acc;
    num += (acc.adjoint() * fc[z]).trace().real();
    den += fc[z].squaredNorm();
    scale = std::max(scale, herm_norm(fc[z]));
  }
  SteinPairReport r;
  const double floor = 1e-12 * std::max(1.0, scale);
  if (scale <= floor || den == 0.0) {
    r.degenerate = true;
    for (const auto& dz : drift) r.residual = std::max(r.residual, herm_norm(dz));
    return r;
  }
  const double alpha = num / den;
  r.alpha_hat = alpha;
  for (std::size_t z = 0; z < s; ++z) r.residual = std::max(r.residual, herm_norm(drift[z] - alpha * fc[z]));
  if (spec.claimed_alpha) {
    double cr = 0.0;
    for (std::size_t z = 0; z < s; ++z) cr = std::max(cr, herm_norm(drift[z] - *spec.claimed_alpha * fc[z]));
    r.claimed_residual = cr;
  }
  r.is_stein_pair = r.residual <= tol * std::max(1.0, scale) && alpha > 0.0 && alpha <= 1.0 + tol;
  return r;
}

std::vector<HermitianMatrix> telescoping_decomposition(const DiscreteModel& model, const MatrixObservable& f,
                                                       const Config& x, const Config& y) {
  if (x.size() != y.size() || x.size() != model.sites()) {
    throw DimensionMismatch("telescoping_decomposition: configurations differ in shape");
  }
  std::vector<HermitianMatrix> z;
  z.reserve(x.size());
  Config w = x;
  HermitianMatrix prev = f(model, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) {
      z.push_back(HermitianMatrix::zero(f.dim));
      continue;
    }
    w[i] = y[i];
    HermitianMatrix cur = f(model, w);
    z.push_back(prev - cur);
    prev = std::move(cur);
  }
  return z;
}

double coupon_collector_survival(std::size_t n, std::size_t k) {
  if (n == 0) throw DomainError("coupon_collector_survival: n must be >= 1");
  return std::pow(1.0 - 1.0 / static_cast<double>(n), static_cast<double>(k));
}

double coupon_collector_weighted(std::size_t n, std::size_t k) {
  return coupon_collector_survival(n, k) / static_cast<double>(n);
}

DisagreementProfile disagreement_profile(const DiscreteModel& model, CouplingKind kind, std::size_t steps,
                                         std::size_t runs, std::uint64_t seed, unsigned threads) {
  if (runs == 0) throw ConfigError("disagreement_profile: runs must be >= 1");
  const std::size_t n = model.sites();
  const std::size_t row = (steps + 1) * n;
  std::vector<unsigned char> marks(runs * row);
  std::vector<std::size_t> sites(runs);
  parallel_for(runs, threads == 0 ? default_thread_count() : threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, r);
    CouplingState st = initial_state(make_exchangeable_pair(model, rng));
    sites[r] = st.history.front();
    unsigned char* out = &marks[r * row];
    for (std::size_t k = 0; k <= steps; ++k) {
      if (k > 0) st = step(kind, st, model, rng);
      for (std::size_t i = 0; i < n; ++i) out[k * n + i] = st.x[i] != st.xp[i];
    }
  });
  DisagreementProfile p;
  p.steps = steps;
  p.runs.assign(n, 0);
  const auto rows = static_cast<Eigen::Index>(steps + 1);
  const auto cols = static_cast<Eigen::Index>(n);
  p.mean.assign(n, Eigen::MatrixXd::Zero(rows, cols));
  p.standard_error.assign(n, Eigen::MatrixXd::Zero(rows, cols));
  for (std::size_t r = 0; r < runs; ++r) {
    const std::size_t s = sites[r];
    ++p.runs[s];
    for (std::size_t k = 0; k <= steps; ++k) {
      for (std::size_t i = 0; i < n; ++i) p.mean[s](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) += marks[r * row + k * n + i];
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double c = static_cast<double>(p.runs[s]);
    if (c == 0.0) continue;
    p.mean[s] /= c;
    for (Eigen::Index k = 0; k < rows; ++k) {
      for (Eigen::Index i = 0; i < cols; ++i) {
        const double m = p.mean[s](k, i);
        p.standard_error[s](k, i) = c > 1.0 ? std::sqrt(m * (1.0 - m) / (c - 1.0)) : 0.0;
      }
    }
  }
  return p;
}

DominationReport check_disagreement_domination(const DisagreementProfile& profile, const Eigen::MatrixXd& b,
                                               double z) {
  DominationReport r;
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < profile.mean.size(); ++s) {
    if (profile.runs[s] == 0) continue;
    for (std::size_t k = 0; k <= profile.steps; ++k) {
      const Eigen::VectorXd bound = b_power_column(b, static_cast<int>(k), static_cast<Eigen::Index>(s));
      for (Eigen::Index i = 0; i < bound.size(); ++i) {
        const auto ki = static_cast<Eigen::Index>(k);
        const double excess = profile.mean[s](ki, i) - bound(i) - z * profile.standard_error[s](ki, i);
        r.max_excess = std::max(r.max_excess, excess);
      }
    }
  }
  r.holds = r.max_excess <= 1e-12;
  return r;
}

}  // namespace mconc
