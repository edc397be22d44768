#include "mconc/observable.hpp"

#include <cmath>
#include <limits>

namespace mconc {

HermitianMatrix MatrixObservable::operator()(const DiscreteModel& model, const Config& x) const {
  const std::vector<int> v = model.values(x);
  return evaluate(v);
}

MatrixObservable rademacher_sum(std::vector<HermitianMatrix> terms) {
  if (terms.empty()) throw ConfigError("rademacher_sum needs at least one term");
  const Eigen::Index d = terms.front().dim();
  for (const auto& t : terms) require_same_dim(terms.front(), t, "rademacher_sum");
  MatrixObservable h;
  h.dim = d;
  h.linear_terms = terms;
  std::vector<HermitianMatrix> doubled;
  for (const auto& t : terms) doubled.push_back(t * 2.0);
  h.difference_bounds = DifferenceBoundSet(std::move(doubled));
  h.evaluate = [terms = std::move(terms), d](std::span<const int> z) {
    if (z.size() != terms.size()) throw DimensionMismatch("rademacher_sum: configuration length mismatch");
    CMatrix m = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < terms.size(); ++k) m += static_cast<double>(z[k]) * terms[k].matrix();
    return HermitianMatrix::symmetrized(m);
  };
  return h;
}

MatrixObservable table_observable(const DiscreteModel& model, std::vector<HermitianMatrix> table) {
  model.require_enumerable("table_observable");
  if (table.size() != model.state_count()) {
    throw ConfigError("table observable needs one matrix per configuration (" + std::to_string(model.state_count()) +
                      ")");
  }
  for (const auto& t : table) require_same_dim(table.front(), t, "table_observable");
  MatrixObservable h;
  h.dim = table.front().dim();
  std::vector<std::vector<int>> alphabets;
  for (std::size_t i = 0; i < model.sites(); ++i) alphabets.push_back(model.alphabet(i));
  h.evaluate = [table = std::move(table), alphabets = std::move(alphabets)](std::span<const int> v) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < alphabets.size(); ++i) {
      const auto pos = std::find(alphabets[i].begin(), alphabets[i].end(), v[i]) - alphabets[i].begin();
      idx = idx * alphabets[i].size() + static_cast<std::size_t>(pos);
    }
    return table[idx];
  };
  return h;
}

MatrixObservable scalar_observable(std::function<double(std::span<const int>)> f) {
  MatrixObservable h;
  h.dim = 1;
  h.evaluate = [f = std::move(f)](std::span<const int> v) { return HermitianMatrix::scalar(f(v)); };
  return h;
}

std::optional<HermitianMatrix> exact_mean(const DiscreteModel& model, const MatrixObservable& h) {
  if (model.enumerable()) {
    const auto& pmf = model.joint_pmf();
    CMatrix acc = CMatrix::Zero(h.dim, h.dim);
    for (std::size_t k = 0; k < pmf.size(); ++k) acc += pmf[k] * h(model, model.decode(k)).matrix();
    return HermitianMatrix::symmetrized(acc);
  }
  if (!h.linear_terms.empty() && model.is_product() && h.linear_terms.size() == model.sites()) {
    CMatrix acc = CMatrix::Zero(h.dim, h.dim);
    for (std::size_t k = 0; k < model.sites(); ++k) {
      const auto m = model.marginal(k);
      double mean = 0.0;
      for (std::size_t v = 0; v < m.size(); ++v) mean += m[v] * model.alphabet(k)[v];
      acc += mean * h.linear_terms[k].matrix();
    }
    return HermitianMatrix::symmetrized(acc);
  }
  return std::nullopt;
}

DifferenceBoundCheck check_difference_bounds(const DiscreteModel& model, const MatrixObservable& h,
                                             const DifferenceBoundSet& bounds, double tol, std::size_t samples,
                                             std::uint64_t seed) {
  if (bounds.matrices().size() != model.sites()) throw DimensionMismatch("one difference bound per site required");
  DifferenceBoundCheck out;
  out.min_slack = std::numeric_limits<double>::infinity();
  std::vector<HermitianMatrix> bound_sq;
  for (const auto& a : bounds.matrices()) bound_sq.push_back(a.squared());
  auto visit = [&](const Config& x) {
    const HermitianMatrix hx = h(model, x);
    for (std::size_t k = 0; k < model.sites(); ++k) {
      for (std::size_t v = 0; v < model.alphabet_size(k); ++v) {
        if (v == x[k]) continue;
        Config y = x;
        y[k] = v;
        const HermitianMatrix diff = hx - h(model, y);
        const LoewnerCheck c = psd_order_leq(diff.squared(), bound_sq[k], tol);
        out.min_slack = std::min(out.min_slack, c.min_eigenvalue);
        out.holds = out.holds && c.holds;
        ++out.swaps_checked;
      }
    }
  };
  if (samples == 0) {
    model.require_enumerable("check_difference_bounds");
    for (std::size_t s = 0; s < model.state_count(); ++s) visit(model.decode(s));
  } else {
    for (std::size_t s = 0; s < samples; ++s) {
      Rng rng = make_rng(seed, s);
      visit(model.sample(rng));
    }
  }
  if (out.swaps_checked == 0) out.min_slack = 0.0;
  return out;
}

}  // namespace mconc
