#include "mconc/discrete_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mconc/errors.hpp"

namespace mconc {

namespace {

void validate_alphabets(const std::vector<std::vector<int>>& alphabets) {
  if (alphabets.empty()) throw ConfigError("model needs at least one site");
  for (std::size_t i = 0; i < alphabets.size(); ++i) {
    if (alphabets[i].empty()) throw ConfigError("site " + std::to_string(i) + " has an empty alphabet");
    std::vector<int> sorted = alphabets[i];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("site " + std::to_string(i) + " has repeated alphabet values");
    }
  }
}

std::vector<double> normalized_exp(std::vector<double> logw) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - mx);
    total += w;
  }
  for (double& w : logw) w /= total;
  return logw;
}

}  // namespace

std::size_t sample_index(std::span<const double> pmf, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  // Rounding left u above the accumulated mass: return the last positive entry.
  for (std::size_t i = pmf.size(); i-- > 0;) {
    if (pmf[i] > 0.0) return i;
  }
  return pmf.size() - 1;
}

void DiscreteModel::finalize() {
  validate_alphabets(alphabets_);
  state_count_ = 1;
  for (const auto& a : alphabets_) {
    if (state_count_ > std::numeric_limits<std::uint64_t>::max() / a.size()) {
      state_count_ = std::numeric_limits<std::uint64_t>::max();
      break;
    }
    state_count_ *= a.size();
  }
  if (state_count_ > cap_) return;
  const std::size_t s = static_cast<std::size_t>(state_count_);
  std::vector<double> logw(s);
  for (std::size_t k = 0; k < s; ++k) {
    logw[k] = log_weight(decode(k));
    if (!std::isfinite(logw[k])) {
      throw ConfigError("model weights must be strictly positive and finite (configuration " + std::to_string(k) + ")");
    }
  }
  pmf_ = normalized_exp(std::move(logw));
  std::vector<double> cdf(s);
  double acc = 0.0;
  for (std::size_t k = 0; k < s; ++k) {
    acc += (*pmf_)[k];
    cdf[k] = acc;
  }
  cdf_ = std::move(cdf);
}

DiscreteModel DiscreteModel::from_log_weight(std::vector<std::vector<int>> alphabets, LogWeight log_weight,
                                             std::uint64_t cap) {
  DiscreteModel m;
  m.alphabets_ = std::move(alphabets);
  m.log_weight_ = std::move(log_weight);
  m.cap_ = cap;
  m.finalize();
  return m;
}

DiscreteModel DiscreteModel::table(std::vector<std::vector<int>> alphabets, std::vector<double> weights,
                                   std::uint64_t cap) {
  validate_alphabets(alphabets);
  std::uint64_t s = 1;
  for (const auto& a : alphabets) s *= a.size();
  if (weights.size() != s) {
    throw ConfigError("table model needs " + std::to_string(s) + " weights, got " + std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("table model weights must be strictly positive");
  }
  std::vector<std::size_t> sizes;
  for (const auto& a : alphabets) sizes.push_back(a.size());
  auto shared = std::make_shared<std::vector<double>>(std::move(weights));
  auto alph = alphabets;
  return from_log_weight(
      std::move(alphabets),
      [shared, alph](std::span<const int> v) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < alph.size(); ++i) {
          const auto pos = std::find(alph[i].begin(), alph[i].end(), v[i]) - alph[i].begin();
          idx = idx * alph[i].size() + static_cast<std::size_t>(pos);
        }
        return std::log((*shared)[idx]);
      },
      cap);
}

DiscreteModel DiscreteModel::ising(const Eigen::MatrixXd& beta, const Eigen::VectorXd& field, std::uint64_t cap) {
  const auto n = beta.rows();
  if (beta.cols() != n || field.size() != n || n < 1) throw ConfigError("ising: beta must be n x n and h length n");
  std::vector<std::vector<int>> alph(static_cast<std::size_t>(n), std::vector<int>{-1, 1});
  return from_log_weight(
      std::move(alph),
      [beta, field](std::span<const int> x) {
        double e = 0.0;
        const auto n = beta.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
          e += field(i) * x[static_cast<std::size_t>(i)];
          for (Eigen::Index j = i + 1; j < n; ++j) {
            e += beta(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
          }
        }
        return e;
      },
      cap);
}

DiscreteModel DiscreteModel::product(std::vector<std::vector<int>> alphabets,
                                     std::vector<std::vector<double>> marginals, std::uint64_t cap) {
  validate_alphabets(alphabets);
  if (marginals.size() != alphabets.size()) throw ConfigError("product model needs one marginal per site");
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    if (marginals[i].size() != alphabets[i].size()) {
      throw ConfigError("marginal " + std::to_string(i) + " does not match its alphabet size");
    }
    double total = 0.0;
    for (double w : marginals[i]) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("product model weights must be strictly positive");
      total += w;
    }
    for (double& w : marginals[i]) w /= total;
  }
  auto alph = alphabets;
  auto marg = marginals;
  DiscreteModel m = from_log_weight(
      std::move(alphabets),
      [alph, marg](std::span<const int> v) {
        double lw = 0.0;
        for (std::size_t i = 0; i < alph.size(); ++i) {
          const auto pos = std::find(alph[i].begin(), alph[i].end(), v[i]) - alph[i].begin();
          lw += std::log(marg[i][static_cast<std::size_t>(pos)]);
        }
        return lw;
      },
      cap);
  m.marginals_ = std::move(marginals);
  return m;
}

DiscreteModel DiscreteModel::uniform(std::vector<std::vector<int>> alphabets, std::uint64_t cap) {
  std::vector<std::vector<double>> marg;
  for (const auto& a : alphabets) marg.emplace_back(a.size(), 1.0);
  return product(std::move(alphabets), std::move(marg), cap);
}

DiscreteModel DiscreteModel::rademacher(std::size_t n, std::uint64_t cap) {
  return uniform(std::vector<std::vector<int>>(n, std::vector<int>{-1, 1}), cap);
}

const std::vector<double>& DiscreteModel::joint_pmf() const {
  require_enumerable("joint_pmf");
  return *pmf_;
}

void DiscreteModel::require_enumerable(const char* what) const {
  if (!pmf_) {
    throw EnumerationCapError(std::string(what) + ": product space has " + std::to_string(state_count_) +
                              " states, above the enumeration cap " + std::to_string(cap_));
  }
}

std::size_t DiscreteModel::encode(const Config& x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < alphabets_.size(); ++i) idx = idx * alphabets_[i].size() + x[i];
  return idx;
}

Config DiscreteModel::decode(std::size_t index) const {
  Config x(alphabets_.size());
  for (std::size_t i = alphabets_.size(); i-- > 0;) {
    x[i] = index % alphabets_[i].size();
    index /= alphabets_[i].size();
  }
  return x;
}

std::vector<int> DiscreteModel::values(const Config& x) const {
  std::vector<int> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = alphabets_[i][x[i]];
  return v;
}

double DiscreteModel::log_weight(const Config& x) const {
  const std::vector<int> v = values(x);
  return log_weight_(v);
}

std::vector<double> DiscreteModel::conditional(std::size_t i, const Config& x) const {
  if (marginals_) return (*marginals_)[i];
  Config y = x;
  std::vector<double> logw(alphabets_[i].size());
  for (std::size_t v = 0; v < logw.size(); ++v) {
    y[i] = v;
    logw[v] = log_weight(y);
  }
  return normalized_exp(std::move(logw));
}

std::vector<double> DiscreteModel::marginal(std::size_t i) const {
  if (marginals_) return (*marginals_)[i];
  require_enumerable("marginal");
  std::vector<double> m(alphabets_[i].size(), 0.0);
  for (std::size_t k = 0; k < pmf_->size(); ++k) m[decode(k)[i]] += (*pmf_)[k];
  return m;
}

Config DiscreteModel::sample(Rng& rng) const {
  if (marginals_) {
    Config x(alphabets_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sample_index((*marginals_)[i], rng);
    return x;
  }
  require_enumerable("sample");
  const double u = uniform01(rng);
  auto it = std::upper_bound(cdf_->begin(), cdf_->end(), u);
  std::size_t k = static_cast<std::size_t>(it - cdf_->begin());
  if (k >= cdf_->size()) k = cdf_->size() - 1;
  return decode(k);
}

DiscreteModel model_from_json(const nlohmann::json& j, std::uint64_t cap) {
  try {
    auto alphabets = j.at("alphabets").get<std::vector<std::vector<int>>>();
    if (j.contains("n") && j.at("n").get<std::size_t>() != alphabets.size()) {
      throw ConfigError("model 'n' does not match the number of alphabets");
    }
    const auto& w = j.at("weight");
    const std::string kind = w.at("kind").get<std::string>();
    if (kind == "table") return DiscreteModel::table(std::move(alphabets), w.at("weights").get<std::vector<double>>(), cap);
    if (kind == "product") {
      return DiscreteModel::product(std::move(alphabets), w.at("marginals").get<std::vector<std::vector<double>>>(), cap);
    }
    if (kind == "ising") {
      for (const auto& a : alphabets) {
        if (a != std::vector<int>{-1, 1}) throw ConfigError("ising model alphabets must be [-1, 1]");
      }
      const auto n = static_cast<Eigen::Index>(alphabets.size());
      const auto beta_rows = w.at("beta").get<std::vector<std::vector<double>>>();
      if (static_cast<Eigen::Index>(beta_rows.size()) != n) throw ConfigError("ising beta must be n x n");
      Eigen::MatrixXd beta(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(beta_rows[static_cast<std::size_t>(i)].size()) != n) {
          throw ConfigError("ising beta must be n x n");
        }
        for (Eigen::Index k = 0; k < n; ++k) beta(i, k) = beta_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
      if (w.contains("h")) {
        const auto hv = w.at("h").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(hv.size()) != n) throw ConfigError("ising h must have length n");
        for (Eigen::Index i = 0; i < n; ++i) h(i) = hv[static_cast<std::size_t>(i)];
      }
      return DiscreteModel::ising(beta, h, cap);
    }
    throw ConfigError("unknown weight kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid model object: ") + e.what());
  }
}

}  // namespace mconc
