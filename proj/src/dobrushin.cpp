#include "mconc/dobrushin.hpp"

#include <cmath>
#include <limits>

#include "mconc/errors.hpp"

namespace mconc {

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionMismatch("tv_distance: supports differ in size");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * s);
}

std::vector<double> conditional_distribution(const DiscreteModel& model, std::size_t site, const Config& x) {
  if (site >= model.sites() || x.size() != model.sites()) throw DimensionMismatch("conditional_distribution: bad site");
  return model.conditional(site, x);
}

namespace {

// Conditionals of site i for every configuration index (digit i ignored).
std::vector<std::vector<double>> conditional_table(const DiscreteModel& model, std::size_t i) {
  const std::size_t s = static_cast<std::size_t>(model.state_count());
  std::vector<std::vector<double>> table(s);
  for (std::size_t k = 0; k < s; ++k) {
    Config x = model.decode(k);
    if (x[i] != 0) {
      x[i] = 0;
      table[k] = table[model.encode(x)];
      continue;
    }
    table[k] = model.conditional(i, x);
  }
  return table;
}

}  // namespace

InterdependenceMatrix dobrushin_matrix(const DiscreteModel& model, const DobrushinOptions& options) {
  model.require_enumerable("dobrushin_matrix");
  const std::size_t n = model.sites();
  const std::size_t s = static_cast<std::size_t>(model.state_count());
  InterdependenceMatrix out;
  out.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<std::vector<std::vector<double>>> cond(n);
  for (std::size_t i = 0; i < n; ++i) cond[i] = conditional_table(model, i);

  for (std::size_t k = 0; k < s; ++k) {
    const Config x = model.decode(k);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t v = x[j] + 1; v < model.alphabet_size(j); ++v) {
        Config y = x;
        y[j] = v;
        const std::size_t ky = model.encode(y);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == j) continue;
          const double tv = tv_distance(cond[i][k], cond[i][ky]);
          auto& e = out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          e = std::max(e, tv);
        }
      }
    }
  }

  if (!options.certify) return out;

  std::uint64_t work = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t rest = s / model.alphabet_size(i);
    work += rest * rest;
  }
  if (work > options.certification_cap) {
    throw EnumerationCapError("dobrushin_matrix: certification needs " + std::to_string(work) +
                              " configuration pairs, above the cap " + std::to_string(options.certification_cap));
  }
  // Only configurations with digit i = 0 are visited for site i: the conditional
  // ignores x_i, and 1[x_i != y_i] carries the zero weight d_ii.
  double excess = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t kx = 0; kx < s; ++kx) {
      const Config x = model.decode(kx);
      if (x[i] != 0) continue;
      for (std::size_t ky = kx; ky < s; ++ky) {
        const Config y = model.decode(ky);
        if (y[i] != 0) continue;
        double bound = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (x[j] != y[j]) bound += out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        excess = std::max(excess, tv_distance(cond[i][kx], cond[i][ky]) - bound);
      }
    }
  }
  out.max_certification_excess = excess;
  out.certified = excess <= 1e-12;
  if (!out.certified) {
    throw NumericalError("dobrushin_matrix: single-site maxima fail the defining inequality by " +
                         std::to_string(excess));
  }
  return out;
}

MatrixNorms matrix_norms(const Eigen::MatrixXd& d) {
  if (d.size() == 0) return {0.0, 0.0};
  return {d.cwiseAbs().colwise().sum().maxCoeff(), d.cwiseAbs().rowwise().sum().maxCoeff()};
}

Eigen::MatrixXd b_matrix(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols() || d.rows() < 1) throw DimensionMismatch("b_matrix: D must be square");
  const double n = static_cast<double>(d.rows());
  return (1.0 - 1.0 / n) * Eigen::MatrixXd::Identity(d.rows(), d.cols()) + d / n;
}

Eigen::VectorXd b_power_column(const Eigen::MatrixXd& b, int k, Eigen::Index j) {
  if (k < 0) throw DomainError("b_power_column: k must be >= 0");
  if (j < 0 || j >= b.cols()) throw DimensionMismatch("b_power_column: column out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Unit(b.rows(), j);
  for (int step = 0; step < k; ++step) v = b * v;
  return v;
}

NormRecursionReport norm_recursion_check(const Eigen::MatrixXd& d, int kmax) {
  if (kmax < 0) throw DomainError("norm_recursion_check: kmax must be >= 0");
  const Eigen::MatrixXd b = b_matrix(d);
  const double n = static_cast<double>(d.rows());
  const MatrixNorms dn = matrix_norms(d);
  const MatrixNorms bn = matrix_norms(b);
  NormRecursionReport r;
  r.kmax = kmax;
  r.b_norm1 = bn.norm1;
  r.b_norm_inf = bn.norm_inf;
  constexpr double eps = 1e-14;
  r.b_norm1_bound_holds = bn.norm1 <= 1.0 - 1.0 / n + dn.norm1 / n + eps;
  r.b_norm_inf_bound_holds = bn.norm_inf <= 1.0 - 1.0 / n + dn.norm_inf / n + eps;
  double p1 = 1.0, pinf = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    r.partial_sum += p1 + pinf;
    p1 *= bn.norm1;
    pinf *= bn.norm_inf;
  }
  if (dn.norm1 < 1.0 && dn.norm_inf < 1.0) {
    r.limit = n * (1.0 / (1.0 - dn.norm1) + 1.0 / (1.0 - dn.norm_inf));
    r.tail_norm1 = p1 / (1.0 - bn.norm1);
    r.tail_norm_inf = pinf / (1.0 - bn.norm_inf);
    r.tail_bound_holds = r.limit - r.partial_sum <= (r.tail_norm1 + r.tail_norm_inf) * (1.0 + 1e-12) + 1e-12 * r.limit;
  } else {
    r.limit = std::numeric_limits<double>::infinity();
    r.tail_norm1 = r.tail_norm_inf = std::numeric_limits<double>::infinity();
  }
  r.column_norm_bound_holds = true;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d.rows(), j);
    double bound = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      if (v.cwiseAbs().sum() > bound * (1.0 + 1e-12) + 1e-15) r.column_norm_bound_holds = false;
      v = b * v;
      bound *= bn.norm1;
    }
  }
  return r;
}

}  // namespace mconc
