#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mconc/discrete_model.hpp"

namespace mconc {

// (1/2) sum |p - q|.
double tv_distance(std::span<const double> p, std::span<const double> q);

std::vector<double> conditional_distribution(const DiscreteModel& model, std::size_t site, const Config& x);

struct InterdependenceMatrix {
  Eigen::MatrixXd entries;  // n x n, zero diagonal, entries in [0, 1]
  // Largest violation of tv(mu_i(.|x), mu_i(.|y)) <= sum_j d_ij 1[x_j != y_j] over all
  // checked (i, x, y); <= 0 up to rounding when the certification passed.
  double max_certification_excess = 0.0;
  bool certified = false;
};

struct DobrushinOptions {
  bool certify = true;
  // Upper limit on (x_{-i}, y_{-i}) pairs visited during certification, summed over sites.
  std::uint64_t certification_cap = 200'000'000;
};

// d_ij = max over configurations differing only at site j of the TV distance between
// the site-i conditionals. With options.certify the defining inequality is then
// checked on every pair of configurations.
InterdependenceMatrix dobrushin_matrix(const DiscreteModel& model, const DobrushinOptions& options = {});

struct MatrixNorms {
  double norm1;     // max column absolute sum
  double norm_inf;  // max row absolute sum
};

MatrixNorms matrix_norms(const Eigen::MatrixXd& d);

// B = (1 - 1/n) I + (1/n) D.
Eigen::MatrixXd b_matrix(const Eigen::MatrixXd& d);

// B^k e(j) by repeated multiplication.
Eigen::VectorXd b_power_column(const Eigen::MatrixXd& b, int k, Eigen::Index j);

struct NormRecursionReport {
  double b_norm1 = 0.0;
  double b_norm_inf = 0.0;
  bool b_norm1_bound_holds = false;     // ||B||_1 <= 1 - 1/n + ||D||_1 / n
  bool b_norm_inf_bound_holds = false;  // ||B||_inf <= 1 - 1/n + ||D||_inf / n
  int kmax = 0;
  double partial_sum = 0.0;             // sum_{k=0}^{kmax} (||B||_1^k + ||B||_inf^k)
  double limit = 0.0;                   // n (1/(1-||D||_1) + 1/(1-||D||_inf))
  double tail_norm1 = 0.0;              // ||B||_1^{kmax+1} / (1 - ||B||_1)
  double tail_norm_inf = 0.0;
  bool tail_bound_holds = false;        // limit - partial_sum <= tail_norm1 + tail_norm_inf (+ rounding)
  // ||B^k e(j)||_1 <= ||B||_1^k for all j and k in [0, kmax].
  bool column_norm_bound_holds = false;
};

NormRecursionReport norm_recursion_check(const Eigen::MatrixXd& d, int kmax);

}  // namespace mconc
