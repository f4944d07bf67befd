#pragma once

#include <cstdint>
#include <vector>

#include "dodcut/discretization.hpp"

namespace dodcut {

struct StudyConfig {
  double gamma_deg = 25.0;
  double x0 = 0.2001;
  std::vector<int> ns{16, 32, 64, 128, 256};
  SchemeConfig scheme;
  bool accumulate = false;  // time-accumulated seminorm, one trace evaluation per step
};

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;  // nominal step
  double l2_error = 0.0;
  double beta_semi_error = 0.0;
  double accumulated_seminorm = 0.0;  // sqrt(sum dt |u - u_h|_beta^2); NaN when not requested
  double order_l2 = 0.0;              // NaN on the first row
  double order_beta = 0.0;
};

struct ConvergenceReport {
  double gamma_deg = 0.0;
  double x0 = 0.0;
  double kappa = 0.0;
  double tau = 0.0;
  std::vector<ConvergenceRow> rows;

  /// Least-squares slope of log(error) against log(h) over the last `last` rows.
  double fitted_order_l2(std::size_t last = 3) const;
  double fitted_order_beta(std::size_t last = 3) const;
};

double fitted_order(const std::vector<double>& h, const std::vector<double>& e, std::size_t last = 3);

ConvergenceReport run_convergence(const StudyConfig& config);

}  // namespace dodcut
