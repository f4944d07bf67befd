#include "dodcut/convergence.hpp"

#include <cmath>
#include <limits>

#include "dodcut/norms.hpp"

namespace dodcut {

double fitted_order(const std::vector<double>& h, const std::vector<double>& e, std::size_t last) {
  const std::size_t m = std::min(last, h.size());
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = h.size() - m; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(m);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double ConvergenceReport::fitted_order_l2(std::size_t last) const {
  std::vector<double> h, e;
  for (const auto& r : rows) {
    h.push_back(r.h);
    e.push_back(r.l2_error);
  }
  return fitted_order(h, e, last);
}

double ConvergenceReport::fitted_order_beta(std::size_t last) const {
  std::vector<double> h, e;
  for (const auto& r : rows) {
    h.push_back(r.h);
    e.push_back(r.beta_semi_error);
  }
  return fitted_order(h, e, last);
}

ConvergenceReport run_convergence(const StudyConfig& config) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < config.ns.size(); ++i) {
    if (config.ns[i] <= config.ns[i - 1]) throw InvalidConfig("n-list must be strictly increasing");
  }
  const RampDomain ramp{config.gamma_deg * std::acos(-1.0) / 180.0, config.x0};
  const RampTestProblem problem(ramp, config.scheme.t_final);
  const ScalarFn exact_T = [&](Vec2 p) { return problem.exact(config.scheme.t_final, p); };

  ConvergenceReport rep;
  rep.gamma_deg = config.gamma_deg;
  rep.x0 = config.x0;
  rep.tau = config.scheme.tau;
  for (int n : config.ns) {
    SolveOptions opts;
    if (config.accumulate) opts.exact = [&](double t, Vec2 p) { return problem.exact(t, p); };
    const RampRun run = solve(problem, config.scheme, n, opts);
    const auto err = error_breakdown(*run.disc, run.result.u, exact_T);
    ConvergenceRow row;
    row.n = n;
    row.h = run.disc->h();
    row.dt = run.result.grid.dt;
    row.l2_error = err.l2;
    row.beta_semi_error = err.beta_semi;
    row.accumulated_seminorm = config.accumulate ? std::sqrt(run.result.accumulated_seminorm_sq) : nan;
    if (rep.rows.empty()) {
      row.order_l2 = row.order_beta = nan;
    } else {
      const auto& prev = rep.rows.back();
      const double lh = std::log(prev.h / row.h);
      row.order_l2 = std::log(prev.l2_error / row.l2_error) / lh;
      row.order_beta = std::log(prev.beta_semi_error / row.beta_semi_error) / lh;
    }
    rep.kappa = run.result.grid.kappa;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace dodcut
