#pragma once

#include <functional>

#include "dodcut/discretization.hpp"

namespace dodcut {

using GradientFn = std::function<Vec2(Vec2)>;

/// Cell means of f by cell quadrature.
PiecewiseConstantField l2_project(const Discretization& d, const ScalarFn& f);

double l2_norm(const Discretization& d, const PiecewiseConstantField& v);
/// ||u - u_h|| with u sampled at cell quadrature points.
double l2_error(const Discretization& d, const PiecewiseConstantField& uh, const ScalarFn& u);
/// (sum_E int_E u^2 + |grad u|^2)^(1/2).
double h1_norm(const Discretization& d, const ScalarFn& u, const GradientFn& grad);

/// The three groups of terms in |v|_beta^2.
struct BetaSeminormParts {
  double plain = 0.0;     // faces not attached to a stabilized cell's e_in / e_out
  double weighted = 0.0;  // alpha (A_in [v]_in^2 + A_out [v]_out^2)
  double extended = 0.0;  // (1 - alpha) A_out (v_out - v_in)^2
  double total() const { return plain + weighted + extended; }
};

BetaSeminormParts beta_seminorm_parts(const Discretization& d, const TraceMeans& v);
double beta_seminorm(const Discretization& d, const TraceMeans& v);
double beta_seminorm(const Discretization& d, const PiecewiseConstantField& v);

/// sum_E weight_E sum_{e in dE} A_e v_{E,e}^2, weight 1 off the stabilized set
/// and alpha_E on it.
double star_trace_sum(const Discretization& d, const TraceMeans& v);

double triple_norm(const Discretization& d, const PiecewiseConstantField& v);
double triple_star_norm(const Discretization& d, const PiecewiseConstantField& v);

/// Norms of u - u_h for smooth u.
struct ErrorBreakdown {
  double l2 = 0.0;
  double beta_semi = 0.0;
  double triple = 0.0;
  double triple_star = 0.0;
};
ErrorBreakdown error_breakdown(const Discretization& d, const PiecewiseConstantField& uh, const ScalarFn& u);

}  // namespace dodcut
