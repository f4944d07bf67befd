#pragma once

#include <array>
#include <memory>

#include "dodcut/geometry.hpp"
#include "dodcut/quadrature.hpp"

namespace dodcut {

using Mat2 = std::array<std::array<double, 2>, 2>;  // m[i][j] = d beta_i / d x_j

/// Stationary velocity field. Implementations are immutable.
class VelocityField {
 public:
  virtual ~VelocityField() = default;
  virtual Vec2 evaluate(Vec2 p) const = 0;
  virtual Mat2 gradient(Vec2 p) const = 0;
  /// max over the closed domain of |beta|_2.
  virtual double inf_norm(const RampDomain& domain) const;
  /// max(||beta||_inf, max |grad beta|_F).
  virtual double w1inf_norm(const RampDomain& domain) const;
};

/// Dense-sampling maximum of |beta|_2 over the retained part of the square,
/// refined around the best sample until the increment drops below `tol`.
double sampled_inf_norm(const VelocityField& beta, const RampDomain& domain, double tol = 1e-6);
/// Same sampling, over the full bounding square (ignores the cut-out region).
double sampled_square_max(const VelocityField& beta, const RampDomain& domain, double tol = 1e-6);

class ConstantVelocity final : public VelocityField {
 public:
  explicit ConstantVelocity(Vec2 value) : value_(value) {}
  Vec2 evaluate(Vec2) const override { return value_; }
  Mat2 gradient(Vec2) const override { return {}; }
  double inf_norm(const RampDomain&) const override { return norm(value_); }
  double w1inf_norm(const RampDomain&) const override { return norm(value_); }

 private:
  Vec2 value_;
};

/// Field tangent to the ramp:
///   beta = (2 + sin g (x - x0) - cos g y) / (2 sqrt(1 + tan^2 g)) (1, tan g).
/// In ramp coordinates xi (along) and eta (normal distance) this is
/// beta = (1 - eta/2) (cos g, sin g).
class RampVelocity final : public VelocityField {
 public:
  explicit RampVelocity(const RampDomain& ramp) : ramp_(ramp) {}
  Vec2 evaluate(Vec2 p) const override;
  Mat2 gradient(Vec2 p) const override;
  /// eta >= 0 on the retained domain with equality on the ramp, so the max is 1.
  double inf_norm(const RampDomain&) const override { return 1.0; }
  double w1inf_norm(const RampDomain&) const override { return 1.0; }

  /// Speed along the streamline eta = const.
  static double speed(double eta) { return 1.0 - 0.5 * eta; }

 private:
  RampDomain ramp_;
};

/// Rotated ramp coordinates of a point.
struct RampCoords {
  double xi;
  double eta;
};
RampCoords ramp_coords(const RampDomain& ramp, Vec2 p);

/// Ramp advection test: sinusoidal initial profile along the ramp, exact solution
/// from characteristics, inflow data equal to the exact trace.
class RampTestProblem {
 public:
  RampTestProblem(RampDomain ramp, double t_final);

  const RampDomain& ramp() const { return ramp_; }
  double t_final() const { return t_final_; }
  const RampVelocity& velocity() const { return velocity_; }

  double initial(Vec2 p) const;
  double exact(double t, Vec2 p) const;
  Vec2 exact_gradient(double t, Vec2 p) const;
  double exact_time_derivative(double t, Vec2 p) const;
  double inflow(double t, Vec2 p) const { return exact(t, p); }

 private:
  RampDomain ramp_;
  double t_final_;
  RampVelocity velocity_;
  double wavenumber_;  // sqrt(2) pi / (1 - x0)
};


}  // namespace dodcut
