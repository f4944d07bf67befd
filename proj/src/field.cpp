#include "dodcut/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dodcut {

namespace {

double grad_frobenius(const Mat2& g) {
  return std::sqrt(g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1]);
}

template <class Inside, class Value>
double refined_max(const RampDomain& d, Inside inside, Value value, double tol) {
  constexpr int kSamples = 200;
  double best = 0.0;
  Vec2 best_p = d.lower;
  const double w = d.side();
  const double hgt = d.upper.y - d.lower.y;
  for (int j = 0; j <= kSamples; ++j) {
    for (int i = 0; i <= kSamples; ++i) {
      const Vec2 p{d.lower.x + w * i / kSamples, d.lower.y + hgt * j / kSamples};
      if (!inside(p)) continue;
      const double v = value(p);
      if (v > best) {
        best = v;
        best_p = p;
      }
    }
  }
  // Local zoom around the best sample.
  double radius = w / kSamples;
  while (radius > 1e-12) {
    double improved = best;
    Vec2 next = best_p;
    constexpr int kLocal = 10;
    for (int j = -kLocal; j <= kLocal; ++j) {
      for (int i = -kLocal; i <= kLocal; ++i) {
        const Vec2 p{std::clamp(best_p.x + radius * i / kLocal, d.lower.x, d.upper.x),
                     std::clamp(best_p.y + radius * j / kLocal, d.lower.y, d.upper.y)};
        if (!inside(p)) continue;
        const double v = value(p);
        if (v > improved) {
          improved = v;
          next = p;
        }
      }
    }
    const double gain = improved - best;
    best = improved;
    best_p = next;
    radius *= 0.2;
    if (gain < tol * 1e-3 && radius < tol) break;
  }
  return best;
}

}  // namespace

double sampled_inf_norm(const VelocityField& beta, const RampDomain& domain, double tol) {
  return refined_max(
      domain, [&](Vec2 p) { return domain.contains(p, 1e-14); },
      [&](Vec2 p) { return norm(beta.evaluate(p)); }, tol);
}

double sampled_square_max(const VelocityField& beta, const RampDomain& domain, double tol) {
  return refined_max(
      domain, [](Vec2) { return true; }, [&](Vec2 p) { return norm(beta.evaluate(p)); }, tol);
}

double VelocityField::inf_norm(const RampDomain& domain) const { return sampled_inf_norm(*this, domain); }

double VelocityField::w1inf_norm(const RampDomain& domain) const {
  const double grad_max = refined_max(
      domain, [&](Vec2 p) { return domain.contains(p, 1e-14); },
      [&](Vec2 p) { return grad_frobenius(gradient(p)); }, 1e-6);
  return std::max(inf_norm(domain), grad_max);
}

RampCoords ramp_coords(const RampDomain& ramp, Vec2 p) {
  const double c = std::cos(ramp.gamma);
  const double s = std::sin(ramp.gamma);
  const double dx = p.x - ramp.x0;
  const double dy = p.y - ramp.lower.y;
  return {c * dx + s * dy, c * dy - s * dx};
}

Vec2 RampVelocity::evaluate(Vec2 p) const {
  const double g = ramp_.gamma;
  const double t = std::tan(g);
  const double factor =
      (2.0 + std::sin(g) * (p.x - ramp_.x0) - std::cos(g) * (p.y - ramp_.lower.y)) / (2.0 * std::sqrt(1.0 + t * t));
  return {factor, factor * t};
}

Mat2 RampVelocity::gradient(Vec2) const {
  const double g = ramp_.gamma;
  const double t = std::tan(g);
  const double scale = 1.0 / (2.0 * std::sqrt(1.0 + t * t));
  const double dfx = std::sin(g) * scale;
  const double dfy = -std::cos(g) * scale;
  return {{{dfx, dfy}, {t * dfx, t * dfy}}};
}

RampTestProblem::RampTestProblem(RampDomain ramp, double t_final)
    : ramp_(ramp),
      t_final_(t_final),
      velocity_(ramp),
      wavenumber_(std::numbers::sqrt2 * std::numbers::pi / (ramp.upper.x - ramp.x0)) {
  ramp_.validate();
}

double RampTestProblem::initial(Vec2 p) const {
  const double g = ramp_.gamma;
  return std::sin(wavenumber_ * (std::cos(g) * (p.x - ramp_.x0) + std::sin(g) * (p.y - ramp_.lower.y)));
}

double RampTestProblem::exact(double t, Vec2 p) const {
  const RampCoords rc = ramp_coords(ramp_, p);
  return std::sin(wavenumber_ * (rc.xi - RampVelocity::speed(rc.eta) * t));
}

Vec2 RampTestProblem::exact_gradient(double t, Vec2 p) const {
  const RampCoords rc = ramp_coords(ramp_, p);
  const double c = std::cos(ramp_.gamma);
  const double s = std::sin(ramp_.gamma);
  const double phase = wavenumber_ * (rc.xi - RampVelocity::speed(rc.eta) * t);
  const double k = wavenumber_ * std::cos(phase);
  // d/dxi = k, d/deta = k * t / 2 (speed' = -1/2).
  const double d_xi = k;
  const double d_eta = 0.5 * k * t;
  return {c * d_xi - s * d_eta, s * d_xi + c * d_eta};
}

double RampTestProblem::exact_time_derivative(double t, Vec2 p) const {
  const RampCoords rc = ramp_coords(ramp_, p);
  const double speed = RampVelocity::speed(rc.eta);
  return -wavenumber_ * speed * std::cos(wavenumber_ * (rc.xi - speed * t));
}

}  // namespace dodcut
