#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "dodcut/discretization.hpp"

namespace testutil {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

inline std::shared_ptr<dodcut::Discretization> ramp_disc(double gamma_deg, int n, double x0 = 0.2001,
                                                          dodcut::SchemeConfig cfg = {}) {
  const dodcut::RampDomain r{deg(gamma_deg), x0};
  return std::make_shared<dodcut::Discretization>(dodcut::CutCellMesh::build(r, n),
                                                  std::make_shared<dodcut::RampVelocity>(r), cfg);
}

inline dodcut::PiecewiseConstantField random_field(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dodcut::PiecewiseConstantField v(n);
  for (auto& x : v.values) x = u(rng);
  return v;
}

}  // namespace testutil
