#include "dodcut/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dodcut {

SegmentRule SegmentRule::gauss_legendre(int order) {
  if (order < 1 || order > 64) {
    throw std::invalid_argument("Gauss-Legendre order must be in [1, 64], got " + std::to_string(order));
  }
  SegmentRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  // Newton iteration on P_order from the Chebyshev-like initial guess, then map
  // [-1, 1] -> [0, 1].
  for (int k = 0; k < order; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= order; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int m = 2; m <= order; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const auto idx = static_cast<std::size_t>(order - 1 - k);
    rule.nodes[idx] = 0.5 * (1.0 + x);
    rule.weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled by 1/2
  }
  return rule;
}

TriangleRule TriangleRule::of_degree(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle rule degree must be non-negative");
  // p(x, y) of degree d maps to degree d in t and degree d + 1 in s after the
  // collapse x = s (1 - t), y = s t with Jacobian s.
  const int q = (degree + 3) / 2;
  const SegmentRule g = SegmentRule::gauss_legendre(q);
  TriangleRule rule;
  rule.degree = degree;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const double s = g.nodes[static_cast<std::size_t>(a)];
      const double t = g.nodes[static_cast<std::size_t>(b)];
      const double x = s * (1.0 - t);
      const double y = s * t;
      rule.barycentric.push_back({1.0 - x - y, x, y});
      // Reference triangle area is 1/2; weights normalized to sum to 1.
      rule.weights.push_back(2.0 * s * g.weights[static_cast<std::size_t>(a)] *
                             g.weights[static_cast<std::size_t>(b)]);
    }
  }
  return rule;
}

std::vector<QuadPoint> segment_points(Vec2 a, Vec2 b, const SegmentRule& rule) {
  const double len = norm(b - a);
  std::vector<QuadPoint> pts;
  pts.reserve(rule.nodes.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    pts.push_back({a + rule.nodes[k] * (b - a), len * rule.weights[k]});
  }
  return pts;
}

std::vector<QuadPoint> polygon_points(const Polygon& poly, const TriangleRule& rule) {
  std::vector<QuadPoint> pts;
  pts.reserve((poly.size() - 2) * rule.weights.size());
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Vec2 p0 = poly[0];
    const Vec2 p1 = poly[k];
    const Vec2 p2 = poly[k + 1];
    const double area = 0.5 * cross(p1 - p0, p2 - p0);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& l = rule.barycentric[q];
      const Vec2 x{l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
      pts.push_back({x, area * rule.weights[q]});
    }
  }
  return pts;
}

Quadrature::Quadrature(QuadratureConfig config)
    : config_(config),
      face_(SegmentRule::gauss_legendre(config.face_order)),
      cell_(TriangleRule::of_degree(config.cell_degree)) {}

double Quadrature::integrate_segment(Vec2 a, Vec2 b, const ScalarFn& f) const {
  const double len = norm(b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < face_.nodes.size(); ++k) {
    sum += face_.weights[k] * f(a + face_.nodes[k] * (b - a));
  }
  return len * sum;
}

double Quadrature::integrate_face(const Face& face, const ScalarFn& f) const {
  return integrate_segment(face.a, face.b, f);
}

double Quadrature::integrate_polygon(const Polygon& poly, const ScalarFn& f) const {
  double sum = 0.0;
  for (const QuadPoint& p : polygon_points(poly, cell_)) sum += p.w * f(p.x);
  return sum;
}

double Quadrature::integrate_cell(const Cell& cell, const ScalarFn& f) const {
  return integrate_polygon(cell.vertices, f);
}

}  // namespace dodcut
