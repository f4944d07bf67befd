#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dodcut/geometry.hpp"

namespace dodcut {

using ScalarFn = std::function<double(Vec2)>;

/// Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2*order - 1.
struct SegmentRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1

  static SegmentRule gauss_legendre(int order);
};

/// Triangle rule on the reference triangle (0,0), (1,0), (0,1) in barycentric
/// form, built as a collapsed (Duffy) product of Gauss-Legendre rules.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;  // sum to 1

  static TriangleRule of_degree(int degree);
};

/// A quadrature point on a face or in a cell, with the physical weight folded in.
struct QuadPoint {
  Vec2 x;
  double w = 0.0;
};

/// Convex-polygon rule: fan triangulation from vertex 0, a TriangleRule on each fan
/// triangle.
std::vector<QuadPoint> polygon_points(const Polygon& poly, const TriangleRule& rule);
std::vector<QuadPoint> segment_points(Vec2 a, Vec2 b, const SegmentRule& rule);

struct QuadratureConfig {
  int face_order = 4;
  int cell_degree = 6;
};

/// Holds both rules so callers do not rebuild the node tables.
class Quadrature {
 public:
  explicit Quadrature(QuadratureConfig config = {});

  const QuadratureConfig& config() const { return config_; }
  const SegmentRule& face_rule() const { return face_; }
  const TriangleRule& cell_rule() const { return cell_; }

  double integrate_face(const Face& face, const ScalarFn& f) const;
  double integrate_segment(Vec2 a, Vec2 b, const ScalarFn& f) const;
  double integrate_cell(const Cell& cell, const ScalarFn& f) const;
  double integrate_polygon(const Polygon& poly, const ScalarFn& f) const;

 private:
  QuadratureConfig config_;
  SegmentRule face_;
  TriangleRule cell_;
};

}  // namespace dodcut
