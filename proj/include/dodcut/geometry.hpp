#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dodcut {

/// Raised when the ramp or the mesh it produces cannot be represented.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

using Polygon = std::vector<Vec2>;

/// Signed shoelace area; positive for counter-clockwise vertex order.
double signed_area(const Polygon& poly);

/// Square [lower, upper] with the region below the line through (x0, lower.y)
/// at angle gamma removed for x > x0.
struct RampDomain {
  double gamma = 0.0;  // radians
  double x0 = 0.0;
  Vec2 lower{0.0, 0.0};
  Vec2 upper{1.0, 1.0};

  double slope() const { return std::tan(gamma); }
  double side() const { return upper.x - lower.x; }

  /// Height of the ramp line above the bottom edge at abscissa x.
  double ramp_height(double x) const { return slope() * (x - x0); }
  /// Abscissa where the ramp line reaches height y above the bottom edge.
  double ramp_abscissa(double y) const { return x0 + y / slope(); }

  /// Distance from the ramp line, positive on the retained side.
  double signed_distance(Vec2 p) const {
    return std::cos(gamma) * (p.y - lower.y) - std::sin(gamma) * (p.x - x0);
  }

  bool contains(Vec2 p, double tol = 0.0) const;
  double area() const;

  /// Throws DegenerateGeometry unless 0 < gamma < pi/2, the ramp starts on the
  /// bottom edge, and it leaves the square through the right edge.
  void validate() const;
};

/// Sutherland-Hodgman clip of an axis-aligned square cell against the retained
/// half-plane. Background nodes closer than `snap_tol` to the ramp line are
/// treated as lying on it. Returns an empty polygon when nothing of positive
/// area remains.
Polygon clip_cell(const Polygon& square_cell, const RampDomain& ramp, double snap_tol);

enum class CellKind { cartesian, cut3, cut4, cut5 };
enum class FaceKind { interior, boundary_square, boundary_ramp };

const char* to_string(CellKind kind);
const char* to_string(FaceKind kind);

struct Cell {
  int id = -1;
  Polygon vertices;          // counter-clockwise
  double area = 0.0;
  CellKind kind = CellKind::cartesian;
  std::array<int, 2> background{0, 0};  // (i, j)
  std::vector<int> faces;    // in polygon edge order
};

struct Face {
  int id = -1;
  Vec2 a, b;
  double length = 0.0;
  Vec2 normal;               // outward for `left`
  int left = -1;             // lower cell id
  int right = -1;            // -1 on boundary faces
  FaceKind kind = FaceKind::interior;

  bool is_boundary() const { return right < 0; }
  Vec2 midpoint() const { return 0.5 * (a + b); }
  Vec2 at(double s) const { return a + s * (b - a); }
};

/// Immutable cut-cell mesh of a ramp domain.
class CutCellMesh {
 public:
  static CutCellMesh build(const RampDomain& ramp, int n);

  const RampDomain& ramp() const { return ramp_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double snap_tolerance() const { return 1e-12 * h_; }

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Cell& cell(int id) const { return cells_[static_cast<std::size_t>(id)]; }
  const Face& face(int id) const { return faces_[static_cast<std::size_t>(id)]; }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_faces() const { return faces_.size(); }

  /// Cell id for background cell (i, j), or -1 if it was cut away.
  int cell_at(int i, int j) const;

  /// Outward unit normal of `cell` on `face`.
  Vec2 outward_normal(int face, int cell) const;
  /// Orientation factor: +1 if `cell` owns the stored normal, -1 otherwise.
  double orientation(int face, int cell) const { return face_ref(face).left == cell ? 1.0 : -1.0; }
  /// The cell across `face` from `cell`, or -1.
  int neighbor(int face, int cell) const;

  double total_area() const;

 private:
  const Face& face_ref(int id) const { return faces_[static_cast<std::size_t>(id)]; }

  RampDomain ramp_;
  int n_ = 0;
  double h_ = 0.0;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<int> background_to_cell_;
};

}  // namespace dodcut
