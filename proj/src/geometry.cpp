#include "dodcut/geometry.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <utility>

namespace dodcut {

double signed_area(const Polygon& poly) {
  // relative to the first vertex: absolute coordinates cancel badly for slivers
  double twice = 0.0;
  const std::size_t m = poly.size();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    twice += cross(poly[k] - poly[0], poly[k + 1] - poly[0]);
  }
  return 0.5 * twice;
}

bool RampDomain::contains(Vec2 p, double tol) const {
  if (p.x < lower.x - tol || p.x > upper.x + tol || p.y < lower.y - tol || p.y > upper.y + tol) {
    return false;
  }
  return p.x <= x0 || signed_distance(p) >= -tol;
}

double RampDomain::area() const {
  const double w = side();
  const double run = upper.x - x0;
  return w * (upper.y - lower.y) - 0.5 * slope() * run * run;
}

void RampDomain::validate() const {
  if (!(gamma > 0.0 && gamma < 0.5 * std::numbers::pi)) {
    throw DegenerateGeometry("ramp angle must lie in (0, pi/2), got " + std::to_string(gamma));
  }
  if (!(upper.x > lower.x && upper.y > lower.y)) {
    throw DegenerateGeometry("bounding square is empty");
  }
  if (!(x0 >= lower.x && x0 < upper.x)) {
    throw DegenerateGeometry("ramp start x0 = " + std::to_string(x0) + " is not on the bottom edge");
  }
  const double exit_height = ramp_height(upper.x);
  const double height = upper.y - lower.y;
  // exiting through the top-right corner itself is allowed
  if (!(exit_height <= height * (1.0 + 1e-12))) {
    throw DegenerateGeometry("ramp leaves the square through the top edge (exit height " +
                             std::to_string(exit_height) + ")");
  }
}

namespace {

enum class Side { below, on, above };

Side classify(const RampDomain& ramp, Vec2 p, double snap_tol) {
  const double d = ramp.signed_distance(p);
  if (d > snap_tol) return Side::above;
  if (d < -snap_tol) return Side::below;
  return Side::on;
}

// Intersection of the ramp line with the segment pq. Axis-aligned segments use
// the closed-form crossing so that both cells sharing an edge get bitwise
// identical points.
Vec2 crossing(const RampDomain& ramp, Vec2 p, Vec2 q) {
  if (p.x == q.x) {
    const double y = ramp.lower.y + ramp.ramp_height(p.x);
    return {p.x, std::clamp(y, std::min(p.y, q.y), std::max(p.y, q.y))};
  }
  if (p.y == q.y) {
    const double x = ramp.ramp_abscissa(p.y - ramp.lower.y);
    return {std::clamp(x, std::min(p.x, q.x), std::max(p.x, q.x)), p.y};
  }
  const double dp = ramp.signed_distance(p);
  const double dq = ramp.signed_distance(q);
  return p + (dp / (dp - dq)) * (q - p);
}

Polygon prune(Polygon poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& v : poly) {
    if (out.empty() || !(out.back() == v)) out.push_back(v);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();

  // Drop vertices whose adjacent edges are collinear.
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    const std::size_t m = out.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 prev = out[(k + m - 1) % m];
      const Vec2 next = out[(k + 1) % m];
      const Vec2 e1 = out[k] - prev;
      const Vec2 e2 = next - out[k];
      if (std::abs(cross(e1, e2)) <= 1e-14 * norm(e1) * norm(e2) && dot(e1, e2) > 0.0) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  if (out.size() < 3 || signed_area(out) <= 0.0) return {};
  return out;
}

}  // namespace

Polygon clip_cell(const Polygon& square_cell, const RampDomain& ramp, double snap_tol) {
  Polygon out;
  const std::size_t m = square_cell.size();
  out.reserve(m + 2);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 p = square_cell[k];
    const Vec2 q = square_cell[(k + 1) % m];
    const Side sp = classify(ramp, p, snap_tol);
    const Side sq = classify(ramp, q, snap_tol);
    if (sp != Side::below) out.push_back(p);
    if ((sp == Side::above && sq == Side::below) || (sp == Side::below && sq == Side::above)) {
      out.push_back(crossing(ramp, p, q));
    }
  }
  return prune(std::move(out));
}

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::cartesian: return "cartesian";
    case CellKind::cut3: return "cut3";
    case CellKind::cut4: return "cut4";
    case CellKind::cut5: return "cut5";
  }
  return "?";
}

const char* to_string(FaceKind kind) {
  switch (kind) {
    case FaceKind::interior: return "interior";
    case FaceKind::boundary_square: return "boundary_square";
    case FaceKind::boundary_ramp: return "boundary_ramp";
  }
  return "?";
}

CutCellMesh CutCellMesh::build(const RampDomain& ramp, int n) {
  ramp.validate();
  if (n < 4) throw DegenerateGeometry("need at least 4 cells per side, got " + std::to_string(n));
  if (std::abs(ramp.side() - (ramp.upper.y - ramp.lower.y)) > 1e-14 * ramp.side()) {
    throw DegenerateGeometry("bounding box must be a square");
  }

  CutCellMesh mesh;
  mesh.ramp_ = ramp;
  mesh.n_ = n;
  mesh.h_ = ramp.side() / n;
  const double snap = mesh.snap_tolerance();
  const double side = ramp.side();
  auto grid_x = [&](int i) { return i == n ? ramp.upper.x : ramp.lower.x + side * i / n; };
  auto grid_y = [&](int j) { return j == n ? ramp.upper.y : ramp.lower.y + side * j / n; };

  mesh.background_to_cell_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Polygon square{{grid_x(i), grid_y(j)},
                           {grid_x(i + 1), grid_y(j)},
                           {grid_x(i + 1), grid_y(j + 1)},
                           {grid_x(i), grid_y(j + 1)}};
      Polygon poly = clip_cell(square, ramp, snap);
      if (poly.empty()) continue;

      Cell cell;
      cell.id = static_cast<int>(mesh.cells_.size());
      cell.area = signed_area(poly);
      cell.background = {i, j};
      const bool untouched = poly.size() == 4 && poly == square;
      switch (poly.size()) {
        case 3: cell.kind = CellKind::cut3; break;
        case 4: cell.kind = untouched ? CellKind::cartesian : CellKind::cut4; break;
        case 5: cell.kind = CellKind::cut5; break;
        default:
          throw DegenerateGeometry("clipped cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                   ") has " + std::to_string(poly.size()) + " vertices");
      }
      cell.vertices = std::move(poly);
      mesh.background_to_cell_[static_cast<std::size_t>(j) * n + i] = cell.id;
      mesh.cells_.push_back(std::move(cell));
    }
  }

  // Faces. Interior faces are keyed by the ordered pair of background cells;
  // the first (lower-id) visitor creates the face and owns its normal.
  std::map<std::pair<int, int>, int> shared;
  for (Cell& cell : mesh.cells_) {
    const auto [i, j] = cell.background;
    const int self = j * n + i;
    const std::size_t m = cell.vertices.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2 a = cell.vertices[k];
      const Vec2 b = cell.vertices[(k + 1) % m];
      int other = -1;  // background index of the neighbor
      bool on_square = false;
      FaceKind kind = FaceKind::interior;
      if (a.x == b.x && a.x == grid_x(i)) {
        on_square = i == 0;
        other = on_square ? -1 : self - 1;
      } else if (a.x == b.x && a.x == grid_x(i + 1)) {
        on_square = i == n - 1;
        other = on_square ? -1 : self + 1;
      } else if (a.y == b.y && a.y == grid_y(j)) {
        on_square = j == 0;
        other = on_square ? -1 : self - n;
      } else if (a.y == b.y && a.y == grid_y(j + 1)) {
        on_square = j == n - 1;
        other = on_square ? -1 : self + n;
      } else {
        kind = FaceKind::boundary_ramp;
        if (std::abs(ramp.signed_distance(a)) > 2.0 * snap || std::abs(ramp.signed_distance(b)) > 2.0 * snap) {
          throw DegenerateGeometry("cell edge is neither on the grid nor on the ramp");
        }
      }
      if (on_square) kind = FaceKind::boundary_square;

      const Vec2 edge = b - a;
      const double len = norm(edge);
      const Vec2 outward{edge.y / len, -edge.x / len};

      if (kind == FaceKind::interior) {
        const auto key = std::minmax(self, other);
        auto it = shared.find(key);
        if (it != shared.end()) {
          Face& f = mesh.faces_[static_cast<std::size_t>(it->second)];
          if (f.right >= 0) throw DegenerateGeometry("face visited by more than two cells");
          if (norm(f.a - b) > 2.0 * snap || norm(f.b - a) > 2.0 * snap) {
            throw DegenerateGeometry("adjacent cells disagree on a shared face");
          }
          f.right = cell.id;
          cell.faces.push_back(f.id);
          continue;
        }
        shared.emplace(key, static_cast<int>(mesh.faces_.size()));
      }
      Face f;
      f.id = static_cast<int>(mesh.faces_.size());
      f.a = a;
      f.b = b;
      f.length = len;
      f.normal = outward;
      f.left = cell.id;
      f.kind = kind;
      cell.faces.push_back(f.id);
      mesh.faces_.push_back(f);
    }
  }

  for (const Face& f : mesh.faces_) {
    if (f.kind == FaceKind::interior && f.right < 0) {
      const Cell& c = mesh.cells_[static_cast<std::size_t>(f.left)];
      throw DegenerateGeometry("interior face " + std::to_string(f.id) + " of background cell (" +
                               std::to_string(c.background[0]) + ", " + std::to_string(c.background[1]) +
                               ") has a single adjacent cell");
    }
  }
  return mesh;
}

int CutCellMesh::cell_at(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return -1;
  return background_to_cell_[static_cast<std::size_t>(j) * n_ + i];
}

Vec2 CutCellMesh::outward_normal(int face, int cell) const {
  const Face& f = face_ref(face);
  return f.left == cell ? f.normal : -1.0 * f.normal;
}

int CutCellMesh::neighbor(int face, int cell) const {
  const Face& f = face_ref(face);
  return f.left == cell ? f.right : f.left;
}

double CutCellMesh::total_area() const {
  double sum = 0.0;
  for (const Cell& c : cells_) sum += c.area;
  return sum;
}

}  // namespace dodcut
