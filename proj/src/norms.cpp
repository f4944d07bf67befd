#include "dodcut/norms.hpp"

#include <cmath>

#include "dodcut/kernels.hpp"

namespace dodcut {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double face_jump(const Face& face, const TraceMeans& v) {
  const std::size_t f = idx(face.id);
  return face.is_boundary() ? v.left[f] : v.left[f] - v.right[f];
}

}  // namespace

PiecewiseConstantField l2_project(const Discretization& d, const ScalarFn& f) {
  PiecewiseConstantField out(d.num_cells());
  for (const Cell& c : d.mesh().cells()) out[idx(c.id)] = d.quadrature().integrate_cell(c, f) / c.area;
  return out;
}

double l2_norm(const Discretization& d, const PiecewiseConstantField& v) {
  return std::sqrt(kernels::weighted_sum_squares(d.cell_areas(), v.values));
}

double l2_error(const Discretization& d, const PiecewiseConstantField& uh, const ScalarFn& u) {
  double s = 0.0;
  for (const Cell& c : d.mesh().cells()) {
    const double ue = uh[idx(c.id)];
    s += d.quadrature().integrate_cell(c, [&](Vec2 p) {
      const double e = u(p) - ue;
      return e * e;
    });
  }
  return std::sqrt(s);
}

double h1_norm(const Discretization& d, const ScalarFn& u, const GradientFn& grad) {
  double s = 0.0;
  for (const Cell& c : d.mesh().cells()) {
    s += d.quadrature().integrate_cell(c, [&](Vec2 p) {
      const double v = u(p);
      const Vec2 g = grad(p);
      return v * v + dot(g, g);
    });
  }
  return std::sqrt(s);
}

BetaSeminormParts beta_seminorm_parts(const Discretization& d, const TraceMeans& v) {
  const auto& mesh = d.mesh();
  const auto& table = d.table();
  const auto& stab = d.stabilized();
  BetaSeminormParts p;
  for (const Face& face : mesh.faces()) {
    if (stab.record_of_inflow_face(face.id) >= 0 || stab.record_of_outflow_face(face.id) >= 0) continue;
    const double j = face_jump(face, v);
    p.plain += table.abs_flux(face.id) * j * j;
  }
  for (const auto& rec : stab.records()) {
    const double jin = face_jump(mesh.face(rec.e_in), v);
    const double jout = face_jump(mesh.face(rec.e_out), v);
    const double a_in = table.abs_flux(rec.e_in);
    const double a_out = table.abs_flux(rec.e_out);
    p.weighted += rec.alpha * (a_in * jin * jin + a_out * jout * jout);
    const double ext = v.side(mesh, rec.e_out, rec.E_out) - v.side(mesh, rec.e_in, rec.E_in);
    p.extended += (1.0 - rec.alpha) * a_out * ext * ext;
  }
  return p;
}

double beta_seminorm(const Discretization& d, const TraceMeans& v) {
  return std::sqrt(beta_seminorm_parts(d, v).total());
}

double beta_seminorm(const Discretization& d, const PiecewiseConstantField& v) {
  return beta_seminorm(d, trace_means(d.mesh(), v));
}

double star_trace_sum(const Discretization& d, const TraceMeans& v) {
  const auto& mesh = d.mesh();
  double s = 0.0;
  for (const Cell& c : mesh.cells()) {
    double cell_sum = 0.0;
    for (int f : c.faces) {
      const double t = v.side(mesh, f, c.id);
      cell_sum += d.table().abs_flux(f) * t * t;
    }
    s += d.stabilized().alpha(c.id) * cell_sum;
  }
  return s;
}

double triple_norm(const Discretization& d, const PiecewiseConstantField& v) {
  const double l2 = l2_norm(d, v);
  const double semi = beta_seminorm(d, v);
  return std::sqrt(l2 * l2 + semi * semi);
}

double triple_star_norm(const Discretization& d, const PiecewiseConstantField& v) {
  const double t = triple_norm(d, v);
  return std::sqrt(t * t + star_trace_sum(d, trace_means(d.mesh(), v)));
}

ErrorBreakdown error_breakdown(const Discretization& d, const PiecewiseConstantField& uh, const ScalarFn& u) {
  ErrorBreakdown e;
  e.l2 = l2_error(d, uh, u);
  const TraceMeans err = trace_means(d, u) - trace_means(d.mesh(), uh);
  e.beta_semi = beta_seminorm(d, err);
  e.triple = std::sqrt(e.l2 * e.l2 + e.beta_semi * e.beta_semi);
  e.triple_star = std::sqrt(e.triple * e.triple + star_trace_sum(d, err));
  return e;
}

}  // namespace dodcut
