#include "dodcut/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "dodcut/kernels.hpp"
#include "dodcut/norms.hpp"

namespace dodcut {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

// Value entering beta.[w] on `face` for the stabilized scheme, as a linear
// combination of (cell, coefficient) pairs. Empty when the face carries no flux
// contribution (ramp, zero flux, inflow boundary).
struct FaceValue {
  int cells[2] = {-1, -1};
  double coef[2] = {0.0, 0.0};
  int count = 0;
};

FaceValue face_value(const Discretization& d, int f) {
  const auto& mesh = d.mesh();
  const auto& face = mesh.face(f);
  FaceValue fv;
  if (face.kind == FaceKind::boundary_ramp) return fv;
  const double flux = d.table().flux(f);
  if (flux == 0.0) return fv;
  const int r = d.stabilized().record_of_outflow_face(f);
  if (r >= 0) {
    const auto& rec = d.stabilized().records()[idx(r)];
    fv.cells[0] = rec.cell;
    fv.coef[0] = rec.alpha;
    fv.cells[1] = rec.E_in;
    fv.coef[1] = 1.0 - rec.alpha;
    fv.count = 2;
    return fv;
  }
  if (face.is_boundary()) {
    if (flux > 0.0) {
      fv.cells[0] = face.left;
      fv.coef[0] = 1.0;
      fv.count = 1;
    }
    return fv;
  }
  fv.cells[0] = flux > 0.0 ? face.left : face.right;
  fv.coef[0] = 1.0;
  fv.count = 1;
  return fv;
}

// Same value evaluated on trace means instead of cell values.
bool face_value(const Discretization& d, int f, const TraceMeans& v, double& out) {
  const auto& mesh = d.mesh();
  const auto& face = mesh.face(f);
  if (face.kind == FaceKind::boundary_ramp) return false;
  const double flux = d.table().flux(f);
  if (flux == 0.0) return false;
  const int r = d.stabilized().record_of_outflow_face(f);
  if (r >= 0) {
    const auto& rec = d.stabilized().records()[idx(r)];
    out = rec.alpha * v.side(mesh, f, rec.cell) + (1.0 - rec.alpha) * v.side(mesh, rec.e_in, rec.E_in);
    return true;
  }
  if (face.is_boundary()) {
    if (flux < 0.0) return false;
    out = v.left[idx(f)];
    return true;
  }
  out = flux > 0.0 ? v.left[idx(f)] : v.right[idx(f)];
  return true;
}

double jump(const Face& face, const PiecewiseConstantField& w) {
  const double l = w[idx(face.left)];
  return face.is_boundary() ? l : l - w[idx(face.right)];
}

}  // namespace

bool PiecewiseConstantField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

FaceIntegralTable FaceIntegralTable::build(const CutCellMesh& mesh, const VelocityField& beta, const Quadrature& quad) {
  FaceIntegralTable t;
  const std::size_t nf = mesh.num_faces();
  t.flux_.assign(nf, 0.0);
  t.abs_flux_.assign(nf, 0.0);
  t.upwind_.assign(nf, Upwind::none);
  const double beta_inf = beta.inf_norm(mesh.ramp());
  for (std::size_t i = 0; i < nf; ++i) {
    const Face& face = mesh.faces()[i];
    double flux = 0.0, abs_flux = 0.0, lo = 0.0, hi = 0.0, scale = 0.0;
    for (const auto& q : segment_points(face.a, face.b, quad.face_rule())) {
      const double bn = dot(beta.evaluate(q.x), face.normal);
      flux += q.w * bn;
      abs_flux += q.w * std::abs(bn);
      lo = std::min(lo, bn);
      hi = std::max(hi, bn);
      scale = std::max(scale, std::abs(bn));
    }
    if (face.kind == FaceKind::boundary_ramp) {
      // beta is tangent to the ramp; anything left is rounding
      if (abs_flux > 1e-10 * mesh.h() * std::max(beta_inf, 1.0)) {
        throw SignChangeOnFace("ramp face " + std::to_string(i) + " carries normal flux " + std::to_string(abs_flux));
      }
      continue;
    }
    const double tol = 1e-12 * scale;
    if (lo < -tol && hi > tol) {
      throw SignChangeOnFace("beta.n changes sign on face " + std::to_string(i));
    }
    t.flux_[i] = flux;
    t.abs_flux_[i] = abs_flux;
    if (flux == 0.0) continue;
    if (face.is_boundary()) {
      t.upwind_[i] = flux > 0.0 ? Upwind::outflow : Upwind::inflow;
    } else {
      t.upwind_[i] = flux > 0.0 ? Upwind::left : Upwind::right;
    }
  }
  return t;
}

void FaceIntegralTable::balance(const CutCellMesh& mesh, const StabilizedSet& stab, double beta_inf) {
  for (const auto& rec : stab.records()) {
    const std::size_t out = idx(rec.e_out);
    const double target = abs_flux_[idx(rec.e_in)];
    if (std::abs(abs_flux_[out] - target) > 1e-10 * mesh.h() * std::max(beta_inf, 1.0)) {
      throw InvalidStabilization("cell " + std::to_string(rec.cell) + ": inflow and outflow differ beyond rounding");
    }
    abs_flux_[out] = target;
    flux_[out] = mesh.orientation(rec.e_out, rec.cell) * target;
  }
}

double capacity(double area, double tau, double h, double inflow_abs_flux) {
  if (inflow_abs_flux <= 0.0) throw InvalidStabilization("capacity with zero inflow");
  return std::min(area / (tau * h * inflow_abs_flux), 1.0);
}

StabilizedSet::StabilizedSet(std::vector<StabilizedCellRecord> records, std::size_t cells, std::size_t faces)
    : records_(std::move(records)), by_cell_(cells, -1), by_out_face_(faces, -1), by_in_face_(faces, -1) {
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    by_cell_[idx(rec.cell)] = static_cast<int>(r);
    by_out_face_[idx(rec.e_out)] = static_cast<int>(r);
    by_in_face_[idx(rec.e_in)] = static_cast<int>(r);
  }
}

double StabilizedSet::alpha(int cell) const {
  const int r = by_cell_[idx(cell)];
  return r < 0 ? 1.0 : records_[idx(r)].alpha;
}

StabilizedSet identify_stabilized(const CutCellMesh& mesh, const FaceIntegralTable& table, double tau) {
  std::vector<StabilizedCellRecord> records;
  const double h = mesh.h();
  for (const Cell& cell : mesh.cells()) {
    if (cell.kind != CellKind::cut3) continue;
    int bdy = -1;
    int others[2] = {-1, -1};
    int k = 0;
    for (int f : cell.faces) {
      if (mesh.face(f).kind == FaceKind::boundary_ramp) {
        bdy = f;
      } else if (k < 2) {
        others[k++] = f;
      }
    }
    if (bdy < 0 || k != 2) continue;
    if (!is_stabilization_candidate(mesh.face(others[0]).length, mesh.face(others[1]).length, h)) continue;

    const std::string where = "cell " + std::to_string(cell.id);
    const double f0 = table.outward_flux(mesh, others[0], cell.id);
    const double f1 = table.outward_flux(mesh, others[1], cell.id);
    if (f0 == 0.0 || f1 == 0.0 || (f0 < 0.0) == (f1 < 0.0)) {
      throw InvalidStabilization(where + ": needs one inflow and one outflow face");
    }
    StabilizedCellRecord rec;
    rec.cell = cell.id;
    rec.e_bdy = bdy;
    rec.e_in = f0 < 0.0 ? others[0] : others[1];
    rec.e_out = f0 < 0.0 ? others[1] : others[0];
    if (mesh.face(rec.e_in).is_boundary() || mesh.face(rec.e_out).is_boundary()) {
      throw InvalidStabilization(where + ": inflow or outflow face lies on the boundary");
    }
    rec.E_in = mesh.neighbor(rec.e_in, cell.id);
    rec.E_out = mesh.neighbor(rec.e_out, cell.id);
    rec.alpha = capacity(cell.area, tau, h, table.abs_flux(rec.e_in));
    records.push_back(rec);
  }
  StabilizedSet set(std::move(records), mesh.num_cells(), mesh.num_faces());
  for (const auto& rec : set.records()) {
    if (set.record_of_cell(rec.E_in) >= 0 || set.record_of_cell(rec.E_out) >= 0) {
      throw InvalidStabilization("cell " + std::to_string(rec.cell) + " has a stabilized neighbor");
    }
  }
  return set;
}

void SchemeConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidConfig("tau must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidConfig("cfl epsilon must lie in (0, 1/2)");
  if (kappa && !(*kappa > 0.0 && std::isfinite(*kappa))) throw InvalidConfig("cfl kappa must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InvalidConfig("t_final must be non-negative");
  if (quad.face_order < 1) throw InvalidConfig("quad.face_order must be >= 1");
  if (quad.cell_degree < 0) throw InvalidConfig("quad.cell_degree must be >= 0");
}

Discretization::Discretization(CutCellMesh mesh, std::shared_ptr<const VelocityField> beta, const SchemeConfig& config)
    : mesh_(std::move(mesh)), beta_(std::move(beta)), config_(config), quad_(config.quad) {
  config_.validate();
  beta_inf_ = beta_->inf_norm(mesh_.ramp());
  beta_w1inf_ = beta_->w1inf_norm(mesh_.ramp());
  table_ = FaceIntegralTable::build(mesh_, *beta_, quad_);
  stab_ = identify_stabilized(mesh_, table_, config_.tau);
  table_.balance(mesh_, stab_, beta_inf_);
}

double Discretization::c_tr() const { return std::max(4.0 * beta_inf_, 1.0 / config_.tau); }

std::vector<double> Discretization::cell_areas() const {
  std::vector<double> a(num_cells());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = mesh_.cells()[i].area;
  return a;
}

TraceMeans operator-(const TraceMeans& a, const TraceMeans& b) {
  TraceMeans r = a;
  for (std::size_t i = 0; i < r.left.size(); ++i) {
    r.left[i] -= b.left[i];
    r.right[i] -= b.right[i];
  }
  return r;
}

TraceMeans operator+(const TraceMeans& a, const TraceMeans& b) {
  TraceMeans r = a;
  for (std::size_t i = 0; i < r.left.size(); ++i) {
    r.left[i] += b.left[i];
    r.right[i] += b.right[i];
  }
  return r;
}

TraceMeans trace_means(const CutCellMesh& mesh, const PiecewiseConstantField& v) {
  TraceMeans t;
  t.left.assign(mesh.num_faces(), 0.0);
  t.right.assign(mesh.num_faces(), 0.0);
  for (const Face& f : mesh.faces()) {
    t.left[idx(f.id)] = v[idx(f.left)];
    if (!f.is_boundary()) t.right[idx(f.id)] = v[idx(f.right)];
  }
  return t;
}

TraceMeans trace_means(const Discretization& d, const ScalarFn& f) {
  const auto& mesh = d.mesh();
  TraceMeans t;
  t.left.assign(mesh.num_faces(), 0.0);
  t.right.assign(mesh.num_faces(), 0.0);
  for (const Face& face : mesh.faces()) {
    double m;
    if (d.table().abs_flux(face.id) > 0.0) {
      m = beta_weighted_mean(d, face.id, f);
    } else {
      m = d.quadrature().integrate_face(face, f) / face.length;
    }
    t.left[idx(face.id)] = m;
    if (!face.is_boundary()) t.right[idx(face.id)] = m;
  }
  return t;
}

double beta_weighted_mean(const Discretization& d, int face_id, const ScalarFn& v) {
  const double a = d.table().abs_flux(face_id);
  if (a == 0.0) throw ZeroFluxFace("beta-weighted mean on face " + std::to_string(face_id) + " with zero flux");
  const Face& face = d.mesh().face(face_id);
  double s = 0.0;
  for (const auto& q : segment_points(face.a, face.b, d.quadrature().face_rule())) {
    s += q.w * std::abs(dot(d.velocity().evaluate(q.x), face.normal)) * v(q.x);
  }
  return s / a;
}

PiecewiseConstantField apply_dod_operator(const Discretization& d, const TraceMeans& v) {
  const auto& mesh = d.mesh();
  PiecewiseConstantField out(mesh.num_cells());
  for (const Face& face : mesh.faces()) {
    double val;
    if (!face_value(d, face.id, v, val)) continue;
    const double c = val * d.table().flux(face.id);
    out[idx(face.left)] += c;
    if (!face.is_boundary()) out[idx(face.right)] -= c;
  }
  for (const Cell& cell : mesh.cells()) out[idx(cell.id)] /= cell.area;
  return out;
}

PiecewiseConstantField apply_dod_operator(const Discretization& d, const PiecewiseConstantField& v) {
  return apply_dod_operator(d, trace_means(d.mesh(), v));
}

double bilinear_a_dod(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w) {
  double s = 0.0;
  for (const Face& face : d.mesh().faces()) {
    double val;
    if (!face_value(d, face.id, v, val)) continue;
    s += val * d.table().flux(face.id) * jump(face, w);
  }
  return s;
}

double bilinear_a_upw(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w) {
  double s = 0.0;
  for (const Face& face : d.mesh().faces()) {
    const std::size_t f = idx(face.id);
    const double flux = d.table().flux(face.id);
    const double a = d.table().abs_flux(face.id);
    if (face.is_boundary()) {
      s += std::max(flux, 0.0) * v.left[f] * w[idx(face.left)];
      continue;
    }
    const double avg = 0.5 * (v.left[f] + v.right[f]);
    const double jw = jump(face, w);
    s += avg * flux * jw + 0.5 * a * (v.left[f] - v.right[f]) * jw;
  }
  return s;
}

double bilinear_J(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w) {
  const auto& mesh = d.mesh();
  double s = 0.0;
  for (const auto& rec : d.stabilized().records()) {
    const double vin = v.side(mesh, rec.e_in, rec.E_in);
    const double ve = v.side(mesh, rec.e_out, rec.cell);
    s += (1.0 - rec.alpha) * (vin - ve) * d.table().flux(rec.e_out) * jump(mesh.face(rec.e_out), w);
  }
  return s;
}

InflowLoad::InflowLoad(const Discretization& d) : cells_(d.num_cells()) {
  const auto& mesh = d.mesh();
  for (const Face& face : mesh.faces()) {
    if (face.kind != FaceKind::boundary_square || d.table().flux(face.id) >= 0.0) continue;
    Entry e;
    e.cell = face.left;
    const double inv_area = 1.0 / mesh.cell(face.left).area;
    for (auto q : segment_points(face.a, face.b, d.quadrature().face_rule())) {
      q.w *= std::min(dot(d.velocity().evaluate(q.x), face.normal), 0.0) * inv_area;
      e.points.push_back(q);
    }
    faces_.push_back(std::move(e));
  }
}

void InflowLoad::evaluate(const SpaceTimeFn& g, double t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& e : faces_) {
    double s = 0.0;
    for (const auto& q : e.points) s += q.w * g(t, q.x);
    out[idx(e.cell)] += s;
  }
}

PiecewiseConstantField InflowLoad::evaluate(const SpaceTimeFn& g, double t) const {
  PiecewiseConstantField out(cells_);
  evaluate(g, t, out.values);
  return out;
}

PiecewiseConstantField rhs_inflow(const Discretization& d, const SpaceTimeFn& g, double t) {
  return InflowLoad(d).evaluate(g, t);
}

AssembledOperator::AssembledOperator(const Discretization& d) {
  const auto& mesh = d.mesh();
  std::map<std::pair<int, int>, double> entries;
  for (const Face& face : mesh.faces()) {
    const FaceValue fv = face_value(d, face.id);
    const double flux = d.table().flux(face.id);
    for (int k = 0; k < fv.count; ++k) {
      const double c = fv.coef[k] * flux;
      entries[{face.left, fv.cells[k]}] += c / mesh.cell(face.left).area;
      if (!face.is_boundary()) entries[{face.right, fv.cells[k]}] -= c / mesh.cell(face.right).area;
    }
  }
  const std::size_t rows = mesh.num_cells();
  row_ptr_.assign(rows + 1, 0);
  cols_.reserve(entries.size());
  vals_.reserve(entries.size());
  for (const auto& [rc, val] : entries) {
    ++row_ptr_[idx(rc.first) + 1];
    cols_.push_back(rc.second);
    vals_.push_back(val);
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

void AssembledOperator::apply(std::span<const double> v, std::span<double> out) const {
  kernels::spmv({row_ptr_, cols_, vals_}, v, out);
}

PiecewiseConstantField AssembledOperator::apply(const PiecewiseConstantField& v) const {
  PiecewiseConstantField out(rows());
  apply(v.values, out.values);
  return out;
}

double cfl_kappa(double beta_inf, double tau, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidConfig("cfl epsilon must lie in (0, 1/2)");
  if (!(tau > 0.0)) throw InvalidConfig("tau must be positive");
  return (1.0 - 2.0 * epsilon) / ((1.0 + epsilon) * std::max(4.0 * beta_inf, 1.0 / tau));
}

TimeGrid cfl_dt(const Discretization& d, const SchemeConfig& config) {
  config.validate();
  TimeGrid g;
  g.kappa = config.kappa ? *config.kappa : cfl_kappa(d.beta_inf(), config.tau, config.epsilon);
  // any eps in (0, 1/2) is admissible, so the bound is the eps -> 0 limit
  g.within_theorem_cfl = g.kappa < 1.0 / d.c_tr();
  g.dt = g.kappa * d.h();
  const double T = config.t_final;
  if (T == 0.0) {
    g.steps = 0;
    g.last_dt = 0.0;
    return g;
  }
  g.steps = std::max(1, static_cast<int>(std::ceil(T / g.dt * (1.0 - 1e-12))));
  g.last_dt = T - (g.steps - 1) * g.dt;
  return g;
}

Solver::Solver(const Discretization& d, SpaceTimeFn inflow)
    : d_(d), inflow_(std::move(inflow)), op_(d), load_(d), areas_(d.cell_areas()) {}

PiecewiseConstantField Solver::step(const PiecewiseConstantField& u, double t, double dt) const {
  const std::size_t n = u.size();
  std::vector<double> au(n), rhs(n, 0.0);
  op_.apply(u.values, au);
  if (inflow_) load_.evaluate(inflow_, t, rhs);
  PiecewiseConstantField out(n);
  kernels::euler_update(u.values, au, rhs, dt, out.values);
  return out;
}

SolveResult Solver::solve(const PiecewiseConstantField& u0, const TimeGrid& grid, const SolveOptions& opts) const {
  SolveResult res;
  res.grid = grid;
  PiecewiseConstantField u = u0;
  const std::size_t n = u.size();
  std::vector<double> au(n), rhs(n, 0.0), next(n);

  auto record = [&](int step, double t) {
    if (!opts.record_diagnostics) return;
    const auto mm = kernels::minmax(u.values);
    res.diagnostics.push_back({step, t, std::sqrt(kernels::weighted_sum_squares(areas_, u.values)), mm.min, mm.max});
  };

  double t = 0.0;
  record(0, t);
  for (int s = 0; s < grid.steps; ++s) {
    const double dt = s + 1 == grid.steps ? grid.last_dt : grid.dt;
    if (opts.exact) {
      const double tn = t;
      const auto exact_traces = trace_means(d_, [&](Vec2 p) { return opts.exact(tn, p); });
      const double semi = beta_seminorm(d_, exact_traces - trace_means(d_.mesh(), u));
      res.accumulated_seminorm_sq += dt * semi * semi;
    }
    op_.apply(u.values, au);
    if (inflow_) load_.evaluate(inflow_, t, rhs);
    kernels::euler_update(u.values, au, rhs, dt, next);
    u.values.swap(next);
    t = s + 1 == grid.steps ? d_.config().t_final : (s + 1) * grid.dt;
    record(s + 1, t);
    if (opts.observer) opts.observer(s + 1, t, u);
  }
  res.u = std::move(u);
  return res;
}

RampRun solve(const RampTestProblem& problem, const SchemeConfig& config, int n, const SolveOptions& opts) {
  auto mesh = CutCellMesh::build(problem.ramp(), n);
  auto beta = std::make_shared<RampVelocity>(problem.ramp());
  auto disc = std::make_shared<Discretization>(std::move(mesh), beta, config);
  const auto u0 = l2_project(*disc, [&](Vec2 p) { return problem.initial(p); });
  const TimeGrid grid = cfl_dt(*disc, config);
  Solver solver(*disc, [&](double t, Vec2 p) { return problem.inflow(t, p); });
  RampRun run;
  run.result = solver.solve(u0, grid, opts);
  run.disc = std::move(disc);
  return run;
}

}  // namespace dodcut
