#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dodcut/field.hpp"
#include "dodcut/geometry.hpp"
#include "dodcut/quadrature.hpp"

namespace dodcut {

class InvalidStabilization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroFluxFace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mixed-sign normal velocity along a face; the scheme needs one sign per face.
class SignChangeOnFace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One value per cell, indexed by cell id.
struct PiecewiseConstantField {
  std::vector<double> values;

  PiecewiseConstantField() = default;
  explicit PiecewiseConstantField(std::size_t cells, double value = 0.0) : values(cells, value) {}
  explicit PiecewiseConstantField(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool all_finite() const;
};

enum class Upwind { left, right, inflow, outflow, none };

/// Per-face integrals of the normal velocity, with the stored face normal.
class FaceIntegralTable {
 public:
  static FaceIntegralTable build(const CutCellMesh& mesh, const VelocityField& beta, const Quadrature& quad);

  /// int_e beta . n ds, n the stored normal (outward for the left cell).
  double flux(int face) const { return flux_[static_cast<std::size_t>(face)]; }
  /// int_e |beta . n| ds.
  double abs_flux(int face) const { return abs_flux_[static_cast<std::size_t>(face)]; }
  /// int_e beta . n_E ds for the outward normal of `cell`.
  double outward_flux(const CutCellMesh& mesh, int face, int cell) const {
    return mesh.orientation(face, cell) * flux(face);
  }
  Upwind upwind(int face) const { return upwind_[static_cast<std::size_t>(face)]; }
  std::size_t size() const { return flux_.size(); }

  /// Make inflow and outflow of every stabilized cell equal. On slivers the
  /// rounded vertex positions leave a relative imbalance of order
  /// ulp(1) / |e|; the correction is checked against the ramp tolerance.
  void balance(const CutCellMesh& mesh, const class StabilizedSet& stab, double beta_inf);

 private:
  std::vector<double> flux_;
  std::vector<double> abs_flux_;
  std::vector<Upwind> upwind_;
};

/// A triangular cut cell whose inflow and outflow faces are both shorter than h/2.
struct StabilizedCellRecord {
  int cell = -1;
  int e_in = -1;
  int e_out = -1;
  int e_bdy = -1;
  int E_in = -1;   // upwind neighbor across e_in
  int E_out = -1;  // downwind neighbor across e_out
  double alpha = 1.0;
};

/// Strict size criterion for stabilization.
inline bool is_stabilization_candidate(double len_in, double len_out, double h) {
  return std::max(len_in, len_out) < 0.5 * h;
}

/// alpha_E = min(|E| / (tau h int_{e_in} |beta.n|), 1).
double capacity(double area, double tau, double h, double inflow_abs_flux);

class StabilizedSet {
 public:
  StabilizedSet() = default;
  StabilizedSet(std::vector<StabilizedCellRecord> records, std::size_t cells, std::size_t faces);

  const std::vector<StabilizedCellRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Record index for a stabilized cell, or -1.
  int record_of_cell(int cell) const { return by_cell_[static_cast<std::size_t>(cell)]; }
  /// Record index if `face` is the outflow face of a stabilized cell, or -1.
  int record_of_outflow_face(int face) const { return by_out_face_[static_cast<std::size_t>(face)]; }
  /// Record index if `face` is the inflow face of a stabilized cell, or -1.
  int record_of_inflow_face(int face) const { return by_in_face_[static_cast<std::size_t>(face)]; }
  /// alpha_E for stabilized cells, 1 otherwise.
  double alpha(int cell) const;

 private:
  std::vector<StabilizedCellRecord> records_;
  std::vector<int> by_cell_;
  std::vector<int> by_out_face_;
  std::vector<int> by_in_face_;
};

StabilizedSet identify_stabilized(const CutCellMesh& mesh, const FaceIntegralTable& table, double tau);

struct SchemeConfig {
  double tau = 1.0;
  double epsilon = 1.0 / 14.0;           // CFL safety parameter in (0, 1/2)
  std::optional<double> kappa;           // manual dt / h override
  double t_final = 0.5;
  QuadratureConfig quad;

  void validate() const;
};

/// Mesh, velocity, face integrals and the stabilized set, built once and shared
/// read-only.
class Discretization {
 public:
  Discretization(CutCellMesh mesh, std::shared_ptr<const VelocityField> beta, const SchemeConfig& config);

  const CutCellMesh& mesh() const { return mesh_; }
  const VelocityField& velocity() const { return *beta_; }
  const FaceIntegralTable& table() const { return table_; }
  const StabilizedSet& stabilized() const { return stab_; }
  const Quadrature& quadrature() const { return quad_; }
  const SchemeConfig& config() const { return config_; }
  double h() const { return mesh_.h(); }
  double beta_inf() const { return beta_inf_; }
  double beta_w1inf() const { return beta_w1inf_; }
  /// max(4 ||beta||_inf, 1/tau).
  double c_tr() const;
  std::size_t num_cells() const { return mesh_.num_cells(); }
  std::vector<double> cell_areas() const;

 private:
  CutCellMesh mesh_;
  std::shared_ptr<const VelocityField> beta_;
  SchemeConfig config_;
  Quadrature quad_;
  FaceIntegralTable table_;
  StabilizedSet stab_;
  double beta_inf_ = 0.0;
  double beta_w1inf_ = 0.0;
};

/// Per-face beta-weighted means of traces from each side; the carrier for
/// elements of V_h + H^1 in every face form. `right` is unused on boundary faces.
struct TraceMeans {
  std::vector<double> left;
  std::vector<double> right;

  double side(const CutCellMesh& mesh, int face, int cell) const {
    return mesh.face(face).left == cell ? left[static_cast<std::size_t>(face)] : right[static_cast<std::size_t>(face)];
  }
  friend TraceMeans operator-(const TraceMeans& a, const TraceMeans& b);
  friend TraceMeans operator+(const TraceMeans& a, const TraceMeans& b);
};

/// Traces of a piecewise constant field: the cell values themselves.
TraceMeans trace_means(const CutCellMesh& mesh, const PiecewiseConstantField& v);
/// Beta-weighted means of a smooth function (single-valued across faces).
/// Faces with zero normal flux (the ramp) get the plain mean.
TraceMeans trace_means(const Discretization& d, const ScalarFn& f);

/// <v>_e = int_e |beta.n| v ds / int_e |beta.n| ds. Throws ZeroFluxFace on the ramp.
double beta_weighted_mean(const Discretization& d, int face, const ScalarFn& v);

/// Face-loop application of the stabilized operator: (A v)_F |F| = a_dod(v, 1_F).
PiecewiseConstantField apply_dod_operator(const Discretization& d, const TraceMeans& v);
PiecewiseConstantField apply_dod_operator(const Discretization& d, const PiecewiseConstantField& v);

/// Upwind form with the outflow-face replacement alpha v_E + (1 - alpha) v_in.
double bilinear_a_dod(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w);
/// Unstabilized upwind form in average/jump-penalty form.
double bilinear_a_upw(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w);
/// sum_E (1 - alpha_E) int_{e_out} (v_in - v_E) beta . [w].
double bilinear_J(const Discretization& d, const TraceMeans& v, const PiecewiseConstantField& w);

using SpaceTimeFn = std::function<double(double, Vec2)>;

/// Precomputed inflow boundary quadrature. Evaluates the boundary load
///   L_F = |F|^-1 sum_{e in bdy(F)} int_e min(beta.n_F, 0) g ds,
/// i.e. (L, w) = l_h(w) with the negative part taken as a magnitude, so that
/// u^{n+1} = u^n - dt (A u^n + L^n) preserves constants.
class InflowLoad {
 public:
  explicit InflowLoad(const Discretization& d);
  void evaluate(const SpaceTimeFn& g, double t, std::span<double> out) const;
  PiecewiseConstantField evaluate(const SpaceTimeFn& g, double t) const;
  std::size_t num_faces() const { return faces_.size(); }

 private:
  struct Entry {
    int cell;
    std::vector<QuadPoint> points;  // weight = quad weight * (beta.n)^- / |F|
  };
  std::vector<Entry> faces_;
  std::size_t cells_ = 0;
};

PiecewiseConstantField rhs_inflow(const Discretization& d, const SpaceTimeFn& g, double t);

/// The operator as a CSR matrix, rows scaled by 1/|F|; applied through the
/// dispatched SIMD kernels.
class AssembledOperator {
 public:
  explicit AssembledOperator(const Discretization& d);
  void apply(std::span<const double> v, std::span<double> out) const;
  PiecewiseConstantField apply(const PiecewiseConstantField& v) const;
  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t nonzeros() const { return cols_.size(); }

 private:
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<double> vals_;
};

/// kappa = (1 - 2 eps) / ((1 + eps) max(4 ||beta||_inf, 1/tau)).
double cfl_kappa(double beta_inf, double tau, double epsilon);

struct TimeGrid {
  double dt = 0.0;       // nominal step
  int steps = 0;
  double last_dt = 0.0;  // final step, shortened to land on T
  double kappa = 0.0;
  bool within_theorem_cfl = true;
};

TimeGrid cfl_dt(const Discretization& d, const SchemeConfig& config);

struct StepDiagnostics {
  int step;
  double t;
  double l2_norm;
  double min;
  double max;
};

struct SolveResult {
  PiecewiseConstantField u;
  TimeGrid grid;
  std::vector<StepDiagnostics> diagnostics;  // one row per state, including t = 0
  double accumulated_seminorm_sq = 0.0;      // sum_n dt |u(t^n) - u_h^n|_beta^2 when requested
};

struct SolveOptions {
  bool record_diagnostics = false;
  /// Exact solution for the time-accumulated seminorm; skipped when empty.
  SpaceTimeFn exact;
  /// Called after each step with (step, t, u).
  std::function<void(int, double, const PiecewiseConstantField&)> observer;
};

/// Explicit Euler march of the stabilized scheme.
class Solver {
 public:
  Solver(const Discretization& d, SpaceTimeFn inflow);

  /// u^{n+1} = u^n - dt (A u^n + L^n).
  PiecewiseConstantField step(const PiecewiseConstantField& u, double t, double dt) const;
  SolveResult solve(const PiecewiseConstantField& u0, const TimeGrid& grid, const SolveOptions& opts = {}) const;

  const AssembledOperator& op() const { return op_; }

 private:
  const Discretization& d_;
  SpaceTimeFn inflow_;
  AssembledOperator op_;
  InflowLoad load_;
  std::vector<double> areas_;
};

/// Solve the ramp test on an n x n background grid from the L2 projection of
/// the initial data.
struct RampRun {
  std::shared_ptr<const Discretization> disc;
  SolveResult result;
};
RampRun solve(const RampTestProblem& problem, const SchemeConfig& config, int n, const SolveOptions& opts = {});

}  // namespace dodcut
