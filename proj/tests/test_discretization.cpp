#include <doctest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "dodcut/discretization.hpp"
#include "dodcut/kernels.hpp"
#include "dodcut/norms.hpp"

using namespace dodcut;
using testutil::deg;
using testutil::ramp_disc;
using testutil::random_field;

namespace {

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

// Tangent to the ramp and divergence free; the normal component flips sign at eta = c.
class ShearVelocity final : public VelocityField {
 public:
  ShearVelocity(RampDomain r, double c) : r_(r), c_(c) {}
  Vec2 evaluate(Vec2 p) const override {
    return (ramp_coords(r_, p).eta - c_) * Vec2{std::cos(r_.gamma), std::sin(r_.gamma)};
  }
  Mat2 gradient(Vec2) const override {
    const double c = std::cos(r_.gamma), s = std::sin(r_.gamma);
    return {{{-s * c, c * c}, {-s * s, s * c}}};
  }
  double inf_norm(const RampDomain&) const override { return 2.0; }
  double w1inf_norm(const RampDomain&) const override { return 2.0; }

 private:
  RampDomain r_;
  double c_;
};

std::shared_ptr<Discretization> tangent_disc(double gamma_deg, int n) {
  const RampDomain r{deg(gamma_deg), 0.2001};
  return std::make_shared<Discretization>(CutCellMesh::build(r, n),
                                          std::make_shared<ConstantVelocity>(Vec2{std::cos(r.gamma), std::sin(r.gamma)}),
                                          SchemeConfig{});
}

PiecewiseConstantField indicator(std::size_t n, int cell) {
  PiecewiseConstantField w(n);
  w[ix(cell)] = 1.0;
  return w;
}

}  // namespace

TEST_CASE("face means: constants, discrete traces, vertical faces") {
  const auto d = ramp_disc(25.0, 16);
  for (const Face& f : d->mesh().faces()) {
    if (f.kind == FaceKind::boundary_ramp) {
      CHECK_THROWS_AS(beta_weighted_mean(*d, f.id, [](Vec2) { return 1.0; }), ZeroFluxFace);
      continue;
    }
    CHECK(beta_weighted_mean(*d, f.id, [](Vec2) { return 3.5; }) == doctest::Approx(3.5).epsilon(1e-14));
    if (f.a.x == f.b.x) {
      CHECK(beta_weighted_mean(*d, f.id, [](Vec2 p) { return p.x; }) == doctest::Approx(f.a.x).epsilon(1e-14));
    }
  }
  std::mt19937_64 rng(1);
  const auto v = random_field(d->num_cells(), rng);
  const auto tm = trace_means(d->mesh(), v);
  for (const Face& f : d->mesh().faces()) {
    CHECK(tm.left[ix(f.id)] == v[ix(f.left)]);
    if (!f.is_boundary()) CHECK(tm.right[ix(f.id)] == v[ix(f.right)]);
  }
}

TEST_CASE("face table: mixed-sign normal velocity is rejected") {
  const RampDomain r{deg(25.0), 0.2001};
  // eta = 0.3 crosses many vertical faces away from their endpoints
  CHECK_THROWS_AS(Discretization(CutCellMesh::build(r, 8), std::make_shared<ShearVelocity>(r, 0.3), SchemeConfig{}),
                  SignChangeOnFace);
  // a non-tangent constant field has flux through the ramp
  CHECK_THROWS_AS(Discretization(CutCellMesh::build(r, 8), std::make_shared<ConstantVelocity>(Vec2{1.0, 0.0}),
                                 SchemeConfig{}),
                  SignChangeOnFace);
}

TEST_CASE("face table: incompressibility cell by cell") {
  const auto d = ramp_disc(35.0, 32);
  for (const Cell& c : d->mesh().cells()) {
    double s = 0.0, a = 0.0;
    for (int f : c.faces) {
      s += d->table().outward_flux(d->mesh(), f, c.id);
      a += d->table().abs_flux(f);
    }
    CHECK(std::abs(s) <= 1e-13 * std::max(a, d->h()));
  }
}

TEST_CASE("operator: constants vanish on interior cells") {
  const auto d = ramp_disc(25.0, 32);
  const auto av = apply_dod_operator(*d, PiecewiseConstantField(d->num_cells(), 2.0));
  for (const Cell& c : d->mesh().cells()) {
    bool interior = true;
    for (int f : c.faces) interior = interior && !d->mesh().face(f).is_boundary();
    if (interior) CHECK(std::abs(av[ix(c.id)]) <= 1e-12);
  }
}

TEST_CASE("operator: constant tangent field on Cartesian cells is the 2D upwind difference") {
  const double g = 25.0, c = std::cos(deg(g)), s = std::sin(deg(g));
  const int n = 16;
  const auto d = tangent_disc(g, n);
  const auto& mesh = d->mesh();
  std::mt19937_64 rng(5);
  const auto v = random_field(d->num_cells(), rng);
  const auto av = apply_dod_operator(*d, v);
  const double h = d->h();
  int checked = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) {
      const int F = mesh.cell_at(i, j), W = mesh.cell_at(i - 1, j), S = mesh.cell_at(i, j - 1);
      if (F < 0 || W < 0 || S < 0) continue;
      if (mesh.cell(F).kind != CellKind::cartesian || mesh.cell(W).kind != CellKind::cartesian ||
          mesh.cell(S).kind != CellKind::cartesian)
        continue;
      const double want = (c * (v[ix(F)] - v[ix(W)]) + s * (v[ix(F)] - v[ix(S)])) / h;
      CHECK(av[ix(F)] == doctest::Approx(want).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("operator: face loop equals the bilinear form against indicators") {
  const auto d = ramp_disc(25.0, 16);
  std::mt19937_64 rng(9);
  const auto v = random_field(d->num_cells(), rng);
  const auto tv = trace_means(d->mesh(), v);
  const auto av = apply_dod_operator(*d, tv);
  for (const Cell& c : d->mesh().cells()) {
    const double form = bilinear_a_dod(*d, tv, indicator(d->num_cells(), c.id));
    CHECK(std::abs(c.area * av[ix(c.id)] - form) <= 1e-12 * std::max(1.0, std::abs(form)));
  }
  CHECK(bilinear_a_dod(*d, tv, PiecewiseConstantField(d->num_cells())) == 0.0);
}

TEST_CASE("operator: a_dod = a_upw + J, dissipation, J of a constant") {
  for (double g : {5.0, 25.0, 45.0}) {
    const auto d = ramp_disc(g, 32);
    CAPTURE(g);
    REQUIRE(!d->stabilized().empty());
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
      const auto v = random_field(d->num_cells(), rng), w = random_field(d->num_cells(), rng);
      const auto tv = trace_means(d->mesh(), v);
      const double lhs = bilinear_a_dod(*d, tv, w);
      const double rhs = bilinear_a_upw(*d, tv, w) + bilinear_J(*d, tv, w);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      const double diss = bilinear_a_dod(*d, tv, v);
      const double semi = beta_seminorm(*d, v);
      CHECK(std::abs(diss - 0.5 * semi * semi) <= 1e-12 * std::max(1.0, diss));
      CHECK(bilinear_J(*d, trace_means(d->mesh(), PiecewiseConstantField(d->num_cells(), 1.5)), w) ==
            doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("stabilization: J vanishes when every capacity clamps to one") {
  SchemeConfig big;
  big.tau = 1e-12;  // |E| / (tau h A_in) huge, alpha clamps at 1
  const auto d = ramp_disc(25.0, 32, 0.2001, big);
  REQUIRE(!d->stabilized().empty());
  for (const auto& rec : d->stabilized().records()) CHECK(rec.alpha == 1.0);
  std::mt19937_64 rng(2);
  const auto v = random_field(d->num_cells(), rng), w = random_field(d->num_cells(), rng);
  CHECK(bilinear_J(*d, trace_means(d->mesh(), v), w) == 0.0);
}

TEST_CASE("stabilization: records are consistent") {
  for (double g : {5.0, 25.0, 45.0}) {
    const auto d = ramp_disc(g, 64);
    const auto& mesh = d->mesh();
    const auto& tab = d->table();
    for (const auto& rec : d->stabilized().records()) {
      const Cell& c = mesh.cell(rec.cell);
      CHECK(c.kind == CellKind::cut3);
      CHECK(is_stabilization_candidate(mesh.face(rec.e_in).length, mesh.face(rec.e_out).length, d->h()));
      CHECK(tab.outward_flux(mesh, rec.e_in, rec.cell) < 0.0);
      CHECK(tab.outward_flux(mesh, rec.e_out, rec.cell) > 0.0);
      CHECK(mesh.face(rec.e_bdy).kind == FaceKind::boundary_ramp);
      CHECK(mesh.neighbor(rec.e_in, rec.cell) == rec.E_in);
      CHECK(mesh.neighbor(rec.e_out, rec.cell) == rec.E_out);
      CHECK(rec.alpha > 0.0);
      CHECK(rec.alpha <= 1.0);
      CHECK(rec.alpha == capacity(c.area, 1.0, d->h(), tab.abs_flux(rec.e_in)));
      CHECK(d->stabilized().alpha(rec.cell) == rec.alpha);
      CHECK(d->stabilized().record_of_cell(rec.E_in) < 0);
      CHECK(d->stabilized().record_of_cell(rec.E_out) < 0);
    }
  }
}

TEST_CASE("stabilization: size predicate is strict and capacity clamps") {
  const double h = 0.125;
  CHECK_FALSE(is_stabilization_candidate(h / 2, h / 2, h));
  CHECK(is_stabilization_candidate(std::nextafter(h / 2, 0.0), h / 4, h));
  CHECK_FALSE(is_stabilization_candidate(h / 4, h, h));
  CHECK(capacity(h * h, 1.0, h, 0.5 * h) == 1.0);
  // shrinking right triangle with legs delta and unit normal speed on e_in
  for (double delta : {1e-2, 1e-4, 1e-8}) {
    const double a = capacity(delta * delta / 2, 1.0, h, delta);
    CHECK(a == doctest::Approx(delta / (2 * h)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(capacity(1.0, 1.0, h, 0.0), InvalidStabilization);
}

TEST_CASE("stabilization: cut triangle with legs just under and just over h/2") {
  // at 45 degrees from x0 = h/2 + s the cell [h,2h]x[0,h] keeps a triangle with legs h/2 + s
  const int n = 8;
  const double h = 1.0 / n;
  auto build = [&](double shift) {
    const RampDomain r{deg(45.0), h / 2 + shift};
    return Discretization(CutCellMesh::build(r, n), std::make_shared<RampVelocity>(r), SchemeConfig{});
  };
  const Discretization small = build(-1e-3 * h);
  const int cs = small.mesh().cell_at(1, 0);
  REQUIRE(cs >= 0);
  CHECK(small.mesh().cell(cs).kind == CellKind::cut3);
  CHECK(small.stabilized().record_of_cell(cs) >= 0);
  const Discretization large = build(1e-3 * h);
  const int cl = large.mesh().cell_at(1, 0);
  REQUIRE(cl >= 0);
  CHECK(large.mesh().cell(cl).kind == CellKind::cut3);
  CHECK(large.stabilized().record_of_cell(cl) < 0);
}

TEST_CASE("inflow load: sign, magnitude, constants preserved") {
  const double g = 25.0;
  const auto d = tangent_disc(g, 16);
  const auto& mesh = d->mesh();
  const auto L = rhs_inflow(*d, [](double, Vec2) { return 1.0; }, 0.0);
  const int F = mesh.cell_at(0, 10);
  REQUIRE(mesh.cell(F).kind == CellKind::cartesian);
  CHECK(L[ix(F)] == doctest::Approx(-std::cos(deg(g)) / d->h()).epsilon(1e-13));
  const auto zero = rhs_inflow(*d, [](double, Vec2) { return 0.0; }, 0.0);
  for (double x : zero.values) CHECK(x == 0.0);

  for (double gg : {5.0, 25.0, 45.0}) {
    const auto dr = ramp_disc(gg, 64);
    const Solver solver(*dr, [](double, Vec2) { return 2.5; });
    const PiecewiseConstantField u(dr->num_cells(), 2.5);
    const auto next = solver.step(u, 0.0, cfl_dt(*dr, dr->config()).dt);
    double worst = 0.0;
    for (double x : next.values) worst = std::max(worst, std::abs(x - 2.5));
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("CFL: theorem constants, validation, override, final step") {
  CHECK(cfl_kappa(1.0, 1.0, 1.0 / 14.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(cfl_kappa(1.0, 1.0, 1e-12) == doctest::Approx(0.25).epsilon(1e-11));
  CHECK_THROWS_AS(cfl_kappa(1.0, 1.0, 0.5), InvalidConfig);
  CHECK_THROWS_AS(cfl_kappa(1.0, 1.0, 0.0), InvalidConfig);
  SchemeConfig bad;
  bad.epsilon = 0.7;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  bad.epsilon = 0.1;
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);

  SchemeConfig cfg;
  cfg.t_final = 0.01;
  const auto d = ramp_disc(25.0, 64, 0.2001, cfg);
  const TimeGrid g = cfl_dt(*d, cfg);
  CHECK(g.kappa == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(g.within_theorem_cfl);
  CHECK(g.dt == doctest::Approx(0.2 / 64).epsilon(1e-15));
  CHECK(g.steps == 4);
  CHECK(g.last_dt == doctest::Approx(0.01 - 3 * 0.2 / 64).epsilon(1e-12));

  cfg.kappa = 0.5;
  const TimeGrid o = cfl_dt(*d, cfg);
  CHECK(o.dt == doctest::Approx(d->h() / (2 * d->beta_inf())).epsilon(1e-15));
  CHECK_FALSE(o.within_theorem_cfl);

  cfg.kappa.reset();
  cfg.t_final = 0.5;
  const TimeGrid exact = cfl_dt(*d, cfg);
  CHECK(exact.steps == 160);
  CHECK(exact.last_dt == doctest::Approx(exact.dt).epsilon(1e-10));
}

TEST_CASE("solve: T = 0 returns the projection; error decreases") {
  SchemeConfig cfg;
  cfg.t_final = 0.0;
  const RampTestProblem prob({deg(25.0), 0.2001}, 0.0);
  const RampRun run = solve(prob, cfg, 16);
  CHECK(run.result.grid.steps == 0);
  const auto pi = l2_project(*run.disc, [&](Vec2 p) { return prob.initial(p); });
  CHECK(run.result.u.values == pi.values);

  cfg.t_final = 0.25;
  const RampTestProblem p2({deg(25.0), 0.2001}, 0.25);
  double prev = 1e9;
  for (int n : {16, 32, 64}) {
    const RampRun r = solve(p2, cfg, n);
    const double e = l2_error(*r.disc, r.result.u, [&](Vec2 p) { return p2.exact(0.25, p); });
    CHECK(e < 0.75 * prev);
    prev = e;
  }
}

TEST_CASE("solve: diagnostics and observer") {
  SchemeConfig cfg;
  cfg.t_final = 0.05;
  const RampTestProblem prob({deg(25.0), 0.2001}, 0.05);
  int calls = 0;
  SolveOptions opts;
  opts.record_diagnostics = true;
  opts.exact = [&](double t, Vec2 p) { return prob.exact(t, p); };
  opts.observer = [&](int, double, const PiecewiseConstantField&) { ++calls; };
  const RampRun run = solve(prob, cfg, 32, opts);
  CHECK(calls == run.result.grid.steps);
  REQUIRE(run.result.diagnostics.size() == static_cast<std::size_t>(run.result.grid.steps + 1));
  CHECK(run.result.diagnostics.back().t == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(run.result.accumulated_seminorm_sq > 0.0);
  CHECK(run.result.u.all_finite());
}

TEST_CASE("assembled operator matches the face loop under every kernel") {
  const auto d = ramp_disc(45.0, 40);
  const AssembledOperator op(*d);
  std::mt19937_64 rng(21);
  const auto v = random_field(d->num_cells(), rng);
  const auto ref = apply_dod_operator(*d, v);
  for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2}) {
    if (!kernels::available(isa)) continue;
    kernels::force(isa);
    const auto got = op.apply(v);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - ref[i]) <= 1e-12 * (1.0 + std::abs(ref[i])));
  }
  kernels::reset();
}
