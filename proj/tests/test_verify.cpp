#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "dodcut/verify.hpp"

using namespace dodcut;
using testutil::deg;
using testutil::ramp_disc;

namespace {

std::size_t ix(int i) { return static_cast<std::size_t>(i); }

}  // namespace

TEST_CASE("report: finalize and absorb") {
  LemmaReport r;
  r.kind = CheckKind::inequality;
  r.tolerance = kInequalityTol;
  r.add(0.5);
  r.add(1.0 + 5e-11);
  r.finalize();
  CHECK(r.pass);
  CHECK(r.max_ratio == 1.0 + 5e-11);
  r.add(1.0 + 2e-10);
  r.finalize();
  CHECK_FALSE(r.pass);

  LemmaReport id;
  id.kind = CheckKind::identity;
  id.tolerance = kIdentityTol;
  id.add(1e-13);
  id.finalize();
  CHECK(id.pass);
  LemmaReport other = id;
  other.ratios = {std::nan("")};
  other.note = "x";
  id.absorb(other);
  CHECK_FALSE(id.pass);
  CHECK(id.instances() == 2);
  CHECK(id.note == "x");

  LemmaReport empty;
  empty.finalize();
  CHECK(empty.pass);
  CHECK(empty.max_ratio == 0.0);
}

TEST_CASE("inverse trace: Cartesian cells stay under 1/2, clamped stabilized cells hit 1") {
  const RampDomain r{deg(25.0), 0.2001};
  const Discretization d(CutCellMesh::build(r, 32),
                         std::make_shared<ConstantVelocity>(Vec2{std::cos(r.gamma), std::sin(r.gamma)}),
                         SchemeConfig{});
  const auto rep = check_inverse_trace(d);
  REQUIRE(rep.instances() == d.num_cells());
  for (const Cell& c : d.mesh().cells()) {
    if (c.kind == CellKind::cartesian) CHECK(rep.ratios[ix(c.id)] <= 0.5);
    const int k = d.stabilized().record_of_cell(c.id);
    if (k >= 0 && d.stabilized().records()[ix(k)].alpha < 1.0) {
      CHECK(rep.ratios[ix(c.id)] == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  CHECK(rep.pass);
}

TEST_CASE("checks pass on a regular mesh and on the stress mesh") {
  const RampTestProblem prob({deg(25.0), 0.2001}, 0.5);
  const auto d = ramp_disc(25.0, 32);
  const std::uint64_t seed = 99;
  CHECK(check_incompressibility(*d).pass);
  CHECK(check_inverse_trace(*d).pass);
  CHECK(check_dissipation(*d, 20, seed).pass);
  CHECK(check_face_sum_average(*d, 20, seed).pass);
  CHECK(check_face_sum_product(*d, 20, seed).pass);
  CHECK(check_inverse_estimate(*d, 20, seed).pass);
  CHECK(check_boundedness_1(*d, prob, 20, seed).pass);
  CHECK(check_boundedness_2(*d, 20, seed).pass);
  CHECK(check_consistency(*d, prob, 0.25, 20, seed).pass);
  const auto alg = check_algebraic_identity(1000, seed);
  CHECK(alg.pass);
  CHECK(alg.max_ratio <= 1e-14);

  const RampDomain sr = stress_ramp();
  const Discretization s(CutCellMesh::build(sr, kStressN), std::make_shared<RampVelocity>(sr), SchemeConfig{});
  REQUIRE(!s.stabilized().empty());
  CHECK(check_incompressibility(s).pass);
  CHECK(check_inverse_trace(s).pass);
  CHECK(check_dissipation(s, 20, seed).pass);
  CHECK(check_boundedness_2(s, 20, seed).pass);
}

TEST_CASE("dissipation report covers random fields and each stabilized indicator") {
  const auto d = ramp_disc(45.0, 32);
  const auto rep = check_dissipation(*d, 7, 1);
  CHECK(rep.instances() == 7 + d->stabilized().size());
  CHECK(rep.pass);
}

TEST_CASE("consistency: constants give a zero ratio") {
  const auto d = ramp_disc(25.0, 32);
  CHECK(bilinear_J(*d, trace_means(d->mesh(), PiecewiseConstantField(d->num_cells(), 1.0)),
                   PiecewiseConstantField(d->num_cells(), 3.0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("projection and energy checks") {
  const RampTestProblem prob({deg(25.0), 0.2001}, 0.5);
  const auto proj = check_projection(prob, SchemeConfig{}, {16, 32, 64});
  CHECK(proj.pass);
  CHECK(proj.note.find("triple_star_slope") != std::string::npos);
  const auto energy = check_energy_decay(prob, SchemeConfig{}, 32, 50);
  CHECK(energy.pass);
  CHECK(energy.max_ratio < 1.0);
}

TEST_CASE("c_b: infinite without stabilized cells, positive otherwise") {
  SchemeConfig cfg;
  const auto coarse = ramp_disc(25.0, 4, 0.2001, cfg);
  if (coarse->stabilized().empty()) CHECK(std::isinf(estimate_cb(*coarse)));
  const auto d = ramp_disc(25.0, 64);
  REQUIRE(!d->stabilized().empty());
  const double cb = estimate_cb(*d);
  CHECK(cb > 0.0);
  CHECK(cb <= d->beta_inf());
}

TEST_CASE("full sweep is deterministic for a fixed seed") {
  VerifyOptions o;
  o.samples = 5;
  const auto a = run_all_checks(o), b = run_all_checks(o);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(a[i].id);
    CHECK(a[i].pass);
    CHECK(a[i].max_ratio == b[i].max_ratio);
  }
}
