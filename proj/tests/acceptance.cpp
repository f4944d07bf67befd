// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dodcut/convergence.hpp"
#include "dodcut/norms.hpp"
#include "dodcut/verify.hpp"

using namespace dodcut;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] %d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool convergence_windows(double kappa_override, std::string& detail) {
  bool ok = true;
  for (double g : {5.0, 15.0, 25.0, 35.0, 45.0}) {
    StudyConfig sc;
    sc.gamma_deg = g;
    sc.x0 = 0.2001;
    sc.scheme.t_final = 0.5;
    sc.scheme.tau = 1.0;
    if (kappa_override > 0.0) sc.scheme.kappa = kappa_override;
    const ConvergenceReport rep = run_convergence(sc);
    const double ol2 = rep.fitted_order_l2(), ob = rep.fitted_order_beta();
    const bool here = in(ol2, 0.85, 1.15) && in(ob, 0.35, 0.65);
    ok = ok && here;
    detail += " g" + fmt(g, 3) + ":l2=" + fmt(ol2) + ",beta=" + fmt(ob) + ",kappa=" + fmt(rep.kappa);
  }
  return ok;
}

const LemmaReport& find(const std::vector<LemmaReport>& reps, const std::string& id) {
  for (const auto& r : reps)
    if (r.id == id) return r;
  throw std::runtime_error("missing report " + id);
}

std::string summary(const LemmaReport& r) {
  return r.id + " max=" + fmt(r.max_ratio, 6) + " n=" + std::to_string(r.instances()) + (r.pass ? "" : " FAILED");
}

}  // namespace

int main() {
  {
    std::string d;
    const bool ok = convergence_windows(-1.0, d);
    report(1, ok, "convergence, theorem CFL dt = h/5 (fitted over n = 64,128,256):" + d);
  }
  {
    std::string d;
    const bool ok = convergence_windows(0.5, d);
    report(2, ok, "convergence, dt = h/2:" + d);
  }

  VerifyOptions vo;  // 100 samples per mesh, fixed seed
  const auto reps = run_all_checks(vo);

  {
    const auto& r = find(reps, "dissipation");
    report(3, r.pass && r.max_ratio <= 1e-12, "discrete dissipation, " + summary(r));
  }
  {
    const auto& a = find(reps, "face_sum_average");
    const auto& b = find(reps, "face_sum_product");
    report(4, a.pass && b.pass && a.max_ratio <= 1e-12 && b.max_ratio <= 1e-12,
           "face-sum identities, " + summary(a) + "; " + summary(b));
  }
  {
    const auto& r = find(reps, "inverse_trace");
    report(5, r.pass && r.max_ratio <= 1.0 + kInequalityTol, "inverse trace, " + summary(r));
  }
  {
    const auto& a = find(reps, "inverse_estimate");
    const auto& b = find(reps, "boundedness_1");
    const auto& c = find(reps, "boundedness_2");
    report(6, a.pass && b.pass && c.pass, summary(a) + "; " + summary(b) + "; " + summary(c));
  }
  {
    const auto& r = find(reps, "consistency");
    report(7, r.pass, "consistency at n = 32,64,128, t = 0,0.25,0.5, " + summary(r));
  }
  {
    const auto& r = find(reps, "projection");
    report(8, r.pass, summary(r) + " (" + r.note + ")");
  }
  {
    const auto& r = find(reps, "energy_decay");
    // the stress mesh must actually contain sub-1e-8 volume fractions
    const RampDomain sr = stress_ramp();
    const auto mesh = CutCellMesh::build(sr, kStressN);
    double frac = 1.0;
    for (const Cell& c : mesh.cells()) frac = std::min(frac, c.area / (mesh.h() * mesh.h()));
    report(9, r.pass && frac < 1e-8,
           summary(r) + ", smallest volume fraction " + fmt(frac) + " (" + r.note + ")");
  }
  {
    double worst_const = 0.0, worst_dual = 0.0;
    for (double g : {5.0, 15.0, 25.0, 35.0, 45.0}) {
      for (int n : {16, 64}) {
        const RampDomain r{degrees(g), 0.2001};
        const Discretization d(CutCellMesh::build(r, n), std::make_shared<RampVelocity>(r), SchemeConfig{});
        const Solver solver(d, [](double, Vec2) { return 1.7; });
        const PiecewiseConstantField u(d.num_cells(), 1.7);
        const auto next = solver.step(u, 0.0, cfl_dt(d, d.config()).dt);
        for (double x : next.values) worst_const = std::max(worst_const, std::abs(x - 1.7));

        std::mt19937_64 rng(vo.seed + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> ud(-1.0, 1.0);
        PiecewiseConstantField v(d.num_cells());
        for (auto& x : v.values) x = ud(rng);
        const auto tv = trace_means(d.mesh(), v);
        const auto av = apply_dod_operator(d, tv);
        PiecewiseConstantField w(d.num_cells());
        for (const Cell& c : d.mesh().cells()) {
          w[static_cast<std::size_t>(c.id)] = 1.0;
          const double form = bilinear_a_dod(d, tv, w);
          w[static_cast<std::size_t>(c.id)] = 0.0;
          worst_dual = std::max(worst_dual, std::abs(c.area * av[static_cast<std::size_t>(c.id)] - form) /
                                                std::max(1.0, std::abs(form)));
        }
      }
    }
    report(10, worst_const <= 1e-13 && worst_dual <= 1e-12,
           "constant preservation max " + fmt(worst_const) + " (<= 1e-13), duality max " + fmt(worst_dual) +
               " (<= 1e-12)");
  }
  return failures == 0 ? 0 : 1;
}
