#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dodcut/config.hpp"
#include "dodcut/convergence.hpp"
#include "dodcut/io.hpp"
#include "dodcut/kernels.hpp"
#include "dodcut/norms.hpp"
#include "dodcut/verify.hpp"

using namespace dodcut;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerifyFailed = 2;

int do_run(const RunConfig& cfg) {
  const RampTestProblem problem(cfg.ramp(), cfg.t_final);
  SolveOptions opts;
  opts.record_diagnostics = true;
  if (cfg.accumulate) opts.exact = [&](double t, Vec2 p) { return problem.exact(t, p); };
  const RampRun run = solve(problem, cfg.scheme(), cfg.n, opts);
  const auto& d = *run.disc;
  const auto err = error_breakdown(d, run.result.u, [&](Vec2 p) { return problem.exact(cfg.t_final, p); });

  write_vtk(cfg.out / "solution.vtk", d, &run.result.u);
  write_diagnostics_csv(cfg.out / "diagnostics.csv", run.result.diagnostics);

  const auto& g = run.result.grid;
  std::printf("cells %zu  stabilized %zu  h %s  dt %s  steps %d  kappa %s%s\n", d.num_cells(), d.stabilized().size(),
              format_number(d.h()).c_str(), format_number(g.dt).c_str(), g.steps, format_number(g.kappa).c_str(),
              g.within_theorem_cfl ? "" : "  (above the theorem CFL bound)");
  std::printf("error at T=%s: l2 %s  beta_semi %s  triple %s  triple_star %s\n", format_number(cfg.t_final).c_str(),
              format_number(err.l2).c_str(), format_number(err.beta_semi).c_str(), format_number(err.triple).c_str(),
              format_number(err.triple_star).c_str());
  const double cb = estimate_cb(d);
  if (std::isfinite(cb)) std::printf("c_b %s\n", format_number(cb).c_str());
  if (cb < 1e-8) std::fprintf(stderr, "warning: |beta.n| drops below 1e-8 on a stabilized face\n");
  if (cfg.accumulate) {
    std::printf("accumulated seminorm %s\n", format_number(std::sqrt(run.result.accumulated_seminorm_sq)).c_str());
  }
  std::printf("wrote %s, %s\n", (cfg.out / "solution.vtk").c_str(), (cfg.out / "diagnostics.csv").c_str());
  return kExitOk;
}

int do_converge(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport rep = run_convergence(cfg.study());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_convergence_csv(cfg.out / "convergence.csv", rep);
  write_plot_data(cfg.out / "plot_l2.dat", rep, ErrorNorm::l2);
  write_plot_data(cfg.out / "plot_beta.dat", rep, ErrorNorm::beta);

  write_convergence_csv(std::cout, rep);
  std::printf("gamma %s  x0 %s  kappa %s  tau %s  wall %.2fs\n", format_number(rep.gamma_deg).c_str(),
              format_number(rep.x0).c_str(), format_number(rep.kappa).c_str(), format_number(rep.tau).c_str(), wall);
  if (rep.rows.size() >= 2) {
    std::printf("fitted order (last %zu): l2 %.4f  beta %.4f\n", std::min<std::size_t>(3, rep.rows.size()),
                rep.fitted_order_l2(), rep.fitted_order_beta());
  }
  return kExitOk;
}

int do_verify(const RunConfig& cfg) {
  VerifyOptions opts;
  opts.seed = cfg.seed;
  opts.samples = cfg.samples;
  opts.scheme = cfg.scheme();
  const auto reports = run_all_checks(opts);
  write_verify_csv(cfg.out / "verify.csv", reports);
  write_verify_csv(std::cout, reports);
  bool ok = true;
  for (const auto& r : reports) {
    if (!r.note.empty()) std::printf("# %s: %s\n", r.id.c_str(), r.note.c_str());
    ok = ok && r.pass;
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int do_export(const RunConfig& cfg) {
  const RampDomain ramp = cfg.ramp();
  const Discretization d(CutCellMesh::build(ramp, cfg.n), std::make_shared<RampVelocity>(ramp), cfg.scheme());
  write_vtk(cfg.out / "mesh.vtk", d);
  std::printf("cells %zu  faces %zu  stabilized %zu\nwrote %s\n", d.num_cells(), d.mesh().num_faces(),
              d.stabilized().size(), (cfg.out / "mesh.vtk").c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized upwind DG solver for linear advection on ramp cut-cell meshes"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_file, n_list, out;
  double gamma = 0, x0 = 0, eps = 0, kappa = 0, tau = 0, t_final = 0;
  int n = 0, face_order = 0, cell_degree = 0, samples = 0;
  std::uint64_t seed = 0;
  bool accumulate = false;
  auto* o_config = app.add_option("--config", config_file, "key = value file; flags override it");
  auto* o_gamma = app.add_option("--gamma", gamma, "ramp angle in degrees");
  auto* o_x0 = app.add_option("--x0", x0, "ramp start on the bottom edge");
  auto* o_n = app.add_option("--n", n, "background cells per side");
  auto* o_nlist = app.add_option("--n-list", n_list, "comma-separated n for converge");
  auto* o_eps = app.add_option("--cfl-epsilon", eps, "epsilon in the theorem CFL constant");
  auto* o_kappa = app.add_option("--cfl-kappa", kappa, "manual dt / h, overrides the theorem CFL");
  auto* o_tau = app.add_option("--tau", tau, "capacity parameter");
  auto* o_t = app.add_option("--t-final", t_final, "final time");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_seed = app.add_option("--seed", seed, "seed for the random verification fields");
  auto* o_samples = app.add_option("--samples", samples, "random fields per verification mesh");
  auto* o_face = app.add_option("--quad-face-order", face_order, "Gauss points per face");
  auto* o_cell = app.add_option("--quad-cell-degree", cell_degree, "exactness degree of the cell rule");
  auto* o_acc = app.add_flag("--accumulate", accumulate, "also compute the time-accumulated seminorm");

  auto* run = app.add_subcommand("run", "solve once; write final-state VTK, diagnostics CSV, error summary");
  auto* converge = app.add_subcommand("converge", "refinement study; CSV plus two-column plot files");
  auto* verify = app.add_subcommand("verify", "numerical lemma checks; CSV report");
  auto* exp = app.add_subcommand("export", "write the mesh VTK only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (*o_config) apply_key_values(cfg, read_key_values(config_file));
    if (*o_gamma) cfg.gamma_deg = gamma;
    if (*o_x0) cfg.x0 = x0;
    if (*o_n) cfg.n = n;
    if (*o_nlist) cfg.n_list = parse_int_list(n_list);
    if (*o_eps) cfg.cfl_epsilon = eps;
    if (*o_kappa) cfg.cfl_kappa = kappa;
    if (*o_tau) cfg.tau = tau;
    if (*o_t) cfg.t_final = t_final;
    if (*o_out) cfg.out = out;
    if (*o_seed) cfg.seed = seed;
    if (*o_samples) cfg.samples = samples;
    if (*o_face) cfg.quad_face_order = face_order;
    if (*o_cell) cfg.quad_cell_degree = cell_degree;
    if (*o_acc) cfg.accumulate = accumulate;
    cfg.validate();

    std::fprintf(stderr, "kernels: %s\n", std::string(kernels::to_string(kernels::active())).c_str());
    if (*run) return do_run(cfg);
    if (*converge) return do_converge(cfg);
    if (*verify) return do_verify(cfg);
    if (*exp) return do_export(cfg);
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const DegenerateGeometry& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
