#pragma once

// Run configuration for the command-line tool. A flat `key = value` file
// ('#' starts a comment) fills in defaults; command-line flags override it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dodcut/convergence.hpp"
#include "dodcut/discretization.hpp"

namespace dodcut {

enum class Mode { run, converge, verify, export_mesh };

struct RunConfig {
  Mode mode = Mode::run;
  double gamma_deg = 25.0;
  double x0 = 0.2001;
  int n = 64;
  std::vector<int> n_list{16, 32, 64, 128, 256};
  double cfl_epsilon = 1.0 / 14.0;
  std::optional<double> cfl_kappa;
  double tau = 1.0;
  double t_final = 0.5;
  int quad_face_order = 4;
  int quad_cell_degree = 6;
  std::filesystem::path out = "out";
  std::uint64_t seed = 20240521;
  int samples = 100;
  bool accumulate = false;

  SchemeConfig scheme() const;
  RampDomain ramp() const;
  StudyConfig study() const;
  /// Throws InvalidConfig on any out-of-range value.
  void validate() const;
};

/// Keys: problem.kind (ramp_paper), problem.gamma_deg, problem.x0,
/// problem.t_final, mesh.n, mesh.n_list, scheme.cfl_epsilon, scheme.cfl_kappa,
/// scheme.tau, quad.face_order, quad.cell_degree, output.dir, verify.seed,
/// verify.samples, converge.accumulate.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace dodcut
