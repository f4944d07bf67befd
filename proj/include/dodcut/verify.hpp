#pragma once

// Numerical checks of the inequalities and identities behind the error
// analysis. Each check returns a LemmaReport; random fields are i.i.d. uniform
// in [-1, 1] from a seeded std::mt19937_64.

#include <cstdint>
#include <string>
#include <vector>

#include "dodcut/discretization.hpp"

namespace dodcut {

enum class CheckKind {
  inequality,  // ratio = lhs / rhs, pass if max <= 1 + tol
  identity,    // ratio = |lhs - rhs| / scale, pass if max <= tol
};

struct LemmaReport {
  std::string id;
  CheckKind kind = CheckKind::inequality;
  std::vector<double> ratios;
  double max_ratio = 0.0;
  double tolerance = 1e-10;
  bool pass = true;
  std::uint64_t seed = 0;
  std::string note;  // free-form extra figures (fitted slope, smallest alpha, ...)

  std::size_t instances() const { return ratios.size(); }
  void add(double ratio);
  /// Recompute max_ratio and pass from the stored ratios.
  void finalize();
  /// Merge another report of the same kind into this one.
  void absorb(const LemmaReport& other);
};

constexpr double kInequalityTol = 1e-10;
constexpr double kIdentityTol = 1e-12;

/// Per cell, |sum of outward fluxes| against 1e-12 * perimeter * ||beta||_inf.
LemmaReport check_incompressibility(const Discretization& d);

/// Non-stabilized cells: sum_in int|beta.n| <= 4 ||beta|| |E| / h.
/// Stabilized cells: alpha_E sum_in int|beta.n| <= |E| / (tau h).
LemmaReport check_inverse_trace(const Discretization& d);

/// a_dod(v, v) = 1/2 |v|_beta^2 for random v and for the indicator of every
/// stabilized cell.
LemmaReport check_dissipation(const Discretization& d, int samples, std::uint64_t seed);

/// sum_e omega_e {v} beta.[v] = 0 and sum_e beta.[v w] = 0.
LemmaReport check_face_sum_average(const Discretization& d, int samples, std::uint64_t seed);
LemmaReport check_face_sum_product(const Discretization& d, int samples, std::uint64_t seed);

/// 1/2 A^2 + a B^2 + a A B = 1/2 ((1 - a) A^2 + a B^2 + a (A + B)^2).
LemmaReport check_algebraic_identity(int samples, std::uint64_t seed);

/// |w|_beta <= 2 sqrt(C_tr / h) ||w||.
LemmaReport check_inverse_estimate(const Discretization& d, int samples, std::uint64_t seed);

/// |a_dod(v, w)| <= |||v|||_* |w|_beta with v = smooth + discrete.
LemmaReport check_boundedness_1(const Discretization& d, const RampTestProblem& problem, int samples,
                                std::uint64_t seed);

/// ||A v|| <= sqrt(C_tr / h) |v|_beta.
LemmaReport check_boundedness_2(const Discretization& d, int samples, std::uint64_t seed);

/// |J(u(t), w)| <= sqrt(tau h) ||beta||_{W1,inf} ||u(t)||_{H1} |w|_beta.
LemmaReport check_consistency(const Discretization& d, const RampTestProblem& problem, double t, int samples,
                              std::uint64_t seed);

/// ||u - Pi u|| <= (sqrt 2 / pi) h ||grad u|| at t = 0 over the given n, plus the
/// least-squares slope of |||u - Pi u|||_* against h, required in [0.4, 0.6].
LemmaReport check_projection(const RampTestProblem& problem, const SchemeConfig& config, const std::vector<int>& ns);

/// Zero inflow, u^0 = Pi u0: ||u^{n+1}|| <= ||u^n|| + 1e-13 for `steps` steps of
/// the configured CFL step.
LemmaReport check_energy_decay(const RampTestProblem& problem, const SchemeConfig& config, int n, int steps);

/// min |beta.n| over `points` equispaced samples on every stabilized cell's
/// e_in and e_out; +inf when nothing is stabilized.
double estimate_cb(const Discretization& d, int points = 1000);

struct VerifyOptions {
  std::uint64_t seed = 20240521;
  int samples = 100;
  SchemeConfig scheme;
};

/// The full sweep used by the CLI and the acceptance run.
std::vector<LemmaReport> run_all_checks(const VerifyOptions& opts);

/// Stress geometry: ramp through grid nodes up to a 1e-10 shift.
RampDomain stress_ramp();
constexpr int kStressN = 40;

double degrees(double deg);

}  // namespace dodcut
