#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "dodcut/convergence.hpp"
#include "dodcut/discretization.hpp"
#include "dodcut/verify.hpp"

namespace dodcut {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Legacy ASCII VTK, UNSTRUCTURED_GRID of POLYGON cells. Cell data: "kind"
/// (0 cartesian, 3/4/5 cut), "area", "alpha", and "u" when given.
void write_vtk(std::ostream& os, const Discretization& d, const PiecewiseConstantField* u = nullptr);
void write_vtk(const std::filesystem::path& path, const Discretization& d, const PiecewiseConstantField* u = nullptr);

/// step,t,l2_norm,min,max
void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& rows);
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows);

/// n,h,dt,l2_error,beta_semi_error,accumulated_seminorm,order_l2,order_beta
void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep);
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& rep);

enum class ErrorNorm { l2, beta };
/// Two whitespace-separated columns: h error.
void write_plot_data(const std::filesystem::path& path, const ConvergenceReport& rep, ErrorNorm norm);

/// lemma_id,instances,max_ratio,pass
void write_verify_csv(std::ostream& os, const std::vector<LemmaReport>& reports);
void write_verify_csv(const std::filesystem::path& path, const std::vector<LemmaReport>& reports);

/// Shortest round-trip decimal; "nan" for NaN.
std::string format_number(double v);

}  // namespace dodcut
