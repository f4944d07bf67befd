#include "dodcut/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace dodcut {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

int kind_code(CellKind k) {
  switch (k) {
    case CellKind::cartesian: return 0;
    case CellKind::cut3: return 3;
    case CellKind::cut4: return 4;
    case CellKind::cut5: return 5;
  }
  return -1;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_vtk(std::ostream& os, const Discretization& d, const PiecewiseConstantField* u) {
  const auto& mesh = d.mesh();
  std::size_t points = 0;
  for (const Cell& c : mesh.cells()) points += c.vertices.size();
  os << "# vtk DataFile Version 3.0\n";
  os << "dodcut ramp mesh n=" << mesh.n() << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  // vertices are written per cell; shared points are duplicated
  os << "POINTS " << points << " double\n";
  for (const Cell& c : mesh.cells()) {
    for (const Vec2& v : c.vertices) os << format_number(v.x) << ' ' << format_number(v.y) << " 0\n";
  }
  os << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() + points << "\n";
  std::size_t next = 0;
  for (const Cell& c : mesh.cells()) {
    os << c.vertices.size();
    for (std::size_t k = 0; k < c.vertices.size(); ++k) os << ' ' << next++;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_cells() << "\n";
  for (std::size_t i = 0; i < mesh.num_cells(); ++i) os << "7\n";
  os << "CELL_DATA " << mesh.num_cells() << "\n";
  os << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : mesh.cells()) os << kind_code(c.kind) << '\n';
  os << "SCALARS area double 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : mesh.cells()) os << format_number(c.area) << '\n';
  os << "SCALARS alpha double 1\nLOOKUP_TABLE default\n";
  for (const Cell& c : mesh.cells()) os << format_number(d.stabilized().alpha(c.id)) << '\n';
  if (u) {
    os << "SCALARS u double 1\nLOOKUP_TABLE default\n";
    for (double v : u->values) os << format_number(v) << '\n';
  }
}

void write_vtk(const std::filesystem::path& path, const Discretization& d, const PiecewiseConstantField* u) {
  auto os = open_out(path);
  write_vtk(os, d, u);
  check_written(os, path);
}

void write_diagnostics_csv(std::ostream& os, const std::vector<StepDiagnostics>& rows) {
  os << "step,t,l2_norm,min,max\n";
  for (const auto& r : rows) {
    os << r.step << ',' << format_number(r.t) << ',' << format_number(r.l2_norm) << ',' << format_number(r.min) << ','
       << format_number(r.max) << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows) {
  auto os = open_out(path);
  write_diagnostics_csv(os, rows);
  check_written(os, path);
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "n,h,dt,l2_error,beta_semi_error,accumulated_seminorm,order_l2,order_beta\n";
  for (const auto& r : rep.rows) {
    os << r.n << ',' << format_number(r.h) << ',' << format_number(r.dt) << ',' << format_number(r.l2_error) << ','
       << format_number(r.beta_semi_error) << ',' << format_number(r.accumulated_seminorm) << ','
       << format_number(r.order_l2) << ',' << format_number(r.order_beta) << '\n';
  }
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& rep) {
  auto os = open_out(path);
  write_convergence_csv(os, rep);
  check_written(os, path);
}

void write_plot_data(const std::filesystem::path& path, const ConvergenceReport& rep, ErrorNorm norm) {
  auto os = open_out(path);
  for (const auto& r : rep.rows) {
    os << format_number(r.h) << ' ' << format_number(norm == ErrorNorm::l2 ? r.l2_error : r.beta_semi_error) << '\n';
  }
  check_written(os, path);
}

void write_verify_csv(std::ostream& os, const std::vector<LemmaReport>& reports) {
  os << "lemma_id,instances,max_ratio,pass\n";
  for (const auto& r : reports) {
    os << r.id << ',' << r.instances() << ',' << format_number(r.max_ratio) << ',' << (r.pass ? "true" : "false")
       << '\n';
  }
}

void write_verify_csv(const std::filesystem::path& path, const std::vector<LemmaReport>& reports) {
  auto os = open_out(path);
  write_verify_csv(os, reports);
  check_written(os, path);
}

}  // namespace dodcut
