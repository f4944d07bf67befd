#pragma once

// Data-parallel inner loops of the time march: CSR matrix-vector product,
// explicit Euler update, weighted reductions. Each kernel has a scalar
// reference and an AVX2 variant; the variant is picked once at runtime from
// CPUID and can be forced for equivalence testing.

#include <span>
#include <string_view>

namespace dodcut::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True if the variant was compiled in and the CPU supports it.
bool available(Isa isa);
/// Best available variant unless overridden by force() or DODCUT_ISA=scalar|avx2.
Isa active();
/// Override the dispatch. Throws std::invalid_argument if unavailable.
void force(Isa isa);
/// Drop any override.
void reset();

struct CsrView {
  std::span<const int> row_ptr;  // rows + 1
  std::span<const int> cols;
  std::span<const double> vals;
};

struct MinMax {
  double min;
  double max;
};

/// y = A x
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
/// out = u - dt * (au + rhs)
void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out);
/// sum_i w_i x_i^2
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);
/// sum_i w_i x_i y_i
double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y);
MinMax minmax(std::span<const double> x);

// Direct access to each variant, for equivalence tests.
namespace scalar {
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out);
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);
double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y);
MinMax minmax(std::span<const double> x);
}  // namespace scalar

namespace avx2 {
bool compiled();
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y);
void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out);
double weighted_sum_squares(std::span<const double> w, std::span<const double> x);
double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y);
MinMax minmax(std::span<const double> x);
}  // namespace avx2

}  // namespace dodcut::kernels
