#include <algorithm>
#include <limits>

#include "dodcut/kernels.hpp"

namespace dodcut::kernels::scalar {

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_ptr.size() - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      sum += a.vals[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(k)])];
    }
    y[r] = sum;
  }
}

void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - dt * (au[i] + rhs[i]);
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * x[i] * x[i];
  return sum;
}

double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * x[i] * y[i];
  return sum;
}

MinMax minmax(std::span<const double> x) {
  MinMax r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double v : x) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  return r;
}

}  // namespace dodcut::kernels::scalar
