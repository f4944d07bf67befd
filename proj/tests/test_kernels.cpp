#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dodcut/kernels.hpp"

using namespace dodcut;

namespace {

std::vector<double> rand_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

struct Csr {
  std::vector<int> row_ptr{0}, cols;
  std::vector<double> vals;
  kernels::CsrView view() const { return {row_ptr, cols, vals}; }
};

Csr random_csr(int rows, std::mt19937_64& rng) {
  Csr a;
  std::uniform_int_distribution<int> len(0, 9), col(0, rows - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 0; r < rows; ++r) {
    const int k = len(rng);
    for (int j = 0; j < k; ++j) {
      a.cols.push_back(col(rng));
      a.vals.push_back(u(rng));
    }
    a.row_ptr.push_back(static_cast<int>(a.cols.size()));
  }
  return a;
}

}  // namespace

TEST_CASE("scalar kernels against hand values") {
  const std::vector<double> w{1, 2, 3}, x{1, -2, 0.5}, y{2, 1, -4};
  CHECK(kernels::scalar::weighted_sum_squares(w, x) == 1 + 8 + 0.75);
  CHECK(kernels::scalar::weighted_dot(w, x, y) == 2 - 4 - 6);
  const auto mm = kernels::scalar::minmax(x);
  CHECK(mm.min == -2);
  CHECK(mm.max == 1);
  std::vector<double> out(3);
  kernels::scalar::euler_update(x, y, w, 0.5, out);
  CHECK(out[0] == 1 - 0.5 * 3);
  CHECK(out[2] == 0.5 - 0.5 * (-1));
  Csr a;
  a.row_ptr = {0, 2, 2, 3};
  a.cols = {0, 2, 1};
  a.vals = {2.0, -1.0, 4.0};
  kernels::scalar::spmv(a.view(), x, out);
  CHECK(out[0] == 2 - 0.5);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == -8.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::available(kernels::Isa::avx2)) {
    MESSAGE("avx2 not available on this machine; equivalence skipped");
    return;
  }
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 1000u, 1023u}) {
    CAPTURE(n);
    const auto w = rand_vec(n, rng), x = rand_vec(n, rng), y = rand_vec(n, rng);
    const double s1 = kernels::scalar::weighted_sum_squares(w, x), s2 = kernels::avx2::weighted_sum_squares(w, x);
    CHECK(std::abs(s1 - s2) <= 1e-14 * (1.0 + static_cast<double>(n)));
    const double d1 = kernels::scalar::weighted_dot(w, x, y), d2 = kernels::avx2::weighted_dot(w, x, y);
    CHECK(std::abs(d1 - d2) <= 1e-14 * (1.0 + static_cast<double>(n)));
    if (n > 0) {
      const auto m1 = kernels::scalar::minmax(x), m2 = kernels::avx2::minmax(x);
      CHECK(m1.min == m2.min);
      CHECK(m1.max == m2.max);
    }
    std::vector<double> o1(n), o2(n);
    kernels::scalar::euler_update(x, y, w, 0.37, o1);
    kernels::avx2::euler_update(x, y, w, 0.37, o2);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-15);
    if (n > 0) {
      const Csr a = random_csr(static_cast<int>(n), rng);
      kernels::scalar::spmv(a.view(), x, o1);
      kernels::avx2::spmv(a.view(), x, o2);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) <= 1e-14);
    }
  }
}

TEST_CASE("dispatch: force and reset") {
  kernels::force(kernels::Isa::scalar);
  CHECK(kernels::active() == kernels::Isa::scalar);
  CHECK(kernels::to_string(kernels::active()) == "scalar");
  if (kernels::available(kernels::Isa::avx2)) {
    kernels::force(kernels::Isa::avx2);
    CHECK(kernels::active() == kernels::Isa::avx2);
  } else {
    CHECK_THROWS_AS(kernels::force(kernels::Isa::avx2), std::invalid_argument);
  }
  kernels::reset();
  CHECK(kernels::available(kernels::active()));
}
