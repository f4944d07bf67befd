// Compiled with -mavx2 when the toolchain targets x86-64; the dispatcher only
// calls into this file after checking CPUID.

#include <algorithm>
#include <limits>

#include "dodcut/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace dodcut::kernels::avx2 {

#if defined(__AVX2__)

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

bool compiled() { return true; }

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_ptr.size() - 1;
  const double* xp = x.data();
  const int* cols = a.cols.data();
  const double* vals = a.vals.data();
  for (std::size_t r = 0; r < rows; ++r) {
    int k = a.row_ptr[r];
    const int end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
      const __m256d xv = _mm256_i32gather_pd(xp, idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(vals + k), xv));
    }
    double sum = hsum(acc);
    for (; k < end; ++k) sum += vals[k] * xp[cols[k]];
    y[r] = sum;
  }
}

void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out) {
  const std::size_t n = u.size();
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(au.data() + i), _mm256_loadu_pd(rhs.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_sub_pd(_mm256_loadu_pd(u.data() + i), _mm256_mul_pd(vdt, s)));
  }
  for (; i < n; ++i) out[i] = u[i] - dt * (au[i] + rhs[i]);
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_mul_pd(xv, xv)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += w[i] * x[i] * x[i];
  return sum;
}

double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), xy));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += w[i] * x[i] * y[i];
  return sum;
}

MinMax minmax(std::span<const double> x) {
  const std::size_t n = x.size();
  __m256d lo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d hi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    lo = _mm256_min_pd(lo, v);
    hi = _mm256_max_pd(hi, v);
  }
  alignas(32) double l[4];
  alignas(32) double h[4];
  _mm256_store_pd(l, lo);
  _mm256_store_pd(h, hi);
  MinMax r{std::min({l[0], l[1], l[2], l[3]}), std::max({h[0], h[1], h[2], h[3]})};
  for (; i < n; ++i) {
    r.min = std::min(r.min, x[i]);
    r.max = std::max(r.max, x[i]);
  }
  return r;
}

#else

bool compiled() { return false; }
void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) { scalar::spmv(a, x, y); }
void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out) {
  scalar::euler_update(u, au, rhs, dt, out);
}
double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  return scalar::weighted_sum_squares(w, x);
}
double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y) {
  return scalar::weighted_dot(w, x, y);
}
MinMax minmax(std::span<const double> x) { return scalar::minmax(x); }

#endif

}  // namespace dodcut::kernels::avx2
