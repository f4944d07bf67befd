#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dodcut/kernels.hpp"

namespace dodcut::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("DODCUT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && available(Isa::avx2)) return Isa::avx2;
  }
  return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& forced() {
  static std::atomic<int> value{-1};
  return value;
}

Isa current() {
  const int f = forced().load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return avx2::compiled() && cpu_has_avx2();
}

Isa active() { return current(); }

void force(Isa isa) {
  if (!available(isa)) throw std::invalid_argument("kernel variant not available: " + std::string(to_string(isa)));
  forced().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset() { forced().store(-1, std::memory_order_relaxed); }

void spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  current() == Isa::avx2 ? avx2::spmv(a, x, y) : scalar::spmv(a, x, y);
}

void euler_update(std::span<const double> u, std::span<const double> au, std::span<const double> rhs, double dt,
                  std::span<double> out) {
  current() == Isa::avx2 ? avx2::euler_update(u, au, rhs, dt, out) : scalar::euler_update(u, au, rhs, dt, out);
}

double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  return current() == Isa::avx2 ? avx2::weighted_sum_squares(w, x) : scalar::weighted_sum_squares(w, x);
}

double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y) {
  return current() == Isa::avx2 ? avx2::weighted_dot(w, x, y) : scalar::weighted_dot(w, x, y);
}

MinMax minmax(std::span<const double> x) {
  return current() == Isa::avx2 ? avx2::minmax(x) : scalar::minmax(x);
}

}  // namespace dodcut::kernels
