#include "mesonet/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace mesonet::simd {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("MESONET_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa detected_isa() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  return has_avx2 ? Isa::avx2 : Isa::scalar;
#else
  return Isa::scalar;
#endif
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) {
    isa = Isa::scalar;
  }
  active().store(isa, std::memory_order_relaxed);
}

void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out) {
  if (active_isa() == Isa::avx2) {
    avx2::squared_distances(coords, stride, dims, query, begin, end, out);
  } else {
    scalar::squared_distances(coords, stride, dims, query, begin, end, out);
  }
}

void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out) {
  if (active_isa() == Isa::avx2) {
    avx2::cross_products(samples, stride, length, row, begin, end, out);
  } else {
    scalar::cross_products(samples, stride, length, row, begin, end, out);
  }
}

std::size_t count_at_most(const double* values, std::size_t count, double threshold) {
  if (active_isa() == Isa::avx2) {
    return avx2::count_at_most(values, count, threshold);
  }
  return scalar::count_at_most(values, count, threshold);
}

}  // namespace mesonet::simd
