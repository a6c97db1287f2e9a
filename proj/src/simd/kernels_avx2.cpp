#include "mesonet/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MESONET_HAVE_X86 1
#include <immintrin.h>
#else
#define MESONET_HAVE_X86 0
#endif

namespace mesonet::simd::avx2 {

#if MESONET_HAVE_X86

// Built for AVX2 without FMA: a fused multiply-add would round differently
// from the scalar reference.
#define MESONET_AVX2 __attribute__((target("avx2")))

MESONET_AVX2
void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out) {
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dims; ++k) {
      const double* axis = coords + k * stride;
      const __m256d q = _mm256_set1_pd(axis[query]);
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(axis + j), q);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + (j - begin), acc);
  }
  if (j < end) {
    scalar::squared_distances(coords, stride, dims, query, j, end, out + (j - begin));
  }
}

MESONET_AVX2
void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out) {
  std::size_t j = begin;
  // Two accumulators per pass halve the broadcast traffic on samples[row].
  for (; j + 8 <= end; j += 8) {
    __m256d lo = _mm256_setzero_pd();
    __m256d hi = _mm256_setzero_pd();
    for (std::size_t t = 0; t < length; ++t) {
      const double* sample = samples + t * stride;
      const __m256d r = _mm256_set1_pd(sample[row]);
      lo = _mm256_add_pd(lo, _mm256_mul_pd(r, _mm256_loadu_pd(sample + j)));
      hi = _mm256_add_pd(hi, _mm256_mul_pd(r, _mm256_loadu_pd(sample + j + 4)));
    }
    _mm256_storeu_pd(out + (j - begin), lo);
    _mm256_storeu_pd(out + (j - begin) + 4, hi);
  }
  for (; j + 4 <= end; j += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t t = 0; t < length; ++t) {
      const double* sample = samples + t * stride;
      const __m256d r = _mm256_set1_pd(sample[row]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(r, _mm256_loadu_pd(sample + j)));
    }
    _mm256_storeu_pd(out + (j - begin), acc);
  }
  if (j < end) {
    scalar::cross_products(samples, stride, length, row, j, end, out + (j - begin));
  }
}

MESONET_AVX2
std::size_t count_at_most(const double* values, std::size_t count, double threshold) {
  const __m256d limit = _mm256_set1_pd(threshold);
  std::size_t hits = 0;
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(values + j), limit, _CMP_LE_OQ);
    hits += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(mask)));
  }
  return hits + scalar::count_at_most(values + j, count - j, threshold);
}

#undef MESONET_AVX2

#else

void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out) {
  scalar::squared_distances(coords, stride, dims, query, begin, end, out);
}

void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out) {
  scalar::cross_products(samples, stride, length, row, begin, end, out);
}

std::size_t count_at_most(const double* values, std::size_t count, double threshold) {
  return scalar::count_at_most(values, count, threshold);
}

#endif

}  // namespace mesonet::simd::avx2
