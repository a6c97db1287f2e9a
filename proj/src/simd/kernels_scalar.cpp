#include "mesonet/simd/kernels.hpp"

namespace mesonet::simd::scalar {

void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out) {
  for (std::size_t j = begin; j < end; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dims; ++k) {
      const double* axis = coords + k * stride;
      const double d = axis[j] - axis[query];
      acc += d * d;
    }
    out[j - begin] = acc;
  }
}

void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out) {
  for (std::size_t j = begin; j < end; ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t < length; ++t) {
      const double* sample = samples + t * stride;
      acc += sample[row] * sample[j];
    }
    out[j - begin] = acc;
  }
}

std::size_t count_at_most(const double* values, std::size_t count, double threshold) {
  std::size_t hits = 0;
  for (std::size_t j = 0; j < count; ++j) {
    hits += values[j] <= threshold ? 1 : 0;
  }
  return hits;
}

}  // namespace mesonet::simd::scalar
