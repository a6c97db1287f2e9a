#pragma once

// Data-parallel inner loops shared by the recurrence and correlation code.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// Vectorization runs across output elements only; each output is reduced in
// the same order on every path, so all variants are bit-identical.

#include <cstddef>
#include <string_view>

namespace mesonet::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set supported by the running CPU.
Isa detected_isa();

/// Instruction set used by the dispatching entry points below. Defaults to
/// detected_isa(), or scalar when MESONET_SIMD=scalar is set.
Isa active_isa();

/// Forces a dispatch path. Requesting an unsupported ISA falls back to scalar.
void set_active_isa(Isa isa);

// Points are stored structure-of-arrays: coordinate k of point j lives at
// coords[k * stride + j].

/// out[j - begin] = sum_k (coords[k][j] - coords[k][query])^2 for j in [begin, end).
void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out);

/// Row-major samples x[t * stride + j]. For j in [begin, end):
/// out[j - begin] = sum_t x[t][row] * x[t][j].
void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out);

/// Counts entries with values[j] <= threshold.
std::size_t count_at_most(const double* values, std::size_t count, double threshold);

namespace scalar {
void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out);
void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out);
std::size_t count_at_most(const double* values, std::size_t count, double threshold);
}  // namespace scalar

namespace avx2 {
void squared_distances(const double* coords, std::size_t stride, std::size_t dims,
                       std::size_t query, std::size_t begin, std::size_t end,
                       double* out);
void cross_products(const double* samples, std::size_t stride, std::size_t length,
                    std::size_t row, std::size_t begin, std::size_t end, double* out);
std::size_t count_at_most(const double* values, std::size_t count, double threshold);
}  // namespace avx2

}  // namespace mesonet::simd
