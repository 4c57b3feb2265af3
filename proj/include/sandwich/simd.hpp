#pragma once

// Data-parallel inner loops with a scalar reference and vector variants.
//
// Every variant performs the same IEEE operations in the same order as the
// scalar reference (four interleaved partial sums, combined as
// (l0 + l1) + (l2 + l3), then the remainder left to right), so results are
// bit-identical across ISAs. Requires building without FP contraction.

#include <cstddef>
#include <span>
#include <string_view>

namespace sandwich::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Best variant the running CPU supports.
Isa detected_isa();

/// Variant used by the dispatching entry points below.
Isa active_isa();

/// Override the active variant. Returns false (and changes nothing) if the
/// CPU or the build does not support `isa`.
bool set_active_isa(Isa isa);

struct TailStats {
  std::size_t count = 0;  // values strictly above the threshold
  double sum = 0.0;       // their sum
};

/// out[i] = y[i] (1-f) in[i] / (x[i] + (1-f) in[i])
void swap_output_batch(std::span<const double> reserve_x, std::span<const double> reserve_y,
                       std::span<const double> input, double fee, std::span<double> out);

TailStats tail_stats(std::span<const double> values, double threshold);

namespace scalar {
void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n);
TailStats tail_stats(const double* v, std::size_t n, double threshold);
}  // namespace scalar

#if defined(SANDWICH_HAVE_AVX2)
namespace avx2 {
void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n);
TailStats tail_stats(const double* v, std::size_t n, double threshold);
}  // namespace avx2
#endif

#if defined(SANDWICH_HAVE_NEON)
namespace neon {
void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n);
TailStats tail_stats(const double* v, std::size_t n, double threshold);
}  // namespace neon
#endif

}  // namespace sandwich::simd
