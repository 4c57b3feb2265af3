#include <atomic>
#include <stdexcept>

#include "sandwich/simd.hpp"

namespace sandwich::simd {

namespace {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SANDWICH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SANDWICH_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "?";
}

Isa detected_isa() {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
  if (!supported(isa)) return false;
  active().store(isa, std::memory_order_relaxed);
  return true;
}

void swap_output_batch(std::span<const double> reserve_x, std::span<const double> reserve_y,
                       std::span<const double> input, double fee, std::span<double> out) {
  const std::size_t n = out.size();
  if (reserve_x.size() != n || reserve_y.size() != n || input.size() != n) {
    throw std::invalid_argument("swap_output_batch: span sizes differ");
  }
  switch (active_isa()) {
#if defined(SANDWICH_HAVE_AVX2)
    case Isa::avx2:
      return avx2::swap_output_batch(reserve_x.data(), reserve_y.data(), input.data(), fee,
                                     out.data(), n);
#endif
#if defined(SANDWICH_HAVE_NEON)
    case Isa::neon:
      return neon::swap_output_batch(reserve_x.data(), reserve_y.data(), input.data(), fee,
                                     out.data(), n);
#endif
    default:
      return scalar::swap_output_batch(reserve_x.data(), reserve_y.data(), input.data(), fee,
                                       out.data(), n);
  }
}

TailStats tail_stats(std::span<const double> values, double threshold) {
  switch (active_isa()) {
#if defined(SANDWICH_HAVE_AVX2)
    case Isa::avx2:
      return avx2::tail_stats(values.data(), values.size(), threshold);
#endif
#if defined(SANDWICH_HAVE_NEON)
    case Isa::neon:
      return neon::tail_stats(values.data(), values.size(), threshold);
#endif
    default:
      return scalar::tail_stats(values.data(), values.size(), threshold);
  }
}

}  // namespace sandwich::simd
