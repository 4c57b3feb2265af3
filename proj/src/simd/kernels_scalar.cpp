#include "sandwich/simd.hpp"

namespace sandwich::simd::scalar {

void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n) {
  const double g = 1.0 - fee;
  for (std::size_t i = 0; i < n; ++i) {
    const double gd = g * in[i];
    out[i] = (y[i] * gd) / (x[i] + gd);
  }
}

TailStats tail_stats(const double* v, std::size_t n, double threshold) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t count = 0;
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (v[i + j] > threshold) {
        lane[j] += v[i + j];
        ++count;
      }
    }
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) {
    if (v[i] > threshold) {
      sum += v[i];
      ++count;
    }
  }
  return {count, sum};
}

}  // namespace sandwich::simd::scalar
