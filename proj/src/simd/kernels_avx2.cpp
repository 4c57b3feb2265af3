#include <immintrin.h>

#include "sandwich/simd.hpp"

namespace sandwich::simd::avx2 {

void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n) {
  const double g = 1.0 - fee;
  const __m256d vg = _mm256_set1_pd(g);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gd = _mm256_mul_pd(vg, _mm256_loadu_pd(in + i));
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(y + i), gd);
    const __m256d den = _mm256_add_pd(_mm256_loadu_pd(x + i), gd);
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) {
    const double gd = g * in[i];
    out[i] = (y[i] * gd) / (x[i] + gd);
  }
}

TailStats tail_stats(const double* v, std::size_t n, double threshold) {
  const __m256d vt = _mm256_set1_pd(threshold);
  __m256d acc = _mm256_setzero_pd();
  std::size_t count = 0;
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d mask = _mm256_cmp_pd(x, vt, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, x));
    count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(mask)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) {
    if (v[i] > threshold) {
      sum += v[i];
      ++count;
    }
  }
  return {count, sum};
}

}  // namespace sandwich::simd::avx2
