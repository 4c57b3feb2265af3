#include <arm_neon.h>

#include "sandwich/simd.hpp"

namespace sandwich::simd::neon {

void swap_output_batch(const double* x, const double* y, const double* in, double fee, double* out,
                       std::size_t n) {
  const double g = 1.0 - fee;
  const float64x2_t vg = vdupq_n_f64(g);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gd = vmulq_f64(vg, vld1q_f64(in + i));
    const float64x2_t num = vmulq_f64(vld1q_f64(y + i), gd);
    const float64x2_t den = vaddq_f64(vld1q_f64(x + i), gd);
    vst1q_f64(out + i, vdivq_f64(num, den));
  }
  for (; i < n; ++i) {
    const double gd = g * in[i];
    out[i] = (y[i] * gd) / (x[i] + gd);
  }
}

TailStats tail_stats(const double* v, std::size_t n, double threshold) {
  // Two 2-lane accumulators hold lanes {0,1} and {2,3} of the scalar order.
  const float64x2_t vt = vdupq_n_f64(threshold);
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t count = 0;
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const float64x2_t a = vld1q_f64(v + i);
    const float64x2_t b = vld1q_f64(v + i + 2);
    const uint64x2_t ma = vcgtq_f64(a, vt);
    const uint64x2_t mb = vcgtq_f64(b, vt);
    acc01 = vaddq_f64(acc01, vreinterpretq_f64_u64(vandq_u64(ma, vreinterpretq_u64_f64(a))));
    acc23 = vaddq_f64(acc23, vreinterpretq_f64_u64(vandq_u64(mb, vreinterpretq_u64_f64(b))));
    count += static_cast<std::size_t>((vgetq_lane_u64(ma, 0) & 1) + (vgetq_lane_u64(ma, 1) & 1) +
                                      (vgetq_lane_u64(mb, 0) & 1) + (vgetq_lane_u64(mb, 1) & 1));
  }
  double sum = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
               (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
  for (std::size_t i = body; i < n; ++i) {
    if (v[i] > threshold) {
      sum += v[i];
      ++count;
    }
  }
  return {count, sum};
}

}  // namespace sandwich::simd::neon
