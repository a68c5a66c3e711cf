#include <arm_neon.h>

#include <algorithm>
#include <limits>

#include "kernels_internal.hpp"

namespace ecsim::kernels::detail {

namespace {

void advance_neon(std::span<double> w, std::span<const int> s, double chunk, double drain) {
  const std::size_t n = w.size();
  const float64x2_t vc = vdupq_n_f64(chunk);
  const float64x2_t vd = vdupq_n_f64(drain);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const int32x2_t si = vld1_s32(s.data() + i);
    const float64x2_t sd = vcvtq_f64_s64(vmovl_s32(si));
    float64x2_t v = vaddq_f64(vld1q_f64(w.data() + i), vmulq_f64(vc, sd));
    v = vsubq_f64(v, vd);
    v = vbslq_f64(vcgtq_f64(v, zero), v, zero);
    vst1q_f64(w.data() + i, v);
  }
  for (; i < n; ++i) {
    const double v = w[i] + chunk * static_cast<double>(s[i]) - drain;
    w[i] = v > 0.0 ? v : 0.0;
  }
}

void drain_neon(std::span<double> w, double drain) {
  const std::size_t n = w.size();
  const float64x2_t vd = vdupq_n_f64(drain);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vsubq_f64(vld1q_f64(w.data() + i), vd);
    v = vbslq_f64(vcgtq_f64(v, zero), v, zero);
    vst1q_f64(w.data() + i, v);
  }
  for (; i < n; ++i) {
    const double v = w[i] - drain;
    w[i] = v > 0.0 ? v : 0.0;
  }
}

double request_max_neon(std::span<const double> w, std::span<const int> s, double chunk) {
  const std::size_t n = w.size();
  const float64x2_t ninf = vdupq_n_f64(-std::numeric_limits<double>::infinity());
  const float64x2_t vc = vdupq_n_f64(chunk);
  float64x2_t best = ninf;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const int64x2_t si = vmovl_s32(vld1_s32(s.data() + i));
    const float64x2_t v = vaddq_f64(vld1q_f64(w.data() + i), vmulq_f64(vc, vcvtq_f64_s64(si)));
    const uint64x2_t mask = vcgtq_s64(si, vdupq_n_s64(0));
    best = vmaxq_f64(best, vbslq_f64(mask, v, ninf));
  }
  double r = std::max(vgetq_lane_f64(best, 0), vgetq_lane_f64(best, 1));
  for (; i < n; ++i) {
    if (s[i] > 0) r = std::max(r, w[i] + chunk * static_cast<double>(s[i]));
  }
  return r;
}

double total_neon(std::span<const double> w) {
  const std::size_t n = w.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(w.data() + i));
  double t = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) t += w[i];
  return t;
}

constexpr KernelTable kNeon{"neon", advance_neon, drain_neon, request_max_neon, total_neon};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace ecsim::kernels::detail
