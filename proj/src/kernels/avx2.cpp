// Compiled with -mavx2 only (no FMA) so that mul + add rounds exactly like the
// scalar path.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "kernels_internal.hpp"

namespace ecsim::kernels::detail {

namespace {

void advance_avx2(std::span<double> w, std::span<const int> s, double chunk, double drain) {
  const std::size_t n = w.size();
  const __m256d vc = _mm256_set1_pd(chunk);
  const __m256d vd = _mm256_set1_pd(drain);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i si = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.data() + i));
    const __m256d sd = _mm256_cvtepi32_pd(si);
    __m256d v = _mm256_loadu_pd(w.data() + i);
    v = _mm256_add_pd(v, _mm256_mul_pd(vc, sd));
    v = _mm256_sub_pd(v, vd);
    // max(v, 0) with the scalar convention: 0 wins unless v > 0.
    v = _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(w.data() + i, v);
  }
  for (; i < n; ++i) {
    const double v = w[i] + chunk * static_cast<double>(s[i]) - drain;
    w[i] = v > 0.0 ? v : 0.0;
  }
}

void drain_avx2(std::span<double> w, double drain) {
  const std::size_t n = w.size();
  const __m256d vd = _mm256_set1_pd(drain);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(w.data() + i), vd);
    v = _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ));
    _mm256_storeu_pd(w.data() + i, v);
  }
  for (; i < n; ++i) {
    const double v = w[i] - drain;
    w[i] = v > 0.0 ? v : 0.0;
  }
}

double request_max_avx2(std::span<const double> w, std::span<const int> s, double chunk) {
  const std::size_t n = w.size();
  const __m256d ninf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  const __m256d vc = _mm256_set1_pd(chunk);
  const __m128i zero_i = _mm_setzero_si128();
  __m256d best = ninf;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i si = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s.data() + i));
    const __m256d sd = _mm256_cvtepi32_pd(si);
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(w.data() + i), _mm256_mul_pd(vc, sd));
    const __m256d mask = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_cmpgt_epi32(si, zero_i)));
    best = _mm256_max_pd(best, _mm256_blendv_pd(ninf, v, mask));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    if (s[i] > 0) r = std::max(r, w[i] + chunk * static_cast<double>(s[i]));
  }
  return r;
}

double total_avx2(std::span<const double> w) {
  const std::size_t n = w.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(w.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double t = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) t += w[i];
  return t;
}

constexpr KernelTable kAvx2{"avx2", advance_avx2, drain_avx2, request_max_avx2, total_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace ecsim::kernels::detail
