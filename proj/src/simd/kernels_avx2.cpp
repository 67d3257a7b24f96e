// Compiled with -mavx2 (and without -mfma). Only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "dynocc/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace dynocc::simd {

namespace {

inline __m256 abs_ps(__m256 x) {
  const __m256 sign_mask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  return _mm256_and_ps(x, sign_mask);
}

void flow_gradient_row(const float* u_up, const float* u_mid, const float* u_dn,
                       const float* v_up, const float* v_mid, const float* v_dn, float dy_scale,
                       float* out, int width) {
  if (width < 3) {
    detail::flow_gradient_row_scalar(u_up, u_mid, u_dn, v_up, v_mid, v_dn, dy_scale, out, width,
                                     0, width);
    return;
  }
  detail::flow_gradient_row_scalar(u_up, u_mid, u_dn, v_up, v_mid, v_dn, dy_scale, out, width, 0,
                                   1);
  const __m256 half = _mm256_set1_ps(0.5f);
  const __m256 yscale = _mm256_set1_ps(dy_scale);
  int x = 1;
  for (; x + 8 <= width - 1; x += 8) {
    const __m256 dudx =
        _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(u_mid + x + 1), _mm256_loadu_ps(u_mid + x - 1)),
                      half);
    const __m256 dvdx =
        _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(v_mid + x + 1), _mm256_loadu_ps(v_mid + x - 1)),
                      half);
    const __m256 dudy =
        _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(u_dn + x), _mm256_loadu_ps(u_up + x)), yscale);
    const __m256 dvdy =
        _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(v_dn + x), _mm256_loadu_ps(v_up + x)), yscale);
    __m256 acc = _mm256_add_ps(abs_ps(dudx), abs_ps(dudy));
    acc = _mm256_add_ps(acc, abs_ps(dvdx));
    acc = _mm256_add_ps(acc, abs_ps(dvdy));
    _mm256_storeu_ps(out + x, acc);
  }
  detail::flow_gradient_row_scalar(u_up, u_mid, u_dn, v_up, v_mid, v_dn, dy_scale, out, width, x,
                                   width);
}

void row_window_sum(const float* in, float* out, int width, int radius) {
  // Columns whose window is not clipped: [radius, width - radius).
  const int interior_begin = radius;
  const int interior_end = width - radius;
  if (interior_end - interior_begin < 8) {
    detail::row_window_sum_scalar(in, out, width, radius, 0, width);
    return;
  }
  detail::row_window_sum_scalar(in, out, width, radius, 0, interior_begin);
  int x = interior_begin;
  for (; x + 8 <= interior_end; x += 8) {
    const float* base = in + x - radius;
    __m256 acc = _mm256_loadu_ps(base);
    for (int k = 1; k <= 2 * radius; ++k) acc = _mm256_add_ps(acc, _mm256_loadu_ps(base + k));
    _mm256_storeu_ps(out + x, acc);
  }
  detail::row_window_sum_scalar(in, out, width, radius, x, width);
}

void accumulate(float* acc, const float* row, int n) {
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(acc + i, _mm256_add_ps(_mm256_loadu_ps(acc + i), _mm256_loadu_ps(row + i)));
  }
  for (; i < n; ++i) acc[i] += row[i];
}

void abs_diff(const float* a, const float* b, float* out, int n) {
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, abs_ps(_mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i))));
  }
  for (; i < n; ++i) {
    out[i] = std::fabs(a[i] - b[i]);
  }
}

void select_min(const float* cost, float* best, std::int32_t* best_index, std::int32_t index,
                int n) {
  const __m256i idx = _mm256_set1_epi32(index);
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 c = _mm256_loadu_ps(cost + i);
    const __m256 b = _mm256_loadu_ps(best + i);
    const __m256 lt = _mm256_cmp_ps(c, b, _CMP_LT_OQ);
    _mm256_storeu_ps(best + i, _mm256_blendv_ps(b, c, lt));
    const __m256i bi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(best_index + i));
    const __m256i merged = _mm256_castps_si256(
        _mm256_blendv_ps(_mm256_castsi256_ps(bi), _mm256_castsi256_ps(idx), lt));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(best_index + i), merged);
  }
  for (; i < n; ++i) {
    if (cost[i] < best[i]) {
      best[i] = cost[i];
      best_index[i] = index;
    }
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{Isa::avx2, &flow_gradient_row, &row_window_sum,
                                 &accumulate, &abs_diff,          &select_min};
  return table;
}

}  // namespace dynocc::simd
