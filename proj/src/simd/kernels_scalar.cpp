#include <cmath>

#include "dynocc/simd/kernels.hpp"
#include "kernels_internal.hpp"

namespace dynocc::simd {

namespace detail {

void flow_gradient_row_scalar(const float* u_up, const float* u_mid, const float* u_dn,
                              const float* v_up, const float* v_mid, const float* v_dn,
                              float dy_scale, float* out, int width, int x_begin, int x_end) {
  for (int x = x_begin; x < x_end; ++x) {
    float dudx, dvdx;
    if (width == 1) {
      dudx = 0.0f;
      dvdx = 0.0f;
    } else if (x == 0) {
      dudx = u_mid[1] - u_mid[0];
      dvdx = v_mid[1] - v_mid[0];
    } else if (x == width - 1) {
      dudx = u_mid[x] - u_mid[x - 1];
      dvdx = v_mid[x] - v_mid[x - 1];
    } else {
      dudx = (u_mid[x + 1] - u_mid[x - 1]) * 0.5f;
      dvdx = (v_mid[x + 1] - v_mid[x - 1]) * 0.5f;
    }
    const float dudy = (u_dn[x] - u_up[x]) * dy_scale;
    const float dvdy = (v_dn[x] - v_up[x]) * dy_scale;
    out[x] = std::fabs(dudx) + std::fabs(dudy) + std::fabs(dvdx) + std::fabs(dvdy);
  }
}

void row_window_sum_scalar(const float* in, float* out, int width, int radius, int x_begin,
                           int x_end) {
  for (int x = x_begin; x < x_end; ++x) {
    const int lo = x - radius < 0 ? 0 : x - radius;
    const int hi = x + radius >= width ? width - 1 : x + radius;
    float acc = in[lo];
    for (int k = lo + 1; k <= hi; ++k) acc += in[k];
    out[x] = acc;
  }
}

}  // namespace detail

namespace {

void flow_gradient_row(const float* u_up, const float* u_mid, const float* u_dn,
                       const float* v_up, const float* v_mid, const float* v_dn, float dy_scale,
                       float* out, int width) {
  detail::flow_gradient_row_scalar(u_up, u_mid, u_dn, v_up, v_mid, v_dn, dy_scale, out, width, 0,
                                   width);
}

void row_window_sum(const float* in, float* out, int width, int radius) {
  detail::row_window_sum_scalar(in, out, width, radius, 0, width);
}

void accumulate(float* acc, const float* row, int n) {
  for (int i = 0; i < n; ++i) acc[i] += row[i];
}

void abs_diff(const float* a, const float* b, float* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = std::fabs(a[i] - b[i]);
}

void select_min(const float* cost, float* best, std::int32_t* best_index, std::int32_t index,
                int n) {
  for (int i = 0; i < n; ++i) {
    if (cost[i] < best[i]) {
      best[i] = cost[i];
      best_index[i] = index;
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar,  &flow_gradient_row, &row_window_sum,
                                 &accumulate,  &abs_diff,          &select_min};
  return table;
}

}  // namespace dynocc::simd
