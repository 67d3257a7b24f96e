#pragma once

// Scalar building blocks shared with the vector variants, which use them for
// border columns and tails so that both paths run the same arithmetic there.

namespace dynocc::simd::detail {

void flow_gradient_row_scalar(const float* u_up, const float* u_mid, const float* u_dn,
                              const float* v_up, const float* v_mid, const float* v_dn,
                              float dy_scale, float* out, int width, int x_begin, int x_end);

void row_window_sum_scalar(const float* in, float* out, int width, int radius, int x_begin,
                           int x_end);

}  // namespace dynocc::simd::detail
