#pragma once

// Data-parallel inner loops used by the raster stages. Every kernel has a
// scalar reference and (on x86-64) an AVX2 variant; the two must produce
// bit-identical output, so the vector code keeps the scalar summation order
// lane by lane and never contracts to FMA.

#include <cstdint>
#include <string_view>

namespace dynocc::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;

  /// One output row of ||grad F||_1 from three rows of u and v. up/dn are the
  /// rows used for the vertical difference and dy_scale is 0.5 for central
  /// differences or 1 for one-sided differences at the top/bottom border.
  void (*flow_gradient_row)(const float* u_up, const float* u_mid, const float* u_dn,
                            const float* v_up, const float* v_mid, const float* v_dn,
                            float dy_scale, float* out, int width);

  /// out[x] = sum of in[k] for k in [x - radius, x + radius] clipped to the row,
  /// accumulated left to right.
  void (*row_window_sum)(const float* in, float* out, int width, int radius);

  /// acc[i] += row[i]
  void (*accumulate)(float* acc, const float* row, int n);

  /// out[i] = |a[i] - b[i]|
  void (*abs_diff)(const float* a, const float* b, float* out, int n);

  /// Where cost[i] < best[i]: best[i] = cost[i], best_index[i] = index.
  void (*select_min)(const float* cost, float* best, std::int32_t* best_index,
                     std::int32_t index, int n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when the binary or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

bool isa_available(Isa isa);

/// The table the library uses. Picks the widest ISA the CPU supports unless
/// the DYNOCC_SIMD environment variable is set to "scalar".
const KernelTable& active_kernels();

std::string_view isa_name(Isa isa);

}  // namespace dynocc::simd
