#pragma once

#include "dynocc/raster.hpp"
#include "dynocc/simd/kernels.hpp"

namespace dynocc {

/// Integer-displacement flow from a to b by exhaustive SAD block matching.
///
/// For every pixel p the estimator picks the displacement d in
/// [-radius, radius]^2 minimising the sum of |a(q) - b(q + d)| over the
/// block x block window around p (window clipped to the frame, b sampled with
/// border replication). Ties go to the smallest |d|, then to the
/// lexicographically smallest (dy, dx). RGB frames are matched on luma.
FlowField estimate_flow_block_matching(const Frame& a, const Frame& b, int block, int radius,
                                       const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace dynocc
