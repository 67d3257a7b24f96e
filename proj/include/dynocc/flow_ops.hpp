#pragma once

#include <optional>

#include "dynocc/raster.hpp"
#include "dynocc/simd/kernels.hpp"

namespace dynocc {

/// ||grad F||_1 per pixel: |du/dx| + |du/dy| + |dv/dx| + |dv/dy| with central
/// differences in the interior and one-sided differences on the border.
ScalarMap flow_gradient_magnitude(const FlowField& field,
                                  const simd::KernelTable& kernels = simd::active_kernels());

struct FlowVector {
  float u = 0.0f;
  float v = 0.0f;

  friend bool operator==(const FlowVector&, const FlowVector&) = default;
};

/// Lattice flow at p; coordinates outside the field clamp to the border.
FlowVector sample_flow(const FlowField& field, PixelPoint p);

/// Unit vector along the local central-difference gradient of map at p, or
/// std::nullopt ("undirected") when the gradient norm is below 1e-8.
std::optional<Vec2> gradient_direction(const ScalarMap& map, PixelPoint p);

/// Sum of each pixel's (2*radius+1)^2 window clipped to the raster.
ScalarMap window_sum(const ScalarMap& map, int radius,
                     const simd::KernelTable& kernels = simd::active_kernels());

}  // namespace dynocc
