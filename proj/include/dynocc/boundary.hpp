#pragma once

#include <cstdint>

#include "dynocc/flow_ops.hpp"
#include "dynocc/raster.hpp"

namespace dynocc {

struct BoundaryParams {
  int blur_k = 31;               // box filter size (odd)
  double norm_percentile = 90.0;  // nearest-rank percentile used as the divisor
  double threshold_tau = 0.3;    // keep normalized confidence strictly above this

  /// Throws ParameterError when a field is outside its valid range.
  void validate() const;
};

enum class FlowSide : std::uint8_t { prev = 0, next = 1 };

/// Fused occlusion-boundary confidence plus, per pixel, which flow it came from.
struct ConfidenceMap {
  ScalarMap values;
  Plane<FlowSide> selected;
};

/// b = F[h2].d - F[h1].d with h1 = p - d and h2 = p + d rounded to the lattice
/// and clamped. Positive where the projected flow diverges across p.
double divergence_score(const FlowField& field, PixelPoint p, Vec2 d);

/// Per-pixel divergence of a field, measured along the gradient direction of
/// its own ||grad F||_1 map. Pixels where that direction is undefined score 0.
ScalarMap divergence_map(const FlowField& field, const ScalarMap& gradient_magnitude);

/// B[p] = ||grad F_prev[p]||_1 if b_prev[p] > b_next[p], else ||grad F_next[p]||_1.
ConfidenceMap fuse_confidence(const FlowField& f_prev, const FlowField& f_next,
                              const simd::KernelTable& kernels = simd::active_kernels());

/// Same selection rule with precomputed scores and magnitudes.
ConfidenceMap fuse_confidence(const ScalarMap& b_prev, const ScalarMap& grad_prev,
                              const ScalarMap& b_next, const ScalarMap& grad_next);

/// k x k mean filter; windows are clipped to the raster and normalised by the
/// number of pixels they actually cover. k must be odd.
ScalarMap box_blur(const ScalarMap& map, int k,
                   const simd::KernelTable& kernels = simd::active_kernels());

/// Nearest-rank percentile: the ceil(pct/100 * N)-th smallest value.
float nearest_rank_percentile(const ScalarMap& map, double pct);

/// Divides by the nearest-rank percentile; all zeros when it is below 1e-12.
ScalarMap percentile_normalize(const ScalarMap& map, double pct);

/// Sets a bit where value > tau (strict).
BinaryMask threshold_mask(const ScalarMap& map, double tau);

/// Two-subiteration Guo-Hall parallel thinning to an 8-connected skeleton.
BinaryMask thin(const BinaryMask& mask);

/// Intermediate rasters of one detection run, kept for debug dumps.
struct BoundaryStages {
  ScalarMap confidence;
  ScalarMap blurred;
  ScalarMap normalized;
  BinaryMask thresholded;
  BinaryMask edges;
};

BoundaryStages detect_boundary_stages(const FlowField& f_prev, const FlowField& f_next,
                                      const BoundaryParams& params);

/// thin(threshold(normalize(blur(fuse(f_prev, f_next)))))
BinaryMask detect_boundaries(const FlowField& f_prev, const FlowField& f_next,
                             const BoundaryParams& params);

/// Variant for frames with flow in one temporal direction only (clip ends):
/// the confidence map is that field's ||grad F||_1 without fusion.
BinaryMask detect_boundaries_one_sided(const FlowField& field, const BoundaryParams& params);

}  // namespace dynocc
