#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dynocc/raster.hpp"

namespace dynocc {

/// Ordered run of skeleton pixels with a unit normal per pixel.
struct BoundarySegment {
  std::vector<PixelPoint> pixels;
  std::vector<Vec2> normals;

  int length() const { return static_cast<int>(pixels.size()); }
};

struct OrderParams {
  int helper_offset = 5;    // px from p to each helper pixel
  int baseline = 2;         // frames between the annotated frame and its neighbours
  double delta = 0.5;       // required (c1 - c2) / c margin
  int align_tolerance = 1;  // Chebyshev radius for "aligned with an edge pixel"
  int segment_len = 20;     // c, pixels per segment

  void validate() const;
};

/// Side 1 holds helper p1 = p - offset*n, side 2 holds p2 = p + offset*n.
enum class Side { one = 1, two = 2 };

inline Side opposite(Side s) { return s == Side::one ? Side::two : Side::one; }

struct SideCounts {
  int side1 = 0;
  int side2 = 0;

  friend bool operator==(const SideCounts&, const SideCounts&) = default;
};

struct FigureGroundVerdict {
  BoundarySegment segment;
  Side foreground_side = Side::one;
  SideCounts prev;
  SideCounts next;
};

/// Traces the skeleton into curves (from endpoints first, then closed loops),
/// stopping at junction pixels (>= 3 skeleton neighbours), and cuts each curve
/// into runs of at most segment_len pixels. A trailing run shorter than
/// max(3, segment_len / 4) is dropped. Normals are perpendicular to the chord
/// between the curve points two steps before and after each pixel.
std::vector<BoundarySegment> split_segments(const BinaryMask& mask, int segment_len);

/// (p1, p2) = (round(p - offset*d), round(p + offset*d)), each clamped into the raster.
std::pair<PixelPoint, PixelPoint> helper_pixels(PixelPoint p, Vec2 d, int offset, int width,
                                                int height);

/// Number of segment pixels that land within align_tolerance of an edge pixel
/// of edges_other after being moved by the flow sampled at their side's helper.
int warp_match_count(const BoundarySegment& segment, Side side, const FlowField& flow,
                     const BinaryMask& edges_other, const OrderParams& params);

/// The side whose margin (c_side - c_other) / c exceeds delta, if any.
std::optional<Side> margin_winner(SideCounts counts, int c, double delta);

/// Foreground side when both temporal directions name the same winner.
std::optional<Side> decide_foreground(SideCounts prev, SideCounts next, int c, double delta);

std::optional<FigureGroundVerdict> classify_segment(const BoundarySegment& segment,
                                                    const FlowField& f_prev,
                                                    const FlowField& f_next,
                                                    const BinaryMask& edges_prev,
                                                    const BinaryMask& edges_next,
                                                    const OrderParams& params);

}  // namespace dynocc
