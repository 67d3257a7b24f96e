#include "dynocc/depth_order.hpp"

#include <algorithm>
#include <cmath>

#include "dynocc/flow_ops.hpp"

namespace dynocc {

namespace {

// 4-neighbours first so a trace follows the curve instead of cutting corners.
constexpr int kStepX[8] = {1, 0, -1, 0, 1, -1, -1, 1};
constexpr int kStepY[8] = {0, -1, 0, 1, -1, -1, 1, 1};

int neighbour_count(const BinaryMask& m, int x, int y) {
  int n = 0;
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kStepX[k];
    const int ny = y + kStepY[k];
    if (m.contains(nx, ny) && m(nx, ny) != 0) ++n;
  }
  return n;
}

Vec2 chord_normal(const std::vector<PixelPoint>& curve, std::size_t i) {
  const std::size_t last = curve.size() - 1;
  const PixelPoint a = curve[i >= 2 ? i - 2 : 0];
  const PixelPoint b = curve[std::min(i + 2, last)];
  const double tx = b.x - a.x;
  const double ty = b.y - a.y;
  const double norm = std::hypot(tx, ty);
  if (norm == 0.0) return Vec2{0.0, 0.0};
  return Vec2{-ty / norm, tx / norm};
}

}  // namespace

void OrderParams::validate() const {
  if (helper_offset < 1) throw ParameterError("helper_offset must be >= 1");
  if (baseline < 1) throw ParameterError("baseline must be >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in [0, 1]");
  if (align_tolerance < 0) throw ParameterError("align_tolerance must be >= 0");
  if (segment_len < 1) throw ParameterError("segment_len must be >= 1");
}

std::vector<BoundarySegment> split_segments(const BinaryMask& mask, int segment_len) {
  if (segment_len < 1) throw ParameterError("segment_len must be >= 1");
  const int w = mask.width();
  const int h = mask.height();

  // Curve pixels: skeleton pixels that are not junctions.
  BinaryMask curve_px(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(x, y) != 0 && neighbour_count(mask, x, y) < 3) curve_px(x, y) = 1;
    }
  }

  BinaryMask visited(w, h);
  std::vector<std::vector<PixelPoint>> curves;
  auto trace_from = [&](PixelPoint start) {
    std::vector<PixelPoint> curve{start};
    visited[start] = 1;
    PixelPoint cur = start;
    for (;;) {
      bool advanced = false;
      for (int k = 0; k < 8; ++k) {
        const PixelPoint nb{cur.x + kStepX[k], cur.y + kStepY[k]};
        if (curve_px.contains(nb) && curve_px[nb] != 0 && visited[nb] == 0) {
          visited[nb] = 1;
          curve.push_back(nb);
          cur = nb;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    curves.push_back(std::move(curve));
  };

  // Open curves from their endpoints, then whatever is left (closed loops).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (curve_px(x, y) != 0 && visited(x, y) == 0 && neighbour_count(curve_px, x, y) <= 1) {
        trace_from({x, y});
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (curve_px(x, y) != 0 && visited(x, y) == 0) trace_from({x, y});
    }
  }

  const double min_tail = std::max(3.0, segment_len / 4.0);
  std::vector<BoundarySegment> segments;
  for (const auto& curve : curves) {
    for (std::size_t begin = 0; begin < curve.size(); begin += static_cast<std::size_t>(segment_len)) {
      const std::size_t end = std::min(curve.size(), begin + static_cast<std::size_t>(segment_len));
      if (static_cast<double>(end - begin) < min_tail) continue;
      BoundarySegment seg;
      for (std::size_t i = begin; i < end; ++i) {
        const Vec2 n = chord_normal(curve, i);
        if (n.x == 0.0 && n.y == 0.0) continue;
        seg.pixels.push_back(curve[i]);
        seg.normals.push_back(n);
      }
      if (static_cast<double>(seg.pixels.size()) >= min_tail) segments.push_back(std::move(seg));
    }
  }
  return segments;
}

std::pair<PixelPoint, PixelPoint> helper_pixels(PixelPoint p, Vec2 d, int offset, int width,
                                                int height) {
  const PixelPoint p1 = round_to_lattice(p.x - offset * d.x, p.y - offset * d.y);
  const PixelPoint p2 = round_to_lattice(p.x + offset * d.x, p.y + offset * d.y);
  return {clamp_to_raster(p1, width, height), clamp_to_raster(p2, width, height)};
}

int warp_match_count(const BoundarySegment& segment, Side side, const FlowField& flow,
                     const BinaryMask& edges_other, const OrderParams& params) {
  if (!edges_other.same_shape(flow.u)) {
    throw DimensionError("edge mask and flow field differ in size");
  }
  const int w = flow.width();
  const int h = flow.height();
  const int tol = params.align_tolerance;
  int count = 0;
  for (std::size_t i = 0; i < segment.pixels.size(); ++i) {
    const PixelPoint p = segment.pixels[i];
    const auto [p1, p2] = helper_pixels(p, segment.normals[i], params.helper_offset, w, h);
    const FlowVector f = sample_flow(flow, side == Side::one ? p1 : p2);
    const PixelPoint q = round_to_lattice(p.x + static_cast<double>(f.u), p.y + static_cast<double>(f.v));
    bool aligned = false;
    for (int dy = -tol; dy <= tol && !aligned; ++dy) {
      for (int dx = -tol; dx <= tol; ++dx) {
        if (edges_other.contains(q.x + dx, q.y + dy) && edges_other(q.x + dx, q.y + dy) != 0) {
          aligned = true;
          break;
        }
      }
    }
    if (aligned) ++count;
  }
  return count;
}

std::optional<Side> margin_winner(SideCounts counts, int c, double delta) {
  if (c <= 0) return std::nullopt;
  if (static_cast<double>(counts.side1 - counts.side2) / c > delta) return Side::one;
  if (static_cast<double>(counts.side2 - counts.side1) / c > delta) return Side::two;
  return std::nullopt;
}

std::optional<Side> decide_foreground(SideCounts prev, SideCounts next, int c, double delta) {
  const auto via_prev = margin_winner(prev, c, delta);
  const auto via_next = margin_winner(next, c, delta);
  if (via_prev && via_next && *via_prev == *via_next) return via_prev;
  return std::nullopt;
}

std::optional<FigureGroundVerdict> classify_segment(const BoundarySegment& segment,
                                                    const FlowField& f_prev,
                                                    const FlowField& f_next,
                                                    const BinaryMask& edges_prev,
                                                    const BinaryMask& edges_next,
                                                    const OrderParams& params) {
  const SideCounts prev{warp_match_count(segment, Side::one, f_prev, edges_prev, params),
                        warp_match_count(segment, Side::two, f_prev, edges_prev, params)};
  const SideCounts next{warp_match_count(segment, Side::one, f_next, edges_next, params),
                        warp_match_count(segment, Side::two, f_next, edges_next, params)};
  const auto side = decide_foreground(prev, next, segment.length(), params.delta);
  if (!side) return std::nullopt;
  return FigureGroundVerdict{segment, *side, prev, next};
}

}  // namespace dynocc
