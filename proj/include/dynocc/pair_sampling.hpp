#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynocc/depth_order.hpp"
#include "dynocc/raster.hpp"
#include "dynocc/rng.hpp"

namespace dynocc {

/// +1: i is closer, -1: j is closer, 0: same depth.
enum class Ordinal : int { further = -1, same = 0, closer = 1 };

struct DepthPair {
  PixelPoint i;
  PixelPoint j;
  Ordinal o = Ordinal::same;

  friend bool operator==(const DepthPair&, const DepthPair&) = default;
};

struct SamplingParams {
  int bg_max_offset = 30;
  int fg_max_offset = 7;
  double flow_epsilon = 0.5;  // px, componentwise
  double keep_rate = 0.10;
  std::uint64_t seed = 0;
  int max_attempts = 8;

  void validate() const;
};

/// max(|u_a - u_b|, |v_a - v_b|) <= eps
bool flow_consistent(const FlowField& field, PixelPoint a, PixelPoint b, double eps);

/// Several fields of the same frame (e.g. towards t - baseline and t + baseline).
/// The multi-field overloads below require consistency in every one of them.
using FlowFields = std::span<const FlowField* const>;

bool flow_consistent(FlowFields fields, PixelPoint a, PixelPoint b, double eps);

/// Random point round(p + t*dir), t ~ U[1, max_offset], redrawn up to
/// max_attempts times until it is inside the field and shares the flow of
/// reference. std::nullopt when every attempt fails.
std::optional<PixelPoint> sample_along(PixelPoint p, Vec2 dir, PixelPoint reference,
                                       const FlowField& field, int max_offset, double flow_epsilon,
                                       int max_attempts, Rng& rng);
std::optional<PixelPoint> sample_along(PixelPoint p, Vec2 dir, PixelPoint reference,
                                       FlowFields fields, int max_offset, double flow_epsilon,
                                       int max_attempts, Rng& rng);

/// Background sample within bg_max_offset along dir_bg, flow-consistent with p2.
std::optional<PixelPoint> sample_background_point(PixelPoint p, Vec2 dir_bg, PixelPoint p2,
                                                  const FlowField& field,
                                                  const SamplingParams& params, Rng& rng);
std::optional<PixelPoint> sample_background_point(PixelPoint p, Vec2 dir_bg, PixelPoint p2,
                                                  FlowFields fields,
                                                  const SamplingParams& params, Rng& rng);

/// Foreground sample within fg_max_offset along dir_fg, flow-consistent with p1.
std::optional<PixelPoint> sample_foreground_point(PixelPoint p, Vec2 dir_fg, PixelPoint p1,
                                                  const FlowField& field,
                                                  const SamplingParams& params, Rng& rng);
std::optional<PixelPoint> sample_foreground_point(PixelPoint p, Vec2 dir_fg, PixelPoint p1,
                                                  FlowFields fields,
                                                  const SamplingParams& params, Rng& rng);

/// Point a pair is anchored to. Walking from p towards the foreground, the
/// first lattice point whose flow agrees with the foreground helper is found
/// (at most kAnchorSearch steps out); the anchor is the next point inward,
/// provided it agrees too. Estimated flow tends to bleed about one pixel across
/// occlusion edges, and the inward step keeps the anchor off that rim.
inline constexpr int kAnchorSearch = 2;

std::optional<PixelPoint> foreground_anchor(PixelPoint p, Vec2 dir_fg, PixelPoint fg_helper,
                                            const FlowField& field, double flow_epsilon);
std::optional<PixelPoint> foreground_anchor(PixelPoint p, Vec2 dir_fg, PixelPoint fg_helper,
                                            FlowFields fields, double flow_epsilon);

/// For every pixel of every classified segment emits (p, p_b, +1) and
/// (p_f, p, 0) when the respective sample succeeds. Pixels whose two helpers
/// share a flow vector are skipped.
std::vector<DepthPair> extract_pairs(std::span<const FigureGroundVerdict> verdicts,
                                     const FlowField& field, int helper_offset,
                                     const SamplingParams& params, Rng& rng);
std::vector<DepthPair> extract_pairs(std::span<const FigureGroundVerdict> verdicts,
                                     FlowFields fields, int helper_offset,
                                     const SamplingParams& params, Rng& rng);

/// Uniform subset of exactly floor(keep_rate * n) pairs, in input order.
std::vector<DepthPair> random_drop(std::span<const DepthPair> pairs, double keep_rate, Rng& rng);

/// floor(keep_rate * n), the cardinality random_drop keeps.
std::size_t kept_count(std::size_t n, double keep_rate);

}  // namespace dynocc
