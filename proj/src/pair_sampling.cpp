#include "dynocc/pair_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dynocc/flow_ops.hpp"

namespace dynocc {

void SamplingParams::validate() const {
  if (bg_max_offset < 1 || fg_max_offset < 1) throw ParameterError("sampling offsets must be >= 1");
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw ParameterError("keep_rate must lie in (0, 1]");
  if (!(flow_epsilon >= 0.0)) throw ParameterError("flow_epsilon must be >= 0");
  if (max_attempts < 1) throw ParameterError("max_attempts must be >= 1");
}

bool flow_consistent(const FlowField& field, PixelPoint a, PixelPoint b, double eps) {
  const FlowVector fa = sample_flow(field, a);
  const FlowVector fb = sample_flow(field, b);
  const double du = std::fabs(static_cast<double>(fa.u) - fb.u);
  const double dv = std::fabs(static_cast<double>(fa.v) - fb.v);
  return std::max(du, dv) <= eps;
}

bool flow_consistent(FlowFields fields, PixelPoint a, PixelPoint b, double eps) {
  return std::all_of(fields.begin(), fields.end(),
                     [&](const FlowField* f) { return flow_consistent(*f, a, b, eps); });
}

std::optional<PixelPoint> sample_along(PixelPoint p, Vec2 dir, PixelPoint reference,
                                       FlowFields fields, int max_offset, double flow_epsilon,
                                       int max_attempts, Rng& rng) {
  if (fields.empty()) throw ParameterError("sampling needs at least one flow field");
  if (dir.x == 0.0 && dir.y == 0.0) return std::nullopt;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const double t = rng.uniform(1.0, static_cast<double>(max_offset));
    const PixelPoint q = round_to_lattice(p.x + t * dir.x, p.y + t * dir.y);
    if (!fields.front()->contains(q)) continue;
    if (flow_consistent(fields, q, reference, flow_epsilon)) return q;
  }
  return std::nullopt;
}

std::optional<PixelPoint> sample_along(PixelPoint p, Vec2 dir, PixelPoint reference,
                                       const FlowField& field, int max_offset, double flow_epsilon,
                                       int max_attempts, Rng& rng) {
  const FlowField* one[] = {&field};
  return sample_along(p, dir, reference, one, max_offset, flow_epsilon, max_attempts, rng);
}

std::optional<PixelPoint> sample_background_point(PixelPoint p, Vec2 dir_bg, PixelPoint p2,
                                                  FlowFields fields,
                                                  const SamplingParams& params, Rng& rng) {
  return sample_along(p, dir_bg, p2, fields, params.bg_max_offset, params.flow_epsilon,
                      params.max_attempts, rng);
}

std::optional<PixelPoint> sample_background_point(PixelPoint p, Vec2 dir_bg, PixelPoint p2,
                                                  const FlowField& field,
                                                  const SamplingParams& params, Rng& rng) {
  const FlowField* one[] = {&field};
  return sample_background_point(p, dir_bg, p2, one, params, rng);
}

std::optional<PixelPoint> sample_foreground_point(PixelPoint p, Vec2 dir_fg, PixelPoint p1,
                                                  FlowFields fields,
                                                  const SamplingParams& params, Rng& rng) {
  return sample_along(p, dir_fg, p1, fields, params.fg_max_offset, params.flow_epsilon,
                      params.max_attempts, rng);
}

std::optional<PixelPoint> sample_foreground_point(PixelPoint p, Vec2 dir_fg, PixelPoint p1,
                                                  const FlowField& field,
                                                  const SamplingParams& params, Rng& rng) {
  const FlowField* one[] = {&field};
  return sample_foreground_point(p, dir_fg, p1, one, params, rng);
}

std::optional<PixelPoint> foreground_anchor(PixelPoint p, Vec2 dir_fg, PixelPoint fg_helper,
                                            FlowFields fields, double flow_epsilon) {
  auto step = [&](int k) { return round_to_lattice(p.x + k * dir_fg.x, p.y + k * dir_fg.y); };
  auto agrees = [&](PixelPoint q) {
    return fields.front()->contains(q) && flow_consistent(fields, q, fg_helper, flow_epsilon);
  };
  for (int k = 0; k <= kAnchorSearch; ++k) {
    if (!agrees(step(k))) continue;
    const PixelPoint inner = step(k + 1);
    if (agrees(inner)) return inner;
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<PixelPoint> foreground_anchor(PixelPoint p, Vec2 dir_fg, PixelPoint fg_helper,
                                            const FlowField& field, double flow_epsilon) {
  const FlowField* one[] = {&field};
  return foreground_anchor(p, dir_fg, fg_helper, one, flow_epsilon);
}

std::vector<DepthPair> extract_pairs(std::span<const FigureGroundVerdict> verdicts,
                                     FlowFields fields, int helper_offset,
                                     const SamplingParams& params, Rng& rng) {
  if (fields.empty()) throw ParameterError("extract_pairs needs at least one flow field");
  const int width = fields.front()->width();
  const int height = fields.front()->height();
  for (const FlowField* f : fields) {
    if (f->width() != width || f->height() != height) {
      throw DimensionError("flow fields passed to extract_pairs differ in size");
    }
  }
  std::vector<DepthPair> pairs;
  for (const FigureGroundVerdict& verdict : verdicts) {
    const BoundarySegment& seg = verdict.segment;
    const bool fg_is_one = verdict.foreground_side == Side::one;
    for (std::size_t k = 0; k < seg.pixels.size(); ++k) {
      const PixelPoint p = seg.pixels[k];
      const Vec2 n = seg.normals[k];
      const auto [p1, p2] = helper_pixels(p, n, helper_offset, width, height);
      const Vec2 dir_fg = fg_is_one ? Vec2{-n.x, -n.y} : n;
      const Vec2 dir_bg{-dir_fg.x, -dir_fg.y};
      const PixelPoint fg_helper = fg_is_one ? p1 : p2;
      const PixelPoint bg_helper = fg_is_one ? p2 : p1;
      // Both helpers on one surface: the normal does not cross the boundary here.
      if (flow_consistent(fields, p1, p2, params.flow_epsilon)) continue;

      const auto anchor = foreground_anchor(p, dir_fg, fg_helper, fields, params.flow_epsilon);
      if (!anchor) continue;
      if (auto pb = sample_background_point(*anchor, dir_bg, bg_helper, fields, params, rng)) {
        pairs.push_back({*anchor, *pb, Ordinal::closer});
      }
      if (auto pf = sample_foreground_point(*anchor, dir_fg, fg_helper, fields, params, rng)) {
        pairs.push_back({*pf, *anchor, Ordinal::same});
      }
    }
  }
  return pairs;
}

std::vector<DepthPair> extract_pairs(std::span<const FigureGroundVerdict> verdicts,
                                     const FlowField& field, int helper_offset,
                                     const SamplingParams& params, Rng& rng) {
  const FlowField* one[] = {&field};
  return extract_pairs(verdicts, one, helper_offset, params, rng);
}

std::size_t kept_count(std::size_t n, double keep_rate) {
  return static_cast<std::size_t>(std::floor(keep_rate * static_cast<double>(n)));
}

std::vector<DepthPair> random_drop(std::span<const DepthPair> pairs, double keep_rate, Rng& rng) {
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw ParameterError("keep_rate must lie in (0, 1]");
  const std::size_t n = pairs.size();
  const std::size_t keep = kept_count(n, keep_rate);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `keep` slots are a uniform subset.
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<DepthPair> out;
  out.reserve(keep);
  for (std::size_t idx : order) out.push_back(pairs[idx]);
  return out;
}

}  // namespace dynocc
