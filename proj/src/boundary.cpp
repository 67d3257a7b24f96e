#include "dynocc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dynocc {

void BoundaryParams::validate() const {
  if (blur_k < 1 || blur_k % 2 == 0) throw ParameterError("blur_k must be odd and >= 1");
  if (!(norm_percentile > 0.0 && norm_percentile <= 100.0)) {
    throw ParameterError("norm_percentile must lie in (0, 100]");
  }
  if (!(threshold_tau > 0.0 && threshold_tau <= 1.0)) {
    throw ParameterError("threshold_tau must lie in (0, 1]");
  }
}

double divergence_score(const FlowField& field, PixelPoint p, Vec2 d) {
  const PixelPoint h1 = round_to_lattice(p.x - d.x, p.y - d.y);
  const PixelPoint h2 = round_to_lattice(p.x + d.x, p.y + d.y);
  const FlowVector f1 = sample_flow(field, h1);
  const FlowVector f2 = sample_flow(field, h2);
  const double proj1 = f1.u * d.x + f1.v * d.y;
  const double proj2 = f2.u * d.x + f2.v * d.y;
  return proj2 - proj1;
}

ScalarMap divergence_map(const FlowField& field, const ScalarMap& gradient_magnitude) {
  if (!gradient_magnitude.same_shape(field.u)) {
    throw DimensionError("gradient magnitude map does not match the flow field");
  }
  ScalarMap out(field.width(), field.height());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const PixelPoint p{x, y};
      if (auto d = gradient_direction(gradient_magnitude, p)) {
        out[p] = static_cast<float>(divergence_score(field, p, *d));
      }
    }
  }
  return out;
}

ConfidenceMap fuse_confidence(const ScalarMap& b_prev, const ScalarMap& grad_prev,
                              const ScalarMap& b_next, const ScalarMap& grad_next) {
  if (!b_prev.same_shape(grad_prev) || !b_prev.same_shape(b_next) ||
      !b_prev.same_shape(grad_next)) {
    throw DimensionError("fuse_confidence inputs differ in size");
  }
  ConfidenceMap out{ScalarMap(b_prev.width(), b_prev.height()),
                    Plane<FlowSide>(b_prev.width(), b_prev.height(), FlowSide::next)};
  for (std::size_t i = 0; i < b_prev.size(); ++i) {
    if (b_prev.values()[i] > b_next.values()[i]) {
      out.values.values()[i] = grad_prev.values()[i];
      out.selected.values()[i] = FlowSide::prev;
    } else {
      out.values.values()[i] = grad_next.values()[i];
    }
  }
  return out;
}

ConfidenceMap fuse_confidence(const FlowField& f_prev, const FlowField& f_next,
                              const simd::KernelTable& kernels) {
  if (f_prev.width() != f_next.width() || f_prev.height() != f_next.height()) {
    throw DimensionError("previous and next flow fields differ in size");
  }
  const ScalarMap grad_prev = flow_gradient_magnitude(f_prev, kernels);
  const ScalarMap grad_next = flow_gradient_magnitude(f_next, kernels);
  return fuse_confidence(divergence_map(f_prev, grad_prev), grad_prev,
                         divergence_map(f_next, grad_next), grad_next);
}

ScalarMap box_blur(const ScalarMap& map, int k, const simd::KernelTable& kernels) {
  if (k < 1 || k % 2 == 0) throw ParameterError("box filter size must be odd and >= 1");
  const int r = k / 2;
  ScalarMap out = window_sum(map, r, kernels);
  const int w = map.width();
  const int h = map.height();
  std::vector<int> count_x(static_cast<std::size_t>(w));
  for (int x = 0; x < w; ++x) count_x[x] = std::min(w - 1, x + r) - std::max(0, x - r) + 1;
  for (int y = 0; y < h; ++y) {
    const int count_y = std::min(h - 1, y + r) - std::max(0, y - r) + 1;
    auto row = out.row(y);
    for (int x = 0; x < w; ++x) row[x] /= static_cast<float>(count_x[x] * count_y);
  }
  return out;
}

float nearest_rank_percentile(const ScalarMap& map, double pct) {
  if (!(pct > 0.0 && pct <= 100.0)) throw ParameterError("percentile must lie in (0, 100]");
  std::vector<float> values(map.values().begin(), map.values().end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

ScalarMap percentile_normalize(const ScalarMap& map, double pct) {
  const float divisor = nearest_rank_percentile(map, pct);
  ScalarMap out(map.width(), map.height());
  if (!(divisor >= 1e-12f)) return out;
  std::transform(map.values().begin(), map.values().end(), out.values().begin(),
                 [divisor](float v) { return v / divisor; });
  return out;
}

BinaryMask threshold_mask(const ScalarMap& map, double tau) {
  BinaryMask out(map.width(), map.height());
  std::transform(map.values().begin(), map.values().end(), out.values().begin(),
                 [tau](float v) -> std::uint8_t { return static_cast<double>(v) > tau ? 1 : 0; });
  return out;
}

BoundaryStages detect_boundary_stages(const FlowField& f_prev, const FlowField& f_next,
                                      const BoundaryParams& params) {
  params.validate();
  BoundaryStages stages;
  stages.confidence = fuse_confidence(f_prev, f_next).values;
  stages.blurred = box_blur(stages.confidence, params.blur_k);
  stages.normalized = percentile_normalize(stages.blurred, params.norm_percentile);
  stages.thresholded = threshold_mask(stages.normalized, params.threshold_tau);
  stages.edges = thin(stages.thresholded);
  return stages;
}

BinaryMask detect_boundaries(const FlowField& f_prev, const FlowField& f_next,
                             const BoundaryParams& params) {
  return detect_boundary_stages(f_prev, f_next, params).edges;
}

BinaryMask detect_boundaries_one_sided(const FlowField& field, const BoundaryParams& params) {
  params.validate();
  const ScalarMap blurred = box_blur(flow_gradient_magnitude(field), params.blur_k);
  return thin(threshold_mask(percentile_normalize(blurred, params.norm_percentile),
                             params.threshold_tau));
}

}  // namespace dynocc
