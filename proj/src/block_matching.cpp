#include "dynocc/block_matching.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "dynocc/flow_ops.hpp"

namespace dynocc {

namespace {

struct Displacement {
  int dx;
  int dy;
};

// Search order realising the tie-break: |d|^2, then dy, then dx.
std::vector<Displacement> search_order(int radius) {
  std::vector<Displacement> order;
  order.reserve(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) order.push_back({dx, dy});
  }
  std::stable_sort(order.begin(), order.end(), [](Displacement a, Displacement b) {
    return std::make_tuple(a.dx * a.dx + a.dy * a.dy, a.dy, a.dx) <
           std::make_tuple(b.dx * b.dx + b.dy * b.dy, b.dy, b.dx);
  });
  return order;
}

Plane<float> pad_replicate(const Plane<float>& src, int pad) {
  Plane<float> out(src.width() + 2 * pad, src.height() + 2 * pad);
  for (int y = 0; y < out.height(); ++y) {
    const int sy = clamp_coord(y - pad, src.height());
    for (int x = 0; x < out.width(); ++x) out(x, y) = src(clamp_coord(x - pad, src.width()), sy);
  }
  return out;
}

}  // namespace

FlowField estimate_flow_block_matching(const Frame& a, const Frame& b, int block, int radius,
                                       const simd::KernelTable& kernels) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("block matching needs frames of equal size");
  }
  if (block < 1 || block % 2 == 0) throw ParameterError("block size must be odd and positive");
  if (radius < 1) throw ParameterError("search radius must be at least 1");

  const int w = a.width();
  const int h = a.height();
  const Plane<float> luma_a = a.luma();
  const Plane<float> padded_b = pad_replicate(b.luma(), radius);
  const auto order = search_order(radius);

  ScalarMap diff(w, h);
  ScalarMap best(w, h, std::numeric_limits<float>::infinity());
  Plane<std::int32_t> best_index(w, h, -1);

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Displacement d = order[i];
    for (int y = 0; y < h; ++y) {
      const float* shifted = padded_b.row(y + d.dy + radius).data() + d.dx + radius;
      kernels.abs_diff(luma_a.row(y).data(), shifted, diff.row(y).data(), w);
    }
    const ScalarMap cost = window_sum(diff, block / 2, kernels);
    for (int y = 0; y < h; ++y) {
      kernels.select_min(cost.row(y).data(), best.row(y).data(), best_index.row(y).data(),
                         static_cast<std::int32_t>(i), w);
    }
  }

  FlowField flow(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Displacement d = order[static_cast<std::size_t>(best_index(x, y))];
      flow.u(x, y) = static_cast<float>(d.dx);
      flow.v(x, y) = static_cast<float>(d.dy);
    }
  }
  return flow;
}

}  // namespace dynocc
