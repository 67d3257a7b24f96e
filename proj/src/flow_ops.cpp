#include "dynocc/flow_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dynocc {

ScalarMap flow_gradient_magnitude(const FlowField& field, const simd::KernelTable& kernels) {
  const int w = field.width();
  const int h = field.height();
  ScalarMap out(w, h);
  for (int y = 0; y < h; ++y) {
    int up = y - 1;
    int dn = y + 1;
    float scale = 0.5f;
    if (h == 1) {
      up = dn = y;
      scale = 1.0f;
    } else if (y == 0) {
      up = 0;
      scale = 1.0f;
    } else if (y == h - 1) {
      dn = h - 1;
      scale = 1.0f;
    }
    kernels.flow_gradient_row(field.u.row(up).data(), field.u.row(y).data(), field.u.row(dn).data(),
                              field.v.row(up).data(), field.v.row(y).data(), field.v.row(dn).data(),
                              scale, out.row(y).data(), w);
  }
  return out;
}

FlowVector sample_flow(const FlowField& field, PixelPoint p) {
  const PixelPoint q = clamp_to_raster(p, field.width(), field.height());
  return FlowVector{field.u[q], field.v[q]};
}

std::optional<Vec2> gradient_direction(const ScalarMap& map, PixelPoint p) {
  const int w = map.width();
  const int h = map.height();
  const PixelPoint q = clamp_to_raster(p, w, h);

  auto derivative = [](float lo, float hi, int span) -> double {
    return span == 0 ? 0.0 : (static_cast<double>(hi) - static_cast<double>(lo)) / span;
  };
  const int x0 = q.x > 0 ? q.x - 1 : q.x;
  const int x1 = q.x < w - 1 ? q.x + 1 : q.x;
  const int y0 = q.y > 0 ? q.y - 1 : q.y;
  const int y1 = q.y < h - 1 ? q.y + 1 : q.y;
  const double gx = derivative(map(x0, q.y), map(x1, q.y), x1 - x0);
  const double gy = derivative(map(q.x, y0), map(q.x, y1), y1 - y0);
  const double norm = std::hypot(gx, gy);
  if (!(norm >= 1e-8)) return std::nullopt;
  return Vec2{gx / norm, gy / norm};
}

ScalarMap window_sum(const ScalarMap& map, int radius, const simd::KernelTable& kernels) {
  if (radius < 0) throw ParameterError("window radius must be non-negative");
  const int w = map.width();
  const int h = map.height();
  ScalarMap rows(w, h);
  for (int y = 0; y < h; ++y) {
    kernels.row_window_sum(map.row(y).data(), rows.row(y).data(), w, radius);
  }
  ScalarMap out(w, h);
  for (int y = 0; y < h; ++y) {
    const int lo = y - radius < 0 ? 0 : y - radius;
    const int hi = y + radius >= h ? h - 1 : y + radius;
    float* acc = out.row(y).data();
    const auto first = rows.row(lo);
    std::copy(first.begin(), first.end(), acc);
    for (int k = lo + 1; k <= hi; ++k) kernels.accumulate(acc, rows.row(k).data(), w);
  }
  return out;
}

}  // namespace dynocc
