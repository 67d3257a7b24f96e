#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include <cmath>
#include <optional>

#include "dynocc/depth_order.hpp"
#include "dynocc/pair_sampling.hpp"
#include "dynocc/raster.hpp"

namespace dynocc::oracle {

// Direct transcription of the two-subiteration rules. Neighbours x1..x8 run
// counter-clockwise from east; pixels outside the raster are background.
inline BinaryMask guo_hall_reference(BinaryMask img) {
  const int w = img.width(), h = img.height();
  auto at = [&](int x, int y) { return x >= 0 && y >= 0 && x < w && y < h && img(x, y) != 0; };
  for (bool changed = true; changed;) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<PixelPoint> doomed;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!img(x, y)) continue;
          // index 1..8, slot 9 wraps to 1
          const std::array<bool, 10> n{false,           at(x + 1, y),     at(x + 1, y - 1),
                                       at(x, y - 1),    at(x - 1, y - 1), at(x - 1, y),
                                       at(x - 1, y + 1), at(x, y + 1),    at(x + 1, y + 1),
                                       at(x + 1, y)};
          int crossings = 0;
          for (int i = 1; i <= 4; ++i) crossings += !n[2 * i - 1] && (n[2 * i] || n[2 * i + 1]);
          if (crossings != 1) continue;
          int n1 = 0, n2 = 0;
          for (int k = 1; k <= 4; ++k) {
            n1 += n[2 * k - 1] || n[2 * k];
            n2 += n[2 * k] || n[2 * k + 1];
          }
          const int nmin = std::min(n1, n2);
          if (nmin < 2 || nmin > 3) continue;
          const bool keep = pass == 0 ? ((n[2] || n[3] || !n[8]) && n[1])
                                      : ((n[6] || n[7] || !n[4]) && n[5]);
          if (!keep) doomed.push_back({x, y});
        }
      }
      for (PixelPoint p : doomed) img[p] = 0;
      changed = changed || !doomed.empty();
    }
  }
  return img;
}

inline int components8(const BinaryMask& m) {
  Plane<int> label(m.width(), m.height(), 0);
  int count = 0;
  std::vector<PixelPoint> stack;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || label(x, y)) continue;
      ++count;
      stack.push_back({x, y});
      label(x, y) = count;
      while (!stack.empty()) {
        const PixelPoint p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const PixelPoint q{p.x + dx, p.y + dy};
            if (m.contains(q) && m[q] && !label[q]) {
              label[q] = count;
              stack.push_back(q);
            }
          }
        }
      }
    }
  }
  return count;
}

inline BinaryMask random_blobs(std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> pos(0, 47), radius(2, 7), count(1, 6);
  BinaryMask m(48, 40);
  const int n = count(gen);
  for (int i = 0; i < n; ++i) {
    const int cx = pos(gen), cy = pos(gen) % 40, r = radius(gen);
    const bool disc = gen() & 1;
    for (int y = cy - r; y <= cy + r; ++y) {
      for (int x = cx - r - 2; x <= cx + r + 2; ++x) {
        if (!m.contains(x, y)) continue;
        if (disc ? (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r : true) m(x, y) = 1;
      }
    }
  }
  // speckle keeps tiny components and holes in play
  std::bernoulli_distribution flip(0.02);
  for (auto& v : m.values()) {
    if (flip(gen)) v = !v;
  }
  return m;
}

// A column band [x0, x0 + 6) of horizontal flow s in an otherwise still field.
inline void add_band(FlowField& f, int x0, float s) {
  for (int y = 0; y < f.height(); ++y) {
    for (int x = x0; x < x0 + 6; ++x) f.u(x, y) = s;
  }
}

// Margin verdict in exact integer arithmetic, delta = num / den.
inline std::optional<Side> brute_winner(int c1, int c2, int c, int num, int den) {
  const bool one = (c1 - c2) * den > num * c;
  const bool two = (c2 - c1) * den > num * c;
  if (one && !two) return Side::one;
  if (two && !one) return Side::two;
  return std::nullopt;
}

// Direct evaluation in long double, no stable forms needed at moderate magnitudes.
inline long double naive_loss(long double zi, long double zj, Ordinal o) {
  const long double d = zi - zj;
  switch (o) {
    case Ordinal::closer: return std::log1p(std::exp(-d));
    case Ordinal::further: return std::log1p(std::exp(d));
    case Ordinal::same: return d * d;
  }
  return 0;
}

}  // namespace dynocc::oracle
