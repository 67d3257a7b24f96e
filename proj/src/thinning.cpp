#include <array>
#include <cstdint>
#include <vector>

#include "dynocc/boundary.hpp"

namespace dynocc {

namespace {

// Neighbour code bits, counter-clockwise from east:
//   bit0 E, bit1 NE, bit2 N, bit3 NW, bit4 W, bit5 SW, bit6 S, bit7 SE.
struct ThinningTables {
  std::array<bool, 256> first{};
  std::array<bool, 256> second{};
};

ThinningTables build_tables() {
  ThinningTables t;
  for (int code = 0; code < 256; ++code) {
    bool x[8];
    for (int i = 0; i < 8; ++i) x[i] = ((code >> i) & 1) != 0;

    // Connectivity number: exactly one 8-connected run of neighbours.
    int crossings = 0;
    for (int i = 0; i < 8; i += 2) {
      if (!x[i] && (x[i + 1] || x[(i + 2) % 8])) ++crossings;
    }
    int n1 = 0;
    int n2 = 0;
    for (int k = 1; k < 8; k += 2) {
      if (x[k] || x[k - 1]) ++n1;
      if (x[k] || x[(k + 1) % 8]) ++n2;
    }
    const int n = n1 < n2 ? n1 : n2;
    if (crossings != 1 || n < 2 || n > 3) continue;

    t.first[code] = !((x[1] || x[2] || !x[7]) && x[0]);
    t.second[code] = !((x[5] || x[6] || !x[3]) && x[4]);
  }
  return t;
}

const ThinningTables& tables() {
  static const ThinningTables t = build_tables();
  return t;
}

int neighbour_code(const BinaryMask& m, int x, int y) {
  static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  int code = 0;
  for (int i = 0; i < 8; ++i) {
    const int nx = x + dx[i];
    const int ny = y + dy[i];
    if (m.contains(nx, ny) && m(nx, ny) != 0) code |= 1 << i;
  }
  return code;
}

}  // namespace

BinaryMask thin(const BinaryMask& mask) {
  BinaryMask skel(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) skel.values()[i] = mask.values()[i] != 0 ? 1 : 0;

  const ThinningTables& lut = tables();
  std::vector<PixelPoint> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      const auto& table = pass == 0 ? lut.first : lut.second;
      doomed.clear();
      for (int y = 0; y < skel.height(); ++y) {
        for (int x = 0; x < skel.width(); ++x) {
          if (skel(x, y) != 0 && table[static_cast<std::size_t>(neighbour_code(skel, x, y))]) {
            doomed.push_back({x, y});
          }
        }
      }
      for (PixelPoint p : doomed) skel[p] = 0;
      changed = changed || !doomed.empty();
    }
  }
  return skel;
}

}  // namespace dynocc
