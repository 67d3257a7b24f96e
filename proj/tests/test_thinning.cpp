#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "dynocc/boundary.hpp"
#include "oracles.hpp"

using namespace dynocc;
using oracle::components8;
using oracle::guo_hall_reference;
using oracle::random_blobs;

namespace {

BinaryMask from_rows(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) m(x, y) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  }
  return m;
}

std::string render(const BinaryMask& m) {
  std::string s;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) s += m(x, y) ? '#' : '.';
    s += '\n';
  }
  return s;
}

}  // namespace

TEST_CASE("filled 3x20 rectangle thins to its centre line") {
  const BinaryMask input = from_rows({
      "......................",
      ".####################.",
      ".####################.",
      ".####################.",
      "......................",
  });
  const BinaryMask expected = from_rows({
      "......................",
      "......................",
      "..##################..",
      "......................",
      "......................",
  });
  CHECK(render(thin(input)) == render(expected));
  CHECK(thin(input) == guo_hall_reference(input));
}

TEST_CASE("rectangle touching the raster edge behaves like a padded one") {
  BinaryMask full(20, 3, 1);
  const BinaryMask t = thin(full);
  for (int x = 0; x < 20; ++x) {
    CHECK(t(x, 0) == 0);
    CHECK(t(x, 2) == 0);
    CHECK(t(x, 1) == (x >= 1 && x <= 18 ? 1 : 0));
  }
}

TEST_CASE("small shapes match frozen reference skeletons") {
  SUBCASE("5x9 block") {
    BinaryMask m(11, 7);
    for (int y = 1; y <= 5; ++y) {
      for (int x = 1; x <= 9; ++x) m(x, y) = 1;
    }
    CHECK(render(thin(m)) == render(from_rows({"...........", "...........", "...........",
                                               "...#####...", "...........", "...........",
                                               "..........."})));
  }
  SUBCASE("6x6 block collapses to a single pixel") {
    BinaryMask m(8, 8);
    for (int y = 1; y <= 6; ++y) {
      for (int x = 1; x <= 6; ++x) m(x, y) = 1;
    }
    BinaryMask expected(8, 8);
    expected(3, 4) = 1;
    CHECK(thin(m) == expected);
  }
  SUBCASE("L shape") {
    const BinaryMask m = from_rows({".........", ".###.....", ".###.....", ".###.....", ".###.....",
                                    ".#######.", ".#######.", ".#######.", "........."});
    CHECK(render(thin(m)) == render(from_rows({".........", ".........", "..#......", "..#......",
                                               "..#......", "..#......", "...####..", ".........",
                                               "........."})));
  }
}

TEST_CASE("trivial inputs") {
  const BinaryMask empty(9, 4);
  CHECK(thin(empty) == empty);
  BinaryMask line(12, 5);
  for (int x = 2; x < 10; ++x) line(x, 2) = 1;
  CHECK(thin(line) == line);
  BinaryMask dot(3, 3);
  dot(1, 1) = 1;
  CHECK(thin(dot) == dot);
}

TEST_CASE("seeded blob suite: oracle agreement, idempotence, subset, components") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    const BinaryMask m = random_blobs(seed);
    const BinaryMask t = thin(m);
    CHECK(t == guo_hall_reference(m));
    CHECK(thin(t) == t);
    bool subset = true;
    for (std::size_t i = 0; i < m.size(); ++i) subset = subset && (!t.values()[i] || m.values()[i]);
    CHECK(subset);
    CHECK(components8(t) == components8(m));
  }
}
