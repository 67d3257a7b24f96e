#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>

#include "dynocc/flo_io.hpp"
#include "dynocc/image_io.hpp"

using namespace dynocc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("DYNOCC_TEST_TMP");
  fs::path dir = fs::path(root ? root : fs::temp_directory_path().string()) / "flo_io";
  fs::create_directories(dir);
  return dir / name;
}

// Hand-built little-endian stream, independent of the writer.
struct ByteStream {
  std::vector<std::uint8_t> bytes;
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
};

bool same_bits(const Plane<float>& a, const Plane<float>& b) {
  return a.same_shape(b) &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

float random_finite(std::mt19937& gen) {
  std::uniform_int_distribution<std::uint32_t> bits;
  for (;;) {
    const float f = std::bit_cast<float>(bits(gen));
    if (std::isfinite(f)) return f;
  }
}

}  // namespace

TEST_CASE("header magic is 'PIEH' in little-endian bytes") {
  ByteStream s;
  s.f32(kFloMagic);
  CHECK(s.bytes == std::vector<std::uint8_t>{'P', 'I', 'E', 'H'});
}

TEST_CASE("2x1 field decodes interleaved u/v") {
  ByteStream s;
  s.f32(kFloMagic);
  s.i32(2);
  s.i32(1);
  for (float f : {1.5f, -2.0f, 0.25f, 8.0f}) s.f32(f);
  const FlowField field = read_flo(s.bytes);
  REQUIRE(field.width() == 2);
  REQUIRE(field.height() == 1);
  CHECK(field.u(0, 0) == 1.5f);
  CHECK(field.v(0, 0) == -2.0f);
  CHECK(field.u(1, 0) == 0.25f);
  CHECK(field.v(1, 0) == 8.0f);
}

TEST_CASE("writer emits the header and row-major interleaved payload") {
  FlowField f(2, 2);
  f.u(0, 0) = 1;
  f.v(0, 0) = 2;
  f.u(1, 0) = 3;
  f.v(1, 0) = 4;
  f.u(0, 1) = 5;
  f.v(0, 1) = 6;
  f.u(1, 1) = 7;
  f.v(1, 1) = 8;
  ByteStream expected;
  expected.f32(kFloMagic);
  expected.i32(2);
  expected.i32(2);
  for (int i = 1; i <= 8; ++i) expected.f32(static_cast<float>(i));
  CHECK(write_flo(f) == expected.bytes);
}

TEST_CASE("bad magic") {
  ByteStream s;
  s.f32(202021.0f);
  s.i32(1);
  s.i32(1);
  s.f32(0);
  s.f32(0);
  CHECK_THROWS_AS(read_flo(s.bytes), FormatError);
}

TEST_CASE("stream shorter than the header") {
  CHECK_THROWS_AS(read_flo(std::vector<std::uint8_t>{'P', 'I'}), TruncationError);
}

TEST_CASE("non-positive dimensions") {
  for (auto [w, h] : {std::pair{0, 4}, {4, 0}, {-3, 2}}) {
    ByteStream s;
    s.f32(kFloMagic);
    s.i32(w);
    s.i32(h);
    CHECK_THROWS_AS(read_flo(s.bytes), DimensionError);
  }
}

TEST_CASE("truncated payload") {
  ByteStream s;
  s.f32(kFloMagic);
  s.i32(3);
  s.i32(2);
  for (int i = 0; i < 11; ++i) s.f32(0.0f);
  CHECK_THROWS_AS(read_flo(s.bytes), TruncationError);
  s.f32(1.0f);
  CHECK_NOTHROW(read_flo(s.bytes));

  ByteStream header_only;
  header_only.f32(kFloMagic);
  header_only.i32(1);
  CHECK_THROWS_AS(read_flo(header_only.bytes), TruncationError);
}

TEST_CASE("round trip is bit-exact over 100 random fields") {
  std::mt19937 gen(20240517);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    FlowField f(dim(gen), dim(gen));
    for (float& x : f.u.values()) x = random_finite(gen);
    for (float& x : f.v.values()) x = random_finite(gen);
    if (trial % 10 == 0) f.u.values()[0] = -0.0f;
    const FlowField back = read_flo(write_flo(f));
    CHECK(same_bits(back.u, f.u));
    CHECK(same_bits(back.v, f.v));
  }
}

TEST_CASE("file round trip") {
  FlowField f(5, 3, 4.0f, -1.0f);
  f.u(2, 1) = 0.125f;
  const fs::path path = scratch("field.flo");
  save_flo(path, f);
  CHECK(fs::file_size(path) == kFloHeaderBytes + 5 * 3 * 8);
  CHECK(load_flo(path) == f);
  CHECK_THROWS_AS(load_flo(scratch("missing.flo")), Error);
}

TEST_CASE("8-bit images round trip through png, pgm and ppm") {
  Frame rgb(7, 4, 3);
  Frame gray(7, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 7; ++x) {
      gray.at(x, y) = static_cast<float>((x * 37 + y * 11) % 256) / 255.0f;
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = static_cast<float>((x * 13 + y * 7 + c * 50) % 256) / 255.0f;
    }
  }
  for (const char* ext : {".png", ".ppm"}) {
    const fs::path p = scratch(std::string("rgb") + ext);
    write_image(p, rgb);
    CHECK(read_image(p) == rgb);
  }
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = scratch(std::string("gray") + ext);
    write_image(p, gray);
    CHECK(read_image(p) == gray);
  }
  CHECK_THROWS_AS(write_image(scratch("x.bmp"), gray), Error);
}

TEST_CASE("corrupt image files are rejected") {
  const fs::path p = scratch("broken.png");
  {
    std::ofstream out(p, std::ios::binary);
    out << "\x89PNG\r\n\x1a\nnot really";
  }
  CHECK_THROWS_AS(read_image(p), Error);
  const fs::path q = scratch("short.pgm");
  {
    std::ofstream out(q, std::ios::binary);
    out << "P5\n4 4\n255\n" << std::string(5, 'a');
  }
  CHECK_THROWS_AS(read_image(q), Error);
}

TEST_CASE("pfm and 16-bit png depth maps") {
  ScalarMap z(6, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 6; ++x) z(x, y) = static_cast<float>(x) - 0.5f * static_cast<float>(y);
  }
  const fs::path pfm = scratch("depth.pfm");
  write_pfm(pfm, z);
  CHECK(read_pfm(pfm) == z);

  ScalarMap ramp(4, 1);
  for (int x = 0; x < 4; ++x) ramp(x, 0) = static_cast<float>(x);
  const fs::path png = scratch("depth16.png");
  write_png16_normalized(png, ramp);  // 0..3 -> 0..65535
  const ScalarMap back = read_png16(png, 3.0 / 65535.0);
  for (int x = 0; x < 4; ++x) CHECK(back(x, 0) == doctest::Approx(x).epsilon(1e-4));
}
