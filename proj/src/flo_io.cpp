#include "dynocc/flo_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace dynocc {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t load_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::uint8_t* p, std::uint32_t value) {
  p[0] = static_cast<std::uint8_t>(value);
  p[1] = static_cast<std::uint8_t>(value >> 8);
  p[2] = static_cast<std::uint8_t>(value >> 16);
  p[3] = static_cast<std::uint8_t>(value >> 24);
}

float load_f32_le(const std::uint8_t* p) { return std::bit_cast<float>(load_u32_le(p)); }

void store_f32_le(std::uint8_t* p, float value) {
  store_u32_le(p, std::bit_cast<std::uint32_t>(value));
}

}  // namespace

FlowField read_flo(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFloHeaderBytes) {
    throw TruncationError(".flo stream shorter than its 12-byte header");
  }
  // Compare bit patterns so a NaN payload can never pass as the magic.
  if (load_u32_le(bytes.data()) != std::bit_cast<std::uint32_t>(kFloMagic)) {
    throw FormatError(".flo magic mismatch (expected 202021.25)");
  }
  const auto width = static_cast<std::int32_t>(load_u32_le(bytes.data() + 4));
  const auto height = static_cast<std::int32_t>(load_u32_le(bytes.data() + 8));
  if (width <= 0 || height <= 0) {
    throw DimensionError(".flo header has non-positive dimensions " + std::to_string(width) + "x" +
                         std::to_string(height));
  }
  const std::uint64_t count = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  const std::uint64_t needed = kFloHeaderBytes + count * 8;
  if (bytes.size() < needed) {
    throw TruncationError(".flo payload truncated: need " + std::to_string(needed) +
                          " bytes, have " + std::to_string(bytes.size()));
  }

  FlowField field(width, height);
  auto u = field.u.values();
  auto v = field.v.values();
  const std::uint8_t* src = bytes.data() + kFloHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, src += 8) {
    u[i] = load_f32_le(src);
    v[i] = load_f32_le(src + 4);
  }
  return field;
}

std::vector<std::uint8_t> write_flo(const FlowField& field) {
  const std::size_t count = field.u.size();
  std::vector<std::uint8_t> out(kFloHeaderBytes + count * 8);
  store_f32_le(out.data(), kFloMagic);
  store_u32_le(out.data() + 4, static_cast<std::uint32_t>(field.width()));
  store_u32_le(out.data() + 8, static_cast<std::uint32_t>(field.height()));
  auto u = field.u.values();
  auto v = field.v.values();
  std::uint8_t* dst = out.data() + kFloHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, dst += 8) {
    store_f32_le(dst, u[i]);
    store_f32_le(dst + 4, v[i]);
  }
  return out;
}

FlowField load_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open flow file " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_flo(bytes);
}

void save_flo(const std::filesystem::path& path, const FlowField& field) {
  const auto bytes = write_flo(field);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write flow file " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace dynocc
