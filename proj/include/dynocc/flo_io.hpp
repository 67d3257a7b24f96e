#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dynocc/raster.hpp"

namespace dynocc {

/// Middlebury .flo magic number, stored as a little-endian float32.
inline constexpr float kFloMagic = 202021.25f;
inline constexpr std::size_t kFloHeaderBytes = 12;

/// Decodes a Middlebury .flo byte stream.
/// Throws FormatError on a bad magic, DimensionError on non-positive sizes and
/// TruncationError when the payload is shorter than width*height*2 floats.
FlowField read_flo(std::span<const std::uint8_t> bytes);

/// Encodes a field as a .flo byte stream (12-byte header, interleaved u/v).
std::vector<std::uint8_t> write_flo(const FlowField& field);

FlowField load_flo(const std::filesystem::path& path);
void save_flo(const std::filesystem::path& path, const FlowField& field);

}  // namespace dynocc
