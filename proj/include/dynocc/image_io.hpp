#pragma once

#include <filesystem>

#include "dynocc/raster.hpp"

namespace dynocc {

/// Reads an 8-bit PNG, PGM (P5) or PPM (P6) image; intensities are divided by 255.
/// Gray inputs give 1-channel frames, everything else is converted to RGB.
Frame read_image(const std::filesystem::path& path);

/// Writes a frame as 8-bit PNG (.png) or binary PGM/PPM (.pgm/.ppm), chosen by extension.
void write_image(const std::filesystem::path& path, const Frame& frame);

/// Debug dump: 16-bit grayscale PNG with values mapped linearly from [0, max] to [0, 65535].
void write_png16_normalized(const std::filesystem::path& path, const ScalarMap& map);

/// 16-bit grayscale PNG; each sample is multiplied by scale.
ScalarMap read_png16(const std::filesystem::path& path, double scale);

/// Portable float map (PFM, single channel "Pf"); rows are stored bottom-up per the format.
ScalarMap read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const ScalarMap& map);

}  // namespace dynocc
