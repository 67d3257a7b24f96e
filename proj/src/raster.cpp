#include "dynocc/raster.hpp"

#include <cmath>

namespace dynocc {

namespace {

void check_frame_shape(int width, int height, int channels) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("frame dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw DimensionError("frame must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

Frame::Frame(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  check_frame_shape(width, height, channels);
  if (!(fill >= 0.0f && fill <= 1.0f)) {
    throw ParameterError("frame intensities must lie in [0,1]");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Frame::Frame(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels) {
  check_frame_shape(width, height, channels);
  if (data.size() != static_cast<std::size_t>(width) * height * channels) {
    throw DimensionError("frame payload size does not match dimensions");
  }
  for (float value : data) {
    if (!(value >= 0.0f && value <= 1.0f)) {
      throw ParameterError("frame intensities must be finite and lie in [0,1]");
    }
  }
  data_ = std::move(data);
}

Plane<float> Frame::luma() const {
  Plane<float> out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (channels_ == 1) {
        out(x, y) = at(x, y);
      } else {
        out(x, y) = 0.299f * at(x, y, 0) + 0.587f * at(x, y, 1) + 0.114f * at(x, y, 2);
      }
    }
  }
  return out;
}

PixelPoint round_to_lattice(double x, double y) {
  return PixelPoint{static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

PixelPoint clamp_to_raster(PixelPoint p, int width, int height) {
  return PixelPoint{clamp_coord(p.x, width), clamp_coord(p.y, height)};
}

}  // namespace dynocc
