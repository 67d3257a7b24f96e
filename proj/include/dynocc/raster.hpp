#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynocc {

// Error hierarchy shared by every module. Callers that only care about
// "something went wrong" catch dynocc::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class FormatError : public Error {
 public:
  using Error::Error;
};
class TruncationError : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class ParameterError : public Error {
 public:
  using Error::Error;
};

struct PixelPoint {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Row-major single-plane raster. Width and height are fixed at construction.
template <class T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw DimensionError("raster dimensions must be positive, got " + std::to_string(width) +
                           "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Plane(int width, int height, std::vector<T> data) : Plane(width, height) {
    if (data.size() != data_.size()) {
      throw DimensionError("raster payload size does not match dimensions");
    }
    data_ = std::move(data);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(PixelPoint p) const { return contains(p.x, p.y); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](PixelPoint p) { return data_[index(p.x, p.y)]; }
  const T& operator[](PixelPoint p) const { return data_[index(p.x, p.y)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> row(int y) { return std::span<T>(data_).subspan(index(0, y), width_); }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(index(0, y), width_);
  }

  bool same_shape(int w, int h) const { return w == width_ && h == height_; }
  template <class U>
  bool same_shape(const Plane<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Per-pixel real scalars (gradient magnitudes, confidence maps, depth).
using ScalarMap = Plane<float>;

/// Per-pixel flags. Stored as bytes (0/1) so rows can be scanned directly.
using BinaryMask = Plane<std::uint8_t>;

/// Dense motion field in pixels per frame step. u is horizontal, v vertical.
struct FlowField {
  Plane<float> u;
  Plane<float> v;

  FlowField() = default;
  FlowField(int width, int height, float u0 = 0.0f, float v0 = 0.0f)
      : u(width, height, u0), v(width, height, v0) {}

  int width() const { return u.width(); }
  int height() const { return u.height(); }
  bool contains(PixelPoint p) const { return u.contains(p); }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Image with intensities in [0,1]; channels is 1 (luma) or 3 (interleaved RGB).
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, int channels, float fill = 0.0f);
  Frame(int width, int height, int channels, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  float& at(int x, int y, int c = 0) { return data_[offset(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data_[offset(x, y, c)]; }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  /// Single-plane luma (Rec. 601 weights for RGB; a copy for gray frames).
  Plane<float> luma() const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

inline int clamp_coord(int value, int extent) {
  return value < 0 ? 0 : (value >= extent ? extent - 1 : value);
}

/// Rounds a real position to the nearest lattice point (halves away from zero).
PixelPoint round_to_lattice(double x, double y);

/// Nearest lattice point of (x, y), clamped into a width x height raster.
PixelPoint clamp_to_raster(PixelPoint p, int width, int height);

}  // namespace dynocc
