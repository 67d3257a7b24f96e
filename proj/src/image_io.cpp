#include "dynocc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace dynocc {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_error_to_exception(png_structp, png_const_charp message) {
  throw FormatError(std::string("png: ") + message);
}

void png_warning_ignore(png_structp, png_const_charp) {}

// Decoded PNG: 8- or 16-bit samples, 1 or 3 channels after transforms.
struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

DecodedPng decode_png(const std::filesystem::path& path, bool keep_16bit) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, &png_error_to_exception,
                                           &png_warning_ignore);
  if (png == nullptr) throw Error("png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  if (depth == 16 && !keep_16bit) png_set_strip_16(png);
  if (depth == 16 && keep_16bit) png_set_swap(png);  // host order on little-endian
  png_read_update_info(png, info);

  DecodedPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  depth = out.bit_depth;

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(rowbytes * static_cast<std::size_t>(out.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = raw.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(count);
  if (depth == 16) {
    static_assert(std::endian::native == std::endian::little);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t s;
      std::memcpy(&s, raw.data() + 2 * i, 2);
      out.samples[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = raw[i];
  }
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, int channels,
                int bit_depth, const std::vector<std::uint8_t>& rows_bytes) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, &png_error_to_exception,
                                            &png_warning_ignore);
  if (png == nullptr) throw Error("png: out of memory");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(rows_bytes.data() + rowbytes * y));
  }
  png_write_end(png, nullptr);
}

std::uint8_t to_byte(float value) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0f, 1.0f) * 255.0f));
}

// Netpbm header token reader (skips whitespace and # comments).
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

Frame read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError("unsupported netpbm type '" + magic + "' in " + path.string());
  }
  const int width = std::stoi(next_token(in));
  const int height = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (maxval != 255) throw FormatError("only 8-bit netpbm images are supported");
  if (width <= 0 || height <= 0) throw DimensionError("netpbm image has non-positive size");
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw TruncationError("netpbm payload truncated in " + path.string());
  }
  std::vector<float> data(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) data[i] = static_cast<float>(raw[i]) / 255.0f;
  return Frame(width, height, channels, std::move(data));
}

}  // namespace

Frame read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_netpbm(path);
  DecodedPng png = decode_png(path, false);
  const int channels = png.channels >= 3 ? 3 : 1;
  std::vector<float> data(static_cast<std::size_t>(png.width) * png.height * channels);
  const std::size_t pixels = static_cast<std::size_t>(png.width) * png.height;
  for (std::size_t i = 0; i < pixels; ++i) {
    if (channels == 1) {
      data[i] = static_cast<float>(png.samples[i * png.channels]) / 255.0f;
    } else {
      for (int c = 0; c < 3; ++c) {
        data[i * 3 + c] = static_cast<float>(png.samples[i * png.channels + c]) / 255.0f;
      }
    }
  }
  return Frame(png.width, png.height, channels, std::move(data));
}

void write_image(const std::filesystem::path& path, const Frame& frame) {
  std::vector<std::uint8_t> bytes(frame.values().size());
  std::transform(frame.values().begin(), frame.values().end(), bytes.begin(), &to_byte);
  const std::string ext = lower_extension(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << (frame.channels() == 1 ? "P5" : "P6") << '\n'
        << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  if (ext != ".png") throw Error("unsupported image extension '" + ext + "' for " + path.string());
  encode_png(path, frame.width(), frame.height(), frame.channels(), 8, bytes);
}

void write_png16_normalized(const std::filesystem::path& path, const ScalarMap& map) {
  float max_value = 0.0f;
  for (float v : map.values()) max_value = std::max(max_value, v);
  std::vector<std::uint8_t> bytes(map.size() * 2);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const double t = max_value > 0.0f ? std::clamp(map.values()[i] / max_value, 0.0f, 1.0f) : 0.0;
    const auto s = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    bytes[2 * i] = static_cast<std::uint8_t>(s >> 8);  // PNG is big-endian
    bytes[2 * i + 1] = static_cast<std::uint8_t>(s & 0xff);
  }
  encode_png(path, map.width(), map.height(), 1, 16, bytes);
}

ScalarMap read_png16(const std::filesystem::path& path, double scale) {
  DecodedPng png = decode_png(path, true);
  if (png.bit_depth != 16 || png.channels != 1) {
    throw FormatError("expected a 16-bit grayscale PNG: " + path.string());
  }
  ScalarMap out(png.width, png.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values()[i] = static_cast<float>(png.samples[i] * scale);
  }
  return out;
}

ScalarMap read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "Pf") throw FormatError("expected single-channel PFM (Pf): " + path.string());
  const int width = std::stoi(next_token(in));
  const int height = std::stoi(next_token(in));
  const double scale = std::stod(next_token(in));
  if (width <= 0 || height <= 0) throw DimensionError("PFM has non-positive size");
  const bool little = scale < 0.0;
  ScalarMap out(width, height);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw TruncationError("PFM payload truncated in " + path.string());
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* p = raw.data() + (static_cast<std::size_t>(y) * width + x) * 4;
      std::uint32_t bits = little ? (p[0] | p[1] << 8 | p[2] << 16 | static_cast<std::uint32_t>(p[3]) << 24)
                                  : (p[3] | p[2] << 8 | p[1] << 16 | static_cast<std::uint32_t>(p[0]) << 24);
      out(x, height - 1 - y) = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_pfm(const std::filesystem::path& path, const ScalarMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "Pf\n" << map.width() << ' ' << map.height() << "\n-1.0\n";
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(map(x, y));
      const char b[4] = {static_cast<char>(bits), static_cast<char>(bits >> 8),
                         static_cast<char>(bits >> 16), static_cast<char>(bits >> 24)};
      out.write(b, 4);
    }
  }
}

}  // namespace dynocc
