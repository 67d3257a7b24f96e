#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "dynocc/pair_sampling.hpp"

namespace dynocc {

struct FrameStats {
  std::size_t boundary_pixels = 0;
  std::size_t segments = 0;
  std::size_t classified_segments = 0;
  std::size_t pairs_before_drop = 0;
  std::size_t pairs_after_drop = 0;

  friend bool operator==(const FrameStats&, const FrameStats&) = default;
};

/// One line of the annotation file:
/// {"frame": str, "image": str, "pairs": [{"i":[x,y],"j":[x,y],"o":int}], "stats": {...}}
struct FrameAnnotation {
  std::string frame;
  std::string image;
  std::vector<DepthPair> pairs;
  FrameStats stats;

  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

/// Serialises without a trailing newline.
std::string to_json_line(const FrameAnnotation& annotation);

/// Throws FormatError on malformed input.
FrameAnnotation parse_annotation_line(const std::string& line);

std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path);

}  // namespace dynocc
