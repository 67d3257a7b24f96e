#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynocc/annotation.hpp"
#include "dynocc/boundary.hpp"
#include "dynocc/depth_order.hpp"
#include "dynocc/pair_sampling.hpp"
#include "dynocc/raster.hpp"

namespace dynocc {

enum class FlowSource { flo_directory, internal_block_matching };

struct PipelineConfig {
  std::filesystem::path frames_dir;  // *.png / *.ppm / *.pgm, processed in name order
  FlowSource flow_source = FlowSource::internal_block_matching;
  std::filesystem::path flow_dir;    // <src>_to_<dst>.flo files (frame stems)
  int block_size = 7;                // internal estimator
  int search_radius = 10;

  BoundaryParams boundary;
  OrderParams order;
  SamplingParams sampling;

  std::filesystem::path out = "annotations.jsonl";
  std::optional<std::filesystem::path> overlay_dir;
  std::optional<std::filesystem::path> debug_dir;  // 16-bit PNG dumps of intermediate maps
  int threads = 0;                                 // 0: hardware concurrency

  /// Checks module parameters and that input paths exist. Throws ParameterError.
  void validate() const;
};

/// Parses a JSON config file. Throws ParameterError on unknown keys or bad values.
PipelineConfig load_config(const std::filesystem::path& path);

struct SkippedFrame {
  std::string frame;
  std::string reason;
};

struct DatasetSummary {
  std::size_t frames_total = 0;
  std::size_t frames_processed = 0;
  std::vector<SkippedFrame> skipped;
  std::size_t pairs_before_drop = 0;
  std::size_t pairs_written = 0;
  std::size_t classified_segments = 0;

  std::string to_json() const;
};

/// Runs the extraction over config.frames_dir and writes one JSON line per
/// processed frame to config.out, in frame order. Frames without both
/// neighbours at +-baseline, or whose flows are missing, are skipped and
/// reported in the summary (and logged to stderr).
DatasetSummary run_pipeline(const PipelineConfig& config);

/// Copy of frame (as RGB) with 3x3 markers: green on the boundary point,
/// red on background samples, blue on foreground samples.
Frame render_overlay(const Frame& frame, const FrameAnnotation& annotation);

/// Worker count: config value (0 = hardware), capped by DYNOCC_THREADS.
int worker_count(int requested);

}  // namespace dynocc
