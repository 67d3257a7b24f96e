#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynocc/pair_sampling.hpp"
#include "dynocc/raster.hpp"

namespace dynocc::synth {

enum class Shape { rect, disc };

struct Sprite {
  Shape shape = Shape::rect;
  // Bounding box at frame 0. Discs use the largest inscribed circle.
  int x = 0;
  int y = 0;
  int width = 1;
  int height = 1;
  int layer = 0;  // lower is nearer
  int dx = 0;     // px per frame
  int dy = 0;
  std::uint64_t texture_seed = 1;
  double texture_amplitude = 0.8;  // 0 gives a flat sprite of intensity texture_base
  double texture_base = 0.5;
};

struct SceneSpec {
  int width = 128;
  int height = 128;
  int frame_count = 10;
  std::uint64_t background_seed = 7;
  double background_amplitude = 0.8;
  double background_base = 0.5;
  int background_dx = 0;
  int background_dy = 0;
  std::vector<Sprite> sprites;

  /// Throws ParameterError unless every sprite stays >= 1 px inside the canvas
  /// in every frame and layer indices are unique and non-negative.
  void validate() const;

  /// Layer index assigned to background pixels (one past the deepest sprite).
  int background_layer() const;
};

/// 128x128, one textured 80x80 sprite at layer 0 moving (4, 0) px/frame over a
/// static textured background, 10 frames.
SceneSpec default_scene();

/// 224x128, two textured 36x48 sprites moving apart horizontally (3 px/frame
/// each), 5 frames. The gap stays wider than the 31 px blur window.
SceneSpec diverging_pair_scene();

/// Same geometry as default_scene with every layer flat at the same intensity.
SceneSpec flat_scene();

/// default_scene with the sprite held still.
SceneSpec static_scene();

using LayerMap = Plane<std::int32_t>;

struct GroundTruth {
  std::vector<LayerMap> layers;        // per frame, nearest visible layer
  std::vector<BinaryMask> boundaries;  // per frame, 4-neighbour layer changes

  /// Exact flow from frame t to frame t + offset: every pixel carries the
  /// translation of the layer visible there at frame t.
  FlowField flow(int frame, int offset) const;

  SceneSpec spec;
};

struct RenderedScene {
  std::vector<Frame> frames;
  GroundTruth truth;
};

RenderedScene render_scene(const SceneSpec& spec);

/// Layer map of frame t computed from the scene description alone.
LayerMap layer_map(const SceneSpec& spec, int frame);

/// Pixels whose layer differs from one of their 4-neighbours.
BinaryMask layer_boundary(const LayerMap& layers);

struct PairScore {
  double pos_accuracy = 0.0;  // NaN when there are no +1 pairs
  double neg_accuracy = 0.0;  // NaN when there are no 0 pairs
  std::size_t pos_count = 0;
  std::size_t pos_correct = 0;
  std::size_t neg_count = 0;
  std::size_t neg_correct = 0;
  std::size_t other_count = 0;  // -1 pairs, scored as layer(j) < layer(i)
  std::size_t other_correct = 0;
};

/// +1 pairs are right when layer(i) < layer(j); 0 pairs when layer(i) == layer(j).
PairScore score_pairs(std::span<const DepthPair> pairs, const LayerMap& layers);

struct BoundaryScore {
  double precision = 1.0;  // 1 for an empty mask
  double recall = 0.0;
};

/// Chebyshev-tolerance precision/recall of a mask against the true boundary.
BoundaryScore score_boundaries(const BinaryMask& mask, const BinaryMask& truth, int tol_px);

/// Writes frames/frame_NNNN.png, ground-truth flows to +-baseline as
/// flow/<src>_to_<dst>.flo, layers/layers_NNNN.pgm (16-bit binary PGM) and scene.json.
void write_scene(const std::filesystem::path& dir, const RenderedScene& scene, int baseline);

/// Reads a layer map written by write_scene.
LayerMap read_layer_map(const std::filesystem::path& path);

std::string frame_name(int index);

}  // namespace dynocc::synth
