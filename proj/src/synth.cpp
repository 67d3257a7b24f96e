#include "dynocc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "json.hpp"

#include "dynocc/flo_io.hpp"
#include "dynocc/image_io.hpp"
#include "dynocc/rng.hpp"

namespace dynocc::synth {

namespace {

double lattice_hash(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ull ^
                                             mix64(static_cast<std::uint64_t>(iy))));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Value noise in [0,1]: half bilinear lattice noise (4 px cells), half per-pixel noise.
double value_noise(std::uint64_t seed, int x, int y) {
  constexpr int cell = 4;
  const int cx = static_cast<int>(std::floor(static_cast<double>(x) / cell));
  const int cy = static_cast<int>(std::floor(static_cast<double>(y) / cell));
  const double fx = static_cast<double>(x - cx * cell) / cell;
  const double fy = static_cast<double>(y - cy * cell) / cell;
  const double a = lattice_hash(seed, cx, cy);
  const double b = lattice_hash(seed, cx + 1, cy);
  const double c = lattice_hash(seed, cx, cy + 1);
  const double d = lattice_hash(seed, cx + 1, cy + 1);
  const double smooth = (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  const double fine = lattice_hash(seed ^ 0x5bd1e995ull, x, y);
  return 0.5 * smooth + 0.5 * fine;
}

float shade(double base, double amplitude, std::uint64_t seed, int tx, int ty) {
  double v = base;
  if (amplitude > 0.0) v += amplitude * (value_noise(seed, tx, ty) - 0.5);
  v = std::clamp(v, 0.0, 1.0);
  // Quantise to 8 bits so the in-memory frame equals its PNG round trip.
  return static_cast<float>(std::lround(v * 255.0)) / 255.0f;
}

bool sprite_covers(const Sprite& s, int frame, int x, int y) {
  const int x0 = s.x + s.dx * frame;
  const int y0 = s.y + s.dy * frame;
  if (x < x0 || y < y0 || x >= x0 + s.width || y >= y0 + s.height) return false;
  if (s.shape == Shape::rect) return true;
  const double cx = x0 + (s.width - 1) / 2.0;
  const double cy = y0 + (s.height - 1) / 2.0;
  const double r = std::min(s.width, s.height) / 2.0;
  const double ddx = x - cx;
  const double ddy = y - cy;
  return ddx * ddx + ddy * ddy <= r * r;
}

// Index into spec.sprites of the nearest sprite covering (x, y), or -1.
int visible_sprite(const SceneSpec& spec, int frame, int x, int y) {
  int best = -1;
  for (std::size_t i = 0; i < spec.sprites.size(); ++i) {
    const Sprite& s = spec.sprites[i];
    if (!sprite_covers(s, frame, x, y)) continue;
    if (best < 0 || s.layer < spec.sprites[static_cast<std::size_t>(best)].layer) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw ParameterError("scene canvas must be non-empty");
  if (frame_count < 1) throw ParameterError("scene needs at least one frame");
  std::set<int> layers;
  for (const Sprite& s : sprites) {
    if (s.width < 1 || s.height < 1) throw ParameterError("sprite size must be positive");
    if (s.layer < 0) throw ParameterError("sprite layers must be non-negative");
    if (!layers.insert(s.layer).second) throw ParameterError("sprite layers must be unique");
    for (int t = 0; t < frame_count; ++t) {
      const int x0 = s.x + s.dx * t;
      const int y0 = s.y + s.dy * t;
      if (x0 < 1 || y0 < 1 || x0 + s.width > width - 1 || y0 + s.height > height - 1) {
        throw ParameterError("sprite leaves the canvas interior at frame " + std::to_string(t));
      }
    }
  }
}

int SceneSpec::background_layer() const {
  int deepest = -1;
  for (const Sprite& s : sprites) deepest = std::max(deepest, s.layer);
  return deepest + 1;
}

SceneSpec default_scene() {
  SceneSpec spec;
  Sprite sprite;
  sprite.x = 8;
  sprite.y = 24;
  sprite.width = 80;
  sprite.height = 80;
  sprite.layer = 0;
  sprite.dx = 4;
  sprite.dy = 0;
  sprite.texture_seed = 1001;
  spec.sprites.push_back(sprite);
  return spec;
}

SceneSpec diverging_pair_scene() {
  SceneSpec spec;
  spec.width = 224;
  spec.frame_count = 5;
  Sprite left;
  left.x = 30;
  left.y = 40;
  left.width = 36;
  left.height = 48;
  left.layer = 0;
  left.dx = -3;
  left.texture_seed = 2001;
  Sprite right = left;
  right.x = 110;
  right.layer = 1;
  right.dx = 3;
  right.texture_seed = 2002;
  spec.sprites = {left, right};
  return spec;
}

SceneSpec flat_scene() {
  SceneSpec spec = default_scene();
  spec.background_amplitude = 0.0;
  for (Sprite& s : spec.sprites) {
    s.texture_amplitude = 0.0;
    s.texture_base = spec.background_base;
  }
  return spec;
}

SceneSpec static_scene() {
  SceneSpec spec = default_scene();
  for (Sprite& s : spec.sprites) s.dx = s.dy = 0;
  return spec;
}

LayerMap layer_map(const SceneSpec& spec, int frame) {
  LayerMap out(spec.width, spec.height, spec.background_layer());
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int s = visible_sprite(spec, frame, x, y);
      if (s >= 0) out(x, y) = spec.sprites[static_cast<std::size_t>(s)].layer;
    }
  }
  return out;
}

BinaryMask layer_boundary(const LayerMap& layers) {
  BinaryMask out(layers.width(), layers.height());
  for (int y = 0; y < layers.height(); ++y) {
    for (int x = 0; x < layers.width(); ++x) {
      const int here = layers(x, y);
      const bool edge = (x > 0 && layers(x - 1, y) != here) ||
                        (x + 1 < layers.width() && layers(x + 1, y) != here) ||
                        (y > 0 && layers(x, y - 1) != here) ||
                        (y + 1 < layers.height() && layers(x, y + 1) != here);
      out(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

FlowField GroundTruth::flow(int frame, int offset) const {
  FlowField out(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int s = visible_sprite(spec, frame, x, y);
      int dx = spec.background_dx;
      int dy = spec.background_dy;
      if (s >= 0) {
        dx = spec.sprites[static_cast<std::size_t>(s)].dx;
        dy = spec.sprites[static_cast<std::size_t>(s)].dy;
      }
      out.u(x, y) = static_cast<float>(dx * offset);
      out.v(x, y) = static_cast<float>(dy * offset);
    }
  }
  return out;
}

RenderedScene render_scene(const SceneSpec& spec) {
  spec.validate();
  RenderedScene scene;
  scene.truth.spec = spec;
  for (int t = 0; t < spec.frame_count; ++t) {
    Frame frame(spec.width, spec.height, 1);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const int s = visible_sprite(spec, t, x, y);
        if (s < 0) {
          frame.at(x, y) = shade(spec.background_base, spec.background_amplitude,
                                 spec.background_seed, x - spec.background_dx * t,
                                 y - spec.background_dy * t);
        } else {
          const Sprite& sp = spec.sprites[static_cast<std::size_t>(s)];
          frame.at(x, y) = shade(sp.texture_base, sp.texture_amplitude, sp.texture_seed,
                                 x - (sp.x + sp.dx * t), y - (sp.y + sp.dy * t));
        }
      }
    }
    scene.frames.push_back(std::move(frame));
    scene.truth.layers.push_back(layer_map(spec, t));
    scene.truth.boundaries.push_back(layer_boundary(scene.truth.layers.back()));
  }
  return scene;
}

PairScore score_pairs(std::span<const DepthPair> pairs, const LayerMap& layers) {
  PairScore score;
  for (const DepthPair& pair : pairs) {
    if (!layers.contains(pair.i) || !layers.contains(pair.j)) {
      throw DimensionError("pair coordinate outside the layer map");
    }
    const int li = layers[pair.i];
    const int lj = layers[pair.j];
    switch (pair.o) {
      case Ordinal::closer:
        ++score.pos_count;
        if (li < lj) ++score.pos_correct;
        break;
      case Ordinal::same:
        ++score.neg_count;
        if (li == lj) ++score.neg_correct;
        break;
      case Ordinal::further:
        ++score.other_count;
        if (lj < li) ++score.other_correct;
        break;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  score.pos_accuracy = score.pos_count > 0
                           ? static_cast<double>(score.pos_correct) / static_cast<double>(score.pos_count)
                           : nan;
  score.neg_accuracy = score.neg_count > 0
                           ? static_cast<double>(score.neg_correct) / static_cast<double>(score.neg_count)
                           : nan;
  return score;
}

namespace {

BinaryMask dilate_chebyshev(const BinaryMask& mask, int radius) {
  BinaryMask rows(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask(x, y) == 0) continue;
      for (int k = std::max(0, x - radius); k <= std::min(mask.width() - 1, x + radius); ++k) {
        rows(k, y) = 1;
      }
    }
  }
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (rows(x, y) == 0) continue;
      for (int k = std::max(0, y - radius); k <= std::min(mask.height() - 1, y + radius); ++k) {
        out(x, k) = 1;
      }
    }
  }
  return out;
}

}  // namespace

BoundaryScore score_boundaries(const BinaryMask& mask, const BinaryMask& truth, int tol_px) {
  if (!mask.same_shape(truth)) throw DimensionError("mask and ground truth differ in size");
  if (tol_px < 0) throw ParameterError("tolerance must be non-negative");
  const BinaryMask near_truth = dilate_chebyshev(truth, tol_px);
  const BinaryMask near_mask = dilate_chebyshev(mask, tol_px);
  std::size_t mask_count = 0, mask_hits = 0, truth_count = 0, truth_hits = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.values()[i] != 0) {
      ++mask_count;
      if (near_truth.values()[i] != 0) ++mask_hits;
    }
    if (truth.values()[i] != 0) {
      ++truth_count;
      if (near_mask.values()[i] != 0) ++truth_hits;
    }
  }
  BoundaryScore score;
  score.precision = mask_count == 0 ? 1.0 : static_cast<double>(mask_hits) / mask_count;
  score.recall = truth_count == 0 ? 1.0 : static_cast<double>(truth_hits) / truth_count;
  return score;
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", index);
  return buf;
}

void write_scene(const std::filesystem::path& dir, const RenderedScene& scene, int baseline) {
  std::filesystem::create_directories(dir / "frames");
  std::filesystem::create_directories(dir / "flow");
  std::filesystem::create_directories(dir / "layers");
  const SceneSpec& spec = scene.truth.spec;
  const int n = static_cast<int>(scene.frames.size());
  for (int t = 0; t < n; ++t) {
    write_image(dir / "frames" / (frame_name(t) + ".png"), scene.frames[static_cast<std::size_t>(t)]);
    for (int offset : {-baseline, baseline}) {
      const int other = t + offset;
      if (other < 0 || other >= n) continue;
      save_flo(dir / "flow" / (frame_name(t) + "_to_" + frame_name(other) + ".flo"),
               scene.truth.flow(t, offset));
    }
    const LayerMap& layers = scene.truth.layers[static_cast<std::size_t>(t)];
    char name[32];
    std::snprintf(name, sizeof(name), "layers_%04d.pgm", t);
    std::ofstream out(dir / "layers" / name, std::ios::binary);
    out << "P5\n" << layers.width() << ' ' << layers.height() << "\n65535\n";
    for (std::int32_t v : layers.values()) {
      const auto s = static_cast<std::uint16_t>(v);
      const char b[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xff)};
      out.write(b, 2);
    }
  }

  nlohmann::ordered_json j;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["frame_count"] = spec.frame_count;
  j["background_seed"] = spec.background_seed;
  j["background_layer"] = spec.background_layer();
  j["background_motion"] = {spec.background_dx, spec.background_dy};
  j["baseline"] = baseline;
  auto sprites = nlohmann::ordered_json::array();
  for (const Sprite& s : spec.sprites) {
    sprites.push_back({{"shape", s.shape == Shape::rect ? "rect" : "disc"},
                       {"box", {s.x, s.y, s.width, s.height}},
                       {"layer", s.layer},
                       {"motion", {s.dx, s.dy}},
                       {"texture_seed", s.texture_seed},
                       {"texture_amplitude", s.texture_amplitude}});
  }
  j["sprites"] = sprites;
  std::ofstream(dir / "scene.json") << j.dump(2) << '\n';
}

LayerMap read_layer_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  in >> magic >> width >> height >> maxval;
  in.get();
  if (magic != "P5" || maxval != 65535 || width <= 0 || height <= 0) {
    throw FormatError("expected a 16-bit PGM layer map: " + path.string());
  }
  LayerMap out(width, height);
  for (auto& v : out.values()) {
    const int hi = in.get();
    const int lo = in.get();
    if (!in) throw TruncationError("layer map truncated: " + path.string());
    v = (hi << 8) | lo;
  }
  return out;
}

}  // namespace dynocc::synth
