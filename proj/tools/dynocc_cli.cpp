#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynocc/annotation.hpp"
#include "dynocc/image_io.hpp"
#include "dynocc/metrics.hpp"
#include "dynocc/pipeline.hpp"
#include "dynocc/simd/kernels.hpp"
#include "dynocc/synth.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoOutput = 3;

struct ExtractArgs {
  std::string config;
  std::string frames;
  std::optional<std::uint64_t> seed;
  std::string flow_dir;
  bool internal_flow = false;
  std::string out;
  std::string overlay_dir;
  std::string debug_dir;
  std::optional<double> keep_rate;
  std::optional<double> delta;
  std::string summary;
};

int run_extract(const ExtractArgs& args) {
  dynocc::PipelineConfig config;
  try {
    if (!args.config.empty()) config = dynocc::load_config(args.config);
    if (!args.frames.empty()) config.frames_dir = args.frames;
    if (args.seed) config.sampling.seed = *args.seed;
    if (!args.flow_dir.empty()) {
      config.flow_source = dynocc::FlowSource::flo_directory;
      config.flow_dir = args.flow_dir;
    }
    if (args.internal_flow) config.flow_source = dynocc::FlowSource::internal_block_matching;
    if (!args.out.empty()) config.out = args.out;
    if (!args.overlay_dir.empty()) config.overlay_dir = fs::path(args.overlay_dir);
    if (!args.debug_dir.empty()) config.debug_dir = fs::path(args.debug_dir);
    if (args.keep_rate) config.sampling.keep_rate = *args.keep_rate;
    if (args.delta) config.order.delta = *args.delta;
    config.validate();
  } catch (const dynocc::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const dynocc::DatasetSummary summary = dynocc::run_pipeline(config);
  const std::string text = summary.to_json();
  if (!args.summary.empty()) {
    std::ofstream(args.summary) << text << '\n';
  }
  std::cout << text << '\n';
  return summary.frames_processed == 0 ? kExitNoOutput : kExitOk;
}

dynocc::synth::SceneSpec scene_by_name(const std::string& name) {
  if (name == "default") return dynocc::synth::default_scene();
  if (name == "diverging") return dynocc::synth::diverging_pair_scene();
  if (name == "flat") return dynocc::synth::flat_scene();
  if (name == "static") return dynocc::synth::static_scene();
  throw dynocc::ParameterError("unknown scene '" + name + "'");
}

ordered_json accuracy(double v) {
  return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
}

int run_score(const std::string& annotations, const std::string& scene_dir) {
  std::size_t pos = 0, pos_ok = 0, neg = 0, neg_ok = 0;
  auto frames = ordered_json::array();
  for (const auto& a : dynocc::read_annotations(annotations)) {
    // frame_NNNN -> layers_NNNN.pgm
    const auto cut = a.frame.find_last_of('_');
    const std::string index = cut == std::string::npos ? a.frame : a.frame.substr(cut + 1);
    const auto layers = dynocc::synth::read_layer_map(fs::path(scene_dir) / "layers" / ("layers_" + index + ".pgm"));
    const auto s = dynocc::synth::score_pairs(a.pairs, layers);
    pos += s.pos_count;
    pos_ok += s.pos_correct;
    neg += s.neg_count;
    neg_ok += s.neg_correct;
    frames.push_back({{"frame", a.frame},
                      {"pos_accuracy", accuracy(s.pos_accuracy)},
                      {"neg_accuracy", accuracy(s.neg_accuracy)},
                      {"pos_count", s.pos_count},
                      {"neg_count", s.neg_count}});
  }
  ordered_json out;
  out["pos_accuracy"] = pos ? ordered_json(double(pos_ok) / double(pos)) : ordered_json(nullptr);
  out["neg_accuracy"] = neg ? ordered_json(double(neg_ok) / double(neg)) : ordered_json(nullptr);
  out["pos_count"] = pos;
  out["neg_count"] = neg;
  out["frames"] = frames;
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

dynocc::DepthMap load_depth(const fs::path& dir, const std::string& frame, double png_scale) {
  const fs::path pfm = dir / (frame + ".pfm");
  if (fs::exists(pfm)) return dynocc::read_pfm(pfm);
  const fs::path png = dir / (frame + ".png");
  if (fs::exists(png)) return dynocc::read_png16(png, png_scale);
  throw dynocc::Error("no depth map for " + frame + " in " + dir.string());
}

int run_eval(const std::string& annotations, const std::string& depth_dir, double scale,
             double threshold) {
  dynocc::QuerySet all;
  double loss = 0.0;
  std::vector<dynocc::Ordinal> predicted;
  for (const auto& a : dynocc::read_annotations(annotations)) {
    if (a.pairs.empty()) continue;
    // The network's output is taken to be larger for nearer points.
    const dynocc::DepthMap z = load_depth(depth_dir, a.frame, scale);
    const dynocc::QuerySet q = dynocc::queries_from_pairs(a.pairs);
    loss += dynocc::ranking_loss(z, q);
    for (const auto& query : q) {
      predicted.push_back(dynocc::predicted_order(z[query.i], z[query.j], threshold));
      all.push_back(query);
    }
  }
  if (all.empty()) {
    std::cerr << "no pairs to evaluate\n";
    return kExitNoOutput;
  }
  ordered_json out;
  out["queries"] = all.size();
  out["ranking_loss"] = loss;
  out["whdr"] = dynocc::whdr(predicted, all);
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative depth pair extraction from video occlusion boundaries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dynocc 0.1");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Annotate a frame directory");
  extract->add_option("--config", ex.config, "JSON configuration file");
  extract->add_option("--frames", ex.frames, "Frame directory (overrides the config)");
  extract->add_option("--seed", ex.seed, "Sampling seed");
  auto* flow_dir = extract->add_option("--flow-dir", ex.flow_dir, "Directory of <src>_to_<dst>.flo files");
  auto* internal = extract->add_flag("--internal-flow", ex.internal_flow, "Estimate flow by block matching");
  flow_dir->excludes(internal);
  extract->add_option("--out", ex.out, "Output JSONL path");
  extract->add_option("--overlay-dir", ex.overlay_dir, "Write PNG overlays here");
  extract->add_option("--debug-dir", ex.debug_dir, "Write 16-bit intermediate maps here");
  extract->add_option("--keep-rate", ex.keep_rate, "Fraction of pairs kept per frame");
  extract->add_option("--delta", ex.delta, "Figure/ground margin");
  extract->add_option("--summary", ex.summary, "Also write the run summary here");

  std::string scene_name = "default", scene_out;
  int baseline = 2;
  auto* synth = app.add_subcommand("synth", "Render a synthetic clip with ground truth");
  synth->add_option("--scene", scene_name, "default | diverging | flat | static");
  synth->add_option("--out", scene_out, "Output directory")->required();
  synth->add_option("--baseline", baseline, "Frame offset of the exported flows");

  std::string ann_path, scene_dir;
  auto* score = app.add_subcommand("score", "Score annotations against synthetic layer maps");
  score->add_option("--annotations", ann_path)->required();
  score->add_option("--scene-dir", scene_dir)->required();

  std::string eval_ann, depth_dir;
  double depth_scale = 1.0, eq_threshold = 0.0;
  auto* eval = app.add_subcommand("eval", "Ranking loss and WHDR of depth maps on annotations");
  eval->add_option("--annotations", eval_ann)->required();
  eval->add_option("--depth-dir", depth_dir, "<frame>.pfm or 16-bit <frame>.png maps")->required();
  eval->add_option("--png-scale", depth_scale, "Multiplier for 16-bit PNG samples");
  eval->add_option("--equal-threshold", eq_threshold, "Band |z_i - z_j| <= t predicted as equal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*extract) return run_extract(ex);
    if (*synth) {
      const auto rendered = dynocc::synth::render_scene(scene_by_name(scene_name));
      dynocc::synth::write_scene(scene_out, rendered, baseline);
      std::cout << "wrote " << rendered.frames.size() << " frames to " << scene_out << '\n';
      return kExitOk;
    }
    if (*score) return run_score(ann_path, scene_dir);
    if (*eval) return run_eval(eval_ann, depth_dir, depth_scale, eq_threshold);
  } catch (const dynocc::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}
