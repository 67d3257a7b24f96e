#include "dynocc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

#include "dynocc/block_matching.hpp"
#include "dynocc/flo_io.hpp"
#include "dynocc/image_io.hpp"

namespace dynocc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void log_line(const std::string& message) {
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  std::cerr << "[dynocc] " << message << '\n';
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool is_frame_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

// Everything stage two needs about one frame.
struct FrameState {
  std::optional<FlowField> to_prev;  // flow to frame s - baseline
  std::optional<FlowField> to_next;  // flow to frame s + baseline
  std::optional<BinaryMask> edges;
  std::string problem;               // why something is missing
};

template <class T>
void read_field(const json& j, const char* key, T& target, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ParameterError("unknown config key '" + where + item.key() + "'");
    }
  }
}

}  // namespace

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* cap = std::getenv("DYNOCC_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) n = std::min(n, limit);
  }
  return n;
}

void PipelineConfig::validate() const {
  boundary.validate();
  order.validate();
  sampling.validate();
  if (block_size < 1 || block_size % 2 == 0) throw ParameterError("block_size must be odd");
  if (search_radius < 1) throw ParameterError("search_radius must be >= 1");
  if (frames_dir.empty() || !fs::is_directory(frames_dir)) {
    throw ParameterError("frame directory does not exist: " + frames_dir.string());
  }
  if (flow_source == FlowSource::flo_directory && !fs::is_directory(flow_dir)) {
    throw ParameterError("flow directory does not exist: " + flow_dir.string());
  }
  if (out.empty()) throw ParameterError("output path is empty");
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config must be a JSON object");

  PipelineConfig c;
  std::set<std::string> top;
  std::string frames, out, overlay, debug;
  read_field(j, "frames", frames, top);
  read_field(j, "out", out, top);
  read_field(j, "overlay_dir", overlay, top);
  read_field(j, "debug_dir", debug, top);
  read_field(j, "seed", c.sampling.seed, top);
  read_field(j, "threads", c.threads, top);
  if (!frames.empty()) c.frames_dir = frames;
  if (!out.empty()) c.out = out;
  if (!overlay.empty()) c.overlay_dir = fs::path(overlay);
  if (!debug.empty()) c.debug_dir = fs::path(debug);

  top.insert("flow");
  if (j.contains("flow")) {
    const json& f = j["flow"];
    std::set<std::string> seen;
    std::string source = "internal", dir;
    read_field(f, "source", source, seen);
    read_field(f, "dir", dir, seen);
    read_field(f, "block", c.block_size, seen);
    read_field(f, "radius", c.search_radius, seen);
    reject_unknown(f, seen, "flow.");
    if (source == "flo") {
      c.flow_source = FlowSource::flo_directory;
    } else if (source == "internal") {
      c.flow_source = FlowSource::internal_block_matching;
    } else {
      throw ParameterError("flow.source must be 'flo' or 'internal'");
    }
    c.flow_dir = dir;
  }
  top.insert("boundary");
  if (j.contains("boundary")) {
    const json& b = j["boundary"];
    std::set<std::string> seen;
    read_field(b, "blur_k", c.boundary.blur_k, seen);
    read_field(b, "norm_percentile", c.boundary.norm_percentile, seen);
    read_field(b, "threshold_tau", c.boundary.threshold_tau, seen);
    reject_unknown(b, seen, "boundary.");
  }
  top.insert("order");
  if (j.contains("order")) {
    const json& o = j["order"];
    std::set<std::string> seen;
    read_field(o, "helper_offset", c.order.helper_offset, seen);
    read_field(o, "baseline", c.order.baseline, seen);
    read_field(o, "delta", c.order.delta, seen);
    read_field(o, "align_tolerance", c.order.align_tolerance, seen);
    read_field(o, "segment_len", c.order.segment_len, seen);
    reject_unknown(o, seen, "order.");
  }
  top.insert("sampling");
  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    std::set<std::string> seen;
    read_field(s, "bg_max_offset", c.sampling.bg_max_offset, seen);
    read_field(s, "fg_max_offset", c.sampling.fg_max_offset, seen);
    read_field(s, "flow_epsilon", c.sampling.flow_epsilon, seen);
    read_field(s, "keep_rate", c.sampling.keep_rate, seen);
    read_field(s, "max_attempts", c.sampling.max_attempts, seen);
    reject_unknown(s, seen, "sampling.");
  }
  reject_unknown(j, top, "");
  return c;
}

std::string DatasetSummary::to_json() const {
  nlohmann::ordered_json j;
  j["frames_total"] = frames_total;
  j["frames_processed"] = frames_processed;
  j["frames_skipped"] = skipped.size();
  j["classified_segments"] = classified_segments;
  j["pairs_before_drop"] = pairs_before_drop;
  j["pairs_written"] = pairs_written;
  auto list = nlohmann::ordered_json::array();
  for (const auto& s : skipped) list.push_back({{"frame", s.frame}, {"reason", s.reason}});
  j["skipped"] = list;
  return j.dump(2);
}

Frame render_overlay(const Frame& frame, const FrameAnnotation& annotation) {
  Frame out(frame.width(), frame.height(), 3);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = frame.at(x, y, frame.channels() == 3 ? c : 0);
    }
  }
  struct Rgb {
    float r, g, b;
  };
  constexpr Rgb green{0.0f, 1.0f, 0.0f};
  constexpr Rgb red{1.0f, 0.0f, 0.0f};
  constexpr Rgb blue{0.0f, 0.0f, 1.0f};
  auto mark = [&](PixelPoint p, Rgb color) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = p.x + dx;
        const int y = p.y + dy;
        if (x < 0 || y < 0 || x >= out.width() || y >= out.height()) continue;
        out.at(x, y, 0) = color.r;
        out.at(x, y, 1) = color.g;
        out.at(x, y, 2) = color.b;
      }
    }
  };
  for (const DepthPair& pair : annotation.pairs) {
    if (!frame.width() || pair.i.x < 0 || pair.j.x < 0 || pair.i.x >= frame.width() ||
        pair.j.x >= frame.width() || pair.i.y < 0 || pair.j.y < 0 ||
        pair.i.y >= frame.height() || pair.j.y >= frame.height()) {
      throw DimensionError("annotation point outside the frame " + annotation.frame);
    }
    switch (pair.o) {
      case Ordinal::closer:  // (p, p_b)
        mark(pair.i, green);
        mark(pair.j, red);
        break;
      case Ordinal::same:  // (p_f, p)
        mark(pair.i, blue);
        mark(pair.j, green);
        break;
      case Ordinal::further:
        mark(pair.i, red);
        mark(pair.j, green);
        break;
    }
  }
  return out;
}

DatasetSummary run_pipeline(const PipelineConfig& config) {
  config.validate();
  const std::vector<fs::path> frame_paths = list_frames(config.frames_dir);
  const std::size_t n = frame_paths.size();
  const int b = config.order.baseline;
  const int workers = worker_count(config.threads);

  std::vector<std::string> stems;
  for (const auto& p : frame_paths) stems.push_back(p.stem().string());

  std::vector<std::optional<Frame>> frames(n);
  std::vector<std::string> frame_errors(n);
  parallel_for(n, workers, [&](std::size_t s) {
    try {
      frames[s] = read_image(frame_paths[s]);
    } catch (const Error& e) {
      frame_errors[s] = e.what();
    }
  });

  if (config.debug_dir) fs::create_directories(*config.debug_dir);
  if (config.overlay_dir) fs::create_directories(*config.overlay_dir);

  // Stage one: flows and edges of every frame.
  std::vector<FrameState> states(n);
  parallel_for(n, workers, [&](std::size_t s) {
    FrameState& st = states[s];
    if (!frames[s]) {
      st.problem = "unreadable frame: " + frame_errors[s];
      return;
    }
    auto flow_to = [&](long other) -> std::optional<FlowField> {
      if (other < 0 || other >= static_cast<long>(n)) return std::nullopt;
      const auto o = static_cast<std::size_t>(other);
      try {
        FlowField f;
        if (config.flow_source == FlowSource::flo_directory) {
          f = load_flo(config.flow_dir / (stems[s] + "_to_" + stems[o] + ".flo"));
        } else {
          if (!frames[o]) throw Error("neighbour frame " + stems[o] + " is unreadable");
          f = estimate_flow_block_matching(*frames[s], *frames[o], config.block_size,
                                           config.search_radius);
        }
        if (f.width() != frames[s]->width() || f.height() != frames[s]->height()) {
          throw DimensionError("flow " + stems[s] + "->" + stems[o] + " does not match frame size");
        }
        return f;
      } catch (const Error& e) {
        if (!st.problem.empty()) st.problem += "; ";
        st.problem += e.what();
        return std::nullopt;
      }
    };
    st.to_prev = flow_to(static_cast<long>(s) - b);
    st.to_next = flow_to(static_cast<long>(s) + b);
    if (st.to_prev && st.to_next) {
      BoundaryStages stages = detect_boundary_stages(*st.to_prev, *st.to_next, config.boundary);
      if (config.debug_dir) {
        const fs::path base = *config.debug_dir / stems[s];
        write_png16_normalized(base.string() + "_confidence.png", stages.confidence);
        write_png16_normalized(base.string() + "_blurred.png", stages.blurred);
        write_png16_normalized(base.string() + "_normalized.png", stages.normalized);
        ScalarMap edges(stages.edges.width(), stages.edges.height());
        for (std::size_t i = 0; i < edges.size(); ++i) edges.values()[i] = stages.edges.values()[i];
        write_png16_normalized(base.string() + "_edges.png", edges);
      }
      st.edges = std::move(stages.edges);
    } else if (st.to_prev) {
      st.edges = detect_boundaries_one_sided(*st.to_prev, config.boundary);
    } else if (st.to_next) {
      st.edges = detect_boundaries_one_sided(*st.to_next, config.boundary);
    }
  });

  // Stage two: classification and sampling for frames with both neighbours.
  std::vector<std::optional<FrameAnnotation>> annotations(n);
  std::vector<std::string> skip_reason(n);
  parallel_for(n, workers, [&](std::size_t t) {
    const long lo = static_cast<long>(t) - b;
    const long hi = static_cast<long>(t) + b;
    if (lo < 0 || hi >= static_cast<long>(n)) {
      skip_reason[t] = "clip boundary: needs frames at -" + std::to_string(b) + " and +" +
                       std::to_string(b);
      return;
    }
    const FrameState& cur = states[t];
    const FrameState& prev = states[static_cast<std::size_t>(lo)];
    const FrameState& next = states[static_cast<std::size_t>(hi)];
    if (!cur.to_prev || !cur.to_next || !cur.edges) {
      skip_reason[t] = "missing flow: " + (cur.problem.empty() ? "unavailable" : cur.problem);
      return;
    }
    if (!prev.edges || !next.edges) {
      skip_reason[t] = "missing neighbour edges: " +
                       (!prev.edges ? stems[static_cast<std::size_t>(lo)] + " (" + prev.problem + ")"
                                    : stems[static_cast<std::size_t>(hi)] + " (" + next.problem + ")");
      return;
    }

    FrameAnnotation a;
    a.frame = stems[t];
    a.image = frame_paths[t].string();
    a.stats.boundary_pixels = static_cast<std::size_t>(
        std::count_if(cur.edges->values().begin(), cur.edges->values().end(),
                      [](std::uint8_t v) { return v != 0; }));
    const auto segments = split_segments(*cur.edges, config.order.segment_len);
    a.stats.segments = segments.size();
    std::vector<FigureGroundVerdict> verdicts;
    for (const auto& seg : segments) {
      if (auto v = classify_segment(seg, *cur.to_prev, *cur.to_next, *prev.edges, *next.edges,
                                    config.order)) {
        verdicts.push_back(std::move(*v));
      }
    }
    a.stats.classified_segments = verdicts.size();
    Rng rng = Rng::for_stream(config.sampling.seed, t);
    const FlowField* fields[] = {&*cur.to_prev, &*cur.to_next};
    const auto pairs =
        extract_pairs(verdicts, fields, config.order.helper_offset, config.sampling, rng);
    a.stats.pairs_before_drop = pairs.size();
    a.pairs = random_drop(pairs, config.sampling.keep_rate, rng);
    a.stats.pairs_after_drop = a.pairs.size();
    if (config.overlay_dir) {
      write_image(*config.overlay_dir / (stems[t] + ".png"), render_overlay(*frames[t], a));
    }
    annotations[t] = std::move(a);
  });

  DatasetSummary summary;
  summary.frames_total = n;
  if (!config.out.parent_path().empty()) fs::create_directories(config.out.parent_path());
  std::ofstream out(config.out, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write annotations to " + config.out.string());
  for (std::size_t t = 0; t < n; ++t) {
    if (!annotations[t]) {
      summary.skipped.push_back({stems[t], skip_reason[t]});
      log_line("skip " + stems[t] + ": " + skip_reason[t]);
      continue;
    }
    const FrameAnnotation& a = *annotations[t];
    out << to_json_line(a) << '\n';
    ++summary.frames_processed;
    summary.classified_segments += a.stats.classified_segments;
    summary.pairs_before_drop += a.stats.pairs_before_drop;
    summary.pairs_written += a.stats.pairs_after_drop;
  }
  return summary;
}

}  // namespace dynocc
