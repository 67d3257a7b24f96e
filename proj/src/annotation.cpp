#include "dynocc/annotation.hpp"

#include <fstream>

#include "json.hpp"

namespace dynocc {

using ordered_json = nlohmann::ordered_json;

std::string to_json_line(const FrameAnnotation& a) {
  ordered_json pairs = ordered_json::array();
  for (const DepthPair& p : a.pairs) {
    pairs.push_back(ordered_json{{"i", {p.i.x, p.i.y}},
                                 {"j", {p.j.x, p.j.y}},
                                 {"o", static_cast<int>(p.o)}});
  }
  ordered_json j;
  j["frame"] = a.frame;
  j["image"] = a.image;
  j["pairs"] = std::move(pairs);
  j["stats"] = ordered_json{{"boundary_pixels", a.stats.boundary_pixels},
                            {"segments", a.stats.segments},
                            {"classified_segments", a.stats.classified_segments},
                            {"pairs_before_drop", a.stats.pairs_before_drop},
                            {"pairs_after_drop", a.stats.pairs_after_drop}};
  return j.dump();
}

namespace {

PixelPoint parse_point(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw FormatError("pair coordinates must be [x, y] integers");
  }
  return PixelPoint{j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

FrameAnnotation parse_annotation_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("annotation line is not JSON: ") + e.what());
  }
  try {
    FrameAnnotation a;
    a.frame = j.at("frame").get<std::string>();
    a.image = j.value("image", std::string{});
    for (const auto& p : j.at("pairs")) {
      const int o = p.at("o").get<int>();
      if (o < -1 || o > 1) throw FormatError("ordinal must be -1, 0 or +1");
      a.pairs.push_back({parse_point(p.at("i")), parse_point(p.at("j")), static_cast<Ordinal>(o)});
    }
    const auto& s = j.at("stats");
    a.stats.boundary_pixels = s.at("boundary_pixels").get<std::size_t>();
    a.stats.segments = s.at("segments").get<std::size_t>();
    a.stats.classified_segments = s.at("classified_segments").get<std::size_t>();
    a.stats.pairs_before_drop = s.at("pairs_before_drop").get<std::size_t>();
    a.stats.pairs_after_drop = s.at("pairs_after_drop").get<std::size_t>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed annotation: ") + e.what());
  }
}

std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open annotations " + path.string());
  std::vector<FrameAnnotation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_annotation_line(line));
  }
  return out;
}

}  // namespace dynocc
