#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dynocc/boundary.hpp"
#include "dynocc/pair_sampling.hpp"
#include "dynocc/synth.hpp"

using namespace dynocc;

namespace {

// Static background, everything at x >= edge_x moving by (u, 0).
FlowField step_field(int w, int h, int edge_x, float u) {
  FlowField f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = edge_x; x < w; ++x) f.u(x, y) = u;
  }
  return f;
}

FigureGroundVerdict vertical_verdict(int x, int y0, int n, Side fg) {
  FigureGroundVerdict v;
  for (int i = 0; i < n; ++i) {
    v.segment.pixels.push_back({x, y0 + i});
    v.segment.normals.push_back({1, 0});
  }
  v.foreground_side = fg;
  return v;
}

// Fraction of t in [1, max_offset] whose lattice point is usable, by fine quadrature.
double usable_fraction(PixelPoint p, Vec2 dir, PixelPoint ref, const FlowField& f, int max_offset,
                       double eps) {
  const int steps = 200000;
  int ok = 0;
  for (int i = 0; i < steps; ++i) {
    const double t = 1.0 + (max_offset - 1.0) * (i + 0.5) / steps;
    const PixelPoint q = round_to_lattice(p.x + t * dir.x, p.y + t * dir.y);
    ok += f.contains(q) && flow_consistent(f, q, ref, eps);
  }
  return static_cast<double>(ok) / steps;
}

}  // namespace

TEST_CASE("sampling parameters") {
  CHECK_NOTHROW(SamplingParams{}.validate());
  SamplingParams p;
  p.keep_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.keep_rate = 1.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.bg_max_offset = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.max_attempts = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.flow_epsilon = -1;
  CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("flow consistency is a componentwise tolerance") {
  FlowField f(4, 1);
  f.u(1, 0) = 0.5f;
  f.v(2, 0) = -0.5f;
  f.u(3, 0) = 0.5f;
  f.v(3, 0) = 0.75f;
  CHECK(flow_consistent(f, {0, 0}, {1, 0}, 0.5));
  CHECK(flow_consistent(f, {0, 0}, {2, 0}, 0.5));
  CHECK(flow_consistent(f, {1, 0}, {2, 0}, 0.5));  // both components differ by exactly 0.5
  CHECK_FALSE(flow_consistent(f, {1, 0}, {2, 0}, 0.49));
  CHECK_FALSE(flow_consistent(f, {0, 0}, {3, 0}, 0.5));
  CHECK(flow_consistent(f, {0, 0}, {3, 0}, 0.75));
  CHECK(flow_consistent(f, {3, 0}, {3, 0}, 0.0));

  FlowField g(4, 1);
  g.u(3, 0) = 5.0f;
  const FlowField* both[] = {&f, &g};
  CHECK(flow_consistent(both, {0, 0}, {1, 0}, 0.5));
  CHECK_FALSE(flow_consistent(both, {0, 0}, {3, 0}, 1.0));
}

TEST_CASE("acceptance rate matches the usable share of the offset range") {
  const FlowField f = step_field(50, 5, 20, 4.0f);
  const PixelPoint p{22, 2};
  const Vec2 dir{-1, 0};
  const PixelPoint ref{5, 2};
  const double expected = usable_fraction(p, dir, ref, f, 30, 0.5);
  CHECK(expected > 0.3);
  CHECK(expected < 0.9);
  Rng rng(7);
  const int trials = 40000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    const auto q = sample_along(p, dir, ref, f, 30, 0.5, 1, rng);
    if (q) {
      CHECK(f.contains(*q));
      CHECK(q->y == 2);
      CHECK(q->x < 20);
      ++hits;
    }
  }
  const double rate = static_cast<double>(hits) / trials;
  const double sigma = std::sqrt(expected * (1 - expected) / trials);
  CHECK(std::fabs(rate - expected) < 4 * sigma);

  // with k attempts the miss probability is the single-draw miss to the k-th power
  int misses = 0;
  for (int i = 0; i < trials; ++i) misses += !sample_along(p, dir, ref, f, 30, 0.5, 3, rng);
  const double miss = std::pow(1 - expected, 3);
  CHECK(std::fabs(static_cast<double>(misses) / trials - miss) <
        4 * std::sqrt(miss * (1 - miss) / trials) + 1e-9);
}

TEST_CASE("samples that can only leave the raster give none") {
  const FlowField f(10, 10);
  Rng rng(3);
  CHECK_FALSE(sample_along({0, 5}, {-1, 0}, {0, 5}, f, 30, 0.5, 8, rng).has_value());
  CHECK_FALSE(sample_along({5, 5}, {0, 0}, {5, 5}, f, 30, 0.5, 8, rng).has_value());
  const std::vector<const FlowField*> none;
  CHECK_THROWS_AS(sample_along({5, 5}, {1, 0}, {5, 5}, FlowFields(none), 3, 0.5, 8, rng), ParameterError);
}

TEST_CASE("foreground anchor") {
  const FlowField f = step_field(40, 3, 20, 3.0f);
  SUBCASE("edge pixel already on the foreground: anchor is one step in") {
    CHECK(foreground_anchor({20, 1}, {1, 0}, {25, 1}, f, 0.5) == PixelPoint{21, 1});
  }
  SUBCASE("edge pixel one or two px short of the foreground") {
    CHECK(foreground_anchor({19, 1}, {1, 0}, {25, 1}, f, 0.5) == PixelPoint{21, 1});
    CHECK(foreground_anchor({18, 1}, {1, 0}, {25, 1}, f, 0.5) == PixelPoint{21, 1});
  }
  SUBCASE("too far from the foreground") { CHECK_FALSE(foreground_anchor({17, 1}, {1, 0}, {25, 1}, f, 0.5)); }
  SUBCASE("one-pixel sliver does not count") {
    FlowField g(40, 3);
    g.u(20, 1) = 3.0f;
    g.u(25, 1) = 3.0f;
    CHECK_FALSE(foreground_anchor({20, 1}, {1, 0}, {25, 1}, g, 0.5));
  }
}

TEST_CASE("a 20 px boundary segment yields 40 pairs") {
  const FlowField f = step_field(80, 40, 40, 6.0f);
  const std::vector<FigureGroundVerdict> verdicts{vertical_verdict(40, 10, 20, Side::two)};
  SamplingParams params;
  params.keep_rate = 1.0;
  Rng rng(11);
  const auto pairs = extract_pairs(verdicts, f, 5, params, rng);
  CHECK(pairs.size() == 40);
  int closer = 0, same = 0;
  for (const DepthPair& d : pairs) {
    if (d.o == Ordinal::closer) {
      ++closer;
      CHECK(d.i.x == 41);
      CHECK(d.j.x < 40);
      CHECK(d.j.x >= 41 - 30);
      CHECK(d.j.y == d.i.y);
    } else {
      REQUIRE(d.o == Ordinal::same);
      ++same;
      CHECK(d.j.x == 41);
      CHECK(d.i.x > 41);
      CHECK(d.i.x <= 41 + 7);
    }
  }
  CHECK(closer == 20);
  CHECK(same == 20);

  SUBCASE("a verdict over a flow-continuous region yields nothing") {
    const FlowField m = step_field(80, 40, 40, 0.0f);
    Rng r2(11);
    CHECK(extract_pairs(verdicts, m, 5, params, r2).empty());
  }
  SUBCASE("pairs are reproducible from the seed") {
    Rng a(11), b(11);
    CHECK(extract_pairs(verdicts, f, 5, params, a) == extract_pairs(verdicts, f, 5, params, b));
  }
  SUBCASE("mismatched field sizes") {
    const FlowField small(10, 10);
    const FlowField* fields[] = {&f, &small};
    Rng r3(1);
    CHECK_THROWS_AS(extract_pairs(verdicts, fields, 5, params, r3), DimensionError);
  }
}

TEST_CASE("pairs on the moving rect respect the layer geometry") {
  const auto spec = synth::default_scene();
  const auto scene = synth::render_scene(spec);
  const int t = 4;
  const FlowField fp = scene.truth.flow(t, -2), fn = scene.truth.flow(t, 2);
  const BinaryMask prev = detect_boundaries(scene.truth.flow(t - 2, -2), scene.truth.flow(t - 2, 2), {});
  const BinaryMask now = detect_boundaries(fp, fn, {});
  const BinaryMask next = detect_boundaries(scene.truth.flow(t + 2, -2), scene.truth.flow(t + 2, 2), {});
  const OrderParams order;
  std::vector<FigureGroundVerdict> verdicts;
  for (const auto& seg : split_segments(now, order.segment_len)) {
    if (auto v = classify_segment(seg, fp, fn, prev, next, order)) verdicts.push_back(*v);
  }
  REQUIRE_FALSE(verdicts.empty());
  SamplingParams params;
  params.keep_rate = 1.0;
  Rng rng(5);
  const FlowField* fields[] = {&fp, &fn};
  const auto pairs = extract_pairs(verdicts, fields, order.helper_offset, params, rng);
  REQUIRE(pairs.size() > 50);
  const auto& layer = scene.truth.layers[t];
  for (const DepthPair& d : pairs) {
    if (d.o == Ordinal::closer) {
      CHECK(layer[d.i] < layer[d.j]);
      const double dist = std::hypot(d.i.x - d.j.x, d.i.y - d.j.y);
      CHECK(dist <= 30.0 + 1.5);
    } else {
      CHECK(layer[d.i] == layer[d.j]);
      CHECK(flow_consistent(fields, d.i, d.j, params.flow_epsilon));
    }
  }
}

TEST_CASE("random drop keeps floor(rate * n) pairs") {
  std::vector<DepthPair> pairs;
  for (std::size_t n : {0u, 1u, 9u, 10u, 1000u}) {
    pairs.clear();
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({{static_cast<int>(i), 0}, {0, 0}, Ordinal::same});
    Rng rng(n);
    const auto kept = random_drop(pairs, 0.10, rng);
    CHECK(kept.size() == n / 10);
    CHECK(kept_count(n, 0.10) == n / 10);
    // kept pairs are distinct and stay in input order
    for (std::size_t k = 1; k < kept.size(); ++k) CHECK(kept[k - 1].i.x < kept[k].i.x);
    Rng full(n);
    CHECK(random_drop(pairs, 1.0, full) == pairs);
  }
  Rng bad(1);
  CHECK_THROWS_AS(random_drop(pairs, 0.0, bad), ParameterError);
}

TEST_CASE("random drop is deterministic and uniform") {
  std::vector<DepthPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({{i, 0}, {0, 0}, Ordinal::closer});
  Rng a(99), b(99);
  CHECK(random_drop(pairs, 0.3, a) == random_drop(pairs, 0.3, b));

  std::vector<int> hits(10, 0);
  Rng rng(1234);
  const int trials = 30000;
  for (int k = 0; k < trials; ++k) {
    for (const DepthPair& d : random_drop(pairs, 0.3, rng)) ++hits[static_cast<std::size_t>(d.i.x)];
  }
  const double sigma = std::sqrt(trials * 0.3 * 0.7);
  for (int h : hits) CHECK(std::fabs(h - trials * 0.3) < 5 * sigma);
}
