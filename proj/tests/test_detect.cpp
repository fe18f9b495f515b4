#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "synapcount/detect.hpp"
#include "synapcount/error.hpp"
#include "synapcount/synthetic.hpp"

using namespace synapcount;

namespace {

GrayImage filled(int w, int h, std::uint16_t v) {
  GrayImage g(w, h, 8);
  for (auto& p : g.pixels()) p = v;
  return g;
}

Mask from_rows(const std::vector<std::string>& rows) {
  Mask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m.set(x, y, rows[y][x] == '#');
  return m;
}

}  // namespace

TEST(Colocalize, VacuousThresholdsGiveRegion) {
  std::mt19937_64 rng(1);
  const auto region = oracle::random_mask(rng, 20, 10, 0.5);
  GrayImage r(20, 10, 8), g(20, 10, 8);
  for (auto& v : r.pixels()) v = rng() % 256;
  for (auto& v : g.pixels()) v = rng() % 256;
  EXPECT_EQ(colocalization_mask(r, g, region, 0, 0), region);
}

TEST(Colocalize, BlankRedAtMaxThreshold) {
  EXPECT_EQ(colocalization_mask(filled(5, 5, 0), filled(5, 5, 255), Mask(5, 5, true), 255, 0).count(), 0u);
}

TEST(Colocalize, RowExample) {
  GrayImage green(3, 3, 8, {0, 0, 0, 128, 128, 128, 255, 255, 255});
  const auto m = colocalization_mask(filled(3, 3, 200), green, Mask(3, 3, true), 100, 128);
  EXPECT_EQ(m, from_rows({"...", "###", "###"}));
}

TEST(Colocalize, DimensionMismatch) {
  EXPECT_THROW(colocalization_mask(filled(3, 3, 0), filled(3, 4, 0), Mask(3, 3), 1, 1), DimensionMismatch);
  EXPECT_THROW(colocalization_mask(filled(3, 3, 0), filled(3, 3, 0), Mask(2, 3), 1, 1), DimensionMismatch);
}

TEST(Colocalize, MonotoneInThresholds) {
  std::mt19937_64 rng(2);
  GrayImage r(32, 32, 8), g(32, 32, 8);
  for (auto& v : r.pixels()) v = rng() % 256;
  for (auto& v : g.pixels()) v = rng() % 256;
  const auto region = oracle::random_mask(rng, 32, 32, 0.7);
  for (int i = 0; i < 200; ++i) {
    const int tr = rng() % 256, tg = rng() % 256;
    const int tr2 = tr + rng() % (256 - tr), tg2 = tg + rng() % (256 - tg);
    const auto loose = colocalization_mask(r, g, region, tr, tg);
    EXPECT_TRUE(colocalization_mask(r, g, region, tr2, tg2).subset_of(loose));
    EXPECT_TRUE(loose.subset_of(region));
  }
}

TEST(Components, Examples) {
  EXPECT_EQ(connected_components(Mask(4, 4)).count(), 0);

  const auto block = connected_components(Mask(3, 3, true));
  ASSERT_EQ(block.count(), 1);
  EXPECT_EQ(block.components[0].area, 9);
  EXPECT_DOUBLE_EQ(block.components[0].centroid.x, 1.5);
  EXPECT_DOUBLE_EQ(block.components[0].centroid.y, 1.5);
  EXPECT_EQ(block.components[0].bbox, (BoundingBox{0, 0, 2, 2}));

  const auto diag = from_rows({"#.", ".#"});
  EXPECT_EQ(connected_components(diag, Connectivity::eight).count(), 1);
  EXPECT_EQ(connected_components(diag, Connectivity::four).count(), 2);
}

TEST(Components, InvariantsAgainstOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + rng() % 40, h = 1 + rng() % 40;
    const auto m = oracle::random_mask(rng, w, h, 0.1 + (rng() % 80) / 100.0);
    for (auto conn : {Connectivity::four, Connectivity::eight}) {
      const auto cs = connected_components(m, conn);
      const auto f = oracle::flood_fill(m, static_cast<int>(conn));
      ASSERT_EQ(cs.count(), f.count);
      std::vector<double> sx(f.count + 1), sy(f.count + 1);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const int l = f.labels[y * w + x];
          ASSERT_EQ(cs.labels[y * w + x], l);
          sx[l] += x + 0.5;
          sy[l] += y + 0.5;
        }
      for (int i = 1; i <= f.count; ++i) {
        const auto& c = cs.components[i - 1];
        EXPECT_EQ(c.id, i);
        EXPECT_EQ(c.area, f.areas[i]);
        EXPECT_NEAR(c.centroid.x, sx[i] / f.areas[i], 1e-9);
        EXPECT_NEAR(c.centroid.y, sy[i] / f.areas[i], 1e-9);
      }
    }
  }
}

TEST(Filter, Examples) {
  const auto cs = connected_components(from_rows({"#.#####.##", "..........", "..........", ".........."}));
  ASSERT_EQ(cs.count(), 3);
  EXPECT_EQ(filter_components(cs, 1).components, cs.components);
  const auto f = filter_components(cs, 2);
  ASSERT_EQ(f.count(), 2);
  EXPECT_EQ(f.components[0].area, 5);
  EXPECT_EQ(f.components[1].area, 2);
  EXPECT_EQ(f.components[1].id, 2);
  EXPECT_EQ(f.labels[0], 0);
  EXPECT_EQ(f.labels[8], 2);
  EXPECT_EQ(filter_components(cs, 6).count(), 0);
}

TEST(Assign, SingleDendriteTakesAll) {
  const TraceSet traces{{{3, "", {{0, 5}, {30, 5}}}}, ""};
  std::mt19937_64 rng(4);
  const auto cs = connected_components(oracle::random_mask(rng, 30, 30, 0.3));
  const auto a = assign_to_dendrites(cs, {{3, rasterize_tube(traces.traces[0], 4, 30, 30)}}, traces);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.at(3).size(), static_cast<std::size_t>(cs.count()));
}

TEST(Assign, UniqueTubeWins) {
  const TraceSet traces{{{1, "", {{0, 5}, {40, 5}}}, {2, "", {{0, 30}, {40, 30}}}}, ""};
  std::vector<DendriteTube> tubes;
  for (const auto& t : traces.traces) tubes.push_back({t.id, rasterize_tube(t, 6, 40, 40)});
  Mask m(40, 40);
  m.set(10, 29);
  m.set(20, 5);
  const auto a = assign_to_dendrites(connected_components(m), tubes, traces);
  EXPECT_EQ(a.at(1), std::vector<int>{1});
  EXPECT_EQ(a.at(2), std::vector<int>{2});
}

TEST(Assign, EquidistantCrossingGoesToLowestId) {
  // Two diagonals crossing at the centre of pixel (10,10).
  const TraceSet traces{{{2, "", {{0.5, 0.5}, {20.5, 20.5}}}, {1, "", {{20.5, 0.5}, {0.5, 20.5}}}}, ""};
  std::vector<DendriteTube> tubes;
  for (const auto& t : traces.traces) tubes.push_back({t.id, rasterize_tube(t, 4, 21, 21)});
  Mask m(21, 21);
  m.set(10, 10);
  const auto cs = connected_components(m);
  ASSERT_TRUE(tubes[0].mask.at(10, 10) && tubes[1].mask.at(10, 10));
  const auto a = assign_to_dendrites(cs, tubes, traces);
  EXPECT_EQ(a.at(1), std::vector<int>{1});
  EXPECT_TRUE(a.at(2).empty());
}

TEST(Assign, OutsideAllTubesUsesNearestPolyline) {
  const TraceSet traces{{{1, "", {{0, 2}, {40, 2}}}, {2, "", {{0, 30}, {40, 30}}}}, ""};
  std::vector<DendriteTube> tubes;
  for (const auto& t : traces.traces) tubes.push_back({t.id, rasterize_tube(t, 2, 40, 40)});
  Mask m(40, 40);
  m.set(5, 25);
  EXPECT_EQ(assign_to_dendrites(connected_components(m), tubes, traces).at(2), std::vector<int>{1});
  EXPECT_THROW(assign_to_dendrites(connected_components(m), {}, traces), ValueError);
}

TEST(Assign, AlwaysPartitions) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    TraceSet traces;
    std::vector<DendriteTube> tubes;
    const int n = 1 + rng() % 4;
    for (int i = 1; i <= n; ++i) {
      auto t = oracle::random_polyline(rng, 48, 48);
      t.id = i * 2;
      traces.traces.push_back(t);
      tubes.push_back({t.id, rasterize_tube(t, 6, 48, 48)});
    }
    const auto cs = connected_components(oracle::random_mask(rng, 48, 48, 0.2));
    const auto a = assign_to_dendrites(cs, tubes, traces);
    std::vector<int> seen;
    for (const auto& [id, comps] : a) seen.insert(seen.end(), comps.begin(), comps.end());
    std::sort(seen.begin(), seen.end());
    std::vector<int> all(cs.count());
    std::iota(all.begin(), all.end(), 1);
    EXPECT_EQ(seen, all);
  }
}

TEST(Metrics, Density) {
  EXPECT_DOUBLE_EQ(density_per_100_micron(5, 100), 5.0);
  EXPECT_DOUBLE_EQ(density_per_100_micron(12, 240), 5.0);
  EXPECT_DOUBLE_EQ(density_per_100_micron(0, 50), 0.0);
  EXPECT_THROW(density_per_100_micron(1, 0), ValueError);
}

TEST(Metrics, Inhibition) {
  EXPECT_NEAR(inhibition_percentage(26.03, 16.50), 36.61, 0.01);
  EXPECT_DOUBLE_EQ(inhibition_percentage(7.5, 7.5), 0.0);
  EXPECT_DOUBLE_EQ(inhibition_percentage(20, 10), 50.0);
  EXPECT_THROW(inhibition_percentage(0, 1), ValueError);
}

TEST(Metrics, Mean) {
  EXPECT_DOUBLE_EQ(mean_count({5}), 5.0);
  EXPECT_DOUBLE_EQ(mean_count({2, 4}), 3.0);
  EXPECT_THROW(mean_count({}), ValueError);
  std::mt19937_64 rng(6);
  std::vector<double> v;
  long sum = 0;
  for (int i = 0; i < 13; ++i) {
    v.push_back(static_cast<double>(rng() % 60));
    sum += static_cast<long>(v.back());
  }
  EXPECT_NEAR(mean_count(v), sum / 13.0, 1e-12);
}

TEST(Config, Validation) {
  AnalysisConfig c;
  EXPECT_NO_THROW(c.validate());
  c.threshold_red = 256;
  EXPECT_THROW(c.validate(), ValueError);
  c = {};
  c.scale = 0;
  EXPECT_THROW(c.validate(), ValueError);
  c = {};
  c.min_area = 0;
  EXPECT_THROW(c.validate(), ValueError);
  EXPECT_THROW(parse_mode("local"), ValueError);
  EXPECT_THROW(parse_connectivity(6), ValueError);
}

TEST(Analyze, BlankRedCountsNothing) {
  const auto n = synthetic::generate(fixtures::planted_seven());
  auto cfg = fixtures::config_for(fixtures::planted_seven());
  cfg.mode = AnalysisMode::per_dendrite;
  const auto r = analyze(GrayImage(n.red.width(), n.red.height(), 8), n.green, n.traces, cfg);
  EXPECT_EQ(r.global.synapse_count, 0);
  EXPECT_DOUBLE_EQ(*r.global.density_per_100um, 0.0);
  for (const auto& d : r.per_dendrite) EXPECT_EQ(d.synapse_count, 0);
}

TEST(Analyze, PlantedSeven) {
  const auto spec = fixtures::planted_seven();
  const auto n = synthetic::generate(spec);
  ASSERT_EQ(n.puncta.size(), 7u);
  ASSERT_EQ(n.off_tube.size(), 3u);
  ASSERT_EQ(n.single_channel.size(), 2u);
  auto cfg = fixtures::config_for(spec);
  const auto r = analyze(n.red, n.green, n.traces, cfg);
  EXPECT_EQ(r.global.synapse_count, 7);
  EXPECT_TRUE(r.per_dendrite.empty());
  EXPECT_NEAR(r.global.length_px, trace_length_px(n.traces.traces[0]), 1e-12);
  EXPECT_NEAR(*r.global.density_per_100um, 7 / r.global.length_um * 100, 1e-9);

  // Each detected centroid sits on a planted centre.
  for (const auto& s : r.synapses) {
    double best = 1e9;
    for (const auto& p : n.puncta) best = std::min(best, std::hypot(s.centroid.x - p.center.x, s.centroid.y - p.center.y));
    EXPECT_LT(best, 1.0);
  }

  cfg.threshold_red = cfg.threshold_green = 255;
  EXPECT_EQ(analyze(n.red, n.green, n.traces, cfg).global.synapse_count, 0);
}

TEST(Analyze, SixteenBitInputMatchesEightBit) {
  auto spec = fixtures::planted_seven(4);
  const auto a = synthetic::generate(spec);
  spec.bit_depth = 16;
  const auto b = synthetic::generate(spec);
  const auto cfg = fixtures::config_for(spec);
  EXPECT_EQ(analyze(a.red, a.green, a.traces, cfg), analyze(b.red, b.green, b.traces, cfg));
}

TEST(Analyze, PerDendritePartitionsAndIsDeterministic) {
  synthetic::NeuronSpec spec;
  spec.dendrites = 4;
  spec.puncta = 25;
  spec.seed = 77;
  const auto n = synthetic::generate(spec);
  auto cfg = fixtures::config_for(spec);
  cfg.mode = AnalysisMode::per_dendrite;
  const auto r = analyze(n.red, n.green, n.traces, cfg);
  EXPECT_EQ(r.global.synapse_count, 25);
  ASSERT_EQ(r.per_dendrite.size(), 4u);
  long sum = 0;
  double len = 0;
  for (const auto& d : r.per_dendrite) {
    sum += d.synapse_count;
    len += d.length_px;
  }
  EXPECT_EQ(sum, r.global.synapse_count);
  EXPECT_NEAR(len, r.global.length_px, 1e-9);
  for (const auto& s : r.synapses) EXPECT_TRUE(s.dendrite_id.has_value());
  EXPECT_EQ(analyze(n.red, n.green, n.traces, cfg), r);
}

TEST(Analyze, ZeroLengthDendriteHasNoDensity) {
  GrayImage img(20, 20, 8);
  const TraceSet traces{{{1, "dot", {{10, 10}}}}, ""};
  AnalysisConfig cfg;
  cfg.thickness = 0.45;
  cfg.mode = AnalysisMode::per_dendrite;
  const auto r = analyze(img, img, traces, cfg);
  EXPECT_FALSE(r.per_dendrite[0].density_per_100um.has_value());
  EXPECT_FALSE(r.global.density_per_100um.has_value());
}

TEST(Analyze, MinAreaAndConnectivityApply) {
  GrayImage r(20, 20, 8), g(20, 20, 8);
  for (auto [x, y] : std::vector<std::pair<int, int>>{{3, 9}, {4, 10}, {10, 10}, {11, 10}, {12, 10}}) {
    r.set(x, y, 255);
    g.set(x, y, 255);
  }
  const TraceSet traces{{{1, "", {{0, 10}, {20, 10}}}}, ""};
  AnalysisConfig cfg;
  cfg.thickness = 0.5;
  EXPECT_EQ(analyze(r, g, traces, cfg).global.synapse_count, 2);
  cfg.connectivity = Connectivity::four;
  EXPECT_EQ(analyze(r, g, traces, cfg).global.synapse_count, 3);
  cfg.min_area = 2;
  EXPECT_EQ(analyze(r, g, traces, cfg).global.synapse_count, 1);
}

TEST(Analyze, ClippedTraceFlagged) {
  GrayImage img(20, 20, 8);
  const TraceSet traces{{{1, "", {{5, 5}, {30, 5}}}}, ""};
  AnalysisConfig cfg;
  cfg.mode = AnalysisMode::per_dendrite;
  const auto r = analyze(img, img, traces, cfg);
  EXPECT_TRUE(r.per_dendrite[0].clipped);
  EXPECT_DOUBLE_EQ(r.per_dendrite[0].length_px, 25.0);
}
