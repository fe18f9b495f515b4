#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "synapcount/error.hpp"
#include "synapcount/traces.hpp"

using namespace synapcount;

namespace {

std::string ndf(const std::string& body) {
  return "// NeuronJ Data File - v1.4.0\n// Parameters\n1\n3.0\n// Type names and colors\nDefault\n" + body +
         "// End of NeuronJ Data File\n";
}

int error_line(const std::string& text) {
  try {
    parse_ndf(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST(Ndf, MinimalSingleTracing) {
  const auto set = parse_ndf(ndf("// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n10\n20\n30\n40\n"));
  ASSERT_EQ(set.traces.size(), 1u);
  EXPECT_EQ(set.traces[0].id, 1);
  EXPECT_EQ(set.traces[0].points, (std::vector<Point>{{10, 20}, {30, 40}}));
}

TEST(Ndf, SegmentsConcatenateAndIdsKept) {
  const auto set = parse_ndf(ndf(
      "// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n0\n0\n5\n0\n// Segment 2 of Tracing N1\n5\n0\n5\n5\n"
      "// Tracing N2\n2\n0\n0\napical\n// Segment 1 of Tracing N2\n1\n1\n2\n2\n"));
  ASSERT_EQ(set.traces.size(), 2u);
  EXPECT_EQ(set.traces[0].id, 1);
  EXPECT_EQ(set.traces[1].id, 2);
  // Shared joint (5,0) collapses.
  EXPECT_EQ(set.traces[0].points, (std::vector<Point>{{0, 0}, {5, 0}, {5, 5}}));
  EXPECT_EQ(set.traces[1].name, "apical");
}

TEST(Ndf, NoTracings) {
  try {
    parse_ndf(ndf(""));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no traces"), std::string::npos);
  }
}

TEST(Ndf, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("hello\n"), 1);
  // header 1, parameters 2-4, types 5-6, tracing 7-11, segment 12, coordinates from 13
  EXPECT_EQ(error_line(ndf("// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n10\nabc\n")), 14);
  EXPECT_EQ(error_line(ndf("// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n10\n20\n30\n")), 12);
  EXPECT_EQ(error_line(ndf("// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n10\n-2\n")), 14);
}

TEST(Ndf, UnknownSectionWarns) {
  std::vector<std::string> warnings;
  const auto set = parse_ndf(
      ndf("// Tracing N1\n1\n0\n0\nDefault\n// Segment 1 of Tracing N1\n1\n1\n4\n5\n// Mystery block\nxyz\n"), &warnings);
  EXPECT_EQ(set.traces.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("Mystery"), std::string::npos);
}

TEST(Ndf, RoundTripThroughWriter) {
  TraceSet set;
  set.traces = {{1, "a", {{1, 2}, {3, 4}, {10, 4}}}, {7, "b", {{0, 0}}}};
  const auto back = parse_ndf(traces_to_ndf(set));
  ASSERT_EQ(back.traces.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.traces[i].id, set.traces[i].id);
    EXPECT_EQ(back.traces[i].points, set.traces[i].points);
  }
}

TEST(TracesJson, Example) {
  const auto set = parse_traces_json(R"({"traces":[{"id":1,"name":"d1","points":[[0,0],[3,4]]}]})");
  ASSERT_EQ(set.traces.size(), 1u);
  EXPECT_DOUBLE_EQ(trace_length_px(set.traces[0]), 5.0);
}

TEST(TracesJson, SchemaErrorsNamePath) {
  EXPECT_THROW(parse_traces_json(R"({"traces":[]})"), SchemaError);
  try {
    parse_traces_json(R"({"traces":[{"id":1,"points":[[0,0],[1]]}]})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "traces[0].points[1]");
  }
  try {
    parse_traces_json(R"({"traces":[{"id":"x","points":[[0,0]]}]})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "traces[0].id");
  }
  EXPECT_THROW(parse_traces_json("{not json"), ParseError);
}

TEST(TracesJson, RoundTripProperty) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(0.0, 5000.0);
  for (int trial = 0; trial < 200; ++trial) {
    TraceSet set;
    set.source = "gen" + std::to_string(trial);
    const int n = 1 + rng() % 6;
    for (int i = 0; i < n; ++i) {
      DendriteTrace t{static_cast<int>(i * 3 + rng() % 3), "name, \"quoted\" " + std::to_string(i), {}};
      const int k = 1 + rng() % 8;
      for (int j = 0; j < k; ++j) t.points.push_back({coord(rng), coord(rng)});
      set.traces.push_back(t);
    }
    ASSERT_EQ(parse_traces_json(traces_to_json(set)), set);
  }
}

TEST(TracesDispatch, DetectsFormat) {
  EXPECT_EQ(parse_traces(R"({"traces":[{"id":4,"points":[[1,1]]}]})").traces[0].id, 4);
  EXPECT_EQ(parse_traces(ndf("// Tracing N9\n9\n0\n0\nx\n// Segment 1 of Tracing N9\n1\n1\n")).traces[0].id, 9);
}

TEST(Length, Examples) {
  EXPECT_DOUBLE_EQ(trace_length_px({1, "", {{0, 0}, {3, 4}}}), 5.0);
  EXPECT_DOUBLE_EQ(trace_length_px({1, "", {{5, 5}}}), 0.0);
  EXPECT_DOUBLE_EQ(trace_length_px({1, "", {{0, 0}, {3, 4}, {3, 10}}}), 11.0);
}

TEST(Length, TranslationAndScaling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    DendriteTrace t{1, "", {}}, moved = t, scaled = t;
    const double dx = u(rng), dy = u(rng), s = 0.1 + u(rng) / 10;
    for (int i = 0; i < 5; ++i) {
      const Point p{u(rng), u(rng)};
      t.points.push_back(p);
      moved.points.push_back({p.x + dx, p.y + dy});
      scaled.points.push_back({p.x * s, p.y * s});
    }
    EXPECT_NEAR(trace_length_px(moved), trace_length_px(t), 1e-9);
    EXPECT_NEAR(trace_length_px(scaled), s * trace_length_px(t), 1e-9);
  }
}

TEST(Microns, Examples) {
  EXPECT_DOUBLE_EQ(px_to_microns(100, 0.09), 9.0);
  EXPECT_DOUBLE_EQ(px_to_microns(0, 0.09), 0.0);
  EXPECT_DOUBLE_EQ(px_to_microns(11, 1.0), 11.0);
  EXPECT_THROW(px_to_microns(1, 0), ValueError);
  EXPECT_THROW(px_to_microns(1, -1), ValueError);
}

TEST(Tube, HorizontalSegmentBand) {
  const auto m = rasterize_tube({1, "", {{1, 5}, {8, 5}}}, 3, 10, 10);
  EXPECT_EQ(m, oracle::brute_tube({1, "", {{1, 5}, {8, 5}}}, 3, 10, 10));
  // Centres 4.5 and 5.5 rows away by 0.5, 3.5 and 6.5 by 1.5 == radius: rows 3..6 along the body.
  for (int y = 0; y < 10; ++y) EXPECT_EQ(m.at(4, y), y >= 3 && y <= 6) << y;
}

TEST(Tube, SinglePointIsDisc) {
  const DendriteTrace t{1, "", {{10, 10}}};
  const auto m = rasterize_tube(t, 4, 20, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) EXPECT_EQ(m.at(x, y), std::hypot(x + 0.5 - 10, y + 0.5 - 10) <= 2.0);
}

TEST(Tube, OutsideFrameIsEmpty) {
  EXPECT_EQ(rasterize_tube({1, "", {{100, 100}, {200, 150}}}, 5, 32, 32).count(), 0u);
}

TEST(Tube, RejectsNonPositiveThickness) { EXPECT_THROW(rasterize_tube({1, "", {{1, 1}}}, 0, 4, 4), ValueError); }

TEST(Tube, MatchesOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> thick(0.3, 12.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + rng() % 64, h = 1 + rng() % 64;
    const auto t = oracle::random_polyline(rng, w, h);
    const double th = thick(rng);
    ASSERT_EQ(rasterize_tube(t, th, w, h), oracle::brute_tube(t, th, w, h)) << trial;
  }
}

TEST(Tube, MonotoneInThickness) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> thick(0.2, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = oracle::random_polyline(rng, 48, 48);
    double a = thick(rng), b = thick(rng);
    if (a > b) std::swap(a, b);
    EXPECT_TRUE(rasterize_tube(t, a, 48, 48).subset_of(rasterize_tube(t, b, 48, 48)));
  }
}

TEST(Tube, ClippingFlag) {
  EXPECT_FALSE(trace_leaves_frame({1, "", {{1, 1}, {9, 9}}}, 10, 10));
  EXPECT_TRUE(trace_leaves_frame({1, "", {{1, 1}, {12, 9}}}, 10, 10));
}

TEST(Union, Laws) {
  const auto a = rasterize_tube({1, "", {{5, 5}}}, 4, 30, 30);
  const auto b = rasterize_tube({1, "", {{20, 20}}}, 4, 30, 30);
  const auto both = union_masks({a, b});
  EXPECT_EQ(both.count(), a.count() + b.count());
  EXPECT_EQ(union_masks({a, a}), a);
  EXPECT_EQ(union_masks({a, Mask(30, 30)}), a);
  EXPECT_THROW(union_masks({a, Mask(3, 3)}), DimensionMismatch);
}

TEST(Traces, LoadSetsSourceToFilename) {
  fixtures::TempDir dir;
  write_file(dir / "cell_traces.ndf", ndf("// Tracing N1\n1\n0\n0\nx\n// Segment 1 of Tracing N1\n1\n1\n3\n3\n"));
  EXPECT_EQ(load_traces((dir / "cell_traces.ndf").string()).source, "cell_traces.ndf");
  EXPECT_THROW(load_traces((dir / "nope.ndf").string()), IoError);
}
