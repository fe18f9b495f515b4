#include <gtest/gtest.h>
#include <omp.h>

#include <random>

#include "oracles.hpp"
#include "synapcount/kernels.hpp"

using namespace synapcount;
namespace k = synapcount::kernels;

namespace {

// nproc may be 1 on CI; force several strips so seam merging is exercised.
class Kernels : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

// Labels must match the oracle exactly: both number components by first pixel in raster order.
void expect_matches_flood(const k::Labeling& got, const oracle::Flood& want) {
  ASSERT_EQ(got.count, want.count);
  ASSERT_EQ(got.labels.size(), want.labels.size());
  for (std::size_t i = 0; i < want.labels.size(); ++i) ASSERT_EQ(got.labels[i], want.labels[i]) << i;
}

}  // namespace

TEST_F(Kernels, LabelingMatchesFloodFill) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> density(0.1, 0.9);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 1 + rng() % 64, h = 1 + rng() % 64;
    const auto m = oracle::random_mask(rng, w, h, density(rng));
    for (int conn : {4, 8}) {
      const auto want = oracle::flood_fill(m, conn);
      expect_matches_flood(k::serial::label_components(m, conn), want);
      expect_matches_flood(k::parallel::label_components(m, conn), want);
    }
  }
}

TEST_F(Kernels, LabelingAdversarialShapes) {
  // Spiral and comb shapes whose components span many strips.
  Mask comb(40, 64);
  for (int y = 0; y < 64; ++y) comb.set(0, y);
  for (int x = 0; x < 40; x += 2)
    for (int y = 0; y < 64; ++y) comb.set(x, y);
  for (int x = 0; x < 40; ++x) comb.set(x, 63);
  Mask stripes(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) stripes.set(x, y, (x + y) % 3 == 0);
  Mask full(17, 33, true);
  for (const auto* m : {&comb, &stripes, &full})
    for (int conn : {4, 8}) {
      const auto want = oracle::flood_fill(*m, conn);
      expect_matches_flood(k::parallel::label_components(*m, conn), want);
      expect_matches_flood(k::serial::label_components(*m, conn), want);
    }
}

TEST_F(Kernels, LabelingLargeMaskSerialEqualsParallel) {
  std::mt19937_64 rng(2);
  const auto m = oracle::random_mask(rng, 700, 513, 0.45);
  for (int conn : {4, 8}) {
    const auto a = k::serial::label_components(m, conn);
    const auto b = k::parallel::label_components(m, conn);
    EXPECT_EQ(a.count, b.count);
    EXPECT_EQ(a.labels, b.labels);
  }
}

TEST_F(Kernels, LabelingEmptyAndDegenerate) {
  EXPECT_EQ(k::parallel::label_components(Mask(5, 5), 8).count, 0);
  EXPECT_EQ(k::parallel::label_components(Mask(1, 1, true), 4).count, 1);
  EXPECT_EQ(k::serial::label_components(Mask(1, 100, true), 4).count, 1);
}

TEST_F(Kernels, NormalizeSerialEqualsParallel) {
  std::mt19937_64 rng(3);
  std::vector<std::uint16_t> in(100003);
  for (auto& v : in) v = rng() % 65536;
  std::vector<std::uint16_t> a(in.size()), b(in.size());
  k::serial::normalize_full_range(in, a);
  k::parallel::normalize_full_range(in, b);
  EXPECT_EQ(a, b);
  k::serial::normalize_min_max(in, a);
  k::parallel::normalize_min_max(in, b);
  EXPECT_EQ(a, b);
  for (auto v : b) EXPECT_LE(v, 255);
}

TEST_F(Kernels, ColocalizeSerialEqualsParallel) {
  std::mt19937_64 rng(4);
  const std::size_t n = 50000;
  std::vector<std::uint16_t> red(n), green(n);
  std::vector<std::uint8_t> region(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    red[i] = rng() % 256;
    green[i] = rng() % 256;
    region[i] = rng() % 2;
  }
  k::serial::colocalize(red, green, region, 100, 150, a);
  k::parallel::colocalize(red, green, region, 100, 150, b);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(a[i] != 0, region[i] && red[i] >= 100 && green[i] >= 150);
}

TEST_F(Kernels, TubeSerialEqualsParallelAndOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> thick(0.5, 9.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + rng() % 64, h = 1 + rng() % 64;
    const auto t = oracle::random_polyline(rng, w, h);
    const double th = thick(rng);
    const auto segs = k::segments_of(t);
    Mask a(w, h), b(w, h);
    k::serial::rasterize_tube(segs, th / 2, a);
    k::parallel::rasterize_tube(segs, th / 2, b);
    ASSERT_EQ(a, b);
    ASSERT_EQ(a, oracle::brute_tube(t, th, w, h));
  }
}

TEST(Segments, DistanceAgreesWithOracle) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 10000; ++i) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, p{u(rng), u(rng)};
    const double want = oracle::segment_distance(a, b, p);
    EXPECT_NEAR(std::sqrt(k::squared_distance_to_segment({a, b}, p)), want, 1e-9);
  }
  EXPECT_DOUBLE_EQ(k::squared_distance_to_segment({{1, 1}, {1, 1}}, {4, 5}), 25.0);
}
