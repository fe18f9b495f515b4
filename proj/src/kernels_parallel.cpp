#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "synapcount/kernels.hpp"

namespace synapcount::kernels::parallel {

void normalize_full_range(std::span<const std::uint16_t> in, std::span<std::uint16_t> out) {
  const auto n = static_cast<std::int64_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>((2u * in[i] + 257u) / 514u);
}

void normalize_min_max(std::span<const std::uint16_t> in, std::span<std::uint16_t> out) {
  const auto n = static_cast<std::int64_t>(in.size());
  if (n == 0) return;
  std::uint32_t lo = std::numeric_limits<std::uint16_t>::max();
  std::uint32_t hi = 0;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
  for (std::int64_t i = 0; i < n; ++i) {
    lo = std::min<std::uint32_t>(lo, in[i]);
    hi = std::max<std::uint32_t>(hi, in[i]);
  }
  const std::uint32_t range = hi - lo;
  if (range == 0) {
    std::fill(out.begin(), out.end(), std::uint16_t{0});
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t v = in[i] - lo;
    out[i] = static_cast<std::uint16_t>((v * 510u + range) / (2u * range));
  }
}

void colocalize(std::span<const std::uint16_t> red, std::span<const std::uint16_t> green,
                std::span<const std::uint8_t> region, int t_red, int t_green, std::span<std::uint8_t> out) {
  const auto n = static_cast<std::int64_t>(region.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = (region[i] && red[i] >= t_red && green[i] >= t_green) ? 1 : 0;
}

void rasterize_tube(std::span<const Segment> segments, double radius, Mask& mask) {
  const double r2 = radius * radius;
  const int w = mask.width();
  const int h = mask.height();
  // Rows are independent: each thread owns whole rows of the mask.
#pragma omp parallel for schedule(dynamic, 8)
  for (int y = 0; y < h; ++y) {
    const double cy = y + 0.5;
    for (const auto& s : segments) {
      if (cy < std::min(s.a.y, s.b.y) - radius || cy > std::max(s.a.y, s.b.y) + radius) continue;
      const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(s.a.x, s.b.x) - radius - 0.5)));
      const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max(s.a.x, s.b.x) + radius - 0.5)));
      for (int x = x0; x <= x1; ++x)
        if (squared_distance_to_segment(s, {x + 0.5, cy}) <= r2) mask.set(x, y);
    }
  }
}

namespace {

// Union-find over pixel indices. Linking the larger root under the smaller
// one keeps every root at its component's first pixel in raster order.
std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

std::int32_t find_root_readonly(const std::vector<std::int32_t>& parent, std::int32_t a) {
  while (parent[a] != a) a = parent[a];
  return a;
}

void unite(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a < b)
    parent[b] = a;
  else if (b < a)
    parent[a] = b;
}

// Joins pixel (x, y) with its already-visited neighbours in rows >= y_min.
void link_pixel(const Mask& mask, std::vector<std::int32_t>& parent, int x, int y, int y_min, int connectivity,
                bool row_above_only) {
  const int w = mask.width();
  const auto bits = mask.bits();
  const auto p = static_cast<std::int32_t>(mask.index(x, y));
  if (!row_above_only && x > 0 && bits[p - 1]) unite(parent, p, p - 1);
  if (y - 1 < y_min) return;
  const std::int32_t up = p - w;
  if (bits[up]) unite(parent, p, up);
  if (connectivity == 8) {
    if (x > 0 && bits[up - 1]) unite(parent, p, up - 1);
    if (x + 1 < w && bits[up + 1]) unite(parent, p, up + 1);
  }
}

}  // namespace

Labeling label_components(const Mask& mask, int connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Labeling out;
  out.labels.assign(mask.size(), 0);
  if (mask.size() == 0) return out;

  const auto bits = mask.bits();
  const int strips = std::max(1, std::min(omp_get_max_threads(), h));
  auto strip_begin = [&](int s) { return static_cast<int>(static_cast<std::int64_t>(h) * s / strips); };

  std::vector<std::int32_t> parent(mask.size());

  // Strips are labeled independently; unions never cross a strip boundary here.
#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const int y0 = strip_begin(s);
    const int y1 = strip_begin(s + 1);
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < w; ++x) {
        const auto p = static_cast<std::int32_t>(mask.index(x, y));
        if (!bits[p]) continue;
        parent[p] = p;
        link_pixel(mask, parent, x, y, y0, connectivity, false);
      }
  }

  // Seams.
  for (int s = 1; s < strips; ++s) {
    const int y = strip_begin(s);
    for (int x = 0; x < w; ++x)
      if (bits[mask.index(x, y)]) link_pixel(mask, parent, x, y, 0, connectivity, true);
  }

  std::vector<std::int32_t> root(mask.size(), -1);
  std::vector<std::int32_t> roots_in_strip(strips, 0);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const auto p0 = static_cast<std::int64_t>(strip_begin(s)) * w;
    const auto p1 = static_cast<std::int64_t>(strip_begin(s + 1)) * w;
    std::int32_t n = 0;
    for (auto p = p0; p < p1; ++p) {
      if (!bits[p]) continue;
      root[p] = find_root_readonly(parent, static_cast<std::int32_t>(p));
      if (root[p] == p) ++n;
    }
    roots_in_strip[s] = n;
  }

  std::vector<std::int32_t> offset(strips + 1, 0);
  for (int s = 0; s < strips; ++s) offset[s + 1] = offset[s] + roots_in_strip[s];
  out.count = offset[strips];

  auto& lab = out.labels;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const auto p0 = static_cast<std::int64_t>(strip_begin(s)) * w;
    const auto p1 = static_cast<std::int64_t>(strip_begin(s + 1)) * w;
    std::int32_t next = offset[s];
    for (auto p = p0; p < p1; ++p)
      if (bits[p] && root[p] == p) lab[p] = ++next;
  }

#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const auto p0 = static_cast<std::int64_t>(strip_begin(s)) * w;
    const auto p1 = static_cast<std::int64_t>(strip_begin(s + 1)) * w;
    for (auto p = p0; p < p1; ++p)
      if (bits[p] && root[p] != p) lab[p] = lab[root[p]];
  }
  return out;
}

}  // namespace synapcount::kernels::parallel
