#include <algorithm>
#include <cmath>
#include <numeric>

#include "synapcount/kernels.hpp"

namespace synapcount::kernels {

std::vector<Segment> segments_of(const DendriteTrace& trace) {
  std::vector<Segment> out;
  const auto& pts = trace.points;
  if (pts.size() == 1) {
    out.push_back({pts[0], pts[0]});
    return out;
  }
  for (std::size_t i = 1; i < pts.size(); ++i) out.push_back({pts[i - 1], pts[i]});
  return out;
}

double squared_distance_to_segment(const Segment& s, Point p) {
  const double dx = s.b.x - s.a.x;
  const double dy = s.b.y - s.a.y;
  const double px = p.x - s.a.x;
  const double py = p.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  const double t = px * dx + py * dy;
  if (len2 == 0.0 || t <= 0.0) return px * px + py * py;
  if (t >= len2) {
    const double qx = p.x - s.b.x;
    const double qy = p.y - s.b.y;
    return qx * qx + qy * qy;
  }
  // Perpendicular foot lies inside the segment.
  const double cross = px * dy - py * dx;
  return cross * cross / len2;
}

namespace serial {

void normalize_full_range(std::span<const std::uint16_t> in, std::span<std::uint16_t> out) {
  // round(v / 257); 257 is odd so v / 257 never lands on .5
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<std::uint16_t>((2u * in[i] + 257u) / 514u);
}

void normalize_min_max(std::span<const std::uint16_t> in, std::span<std::uint16_t> out) {
  if (in.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(in.begin(), in.end());
  const std::uint32_t lo = *lo_it;
  const std::uint32_t range = *hi_it - lo;
  if (range == 0) {
    std::fill(out.begin(), out.end(), std::uint16_t{0});
    return;
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::uint64_t v = in[i] - lo;
    out[i] = static_cast<std::uint16_t>((v * 510u + range) / (2u * range));
  }
}

void colocalize(std::span<const std::uint16_t> red, std::span<const std::uint16_t> green,
                std::span<const std::uint8_t> region, int t_red, int t_green, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < region.size(); ++i)
    out[i] = (region[i] && red[i] >= t_red && green[i] >= t_green) ? 1 : 0;
}

void rasterize_tube(std::span<const Segment> segments, double radius, Mask& mask) {
  const double r2 = radius * radius;
  for (const auto& s : segments) {
    // Pixel centres i + 0.5 inside [min - r, max + r].
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(s.a.x, s.b.x) - radius - 0.5)));
    const int x1 = std::min(mask.width() - 1, static_cast<int>(std::floor(std::max(s.a.x, s.b.x) + radius - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(s.a.y, s.b.y) - radius - 0.5)));
    const int y1 = std::min(mask.height() - 1, static_cast<int>(std::floor(std::max(s.a.y, s.b.y) + radius - 0.5)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (squared_distance_to_segment(s, {x + 0.5, y + 0.5}) <= r2) mask.set(x, y);
  }
}

namespace {

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

}  // namespace

Labeling label_components(const Mask& mask, int connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Labeling out;
  out.labels.assign(mask.size(), 0);
  if (mask.size() == 0) return out;

  // Pass 1: provisional labels with an equivalence forest.
  std::vector<int> parent{0};
  auto& lab = out.labels;
  const auto bits = mask.bits();
  auto merge = [&](int a, int b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = mask.index(x, y);
      if (!bits[p]) continue;
      int neighbours[4];
      int n = 0;
      if (x > 0 && lab[p - 1]) neighbours[n++] = lab[p - 1];
      if (y > 0) {
        const std::size_t up = p - static_cast<std::size_t>(w);
        if (lab[up]) neighbours[n++] = lab[up];
        if (connectivity == 8) {
          if (x > 0 && lab[up - 1]) neighbours[n++] = lab[up - 1];
          if (x + 1 < w && lab[up + 1]) neighbours[n++] = lab[up + 1];
        }
      }
      if (n == 0) {
        const int fresh = static_cast<int>(parent.size());
        parent.push_back(fresh);
        lab[p] = fresh;
        continue;
      }
      int smallest = *std::min_element(neighbours, neighbours + n);
      lab[p] = smallest;
      for (int i = 0; i < n; ++i) merge(smallest, neighbours[i]);
    }
  }

  // Pass 2: final ids in order of first appearance.
  std::vector<int> final_id(parent.size(), 0);
  int next = 0;
  for (auto& l : lab) {
    if (!l) continue;
    const int root = find_root(parent, l);
    if (!final_id[root]) final_id[root] = ++next;
    l = final_id[root];
  }
  out.count = next;
  return out;
}

}  // namespace serial
}  // namespace synapcount::kernels
