#include "synapcount/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "synapcount/error.hpp"

namespace synapcount::synthetic {

namespace {

constexpr int kAttemptsPerItem = 4000;

class Planter {
 public:
  explicit Planter(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// A polyline crossing the frame along a random direction, with integer
// vertices so it survives an NDF round trip unchanged.
DendriteTrace make_dendrite(Planter& rng, int id, const NeuronSpec& spec, double margin) {
  const double w = spec.width, h = spec.height;
  if (spec.horizontal) {
    const double y = std::round(h * id / (spec.dendrites + 1));
    return {id, "dendrite " + std::to_string(id), {{std::round(margin), y}, {std::round(w - margin), y}}};
  }
  const double cx = rng.uniform(0.35 * w, 0.65 * w);
  const double cy = rng.uniform(0.35 * h, 0.65 * h);
  const double angle = rng.uniform(0.0, std::numbers::pi);
  const double dx = std::cos(angle), dy = std::sin(angle);
  const double half = 0.45 * std::min(w, h);
  const int vertices = rng.uniform_int(3, 5);
  DendriteTrace t;
  t.id = id;
  t.name = "dendrite " + std::to_string(id);
  for (int i = 0; i < vertices; ++i) {
    const double s = -half + 2.0 * half * i / (vertices - 1);
    const double jitter = (i == 0 || i == vertices - 1) ? 0.0 : rng.uniform(-0.08, 0.08) * std::min(w, h);
    const double x = std::clamp(cx + s * dx - jitter * dy, margin, w - margin);
    const double y = std::clamp(cy + s * dy + jitter * dx, margin, h - margin);
    const Point p{std::round(x), std::round(y)};
    if (t.points.empty() || !(t.points.back() == p)) t.points.push_back(p);
  }
  return t;
}

Point point_along(const DendriteTrace& t, double arc) {
  for (std::size_t i = 1; i < t.points.size(); ++i) {
    const auto& a = t.points[i - 1];
    const auto& b = t.points[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (arc <= len && len > 0) return {a.x + (b.x - a.x) * arc / len, a.y + (b.y - a.y) * arc / len};
    arc -= len;
  }
  return t.points.back();
}

void paint_disc(GrayImage& img, Point c, double radius, int lo, int hi, Planter& rng) {
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - radius)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(c.x + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - radius)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(c.y + radius)));
  const int scale = img.bit_depth() == 16 ? 257 : 1;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (std::hypot(x + 0.5 - c.x, y + 0.5 - c.y) <= radius)
        img.set(x, y, static_cast<std::uint16_t>(rng.uniform_int(lo, hi) * scale));
}

bool clear_of(const std::vector<Point>& placed, Point p, double gap) {
  return std::all_of(placed.begin(), placed.end(), [&](const Point& q) { return std::hypot(p.x - q.x, p.y - q.y) >= gap; });
}

}  // namespace

int calibrated_threshold(const NeuronSpec& spec) { return (spec.background_max + spec.signal_min) / 2; }

Neuron generate(const NeuronSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0 || spec.dendrites < 1 || spec.puncta < 0)
    throw ValueError("invalid synthetic neuron parameters");
  if (spec.punctum_radius < 1.0 || spec.punctum_radius >= spec.thickness_px / 2.0)
    throw ValueError("punctum radius must be >= 1 and fit inside the tube");
  if (spec.background_max >= spec.signal_min || spec.signal_min > 255)
    throw ValueError("signal must be brighter than background");

  Planter rng(spec.seed);
  const double tube_radius = spec.thickness_px / 2.0;
  const double margin = tube_radius + 2.0;
  Neuron n;
  n.red = GrayImage(spec.width, spec.height, spec.bit_depth);
  n.green = GrayImage(spec.width, spec.height, spec.bit_depth);
  const int scale = spec.bit_depth == 16 ? 257 : 1;
  for (auto* img : {&n.red, &n.green})
    for (auto& v : img->pixels()) v = static_cast<std::uint16_t>(rng.uniform_int(0, spec.background_max) * scale);

  n.traces.source = "synthetic";
  for (int d = 1; d <= spec.dendrites; ++d) n.traces.traces.push_back(make_dendrite(rng, d, spec, margin));
  std::vector<double> lengths;
  double total = 0.0;
  for (const auto& t : n.traces.traces) {
    lengths.push_back(trace_length_px(t));
    total += lengths.back();
  }

  auto distance_to_all = [&](Point p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : n.traces.traces) best = std::min(best, distance_to_polyline(t, p));
    return best;
  };
  auto random_on_trace = [&](int& dendrite_id) {
    double arc = rng.uniform(0.0, total);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (arc <= lengths[i] || i + 1 == lengths.size()) {
        dendrite_id = n.traces.traces[i].id;
        return point_along(n.traces.traces[i], std::min(arc, lengths[i]));
      }
      arc -= lengths[i];
    }
    return n.traces.traces.back().points.back();
  };

  // Centre spacing keeps discs apart by min_gap_px even under 8-connectivity.
  const double spacing = 2.0 * spec.punctum_radius + spec.min_gap_px + std::numbers::sqrt2;
  std::vector<Point> occupied;
  for (int k = 0; k < spec.puncta; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttemptsPerItem && !placed; ++attempt) {
      int id = 0;
      const Point p = random_on_trace(id);
      if (!clear_of(occupied, p, spacing)) continue;
      occupied.push_back(p);
      n.puncta.push_back({p, id});
      placed = true;
    }
    if (!placed) throw ValueError("cannot place " + std::to_string(spec.puncta) + " puncta with the requested clearance");
  }

  for (int k = 0; k < spec.single_channel_distractors; ++k)
    for (int attempt = 0; attempt < kAttemptsPerItem; ++attempt) {
      int id = 0;
      const Point p = random_on_trace(id);
      if (!clear_of(occupied, p, spacing)) continue;
      occupied.push_back(p);
      n.single_channel.push_back(p);
      break;
    }

  const double off_tube_clearance = tube_radius + spec.punctum_radius + 1.5;
  for (int k = 0; k < spec.off_tube_distractors; ++k)
    for (int attempt = 0; attempt < kAttemptsPerItem; ++attempt) {
      const Point p{rng.uniform(spec.punctum_radius, spec.width - spec.punctum_radius),
                    rng.uniform(spec.punctum_radius, spec.height - spec.punctum_radius)};
      if (distance_to_all(p) < off_tube_clearance || !clear_of(n.off_tube, p, spacing)) continue;
      n.off_tube.push_back(p);
      break;
    }

  for (const auto& p : n.puncta) {
    paint_disc(n.red, p.center, spec.punctum_radius, spec.signal_min, 255, rng);
    paint_disc(n.green, p.center, spec.punctum_radius, spec.signal_min, 255, rng);
  }
  for (const auto& p : n.off_tube) {
    paint_disc(n.red, p, spec.punctum_radius, spec.signal_min, 255, rng);
    paint_disc(n.green, p, spec.punctum_radius, spec.signal_min, 255, rng);
  }
  for (std::size_t k = 0; k < n.single_channel.size(); ++k)
    paint_disc(k % 2 == 0 ? n.red : n.green, n.single_channel[k], spec.punctum_radius, spec.signal_min, 255, rng);
  return n;
}

}  // namespace synapcount::synthetic
