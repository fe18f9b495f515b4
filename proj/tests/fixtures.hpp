#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "synapcount/batch.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/synthetic.hpp"

namespace fixtures {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "synapcount") {
    std::random_device rd;
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// One horizontal dendrite, 7 puncta, 3 off-tube and 2 single-channel distractors.
inline synapcount::synthetic::NeuronSpec planted_seven(std::uint64_t seed = 11) {
  synapcount::synthetic::NeuronSpec s;
  s.width = 160;
  s.height = 96;
  s.dendrites = 1;
  s.horizontal = true;
  s.puncta = 7;
  s.off_tube_distractors = 3;
  s.single_channel_distractors = 2;
  s.seed = seed;
  return s;
}

// Config matching a generated neuron: thickness converted from pixels to µm.
inline synapcount::AnalysisConfig config_for(const synapcount::synthetic::NeuronSpec& s, double scale = 0.09) {
  synapcount::AnalysisConfig c;
  c.scale = scale;
  c.thickness = s.thickness_px * scale;
  c.threshold_red = c.threshold_green = synapcount::synthetic::calibrated_threshold(s);
  return c;
}

// Writes <stem>_red.tif, <stem>_green.tif and <stem>_traces.ndf.
inline void write_group(const fs::path& dir, const std::string& stem, const synapcount::synthetic::Neuron& n) {
  synapcount::save_tiff(n.red, dir / (stem + "_red.tif"));
  synapcount::save_tiff(n.green, dir / (stem + "_green.tif"));
  synapcount::write_file(dir / (stem + "_traces.ndf"), synapcount::traces_to_ndf(n.traces));
}

}  // namespace fixtures
