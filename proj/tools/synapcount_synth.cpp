// Writes synthetic neurons with planted synapses: <stem>_red.tif,
// <stem>_green.tif, <stem>_traces.ndf and <stem>_truth.json per neuron, plus a
// batch config.json with thresholds calibrated to the generated intensities.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synapcount/batch.hpp"
#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/synthetic.hpp"

namespace fs = std::filesystem;
using namespace synapcount;

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic neurons with known synapse counts."};
  synthetic::NeuronSpec spec;
  fs::path out_dir = ".";
  std::string stem = "neuron";
  int count = 1;
  double scale = 0.09;
  app.add_option("--out-dir", out_dir)->capture_default_str();
  app.add_option("--stem", stem, "file prefix; numbered when --count > 1")->capture_default_str();
  app.add_option("--count", count)->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--width", spec.width)->capture_default_str();
  app.add_option("--height", spec.height)->capture_default_str();
  app.add_option("--dendrites", spec.dendrites)->capture_default_str();
  app.add_option("--puncta", spec.puncta)->capture_default_str();
  app.add_option("--off-tube", spec.off_tube_distractors)->capture_default_str();
  app.add_option("--single-channel", spec.single_channel_distractors)->capture_default_str();
  app.add_option("--thickness-px", spec.thickness_px)->capture_default_str();
  app.add_option("--bit-depth", spec.bit_depth)->capture_default_str()->check(CLI::IsMember({8, 16}));
  app.add_flag("--horizontal", spec.horizontal, "straight horizontal dendrites");
  app.add_option("--seed", spec.seed)->capture_default_str();
  app.add_option("--scale", scale, "micrometres per pixel written to config.json")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
      auto s = spec;
      s.seed = spec.seed + static_cast<std::uint64_t>(i);
      const auto n = synthetic::generate(s);
      const std::string name = count > 1 ? stem + std::to_string(i + 1) : stem;
      save_tiff(n.red, out_dir / (name + "_red.tif"));
      save_tiff(n.green, out_dir / (name + "_green.tif"));
      write_file(out_dir / (name + "_traces.ndf"), traces_to_ndf(n.traces));
      nlohmann::ordered_json truth;
      truth["synapses"] = n.puncta.size();
      truth["off_tube_distractors"] = n.off_tube.size();
      truth["single_channel_distractors"] = n.single_channel.size();
      write_file(out_dir / (name + "_truth.json"), truth.dump(2) + "\n");
    }
    BatchConfig cfg;
    cfg.analysis.scale = scale;
    cfg.analysis.thickness = spec.thickness_px * scale;
    cfg.analysis.threshold_red = cfg.analysis.threshold_green = synthetic::calibrated_threshold(spec);
    save_config(cfg, out_dir / "config.json");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
