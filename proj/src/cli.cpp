#include "synapcount/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "synapcount/batch.hpp"
#include "synapcount/detect.hpp"
#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/log.hpp"
#include "synapcount/report.hpp"
#include "synapcount/server.hpp"

namespace synapcount::cli {

namespace {

struct InputFlags {
  std::string red, green, traces;
  std::string red_channel = "red", green_channel = "green";
  double scale = 0.0, thickness = 0.0;
  int tr = -1, tg = -1;
  std::string mode = "global";
  int min_area = 1;
  int connectivity = 8;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--red", red, "TIFF with the first marker")->required()->check(CLI::ExistingFile);
    cmd->add_option("--green", green, "TIFF with the second marker")->required()->check(CLI::ExistingFile);
    cmd->add_option("--traces", traces, "NeuronJ .ndf or JSON traces")->required()->check(CLI::ExistingFile);
    cmd->add_option("--scale", scale, "micrometres per pixel")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--thickness", thickness, "mean dendrite thickness in micrometres")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tr", tr, "red threshold 0..255")->required()->check(CLI::Range(0, 255));
    cmd->add_option("--tg", tg, "green threshold 0..255")->required()->check(CLI::Range(0, 255));
    cmd->add_option("--mode", mode, "global or per-dendrite")->check(CLI::IsMember({"global", "per-dendrite"}));
    cmd->add_option("--min-area", min_area, "smallest counted component, pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--connectivity", connectivity, "4 or 8")->check(CLI::IsMember({4, 8}));
    cmd->add_option("--red-channel", red_channel, "plane to take when the red file is RGB")
        ->check(CLI::IsMember({"red", "green", "blue"}));
    cmd->add_option("--green-channel", green_channel, "plane to take when the green file is RGB")
        ->check(CLI::IsMember({"red", "green", "blue"}));
  }

  AnalysisConfig config() const {
    AnalysisConfig cfg;
    cfg.scale = scale;
    cfg.thickness = thickness;
    cfg.threshold_red = tr;
    cfg.threshold_green = tg;
    cfg.min_area = min_area;
    cfg.connectivity = parse_connectivity(connectivity);
    cfg.mode = parse_mode(mode);
    cfg.validate();
    return cfg;
  }
};

struct Loaded {
  GrayImage red, green;
  TraceSet traces;
  InputFiles inputs;
};

Loaded load_inputs(const InputFlags& f) {
  namespace fs = std::filesystem;
  Loaded in;
  in.red = load_tiff(f.red, parse_channel(f.red_channel));
  in.green = load_tiff(f.green, parse_channel(f.green_channel));
  std::vector<std::string> warnings;
  in.traces = load_traces(f.traces, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}: {}", f.traces, w);
  in.inputs = {fs::path(f.red).filename().string(), fs::path(f.green).filename().string(),
               fs::path(f.traces).filename().string()};
  return in;
}

int cmd_analyze(const InputFlags& f, const std::string& csv_path, const std::string& json_path,
                const std::string& overlay_path, const std::string& marks_path, std::ostream& out) {
  const auto cfg = f.config();
  const auto in = load_inputs(f);
  const auto region = prepare_region(in.red, in.green, in.traces, cfg);
  const auto report = analyze_region(region, in.traces, cfg, in.inputs);

  const auto csv = to_csv(report);
  if (!csv_path.empty()) write_file(csv_path, csv);
  if (!json_path.empty()) write_file(json_path, to_json(report) + "\n");
  if (!overlay_path.empty() || !marks_path.empty()) {
    const auto overlay = render_region_overlay(region.red8, region.green8, region.region);
    if (!overlay_path.empty()) save_png(overlay, overlay_path);
    if (!marks_path.empty()) {
      std::vector<Point> centroids;
      for (const auto& s : report.synapses) centroids.push_back(s.centroid);
      save_png(render_marked_synapses(overlay, centroids), marks_path);
    }
  }
  // Header plus the whole-neuron row.
  out << kCsvHeader << '\n' << csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  return kSuccess;
}

int cmd_preview(const InputFlags& f, const std::string& png_path, std::ostream& out) {
  const auto cfg = f.config();
  const auto in = load_inputs(f);
  const auto region = prepare_region(in.red, in.green, in.traces, cfg);
  const auto candidates = colocalization_mask(region.red8, region.green8, region.region, cfg.threshold_red,
                                              cfg.threshold_green);
  save_png(render_candidate_preview(region.red8, region.green8, region.region, candidates), png_path);
  out << "candidates " << candidates.count() << " of " << region.region.count() << " region pixels\n";
  return kSuccess;
}

int cmd_batch(const std::string& dir, const std::string& config_path, const std::string& csv_path,
              const std::string& json_path, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(config_path);
  const auto report = run_batch(dir, cfg);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  for (const auto& n : report.neurons)
    if (!n.report) err << "warning: " << n.stem << ": " << n.error << '\n';
  if (report.succeeded() == 0) throw ValueError("every group failed to analyze");

  write_file(csv_path, batch_to_csv(report));
  if (!json_path.empty()) {
    std::string json = "{\"neurons\":[";
    bool first = true;
    for (const auto& n : report.neurons) {
      if (!n.report) continue;
      json += (first ? "" : ",") + std::string("{\"neuron\":\"") + n.stem + "\",\"report\":" + to_json(*n.report) + "}";
      first = false;
    }
    json += "]}\n";
    write_file(json_path, json);
  }
  char summary[128];
  std::snprintf(summary, sizeof summary, "%zu neurons, mean count %.2f", report.succeeded(), report.mean_count);
  out << summary;
  if (report.failed()) out << ", " << report.failed() << " failed";
  out << '\n';
  return kSuccess;
}

int cmd_serve(const ServerOptions& opts, std::ostream& out, std::ostream& err) {
  // Route SIGINT/SIGTERM to a waiter thread; the server threads inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(opts);
  if (!server.bind()) {
    err << "error: cannot listen on " << opts.host << ":" << opts.port << " (port in use?)\n";
    return kRuntimeFailure;
  }
  std::thread([&server, signals]() {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  }).detach();
  out << "serving on http://" << opts.host << ":" << server.port() << std::endl;
  server.listen();
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  init_logging_from_env();
  CLI::App app{"Counts synapses on traced dendrites from two fluorescence marker channels."};
  app.name(args.empty() ? "synapcount" : args.front());
  app.require_subcommand(1);

  InputFlags analyze_flags;
  std::string csv_path, json_path, overlay_path, marks_path;
  auto* analyze_cmd = app.add_subcommand("analyze", "count synapses on one neuron");
  analyze_flags.add_to(analyze_cmd);
  analyze_cmd->add_option("--out", csv_path, "results table (CSV)");
  analyze_cmd->add_option("--json", json_path, "full report (JSON)");
  analyze_cmd->add_option("--overlay", overlay_path, "analyzed-region image (PNG)");
  analyze_cmd->add_option("--marks", marks_path, "image with a cross on every synapse (PNG)");

  InputFlags preview_flags;
  std::string preview_path;
  auto* preview_cmd = app.add_subcommand("preview", "render threshold candidates over the dendrite region");
  preview_flags.add_to(preview_cmd);
  preview_cmd->add_option("--out", preview_path, "preview image (PNG)")->required();

  std::string batch_dir, batch_config, batch_out, batch_json;
  auto* batch_cmd = app.add_subcommand("batch", "analyze every neuron group in a folder with one configuration");
  batch_cmd->add_option("--dir", batch_dir, "folder of <stem>_red/_green/_traces files")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch_cmd->add_option("--config", batch_config, "configuration JSON")->required()->check(CLI::ExistingFile);
  batch_cmd->add_option("--out", batch_out, "batch table (CSV)")->required();
  batch_cmd->add_option("--json", batch_json, "per-neuron reports (JSON)");

  ServerOptions serve_opts;
  std::string static_dir;
  std::size_t max_upload_mb = 64;
  int idle_minutes = 30;
  auto* serve_cmd = app.add_subcommand("serve", "run the local HTTP service for the threshold console");
  serve_cmd->add_option("--port", serve_opts.port, "TCP port")->capture_default_str()->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve_opts.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "directory of UI assets served at /")->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--max-upload-mb", max_upload_mb, "upload size limit")->capture_default_str();
  serve_cmd->add_option("--idle-timeout-min", idle_minutes, "session idle expiry")->capture_default_str();

  std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kSuccess;
    }
    err << "error: " << e.what() << '\n';
    err << app.help() << std::flush;
    return kUsageError;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze_flags, csv_path, json_path, overlay_path, marks_path, out);
    if (*preview_cmd) return cmd_preview(preview_flags, preview_path, out);
    if (*batch_cmd) return cmd_batch(batch_dir, batch_config, batch_out, batch_json, out, err);
    if (*serve_cmd) {
      if (!static_dir.empty()) serve_opts.static_dir = static_dir;
      serve_opts.max_upload_bytes = max_upload_mb * 1024u * 1024u;
      serve_opts.idle_timeout = std::chrono::minutes(idle_minutes);
      return cmd_serve(serve_opts, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace synapcount::cli
