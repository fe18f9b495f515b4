#include "synapcount/server.hpp"

#include <sys/socket.h>

#include <charconv>
#include <random>
#include <set>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "json_util.hpp"
#include "synapcount/batch.hpp"
#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/report.hpp"

namespace synapcount {

namespace {

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::string error_json(const std::string& message) { return nlohmann::json{{"error", message}}.dump(); }

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(error_json(message), "application/json");
}

// Strict 0..255 query parameter; nullopt when absent or malformed.
std::optional<int> threshold_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const auto text = req.get_param_value(name);
  int v = -1;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 0 || v > 255) return std::nullopt;
  return v;
}

bool is_local_origin(const std::string& origin) {
  for (const char* prefix : {"http://localhost", "http://127.0.0.1", "http://[::1]"}) {
    const std::string p(prefix);
    if (origin.compare(0, p.size(), p) == 0 && (origin.size() == p.size() || origin[p.size()] == ':')) return true;
  }
  return false;
}

AnalysisConfig with_thresholds(AnalysisConfig cfg, int t_red, int t_green) {
  cfg.threshold_red = t_red;
  cfg.threshold_green = t_green;
  return cfg;
}

}  // namespace

SessionStore::SessionStore(std::chrono::seconds idle_timeout) : idle_timeout_(idle_timeout) {}

std::shared_ptr<const Session> SessionStore::create(const SessionUpload& upload) {
  auto s = std::make_shared<Session>();
  s->inputs = {upload.red_name, upload.green_name, upload.traces_name};
  s->base_config = analysis_config_from_json(upload.config_json);

  auto decode = [](const std::vector<std::uint8_t>& bytes, const std::string& name, Channel channel) {
    try {
      return decode_tiff(bytes, channel);
    } catch (const Error& e) {
      throw ParseError(name + ": " + e.what());
    }
  };
  const auto red = decode(upload.red_bytes, upload.red_name.empty() ? "red" : upload.red_name, Channel::red);
  const auto green = decode(upload.green_bytes, upload.green_name.empty() ? "green" : upload.green_name, Channel::green);
  try {
    s->traces = parse_traces(upload.traces_text);
  } catch (const Error& e) {
    throw ParseError((upload.traces_name.empty() ? "traces" : upload.traces_name) + ": " + e.what());
  }
  s->traces.source = upload.traces_name;
  s->region = prepare_region(red, green, s->traces, s->base_config);
  s->created_at = std::chrono::steady_clock::now();
  s->id = new_session_id();

  std::lock_guard lock(mutex_);
  sessions_[s->id] = {s, s->created_at};
  return s;
}

std::shared_ptr<const Session> SessionStore::find(const std::string& id) {
  const auto now = std::chrono::steady_clock::now();
  expire(now);
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second.last_access = now;
  return it->second.session;
}

std::size_t SessionStore::size() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionStore::expire(std::chrono::steady_clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second.last_access > idle_timeout_; });
}

std::vector<std::uint8_t> session_preview_png(const Session& s, int t_red, int t_green) {
  const auto& r = s.region;
  const auto candidates = colocalization_mask(r.red8, r.green8, r.region, t_red, t_green);
  return encode_png(render_candidate_preview(r.red8, r.green8, r.region, candidates));
}

std::vector<std::uint8_t> session_marks_png(const Session& s, int t_red, int t_green) {
  const auto report = analyze_region(s.region, s.traces, with_thresholds(s.base_config, t_red, t_green), s.inputs);
  std::vector<Point> centroids;
  for (const auto& syn : report.synapses) centroids.push_back(syn.centroid);
  const auto& r = s.region;
  return encode_png(render_marked_synapses(render_region_overlay(r.red8, r.green8, r.region), centroids));
}

struct Server::Impl {
  ServerOptions options;
  httplib::Server http;
  SessionStore store;
  int bound_port = -1;

  explicit Impl(ServerOptions opts) : options(std::move(opts)), store(options.idle_timeout) {}

  std::shared_ptr<const Session> session_or_404(const httplib::Request& req, httplib::Response& res) {
    auto s = store.find(req.path_params.at("id"));
    if (!s) reply_error(res, 404, "unknown session");
    return s;
  }

  void routes() {
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    http.set_payload_max_length(options.max_upload_bytes);

    http.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (is_local_origin(origin)) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
      }
    });
    http.Options(R"(.*)", [](const httplib::Request& req, httplib::Response& res) {
      if (is_local_origin(req.get_header_value("Origin"))) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
      res.status = 204;
    });

    http.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

    http.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
      for (const char* part : {"red", "green", "traces", "config"})
        if (!req.has_file(part)) return reply_error(res, 400, std::string("missing multipart part '") + part + "'");
      const auto red = req.get_file_value("red");
      const auto green = req.get_file_value("green");
      const auto traces = req.get_file_value("traces");
      SessionUpload up;
      up.red_name = red.filename.empty() ? "red" : red.filename;
      up.green_name = green.filename.empty() ? "green" : green.filename;
      up.traces_name = traces.filename.empty() ? "traces" : traces.filename;
      up.red_bytes.assign(red.content.begin(), red.content.end());
      up.green_bytes.assign(green.content.begin(), green.content.end());
      up.traces_text = traces.content;
      up.config_json = req.get_file_value("config").content;
      try {
        const auto s = store.create(up);
        nlohmann::ordered_json body;
        body["id"] = s->id;
        body["width"] = s->region.red8.width();
        body["height"] = s->region.red8.height();
        auto& dendrites = body["dendrites"] = nlohmann::ordered_json::array();
        for (const auto& t : s->traces.traces)
          dendrites.push_back(
              {{"id", t.id}, {"name", t.name}, {"length_um", px_to_microns(trace_length_px(t), s->base_config.scale)}});
        res.set_content(body.dump(), "application/json");
        spdlog::info("session {} created ({}x{}, {} dendrites)", s->id, s->region.red8.width(),
                     s->region.red8.height(), s->traces.traces.size());
      } catch (const Error& e) {
        reply_error(res, 400, e.what());
      }
    });

    auto png_route = [this](auto render) {
      return [this, render](const httplib::Request& req, httplib::Response& res) {
        const auto s = session_or_404(req, res);
        if (!s) return;
        const auto tr = threshold_param(req, "tr");
        const auto tg = threshold_param(req, "tg");
        if (!tr || !tg) return reply_error(res, 400, "tr and tg must be integers in 0..255");
        const auto png = render(*s, *tr, *tg);
        res.set_content(std::string(png.begin(), png.end()), "image/png");
      };
    };
    http.Get("/session/:id/preview", png_route(session_preview_png));
    http.Get("/session/:id/marks", png_route(session_marks_png));

    http.Post("/session/:id/analyze", [this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session_or_404(req, res);
      if (!s) return;
      try {
        const auto body = detail::parse_json(req.body.empty() ? "{}" : req.body);
        if (!body.is_object()) return reply_error(res, 400, "expected a JSON object");
        // Start from the upload's configuration; the body may override counting knobs only.
        auto merged = detail::analysis_to_json(s->base_config);
        static const std::set<std::string> allowed{"threshold_red", "threshold_green", "mode", "min_area",
                                                   "connectivity"};
        for (const auto& [key, value] : body.items()) {
          if (!allowed.count(key)) return reply_error(res, 400, key + ": unknown field");
          merged[key] = value;
        }
        const auto cfg = detail::analysis_from_json(nlohmann::json::parse(merged.dump()), "");
        const auto report = analyze_region(s->region, s->traces, cfg, s->inputs);
        res.set_content(to_json(report), "application/json");
      } catch (const Error& e) {
        reply_error(res, 400, e.what());
      }
    });

    if (options.static_dir && !http.set_mount_point("/", options.static_dir->string()))
      throw IoError("static directory " + options.static_dir->string() + " does not exist");
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) { impl_->routes(); }

Server::~Server() { stop(); }

bool Server::bind() {
  const int port = impl_->options.port == 0 ? impl_->http.bind_to_any_port(impl_->options.host)
                                            : (impl_->http.bind_to_port(impl_->options.host, impl_->options.port)
                                                   ? impl_->options.port
                                                   : -1);
  impl_->bound_port = port;
  return port > 0;
}

int Server::port() const { return impl_->bound_port; }

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

SessionStore& Server::sessions() { return impl_->store; }

}  // namespace synapcount
