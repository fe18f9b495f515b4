#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "synapcount/detect.hpp"
#include "synapcount/traces.hpp"

namespace synapcount {

/// Immutable inputs of one interactive analysis. Regions are prepared once at
/// upload; thresholds and counting knobs vary per request.
struct Session {
  std::string id;
  InputFiles inputs;
  TraceSet traces;
  AnalysisConfig base_config;
  Region region;
  std::chrono::steady_clock::time_point created_at;
};

struct SessionUpload {
  std::string red_name, green_name, traces_name;
  std::vector<std::uint8_t> red_bytes, green_bytes;
  std::string traces_text;
  std::string config_json;
};

/// Thread-safe in-memory session table with idle expiry.
class SessionStore {
 public:
  explicit SessionStore(std::chrono::seconds idle_timeout = std::chrono::minutes(30));

  /// Decodes and validates an upload; errors propagate as library exceptions.
  std::shared_ptr<const Session> create(const SessionUpload& upload);
  /// Null when unknown or expired. Refreshes the idle clock.
  std::shared_ptr<const Session> find(const std::string& id);
  std::size_t size();
  /// Drops sessions idle for longer than the timeout as of `now`.
  void expire(std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now());

 private:
  struct Entry {
    std::shared_ptr<const Session> session;
    std::chrono::steady_clock::time_point last_access;
  };
  std::chrono::seconds idle_timeout_;
  std::mutex mutex_;
  std::unordered_map<std::string, Entry> sessions_;
};

/// Candidate preview PNG for thresholds (t_red, t_green).
std::vector<std::uint8_t> session_preview_png(const Session& s, int t_red, int t_green);
/// Region overlay PNG with crosses at the synapses counted at (t_red, t_green).
std::vector<std::uint8_t> session_marks_png(const Session& s, int t_red, int t_green);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8711;  ///< 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::size_t max_upload_bytes = 64u * 1024u * 1024u;
  std::chrono::seconds idle_timeout = std::chrono::minutes(30);
};

/// HTTP front end for the threshold console.
///
///   GET  /health                      -> "ok"
///   POST /session                     multipart red, green, traces, config
///   GET  /session/{id}/preview?tr&tg  -> PNG
///   POST /session/{id}/analyze        JSON {threshold_red, threshold_green, mode, min_area, connectivity}
///   GET  /session/{id}/marks?tr&tg    -> PNG
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the listening socket; false when the port is unavailable.
  bool bind();
  /// Port actually bound (after bind()).
  int port() const;
  /// Serves until stop(); requires a successful bind().
  void listen();
  /// Blocks until listen() is accepting connections (or has returned).
  void wait_until_ready() const;
  void stop();

  SessionStore& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace synapcount
