#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace farsec {

class Service;

/// HTTP/JSON front end of a Service.
///
///   GET  /api/state          current snapshot
///   POST /api/link-security  {"src","dst","level"} -> 202 {"version"}
///   POST /api/flows          {"source-host","dest-host","header-hex"}
///                            -> {"flow_id","admitted","path","requirement","version"}
///   PUT  /api/sla            SLA CSV body -> 202 {"version"}
///   GET  /api/events         text/event-stream; first a "snapshot" event, then
///                            one "delta" event per version
///
/// Errors answer {"error": message} with 400 (malformed input) or 404
/// (unknown link or host).
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::optional<std::filesystem::path> static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free one) and serves on a background thread.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  void routes();

  Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
};

}  // namespace farsec
