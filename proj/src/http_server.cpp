#include "farsec/http_server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "farsec/error.hpp"
#include "farsec/service.hpp"

namespace farsec {

using nlohmann::json;

namespace {

constexpr auto kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

/// Runs `fn`, mapping library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn fn) {
  try {
    fn();
  } catch (const NotFoundError& e) {
    reply(res, 404, json{{"error", e.what()}});
  } catch (const Error& e) {
    reply(res, 400, json{{"error", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, json{{"error", std::string("bad request body: ") + e.what()}});
  }
}

std::string sse_event(const char* name, const json& body) {
  return std::string("event: ") + name + "\nid: " + body.at("version").dump() +
         "\ndata: " + body.dump() + "\n\n";
}

const json& member(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name)) {
    throw ValidationError(std::string("request body lacks '") + name + "'");
  }
  return body.at(name);
}

}  // namespace

HttpServer::HttpServer(Service& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  if (static_dir) {
    server_->set_mount_point("/", static_dir->string());
  }
  routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server_->Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(service_.snapshot()->dump(), kJson);
  });

  server_->Post("/api/link-security", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      const auto version =
          service_.set_link_security(member(body, "src").get<std::string>(),
                                     member(body, "dst").get<std::string>(),
                                     member(body, "level").get<SecurityLevel>());
      reply(res, 202, json{{"version", version}});
    });
  });

  server_->Post("/api/flows", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      const auto d = service_.inject_flow(member(body, "source-host").get<std::string>(),
                                          member(body, "dest-host").get<std::string>(),
                                          member(body, "header-hex").get<std::string>());
      reply(res, 200,
            json{{"flow_id", d.flow_id},
                 {"admitted", d.admitted},
                 {"path", d.admitted ? json(d.path) : json(nullptr)},
                 {"requirement", d.requirement},
                 {"version", d.version}});
    });
  });

  server_->Put("/api/sla", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 202, json{{"version", service_.update_sla(req.body)}}); });
  });

  server_->Get("/api/events", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = service_.subscribe();
    auto first = std::make_shared<bool>(true);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, sub, first](std::size_t, httplib::DataSink& sink) {
          if (*first) {
            *first = false;
            const auto text = sse_event("snapshot", *sub->base());
            return sink.write(text.data(), text.size());
          }
          if (stopping_) {
            sink.done();
            return true;
          }
          if (auto delta = sub->next(std::chrono::milliseconds(200))) {
            const auto text = sse_event("delta", *delta);
            return sink.write(text.data(), text.size());
          }
          if (sub->closed()) {
            sink.done();
          }
          return true;
        },
        [sub](bool) { sub->close(); });
  });
}

int HttpServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : port;
  if (port != 0 && !server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  if (bound < 0) {
    throw Error("cannot bind " + host);
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    if (!stopping_) {
      throw Error("cannot listen on " + host + ":" + std::to_string(port));
    }
  }
}

void HttpServer::stop() {
  stopping_ = true;
  server_->stop();
  if (thread_.joinable()) {
    thread_.join();
  }
}

}  // namespace farsec
