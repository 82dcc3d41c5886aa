#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "photoscout/service.hpp"

namespace photoscout::service {

struct HttpServer::Impl {
  App& app;
  httplib::Server server;
  std::thread worker;

  explicit Impl(App& a) : app(a) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      const Response r = app.handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      if (r.content_type == "application/json") {
        res.set_content(r.body.dump(), "application/json");
      } else {
        res.set_content(r.raw, r.content_type);
      }
    };
    server.Get(".*", route);
    server.Post(".*", route);
    server.Delete(".*", route);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });
  }
};

HttpServer::HttpServer(App& app) : impl_(std::make_unique<Impl>(app)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

void HttpServer::wait() {
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace photoscout::service
