#pragma once

// In-process HTTP server for gateway and campaign tests. Captures every
// request and answers through a swappable responder.

#ifdef GAMELAB_USE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace testsupport {

struct CapturedCall {
  std::string path;
  std::string body;
  httplib::Headers headers;
};

class MockServer {
 public:
  using Responder = std::function<void(const httplib::Request&, httplib::Response&)>;

  MockServer() {
    responder_ = [](const httplib::Request&, httplib::Response& res) {
      reply_openai(res, "Option A");
    };
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      Responder responder;
      {
        std::lock_guard<std::mutex> lock(mu_);
        calls_.push_back({req.path, req.body, req.headers});
        responder = responder_;
      }
      responder(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  void set_responder(Responder responder) {
    std::lock_guard<std::mutex> lock(mu_);
    responder_ = std::move(responder);
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::vector<CapturedCall> calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
  }

  size_t call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_.size();
  }

  static void reply_openai(httplib::Response& res, const std::string& text) {
    nlohmann::json message = {{"role", "assistant"}, {"content", text}};
    nlohmann::json body = {{"choices", nlohmann::json::array({{{"message", message}}})},
                           {"usage", {{"total_tokens", 42}}}};
    res.set_content(body.dump(), "application/json");
  }

  static void reply_anthropic(httplib::Response& res, const std::string& text) {
    nlohmann::json body = {
        {"content", nlohmann::json::array({{{"type", "text"}, {"text", text}}})},
        {"usage", {{"input_tokens", 30}, {"output_tokens", 12}}}};
    res.set_content(body.dump(), "application/json");
  }

  static void reply_generic(httplib::Response& res, const std::string& text) {
    nlohmann::json body = {{"text", text}};
    res.set_content(body.dump(), "application/json");
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  Responder responder_;
  std::vector<CapturedCall> calls_;
};

}  // namespace testsupport
