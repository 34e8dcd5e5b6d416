#pragma once

#include <memory>
#include <string>

#include "uctadp/config.hpp"

namespace uctadp {

/// HTTP/JSON game service. Routes:
///   POST   /games                 create, body {human_side, agent, config, moves}
///   POST   /games/{id}/moves      human move {x, y}, answered by the engine
///   GET    /games/{id}/analysis   per-cell values and root statistics
///   GET    /games/{id}            full state
///   DELETE /games/{id}            remove
/// Static files are served from cfg.static_dir when it is set.
class EngineServer {
 public:
  /// `model` may be null only when no session will need one.
  EngineServer(EngineConfig cfg, std::shared_ptr<const Mlp> model);
  ~EngineServer();
  EngineServer(const EngineServer&) = delete;
  EngineServer& operator=(const EngineServer&) = delete;

  /// Binds an ephemeral port and returns it, or -1 on failure.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Serves until stop(); call after a successful bind.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uctadp
