#include "uctadp/server.hpp"

#include <atomic>
#include <map>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "uctadp/patterns.hpp"

namespace uctadp {

using json = nlohmann::json;

namespace {

struct Session {
  std::mutex mu;
  std::string id;
  Board board;
  SearchConfig cfg;
  AgentKind agent = AgentKind::UctAdpPb;
  Player human = Player::Black;
  json log = json::array();
};

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& msg) : std::runtime_error(msg), status(status) {}
  int status;
};

std::string status_of(const Board& b) {
  if (const auto w = b.winner()) return *w == Player::Black ? "black_won" : "white_won";
  if (b.is_full()) return "draw";
  return "playing";
}

json move_json(Move m) { return json{{"x", m.x}, {"y", m.y}}; }

json board_json(const Board& b) {
  json rows = json::array();
  const std::string text = format_board(b);
  for (int y = 0; y < kBoardSize; ++y) rows.push_back(text.substr(static_cast<std::size_t>(y) * (kBoardSize + 1), kBoardSize));
  json history = json::array();
  for (Move m : b.history()) history.push_back(move_json(m));
  return json{{"size", kBoardSize},
              {"rows", rows},
              {"to_move", player_name(b.side_to_move())},
              {"stone_count", b.stone_count()},
              {"history", history},
              {"status", status_of(b)},
              {"winner", b.winner() ? json(player_name(*b.winner())) : json(nullptr)}};
}

json config_json(const SearchConfig& c) {
  return json{{"k1", c.k1},
              {"k2", c.k2},
              {"max_h", c.max_h},
              {"msd", c.msd},
              {"iterations", c.iteration_budget ? json(*c.iteration_budget) : json(nullptr)},
              {"time_ms", c.time_budget_ms ? json(*c.time_budget_ms) : json(nullptr)},
              {"weighted_sum_w", c.weighted_sum_w},
              {"seed", c.seed}};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw HttpError(422, "body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(422, std::string("malformed JSON: ") + e.what());
  }
}

double number_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw HttpError(422, std::string(key) + " must be a number");
  return v.get<double>();
}

std::int64_t integer_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw HttpError(422, std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

void apply_overrides(SearchConfig& cfg, const json& overrides) {
  if (!overrides.is_object()) throw HttpError(422, "config must be an object");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "k1") cfg.k1 = number_field(overrides, "k1");
    else if (key == "k2") cfg.k2 = number_field(overrides, "k2");
    else if (key == "max_h") cfg.max_h = number_field(overrides, "max_h");
    else if (key == "weighted_sum_w") cfg.weighted_sum_w = number_field(overrides, "weighted_sum_w");
    else if (key == "msd") cfg.msd = static_cast<int>(integer_field(overrides, "msd"));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(integer_field(overrides, "seed"));
    else if (key == "iterations") {
      if (value.is_null()) cfg.iteration_budget.reset();
      else cfg.iteration_budget = integer_field(overrides, "iterations");
    } else if (key == "time_ms") {
      if (value.is_null()) cfg.time_budget_ms.reset();
      else cfg.time_budget_ms = integer_field(overrides, "time_ms");
    } else {
      throw HttpError(422, "unknown config key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw HttpError(422, e.what());
  }
}

}  // namespace

struct EngineServer::Impl {
  EngineConfig cfg;
  std::shared_ptr<const Mlp> model;
  httplib::Server http;
  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::atomic<std::uint64_t> next_id{0};

  Impl(EngineConfig c, std::shared_ptr<const Mlp> m) : cfg(std::move(c)), model(std::move(m)) { routes(); }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError(404, "no game with id " + id);
    return it->second;
  }

  // Caller holds the session lock.
  json engine_reply(Session& s) {
    SearchConfig sc = s.cfg;
    sc.seed = derive_seed(s.cfg.seed, static_cast<std::uint64_t>(s.board.stone_count()));
    Move m;
    json entry{{"player", player_name(s.board.side_to_move())}, {"by", "engine"}};
    if (s.agent == AgentKind::Adp) {
      m = agent_move(s.agent, s.board, sc, model.get());
    } else {
      const SearchResult r = search(s.board, agent_config(s.agent, sc), model.get());
      m = r.best;
      entry["analysis"] = json{{"iterations", r.iterations_run}, {"elapsed_ms", r.elapsed_ms}};
    }
    s.board.play(m);
    entry["move"] = move_json(m);
    s.log.push_back(entry);
    return move_json(m);
  }

  json state_json(const Session& s) const {
    return json{{"id", s.id},
                {"human_side", player_name(s.human)},
                {"agent", agent_name(s.agent)},
                {"config", config_json(s.cfg)},
                {"board", board_json(s.board)},
                {"status", status_of(s.board)},
                {"log", s.log}};
  }

  json create(const httplib::Request& req) {
    const json body = parse_body(req);
    auto s = std::make_shared<Session>();
    s->cfg = cfg.search;
    s->agent = cfg.agent;
    if (body.contains("human_side")) {
      const auto& side = body["human_side"];
      if (side == "black") s->human = Player::Black;
      else if (side == "white") s->human = Player::White;
      else throw HttpError(422, "human_side must be \"black\" or \"white\"");
    }
    if (body.contains("agent")) {
      const auto& a = body["agent"];
      const auto kind = a.is_string() ? parse_agent(a.get<std::string>()) : std::nullopt;
      if (!kind) throw HttpError(422, "unknown agent");
      s->agent = *kind;
    }
    if (body.contains("config")) apply_overrides(s->cfg, body["config"]);
    if (agent_needs_model(s->agent) && !model) throw HttpError(422, "agent needs a model and none is loaded");

    if (body.contains("moves")) {
      const auto& moves = body["moves"];
      if (!moves.is_array()) throw HttpError(422, "moves must be an array of {x, y}");
      for (const auto& mv : moves) {
        if (!mv.is_object() || !mv.contains("x") || !mv.contains("y")) throw HttpError(422, "moves must be an array of {x, y}");
        const Move m{static_cast<int>(integer_field(mv, "x")), static_cast<int>(integer_field(mv, "y"))};
        try {
          s->board.play(m);
        } catch (const std::exception& e) {
          throw HttpError(422, "bad opening move " + to_string(m) + ": " + e.what());
        }
        s->log.push_back(json{{"player", player_name(opponent(s->board.side_to_move()))}, {"by", "setup"}, {"move", move_json(m)}});
      }
    }

    s->id = "g" + std::to_string(++next_id);
    json engine_move = nullptr;
    if (!s->board.is_terminal() && s->board.side_to_move() != s->human) engine_move = engine_reply(*s);
    {
      std::lock_guard lock(sessions_mu);
      sessions[s->id] = s;
    }
    json out = state_json(*s);
    out["engine_move"] = engine_move;
    return out;
  }

  json move(const std::string& id, const httplib::Request& req) {
    auto s = find(id);
    const json body = parse_body(req);
    if (!body.contains("x") || !body.contains("y")) throw HttpError(422, "body needs integer x and y");
    const Move m{static_cast<int>(integer_field(body, "x")), static_cast<int>(integer_field(body, "y"))};
    if (!m.in_bounds()) throw HttpError(422, "move is off the board");

    std::unique_lock lock(s->mu, std::try_to_lock);
    if (!lock.owns_lock()) throw HttpError(409, "engine is busy with this game");
    if (s->board.is_terminal()) throw HttpError(409, "game is over");
    if (s->board.side_to_move() != s->human) throw HttpError(409, "not the human's turn");
    if (!s->board.empty_at(m)) throw HttpError(409, "cell is occupied");

    s->board.play(m);
    s->log.push_back(json{{"player", player_name(s->human)}, {"by", "human"}, {"move", move_json(m)}});
    json engine_move = nullptr;
    if (!s->board.is_terminal()) engine_move = engine_reply(*s);
    return json{{"human_move", move_json(m)},
                {"engine_move", engine_move},
                {"board", board_json(s->board)},
                {"status", status_of(s->board)}};
  }

  json analysis(const std::string& id, const httplib::Request& req) {
    auto s = find(id);
    std::int64_t iterations = 2000;
    if (req.has_param("iterations")) {
      const std::string v = req.get_param_value("iterations");
      try {
        std::size_t used = 0;
        iterations = std::stoll(v, &used);
        if (used != v.size() || iterations < 1) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw HttpError(422, "iterations must be a positive integer");
      }
    }
    if (!model) throw HttpError(422, "analysis needs a model and none is loaded");

    std::unique_lock lock(s->mu, std::try_to_lock);
    if (!lock.owns_lock()) throw HttpError(409, "engine is busy with this game");
    if (s->board.is_terminal()) throw HttpError(409, "game is over");

    SearchConfig sc = agent_config(AgentKind::UctAdpPb, s->cfg);
    sc.iteration_budget = iterations;
    sc.time_budget_ms.reset();
    sc.seed = derive_seed(s->cfg.seed, static_cast<std::uint64_t>(s->board.stone_count()));
    const SearchResult r = search(s->board, sc, model.get());

    std::map<Move, const ChildStats*> stats;
    for (const auto& c : r.root_children) stats[c.move] = &c;
    json cells = json::array();
    Board b = s->board;
    const Player mover = b.side_to_move();
    for (Move m : candidate_moves(b)) {
      const double h = exp_heuristic(b, m, mover);
      b.play(m);
      const double adp = 1.0 - evaluate_board(*model, b);
      b.undo();
      const auto it = stats.find(m);
      cells.push_back(json{{"x", m.x},
                           {"y", m.y},
                           {"adp_value", adp},
                           {"visits", it == stats.end() ? 0 : it->second->visits},
                           {"mean_value", it == stats.end() ? json(nullptr) : json(it->second->mean)},
                           {"heuristic", h}});
    }
    return json{{"cells", cells},
                {"best_move", move_json(r.best)},
                {"iterations", r.iterations_run},
                {"side_to_move", player_name(mover)}};
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& f, int ok_status = 200) {
    try {
      const json out = f();
      res.status = ok_status;
      res.set_content(out.dump(), "application/json");
    } catch (const HttpError& e) {
      res.status = e.status;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  void routes() {
    http.Post("/games", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return create(req); }, 201);
    });
    http.Post(R"(/games/([^/]+)/moves)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return move(req.matches[1], req); });
    });
    http.Get(R"(/games/([^/]+)/analysis)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return analysis(req.matches[1], req); });
    });
    http.Get(R"(/games/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = find(req.matches[1]);
        std::lock_guard lock(s->mu);
        return state_json(*s);
      });
    });
    http.Delete(R"(/games/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        std::lock_guard lock(sessions_mu);
        if (sessions.erase(id) == 0) throw HttpError(404, "no game with id " + id);
        return json{{"deleted", id}};
      });
    });
    if (!cfg.static_dir.empty()) http.set_mount_point("/", cfg.static_dir);
  }
};

EngineServer::EngineServer(EngineConfig cfg, std::shared_ptr<const Mlp> model)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(model))) {
  prepare_pattern_tables();
}

EngineServer::~EngineServer() { stop(); }

int EngineServer::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool EngineServer::bind(const std::string& host, int port) { return impl_->http.bind_to_port(host, port); }

bool EngineServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void EngineServer::stop() {
  if (impl_) impl_->http.stop();
}

void EngineServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace uctadp
