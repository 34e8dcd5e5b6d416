// uctadp command-line entry point: piskvork brain, training, matches,
// benchmarks and the HTTP server.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "uctadp/harness.hpp"
#include "uctadp/protocol.hpp"
#include "uctadp/server.hpp"

using namespace uctadp;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitModel = 1;

struct ModelMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::shared_ptr<const Mlp> load_model_for(const EngineConfig& cfg) {
  std::string path = cfg.model_path;
#ifdef UCTADP_SOURCE_MODEL
  if (!std::filesystem::exists(path) && path == EngineConfig{}.model_path) path = UCTADP_SOURCE_MODEL;
#endif
  try {
    return std::make_shared<const Mlp>(load_model_file(path));
  } catch (const std::exception& e) {
    throw ModelMissing("cannot load model '" + path + "': " + e.what());
  }
}

std::shared_ptr<const Mlp> model_if_needed(const EngineConfig& cfg, std::initializer_list<AgentKind> agents) {
  for (AgentKind a : agents)
    if (agent_needs_model(a)) return load_model_for(cfg);
  return nullptr;
}

AgentKind agent_arg(const std::string& name) {
  const auto a = parse_agent(name);
  if (!a) throw CLI::ValidationError("unknown agent '" + name + "'");
  return *a;
}

const char* result_word(const GameRecord& r) {
  if (!r.winner) return "draw";
  return *r.winner == Player::Black ? "black" : "white";
}

EngineServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UCT search with an ADP evaluator for 15x15 freestyle Gomoku"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model_path;
  std::vector<std::string> settings;
  app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--model", model_path, "model file for ADP-based agents");
  app.add_option("--set", settings, "extra key=value setting, repeatable");

  auto* protocol = app.add_subcommand("protocol", "piskvork brain on stdin/stdout");

  auto* train = app.add_subcommand("train", "self-play TD training");
  int train_games = -1;
  std::string train_out, train_log;
  train->add_option("--games", train_games, "self-play games")->check(CLI::NonNegativeNumber);
  train->add_option("--out", train_out, "model output file")->required();
  train->add_option("--log", train_log, "training curve CSV");

  auto* selfplay = app.add_subcommand("selfplay", "engine-vs-engine games");
  std::string white_name = "uct-adp-pb", black_name = "uct-adp-pb";
  int sp_games = 2;
  TimeControl tc;
  std::uint64_t sp_seed = 1;
  selfplay->add_option("--white", white_name, "white agent");
  selfplay->add_option("--black", black_name, "black agent");
  selfplay->add_option("--games", sp_games)->check(CLI::PositiveNumber);
  selfplay->add_option("--move-ms", tc.move_ms, "per-move search time")->check(CLI::PositiveNumber);
  selfplay->add_option("--seed", sp_seed);

  auto* bench = app.add_subcommand("bench", "tree-policy iterations per time budget");
  std::vector<std::string> bench_agents{"uct-adp", "uct-dummy", "uct-sim"};
  double bench_seconds = 2.0;
  std::string bench_fixture = "midgame";
  bench->add_option("--agents", bench_agents)->delimiter(',');
  bench->add_option("--seconds", bench_seconds)->check(CLI::NonNegativeNumber);
  bench->add_option("--fixture", bench_fixture);

  auto* failure = app.add_subcommand("failure-rate", "failure-rate curve over seeded trees");
  std::string fr_fixture = "double-three", fr_agent = "uct-adp-pb";
  int fr_trials = 50;
  std::vector<std::int64_t> fr_checkpoints = kDefaultCheckpoints;
  failure->add_option("--fixture", fr_fixture);
  failure->add_option("--agent", fr_agent);
  failure->add_option("--trials", fr_trials)->check(CLI::PositiveNumber);
  failure->add_option("--checkpoints", fr_checkpoints)->delimiter(',');

  auto* serve = app.add_subcommand("serve", "HTTP/JSON game server");
  int port = 8080;
  std::string host = "127.0.0.1", static_dir;
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  serve->add_option("--static", static_dir, "directory of static UI files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  EngineConfig cfg;
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const auto& s : settings) apply_config_text(cfg, s);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!model_path.empty()) cfg.model_path = model_path;

  try {
    if (*protocol) {
      const auto model = model_if_needed(cfg, {cfg.agent});
      ProtocolEngine engine(cfg, model.get());
      engine.run(std::cin, std::cout);
      return 0;
    }

    if (*train) {
      TdConfig td = cfg.td;
      if (train_games >= 0) td.games = train_games;
      std::ofstream log;
      if (!train_log.empty()) {
        log.open(train_log);
        log << "game_index,avg_abs_td_error,win_rate_vs_random\n";
      }
      const TrainResult r = self_play_train(td, [&](const TrainLogRow& row) {
        std::cerr << "game " << row.game_index << " td " << row.avg_abs_td_error << " vs-random "
                  << row.win_rate_vs_random << "\n";
        if (log) log << row.game_index << ',' << row.avg_abs_td_error << ',' << row.win_rate_vs_random << '\n'
                     << std::flush;
      });
      save_model_file(r.model, train_out);
      std::cout << "wrote " << train_out << " after " << td.games << " games\n";
      return 0;
    }

    if (*selfplay) {
      const AgentKind white = agent_arg(white_name), black = agent_arg(black_name);
      const auto model = model_if_needed(cfg, {white, black});
      int black_wins = 0, white_wins = 0, draws = 0;
      for (int g = 0; g < sp_games; ++g) {
        const Board opening = random_opening(derive_seed(sp_seed, static_cast<std::uint64_t>(g)));
        const GameRecord r = play_game(black, white, opening, cfg.search, model.get(), tc,
                                       derive_seed(sp_seed, 1000000 + static_cast<std::uint64_t>(g)));
        if (!r.winner) ++draws;
        else if (*r.winner == Player::Black) ++black_wins;
        else ++white_wins;
        std::cout << "game " << g + 1 << " black " << agent_name(black) << " white " << agent_name(white)
                  << " result " << result_word(r) << " plies " << r.plies << (r.forfeit ? " forfeit" : "")
                  << "\n"
                  << std::flush;
      }
      std::cout << "summary games " << sp_games << " black " << agent_name(black) << " wins " << black_wins
                << " white " << agent_name(white) << " wins " << white_wins << " draws " << draws << "\n";
      return 0;
    }

    if (*bench) {
      std::vector<AgentKind> agents;
      for (const auto& n : bench_agents) agents.push_back(agent_arg(n));
      std::shared_ptr<const Mlp> model;
      for (AgentKind a : agents)
        if (agent_needs_model(a)) model = load_model_for(cfg);
      const Fixture f = builtin_fixture(bench_fixture);
      for (AgentKind a : agents) {
        const auto n = bench_iterations(f.board, a, cfg.search, model.get(), bench_seconds);
        std::cout << agent_name(a) << ' ' << n << "\n" << std::flush;
      }
      return 0;
    }

    if (*failure) {
      const AgentKind agent = agent_arg(fr_agent);
      const auto model = model_if_needed(cfg, {agent});
      const Fixture f = builtin_fixture(fr_fixture);
      verify_fixture(f);
      std::cout << curve_csv(measure_failure_rate(f, agent, cfg.search, model.get(), fr_checkpoints, fr_trials));
      return 0;
    }

    if (*serve) {
      if (!static_dir.empty()) cfg.static_dir = static_dir;
      const auto model = load_model_for(cfg);
      EngineServer server(cfg, model);
      if (!server.bind(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      server.listen_after_bind();
      g_server = nullptr;
      return 0;
    }
  } catch (const ModelMissing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
