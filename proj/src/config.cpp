#include "uctadp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace uctadp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

std::optional<std::int64_t> parse_budget(std::string_view key, std::string_view value) {
  if (value == "none") return std::nullopt;
  return parse_number<std::int64_t>(key, value);
}

}  // namespace

void apply_setting(EngineConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& s = cfg.search;
  auto& td = cfg.td;
  if (key == "k1") s.k1 = parse_number<double>(key, value);
  else if (key == "k2") s.k2 = parse_number<double>(key, value);
  else if (key == "max_h") s.max_h = parse_number<double>(key, value);
  else if (key == "msd") s.msd = parse_number<int>(key, value);
  else if (key == "iterations") s.iteration_budget = parse_budget(key, value);
  else if (key == "time_ms") s.time_budget_ms = parse_budget(key, value);
  else if (key == "weighted_sum_w") s.weighted_sum_w = parse_number<double>(key, value);
  else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "evaluator") {
    const auto e = parse_evaluator(value);
    if (!e) throw ConfigError("unknown evaluator '" + std::string(value) + "'");
    s.evaluator = *e;
  } else if (key == "agent") {
    const auto a = parse_agent(value);
    if (!a) throw ConfigError("unknown agent '" + std::string(value) + "'");
    cfg.agent = *a;
  } else if (key == "alpha") td.alpha = parse_number<double>(key, value);
  else if (key == "gamma") td.gamma = parse_number<double>(key, value);
  else if (key == "games") td.games = parse_number<int>(key, value);
  else if (key == "epsilon") td.epsilon = parse_number<double>(key, value);
  else if (key == "train_seed") td.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "hidden") td.hidden = parse_number<int>(key, value);
  else if (key == "log_every") td.log_every = parse_number<int>(key, value);
  else if (key == "eval_games") td.eval_games = parse_number<int>(key, value);
  else if (key == "model") cfg.model_path = std::string(value);
  else if (key == "static_dir") cfg.static_dir = std::string(value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(EngineConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, l.substr(0, eq), l.substr(eq + 1));
  }
  try {
    cfg.search.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_file(EngineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

}  // namespace uctadp
