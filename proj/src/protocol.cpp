#include "uctadp/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>

namespace uctadp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  s = trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ProtocolEngine::ProtocolEngine(EngineConfig cfg, const Mlp* model) : cfg_(std::move(cfg)), model_(model) {
  prepare_pattern_tables();
}

std::optional<std::int64_t> ProtocolEngine::info_int(const std::string& key) const {
  auto it = info_.find(key);
  if (it == info_.end()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> ProtocolEngine::turn_budget_ms() const {
  std::optional<std::int64_t> budget = cfg_.search.time_budget_ms;
  auto cap = [&budget](std::int64_t v) { budget = budget ? std::min(*budget, v) : v; };
  if (const auto t = info_int("timeout_turn")) cap(*t * 9 / 10);
  if (const auto left = info_int("time_left"); left && info_int("timeout_match").value_or(1) != 0) cap(*left / 20);
  if (budget) budget = std::max<std::int64_t>(*budget, 0);
  return budget;
}

std::string ProtocolEngine::engine_move() {
  if (board_.is_terminal()) return "ERROR game is over";
  SearchConfig sc = cfg_.search;
  sc.seed = derive_seed(cfg_.search.seed, static_cast<std::uint64_t>(board_.stone_count()));
  if (const auto b = turn_budget_ms()) sc.time_budget_ms = *b;
  const Move m = agent_move(cfg_.agent, board_, sc, model_);
  board_.play(m);
  return to_string(m);
}

std::string ProtocolEngine::finish_board() {
  phase_ = Phase::Playing;
  const auto own = static_cast<int>(own_stones_.size());
  const auto opp = static_cast<int>(opp_stones_.size());
  try {
    // We are to move, so we are Black iff the counts are level.
    if (own == opp) board_ = Board::from_stones(own_stones_, opp_stones_);
    else if (opp == own + 1) board_ = Board::from_stones(opp_stones_, own_stones_);
    else return "ERROR inconsistent stone counts";
  } catch (const FormatError& e) {
    board_ = Board{};
    return std::string("ERROR ") + e.what();
  }
  return engine_move();
}

std::optional<std::string> ProtocolEngine::handle(std::string_view raw) {
  const std::string_view line = trim(raw);
  if (line.empty()) return std::nullopt;

  if (phase_ == Phase::LoadingBoard) {
    if (upper(line) == "DONE") return finish_board();
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) return "ERROR bad board line";
    const auto x = to_int(line.substr(0, c1)), y = to_int(line.substr(c1 + 1, c2 - c1 - 1));
    const auto field = to_int(line.substr(c2 + 1));
    if (!x || !y || !field || !Move{*x, *y}.in_bounds() || (*field != 1 && *field != 2)) return "ERROR bad board line";
    (*field == 1 ? own_stones_ : opp_stones_).push_back(Move{*x, *y});
    return std::nullopt;
  }

  const auto sp = line.find(' ');
  const std::string cmd = upper(line.substr(0, sp));
  const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp + 1));

  if (cmd == "START") {
    const auto n = to_int(rest);
    if (!n) return "UNKNOWN malformed START";
    if (*n != kBoardSize) return "ERROR unsupported size";
    board_ = Board{};
    phase_ = Phase::Playing;
    return "OK";
  }
  if (cmd == "RESTART") {
    board_ = Board{};
    phase_ = Phase::Playing;
    return "OK";
  }
  if (cmd == "ABOUT") return std::string(kAboutString);
  if (cmd == "END") {
    finished_ = true;
    return std::nullopt;
  }
  if (cmd == "INFO") {
    const auto sp2 = rest.find(' ');
    if (sp2 == std::string_view::npos) return "UNKNOWN malformed INFO";
    info_[std::string(rest.substr(0, sp2))] = std::string(trim(rest.substr(sp2 + 1)));
    return std::nullopt;
  }
  if (cmd == "BEGIN") {
    if (phase_ != Phase::Playing) return "ERROR no game started";
    if (board_.stone_count() != 0) return "ERROR board is not empty";
    return engine_move();
  }
  if (cmd == "TURN") {
    if (phase_ != Phase::Playing) return "ERROR no game started";
    const auto m = parse_move(rest);
    if (!m) return "UNKNOWN malformed TURN";
    try {
      board_.play(*m);
    } catch (const IllegalMove&) {
      return "ERROR illegal move";
    } catch (const GameFinished&) {
      return "ERROR game is over";
    }
    return engine_move();
  }
  if (cmd == "BOARD") {
    if (phase_ == Phase::Idle) return "ERROR no game started";
    phase_ = Phase::LoadingBoard;
    own_stones_.clear();
    opp_stones_.clear();
    return std::nullopt;
  }
  return "UNKNOWN " + std::string(line);
}

void ProtocolEngine::run(std::istream& in, std::ostream& out) {
  std::string line;
  while (!finished_ && std::getline(in, line)) {
    if (auto reply = handle(line)) out << *reply << '\n' << std::flush;
  }
}

}  // namespace uctadp
