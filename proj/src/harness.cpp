#include "uctadp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "uctadp/patterns.hpp"

namespace uctadp {

// ---- Oracle -------------------------------------------------------------------

std::vector<Move> five_points(const Board& board, Player p) {
  std::vector<Move> out;
  if (board.stone_count() == 0) return out;
  // A five-point always touches one of p's stones, so the 2-adjacent cells cover it.
  for (Move m : candidate_moves(board)) {
    if (makes_five(board, m, p)) out.push_back(m);
  }
  return out;
}

namespace {

int count_five_points(const Board& b, Player p, int limit) {
  int n = 0;
  for (Move m : candidate_moves(b)) {
    if (makes_five(b, m, p) && ++n >= limit) break;
  }
  return n;
}

// Five-points of p on the four lines through `last`, counted up to 2. Only
// valid when p had none before playing `last`.
int new_five_points(const Board& b, Move last, Player p) {
  int n = 0;
  for (const auto& d : kDirections) {
    for (int off = -4; off <= 4; ++off) {
      if (off == 0) continue;
      const Move m{last.x + off * d[0], last.y + off * d[1]};
      if (m.in_bounds() && b.empty_at(m) && makes_five(b, m, p) && ++n >= 2) return n;
    }
  }
  return n;
}

bool attacker(Board& b, int k);

// Defender to move; the attacker may still make k moves.
bool defender(Board& b, int k) {
  const Player d = b.side_to_move(), a = opponent(d);
  if (count_five_points(b, d, 1) > 0) return false;
  std::vector<Move> a5;
  for (Move m : candidate_moves(b)) {
    if (makes_five(b, m, a)) a5.push_back(m);
  }
  if (a5.size() >= 2) return true;
  if (a5.size() == 1) {
    b.play(a5[0]);
    const bool w = attacker(b, k);
    b.undo();
    return w;
  }
  if (k == 1) return false;
  for (int i = 0; i < kNumCells; ++i) {
    const Move m = Move::from_index(i);
    if (!b.empty_at(m)) continue;
    b.play(m);
    const bool w = attacker(b, k);
    b.undo();
    if (!w) return false;
  }
  return true;
}

// Attacker (side to move) forces five within k of its own moves.
bool attacker(Board& b, int k) {
  if (b.is_terminal()) return false;
  const Player me = b.side_to_move(), opp = opponent(me);
  const auto cands = candidate_moves(b);
  for (Move m : cands) {
    if (makes_five(b, m, me)) return true;
  }
  if (k == 1) return false;
  std::vector<Move> opp5;
  for (Move m : cands) {
    if (makes_five(b, m, opp)) opp5.push_back(m);
  }
  if (opp5.size() >= 2) return false;
  const std::vector<Move>& moves = opp5.empty() ? cands : opp5;
  for (Move m : moves) {
    b.play(m);
    // Neither side had a five-point before m, so only m's lines matter on the last round.
    const bool w = k == 2 ? new_five_points(b, m, me) >= 2 : defender(b, k - 1);
    b.undo();
    if (w) return true;
  }
  return false;
}

}  // namespace

bool forces_win(const Board& board, int attacker_moves) {
  Board b = board;
  return attacker(b, attacker_moves);
}

std::vector<Move> winning_moves(const Board& board, int attacker_moves) {
  std::vector<Move> out;
  if (board.is_terminal()) return out;
  Board b = board;
  const Player me = b.side_to_move(), opp = opponent(me);
  const auto opp5 = five_points(b, opp);
  for (Move m : candidate_moves(b)) {
    if (makes_five(b, m, me)) {
      out.push_back(m);
      continue;
    }
    if (attacker_moves == 1 || opp5.size() >= 2) continue;
    if (opp5.size() == 1 && m != opp5[0]) continue;
    b.play(m);
    const bool w = defender(b, attacker_moves - 1);
    b.undo();
    if (w) out.push_back(m);
  }
  return out;
}

// ---- Fixtures -----------------------------------------------------------------

const char* fixture_kind_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::WinIn1: return "win-in-1";
    case FixtureKind::BlockIn1: return "block-in-1";
    case FixtureKind::WinIn3: return "win-in-3";
    case FixtureKind::DoubleThree: return "double-three";
    case FixtureKind::Trap: return "trap";
    case FixtureKind::Midgame: return "midgame";
  }
  return "?";
}

const char* fixture_source_name(FixtureSource s) {
  return s == FixtureSource::DerivedBruteforce ? "derived-bruteforce" : "derived-threat-analysis";
}

std::string format_fixture(const Fixture& f) {
  std::string out = "name: " + f.name + "\n";
  out += std::string("kind: ") + fixture_kind_name(f.kind) + "\n";
  out += std::string("source: ") + fixture_source_name(f.source) + "\n";
  out += "optimal:";
  for (Move m : f.optimal_moves) out += " " + to_string(m);
  out += "\n";
  if (f.trap_move) out += "trap: " + to_string(*f.trap_move) + "\n";
  out += format_board(f.board);
  return out;
}

namespace {

std::vector<Move> parse_move_list(std::string_view s) {
  std::vector<Move> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    const auto m = parse_move(tok);
    if (!m || !m->in_bounds()) throw FixtureError("bad move '" + tok + "' in fixture");
    out.push_back(*m);
  }
  return out;
}

}  // namespace

Fixture parse_fixture(std::string_view text) {
  Fixture f;
  std::string board_text;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_kind = false;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    const std::string key = colon == std::string::npos ? "" : line.substr(0, colon);
    const std::string value = colon == std::string::npos ? "" : line.substr(colon + 1);
    if (key == "name") {
      std::istringstream vs(value);
      vs >> f.name;
    } else if (key == "kind") {
      std::istringstream vs(value);
      std::string kind;
      vs >> kind;
      bool found = false;
      for (auto k : {FixtureKind::WinIn1, FixtureKind::BlockIn1, FixtureKind::WinIn3, FixtureKind::DoubleThree,
                     FixtureKind::Trap, FixtureKind::Midgame}) {
        if (kind == fixture_kind_name(k)) {
          f.kind = k;
          found = true;
        }
      }
      if (!found) throw FixtureError("unknown fixture kind '" + kind + "'");
      have_kind = true;
    } else if (key == "source") {
      std::istringstream vs(value);
      std::string src;
      vs >> src;
      if (src == "derived-bruteforce") f.source = FixtureSource::DerivedBruteforce;
      else if (src == "derived-threat-analysis") f.source = FixtureSource::DerivedThreatAnalysis;
      else throw FixtureError("unknown fixture source '" + src + "'");
    } else if (key == "optimal") {
      f.optimal_moves = parse_move_list(value);
    } else if (key == "trap") {
      const auto moves = parse_move_list(value);
      if (moves.size() != 1) throw FixtureError("trap line needs exactly one move");
      f.trap_move = moves.front();
    } else {
      board_text += line + "\n";
    }
  }
  if (!have_kind) throw FixtureError("fixture has no kind line");
  try {
    f.board = parse_board(board_text);
  } catch (const FormatError& e) {
    throw FixtureError(std::string("fixture board: ") + e.what());
  }
  return f;
}

std::vector<Move> oracle_optimal(const Fixture& f) {
  const Board& b = f.board;
  if (b.is_terminal()) throw FixtureError(f.name + ": position is already decided");
  const Player me = b.side_to_move();
  auto require = [&f](bool ok, const char* what) {
    if (!ok) throw FixtureError(f.name + ": " + what);
  };
  switch (f.kind) {
    case FixtureKind::WinIn1: {
      auto w = winning_moves(b, 1);
      require(!w.empty(), "no immediate win");
      return w;
    }
    case FixtureKind::BlockIn1: {
      require(winning_moves(b, 1).empty(), "side to move can win at once");
      auto o5 = five_points(b, opponent(me));
      require(o5.size() == 1, "opponent must have exactly one five-point");
      return o5;
    }
    case FixtureKind::WinIn3: {
      require(winning_moves(b, 1).empty(), "side to move can win at once");
      auto w = winning_moves(b, 2);
      require(!w.empty(), "no forced win within three plies");
      return w;
    }
    case FixtureKind::DoubleThree:
    case FixtureKind::Trap: {
      require(winning_moves(b, 2).empty(), "a win within three plies exists");
      auto w = winning_moves(b, 3);
      require(!w.empty(), "no forced win within five plies");
      return w;
    }
    case FixtureKind::Midgame: {
      require(winning_moves(b, 2).empty(), "side to move has a short forced win");
      std::vector<Move> safe;
      Board t = b;
      for (Move m : candidate_moves(b)) {
        t.play(m);
        if (!t.is_terminal() && !forces_win(t, 2)) safe.push_back(m);
        t.undo();
      }
      require(!safe.empty(), "every move loses quickly");
      return safe;
    }
  }
  return {};
}

void verify_fixture(const Fixture& f) {
  auto expected = oracle_optimal(f);
  auto given = f.optimal_moves;
  std::sort(expected.begin(), expected.end());
  std::sort(given.begin(), given.end());
  if (expected != given) {
    std::string msg = f.name + ": optimal set disagrees with oracle, oracle says";
    for (Move m : expected) msg += " " + to_string(m);
    throw FixtureError(msg);
  }
  if (f.kind == FixtureKind::Trap) {
    if (!f.trap_move) throw FixtureError(f.name + ": trap fixture lacks a trap move");
    Board t = f.board;
    t.play(*f.trap_move);
    if (t.is_terminal() || !forces_win(t, 2)) throw FixtureError(f.name + ": trap move is not refuted");
  }
}

namespace {

// Boards use 'X' for Black and 'O' for White.
constexpr const char* kBuiltinFixtures[] = {
    R"(name: win-in-1
kind: win-in-1
source: derived-bruteforce
optimal: 8,7
...............
...............
...............
...............
...............
...............
.....O.........
...OXXXX.......
......O........
.......O.......
...............
...............
...............
...............
...............
turn: X
)",
    R"(name: double-three
kind: double-three
source: derived-threat-analysis
optimal: 7,7
...............
...............
...............
...............
...............
.......X.......
......OX.......
.....XX........
....O...O......
..........O....
...............
...............
...............
...............
...............
turn: X
)",
    R"(name: trap
kind: trap
source: derived-bruteforce
optimal: 2,13
trap: 8,6
...........O...
...............
O.......O......
........X......
......X.X.....O
.......XX......
.........XX....
.....OOO.......
...............
..O..........O.
..X............
..X............
..X.........O..
...XX..........
.O............O
turn: X
)",
    R"(name: midgame
kind: midgame
source: derived-bruteforce
optimal: 5,2 6,2 7,2 8,2 9,2 10,2 11,2 12,2 13,2 14,2 5,3 6,3 7,3 8,3 9,3 10,3 11,3 12,3 13,3 14,3 5,4 6,4 8,4 9,4 10,4 11,4 13,4 14,4 3,5 4,5 5,5 6,5 8,5 9,5 10,5 11,5 13,5 14,5 3,6 4,6 5,6 6,6 10,6 12,6 13,6 14,6 3,7 4,7 6,7 8,7 9,7 11,7 12,7 13,7 14,7 3,8 4,8 7,8 8,8 10,8 11,8 12,8 13,8 3,9 4,9 6,9 8,9 10,9 11,9 12,9 3,10 4,10 6,10 7,10 9,10 10,10 11,10 3,11 4,11 5,11 6,11 7,11 8,11 10,11 11,11 3,12 4,12 5,12 6,12 7,12 8,12 9,12 10,12 11,12 7,13 8,13 9,13 10,13 11,13
...............
...............
...............
...............
.......X....X..
.......X....O..
.......OOX.X...
.....O.X..O....
.....XO..X.....
.....O.X.O.....
.....O..X......
.........O.....
...............
...............
...............
turn: X
)",
};

}  // namespace

std::vector<std::string> builtin_fixture_names() {
  std::vector<std::string> names;
  for (const char* text : kBuiltinFixtures) names.push_back(parse_fixture(text).name);
  return names;
}

Fixture builtin_fixture(std::string_view name) {
  for (const char* text : kBuiltinFixtures) {
    Fixture f = parse_fixture(text);
    if (f.name == name) return f;
  }
  throw FixtureError("no builtin fixture named '" + std::string(name) + "'");
}

std::vector<Fixture> tactical_suite(std::uint64_t seed) {
  constexpr int kWant[3] = {15, 15, 20};
  const FixtureKind kinds[3] = {FixtureKind::WinIn1, FixtureKind::BlockIn1, FixtureKind::WinIn3};
  std::vector<Fixture> out;
  int have[3] = {0, 0, 0};
  for (int game = 0; game < 5000 && (have[0] < kWant[0] || have[1] < kWant[1] || have[2] < kWant[2]); ++game) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(game)));
    Board b = random_opening(rng.next());
    bool taken = false;
    while (!b.is_terminal() && !taken) {
      if (b.stone_count() >= 8) {
        const Player me = b.side_to_move();
        int kind = -1;
        std::vector<Move> optimal = five_points(b, me);
        if (!optimal.empty()) {
          kind = 0;
        } else if (auto o5 = five_points(b, opponent(me)); o5.size() == 1) {
          kind = 1;
          optimal = o5;
        } else if (o5.empty()) {
          optimal = winning_moves(b, 2);
          if (!optimal.empty()) kind = 2;
        }
        if (kind >= 0 && have[kind] < kWant[kind]) {
          Fixture f;
          f.kind = kinds[kind];
          f.source = FixtureSource::DerivedBruteforce;
          f.board = b;
          f.optimal_moves = optimal;
          f.name = std::string(fixture_kind_name(f.kind)) + "-" + std::to_string(++have[kind]);
          out.push_back(std::move(f));
          taken = true;
          break;
        }
      }
      // Noisy heuristic move: scaled heuristic with occasional random moves.
      const auto moves = candidate_moves(b);
      Move pick = moves[rng.below(moves.size())];
      if (rng.uniform01() >= 0.25) {
        double best = -1;
        for (Move m : moves) {
          const double s = exp_heuristic(b, m, b.side_to_move()) * rng.uniform(0.3, 1.0);
          if (s > best) {
            best = s;
            pick = m;
          }
        }
      }
      b.play(pick);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Fixture& a, const Fixture& b) { return static_cast<int>(a.kind) < static_cast<int>(b.kind); });
  return out;
}

// ---- Experiments --------------------------------------------------------------

FailureRateCurve measure_failure_rate(const Fixture& f, AgentKind agent, const SearchConfig& base, const Mlp* model,
                                      std::vector<std::int64_t> checkpoints, int trials) {
  std::sort(checkpoints.begin(), checkpoints.end());
  FailureRateCurve curve;
  curve.agent = agent_name(agent);
  curve.fixture = f.name;
  curve.trials = trials;
  std::vector<int> failures(checkpoints.size(), 0);
  for (int t = 0; t < trials; ++t) {
    SearchConfig cfg = agent_config(agent, base);
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(t));
    Searcher s(f.board, cfg, model);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      s.run(checkpoints[c] - s.iterations());
      const Move best = s.best_move();
      if (std::find(f.optimal_moves.begin(), f.optimal_moves.end(), best) == f.optimal_moves.end()) ++failures[c];
    }
  }
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    curve.checkpoints.emplace_back(checkpoints[c], trials ? static_cast<double>(failures[c]) / trials : 0.0);
  }
  return curve;
}

std::string curve_csv(const FailureRateCurve& c) {
  std::string out = "iterations,failure_rate\n";
  char buf[64];
  for (const auto& [it, rate] : c.checkpoints) {
    std::snprintf(buf, sizeof buf, "%lld,%.4f\n", static_cast<long long>(it), rate);
    out += buf;
  }
  return out;
}

std::int64_t bench_iterations(const Board& board, AgentKind agent, const SearchConfig& base, const Mlp* model,
                              double seconds) {
  using Clock = std::chrono::steady_clock;
  Searcher s(board, agent_config(agent, base), model);
  const auto deadline = Clock::now() + std::chrono::duration<double>(seconds);
  while (Clock::now() < deadline) s.run_iteration();
  return s.iterations();
}

Board random_opening(std::uint64_t seed) {
  Rng rng(seed);
  Board b;
  const int plies = 2 + static_cast<int>(rng.below(3));
  for (int i = 0; i < plies; ++i) {
    const auto moves = candidate_moves(b);
    b.play(moves[rng.below(moves.size())]);
  }
  return b;
}

GameRecord play_game(AgentKind black, AgentKind white, const Board& opening, const SearchConfig& base,
                     const Mlp* model, const TimeControl& tc, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  GameRecord rec{black, white, std::nullopt, 0, false, 0};
  Board b = opening;
  std::int64_t used[2] = {0, 0};
  while (!b.is_terminal()) {
    const Player p = b.side_to_move();
    const AgentKind agent = p == Player::Black ? black : white;
    const std::int64_t left = tc.match_limit_ms - used[index_of(p)];
    SearchConfig cfg = base;
    if (tc.move_ms > 0) {
      cfg.iteration_budget.reset();
      cfg.time_budget_ms = std::max<std::int64_t>(0, std::min({tc.move_ms, tc.turn_limit_ms * 9 / 10, left / 20}));
    }
    cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(b.stone_count()));
    const auto start = Clock::now();
    const Move m = agent_move(agent, b, cfg, model);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    used[index_of(p)] += ms;
    rec.max_move_ms = std::max<std::int64_t>(rec.max_move_ms, ms);
    if (ms > tc.turn_limit_ms || used[index_of(p)] > tc.match_limit_ms) {
      rec.winner = opponent(p);
      rec.forfeit = true;
      break;
    }
    b.play(m);
    ++rec.plies;
  }
  if (!rec.forfeit) rec.winner = b.winner();
  return rec;
}

Standings round_robin(const std::vector<AgentKind>& agents, int games_per_pair, const SearchConfig& base,
                      const Mlp* model, const TimeControl& tc, std::uint64_t seed, const GameCallback& on_game) {
  const std::size_t n = agents.size();
  if (n < 2) throw std::invalid_argument("round robin needs at least two agents");
  Standings s;
  s.agents = agents;
  s.wins.assign(n, std::vector<int>(n, 0));
  s.draws.assign(n, std::vector<int>(n, 0));
  s.points.assign(n, 0.0);
  std::uint64_t pair_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++pair_index) {
      for (int g = 0; g < games_per_pair; ++g) {
        const std::uint64_t game_seed = derive_seed(seed, pair_index * 100000 + static_cast<std::uint64_t>(g / 2));
        const Board opening = random_opening(game_seed);
        const bool i_black = g % 2 == 0;
        const auto rec = play_game(i_black ? agents[i] : agents[j], i_black ? agents[j] : agents[i], opening, base,
                                   model, tc, game_seed);
        if (on_game) on_game(rec);
        if (!rec.winner) {
          ++s.draws[i][j];
          ++s.draws[j][i];
          s.points[i] += 0.5;
          s.points[j] += 0.5;
        } else {
          const bool i_won = (*rec.winner == Player::Black) == i_black;
          ++s.wins[i_won ? i : j][i_won ? j : i];
          s.points[i_won ? i : j] += 1.0;
        }
      }
    }
  }
  return s;
}

std::string format_standings(const Standings& s) {
  const std::size_t n = s.agents.size();
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s", "");
  out += buf;
  for (AgentKind a : s.agents) {
    std::snprintf(buf, sizeof buf, "%14s", agent_name(a));
    out += buf;
  }
  out += "        points\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%-14s", agent_name(s.agents[i]));
    out += buf;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        std::snprintf(buf, sizeof buf, "%14s", "-");
      } else {
        const std::string cell = std::to_string(s.wins[i][j]) + ":" + std::to_string(s.wins[j][i]);
        std::snprintf(buf, sizeof buf, "%14s", cell.c_str());
      }
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%14.1f\n", s.points[i]);
    out += buf;
  }
  return out;
}

std::string standings_csv(const Standings& s) {
  std::string out = "agent,opponent,wins,losses,draws\n";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    for (std::size_t j = 0; j < s.agents.size(); ++j) {
      if (i == j) continue;
      out += std::string(agent_name(s.agents[i])) + "," + agent_name(s.agents[j]) + "," + std::to_string(s.wins[i][j]) +
             "," + std::to_string(s.wins[j][i]) + "," + std::to_string(s.draws[i][j]) + "\n";
    }
  }
  return out;
}

}  // namespace uctadp
