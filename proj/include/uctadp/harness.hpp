#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uctadp/agents.hpp"
#include "uctadp/board.hpp"

namespace uctadp {

// ---- Brute-force oracle -------------------------------------------------------
// Built on board primitives only (makes_five, candidate_moves), independent of
// the pattern tables and the search.

/// Empty cells where `p` would complete five or more, row-major.
std::vector<Move> five_points(const Board& board, Player p);

/// True if the side to move can force five within `attacker_moves` of its own
/// moves (1 = immediate five, 2 = win in 3 plies, 3 = win in 5 plies). The
/// defender is allowed any empty cell.
bool forces_win(const Board& board, int attacker_moves);

/// First moves of the side to move that force five within `attacker_moves`.
std::vector<Move> winning_moves(const Board& board, int attacker_moves);

// ---- Fixtures -----------------------------------------------------------------

enum class FixtureKind { WinIn1, BlockIn1, WinIn3, DoubleThree, Trap, Midgame };
enum class FixtureSource { DerivedBruteforce, DerivedThreatAnalysis };

const char* fixture_kind_name(FixtureKind k);
const char* fixture_source_name(FixtureSource s);

class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fixture {
  std::string name;
  FixtureKind kind = FixtureKind::WinIn1;
  FixtureSource source = FixtureSource::DerivedBruteforce;
  Board board;
  std::vector<Move> optimal_moves;
  /// Trap fixtures: the tempting double threat that loses.
  std::optional<Move> trap_move;
};

/// Header lines (name, kind, source, optimal, optional trap) then the board.
std::string format_fixture(const Fixture& f);
Fixture parse_fixture(std::string_view text);

/// The oracle's optimal set for the fixture's kind. Throws FixtureError when
/// the position does not have the shape its kind promises.
std::vector<Move> oracle_optimal(const Fixture& f);

/// Recomputes the optimal set and throws FixtureError on any disagreement.
void verify_fixture(const Fixture& f);

/// Hand-built positions: win-in-1, double-three, trap, midgame.
Fixture builtin_fixture(std::string_view name);
std::vector<std::string> builtin_fixture_names();

/// 15 win-in-1, 15 block-in-1 and 20 win-in-3 positions harvested from seeded
/// noisy heuristic self-play, each oracle-verified.
std::vector<Fixture> tactical_suite(std::uint64_t seed = 7);

// ---- Experiments --------------------------------------------------------------

struct FailureRateCurve {
  std::string agent;
  std::string fixture;
  std::vector<std::pair<std::int64_t, double>> checkpoints;
  int trials = 0;
};

inline const std::vector<std::int64_t> kDefaultCheckpoints{100, 200, 500, 1000, 2000, 5000, 10000, 20000};

/// For each of `trials` seeded trees, searches to every checkpoint in turn and
/// scores a failure when the best move is not optimal.
FailureRateCurve measure_failure_rate(const Fixture& f, AgentKind agent, const SearchConfig& base, const Mlp* model,
                                      std::vector<std::int64_t> checkpoints, int trials = 50);

/// CSV "iterations,failure_rate".
std::string curve_csv(const FailureRateCurve& c);

/// Tree-policy iterations completed within `seconds` of wall time.
std::int64_t bench_iterations(const Board& board, AgentKind agent, const SearchConfig& base, const Mlp* model,
                              double seconds);

struct TimeControl {
  std::int64_t move_ms = 200;       // per-move budget; 0 keeps the base config's budgets
  std::int64_t turn_limit_ms = 15000;
  std::int64_t match_limit_ms = 90000;
};

struct GameRecord {
  AgentKind black;
  AgentKind white;
  std::optional<Player> winner;
  int plies = 0;
  bool forfeit = false;  // winner decided by a time-limit breach
  std::int64_t max_move_ms = 0;
};

/// Plays from `opening` to the end. Search seeds derive from `seed` and the ply.
GameRecord play_game(AgentKind black, AgentKind white, const Board& opening, const SearchConfig& base,
                     const Mlp* model, const TimeControl& tc, std::uint64_t seed);

/// Seeded random opening of 2..4 candidate moves.
Board random_opening(std::uint64_t seed);

struct Standings {
  std::vector<AgentKind> agents;
  std::vector<std::vector<int>> wins;  // wins[i][j]: games agent i won against agent j
  std::vector<std::vector<int>> draws;
  std::vector<double> points;          // win 1, draw 0.5
};

using GameCallback = std::function<void(const GameRecord&)>;

/// games_per_pair games for every pair, colours alternating, openings shared
/// by consecutive game pairs.
Standings round_robin(const std::vector<AgentKind>& agents, int games_per_pair, const SearchConfig& base,
                      const Mlp* model, const TimeControl& tc, std::uint64_t seed, const GameCallback& on_game = {});

/// Win:loss grid, one row per agent, plus match points.
std::string format_standings(const Standings& s);
/// CSV "agent,opponent,wins,losses,draws".
std::string standings_csv(const Standings& s);

}  // namespace uctadp
