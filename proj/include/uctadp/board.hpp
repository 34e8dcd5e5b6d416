#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uctadp {

inline constexpr int kBoardSize = 15;
inline constexpr int kNumCells = kBoardSize * kBoardSize;
inline constexpr int kNumDirections = 4;
inline constexpr int kMaxLines = 2 * kBoardSize - 1;

enum class Player : std::uint8_t { Black = 0, White = 1 };
enum class Cell : std::uint8_t { Empty = 0, Black = 1, White = 2 };

constexpr Player opponent(Player p) { return p == Player::Black ? Player::White : Player::Black; }
constexpr int index_of(Player p) { return static_cast<int>(p); }
constexpr Cell cell_of(Player p) { return p == Player::Black ? Cell::Black : Cell::White; }
const char* player_name(Player p);

struct Move {
  int x = 0;  // column
  int y = 0;  // row

  constexpr int index() const { return y * kBoardSize + x; }
  constexpr bool in_bounds() const { return x >= 0 && x < kBoardSize && y >= 0 && y < kBoardSize; }
  static constexpr Move from_index(int i) { return Move{i % kBoardSize, i / kBoardSize}; }

  friend constexpr bool operator==(const Move&, const Move&) = default;
  // Row-major order.
  friend constexpr auto operator<=>(const Move& a, const Move& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

std::string to_string(Move m);  // "x,y"
std::optional<Move> parse_move(std::string_view text);

class IllegalMove : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GameFinished : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NothingToUndo : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit steps for the four line directions: horizontal, vertical, diagonal, anti-diagonal.
inline constexpr std::array<std::array<int, 2>, kNumDirections> kDirections{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};

/// Where a cell sits on the line running through it in a given direction.
struct LinePos {
  std::uint8_t line;
  std::uint8_t pos;
};

/// Static geometry of the 4 x 29 board lines. Lines shorter than five cells exist
/// in the table but can never hold a five.
struct LineGeometry {
  std::array<std::array<LinePos, kNumCells>, kNumDirections> at{};
  std::array<std::array<std::uint8_t, kMaxLines>, kNumDirections> length{};
  std::array<std::array<std::array<std::uint8_t, kBoardSize>, kMaxLines>, kNumDirections> cells{};
  std::array<int, kNumDirections> num_lines{};
};
const LineGeometry& line_geometry();

using LineMask = std::uint16_t;

/// 15x15 freestyle Gomoku position. Black moves first; five or more in a row wins.
///
/// Occupancy is kept twice: a cell array, and per-player line bitmasks for every
/// direction (the horizontal masks double as the 225-bit row-major bitset).
class Board {
 public:
  Board();

  /// Builds a position from stone lists. The colour with a five (if any) must be
  /// the last mover, and one of its five stones is replayed last.
  static Board from_stones(const std::vector<Move>& black, const std::vector<Move>& white);

  Cell at(Move m) const { return cells_[m.index()]; }
  Cell at(int x, int y) const { return cells_[y * kBoardSize + x]; }
  bool empty_at(Move m) const { return cells_[m.index()] == Cell::Empty; }
  Player side_to_move() const { return to_move_; }
  const std::vector<Move>& history() const { return history_; }
  int stone_count() const { return static_cast<int>(history_.size()); }
  std::optional<Player> winner() const { return winner_; }
  bool is_full() const { return stone_count() == kNumCells; }
  bool is_terminal() const { return winner_.has_value() || is_full(); }

  /// Throws IllegalMove (occupied / off-board) or GameFinished.
  void play(Move m);
  /// Throws NothingToUndo on an empty history.
  void undo();

  LineMask line_bits(Player p, int dir, int line) const { return bits_[index_of(p)][dir][line]; }
  /// Row `y` occupancy of `p`, bit x set for column x.
  LineMask row_bits(Player p, int y) const { return bits_[index_of(p)][0][y]; }

  friend bool operator==(const Board& a, const Board& b);

 private:
  void place(Move m, Player p);
  void remove(Move m, Player p);

  std::array<Cell, kNumCells> cells_{};
  std::array<std::array<std::array<LineMask, kMaxLines>, kNumDirections>, 2> bits_{};
  std::vector<Move> history_;
  Player to_move_ = Player::Black;
  std::optional<Player> winner_;
};

Board apply_move(Board board, Move m);
Board undo_move(Board board);

/// Length of the same-colour run through `m` along direction `dir` (0 if `m` is empty).
int run_length(const Board& board, Move m, int dir);

/// Owner of `last` if a line of five or more passes through it.
std::optional<Player> winner_check(const Board& board, Move last);

/// True if `p` placing a stone on empty cell `m` would make five or more.
bool makes_five(const Board& board, Move m, Player p);

/// Empty cells within Chebyshev distance 2 of a stone, row-major; {(7,7)} on an empty board.
std::vector<Move> candidate_moves(const Board& board);
/// Row bitmasks of candidate_moves().
std::array<LineMask, kBoardSize> candidate_rows(const Board& board);

/// Fixture text: 15 rows of '.', 'X' (Black), 'O' (White), optional "turn: X|O".
Board parse_board(std::string_view text);
std::string format_board(const Board& board);

}  // namespace uctadp
