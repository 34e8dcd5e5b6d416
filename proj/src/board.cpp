#include "uctadp/board.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace uctadp {

const char* player_name(Player p) { return p == Player::Black ? "black" : "white"; }

std::string to_string(Move m) { return std::to_string(m.x) + "," + std::to_string(m.y); }

std::optional<Move> parse_move(std::string_view text) {
  auto comma = text.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  auto parse_int = [](std::string_view s, int& out) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  Move m;
  if (!parse_int(text.substr(0, comma), m.x) || !parse_int(text.substr(comma + 1), m.y)) return std::nullopt;
  return m;
}

namespace {

LineGeometry build_geometry() {
  LineGeometry g;
  g.num_lines = {kBoardSize, kBoardSize, kMaxLines, kMaxLines};
  for (int y = 0; y < kBoardSize; ++y) {
    for (int x = 0; x < kBoardSize; ++x) {
      const int idx = y * kBoardSize + x;
      const std::array<LinePos, kNumDirections> pos{{
          {static_cast<std::uint8_t>(y), static_cast<std::uint8_t>(x)},
          {static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)},
          {static_cast<std::uint8_t>(x - y + kBoardSize - 1), static_cast<std::uint8_t>(std::min(x, y))},
          {static_cast<std::uint8_t>(x + y), static_cast<std::uint8_t>(x - std::max(0, x + y - (kBoardSize - 1)))},
      }};
      for (int d = 0; d < kNumDirections; ++d) {
        g.at[d][idx] = pos[d];
        g.cells[d][pos[d].line][pos[d].pos] = static_cast<std::uint8_t>(idx);
        g.length[d][pos[d].line] = std::max<std::uint8_t>(g.length[d][pos[d].line], pos[d].pos + 1);
      }
    }
  }
  return g;
}

bool has_five(const std::array<Cell, kNumCells>& cells, Cell c) {
  for (int y = 0; y < kBoardSize; ++y) {
    for (int x = 0; x < kBoardSize; ++x) {
      if (cells[y * kBoardSize + x] != c) continue;
      for (const auto& d : kDirections) {
        int n = 1;
        int cx = x + d[0], cy = y + d[1];
        while (cx >= 0 && cx < kBoardSize && cy >= 0 && cy < kBoardSize && cells[cy * kBoardSize + cx] == c) {
          ++n;
          cx += d[0];
          cy += d[1];
        }
        if (n >= 5) return true;
      }
    }
  }
  return false;
}

}  // namespace

const LineGeometry& line_geometry() {
  static const LineGeometry geometry = build_geometry();
  return geometry;
}

Board::Board() { history_.reserve(64); }

void Board::place(Move m, Player p) {
  const auto& g = line_geometry();
  const int idx = m.index();
  cells_[idx] = cell_of(p);
  for (int d = 0; d < kNumDirections; ++d) {
    const LinePos lp = g.at[d][idx];
    bits_[index_of(p)][d][lp.line] |= static_cast<LineMask>(1u << lp.pos);
  }
}

void Board::remove(Move m, Player p) {
  const auto& g = line_geometry();
  const int idx = m.index();
  cells_[idx] = Cell::Empty;
  for (int d = 0; d < kNumDirections; ++d) {
    const LinePos lp = g.at[d][idx];
    bits_[index_of(p)][d][lp.line] &= static_cast<LineMask>(~(1u << lp.pos));
  }
}

void Board::play(Move m) {
  if (!m.in_bounds()) throw IllegalMove("move " + to_string(m) + " is off the board");
  if (winner_) throw GameFinished("game already won");
  if (cells_[m.index()] != Cell::Empty) throw IllegalMove("cell " + to_string(m) + " is occupied");
  place(m, to_move_);
  history_.push_back(m);
  winner_ = winner_check(*this, m);
  to_move_ = opponent(to_move_);
}

void Board::undo() {
  if (history_.empty()) throw NothingToUndo("no move to undo");
  const Move m = history_.back();
  history_.pop_back();
  to_move_ = opponent(to_move_);
  remove(m, to_move_);
  winner_.reset();
}

Board Board::from_stones(const std::vector<Move>& black, const std::vector<Move>& white) {
  const auto nb = static_cast<int>(black.size());
  const auto nw = static_cast<int>(white.size());
  if (nb - nw != 0 && nb - nw != 1) throw FormatError("stone counts must satisfy black - white in {0, 1}");

  std::array<Cell, kNumCells> cells{};
  for (const auto& [list, c] : {std::pair{&black, Cell::Black}, std::pair{&white, Cell::White}}) {
    for (Move m : *list) {
      if (!m.in_bounds()) throw FormatError("stone " + to_string(m) + " is off the board");
      if (cells[m.index()] != Cell::Empty) throw FormatError("cell " + to_string(m) + " listed twice");
      cells[m.index()] = c;
    }
  }

  const bool black_five = has_five(cells, Cell::Black);
  const bool white_five = has_five(cells, Cell::White);
  if (black_five && white_five) throw FormatError("both colours have five in a row");

  std::vector<Move> b = black, w = white;
  if (black_five || white_five) {
    const Cell c = black_five ? Cell::Black : Cell::White;
    if ((c == Cell::Black) != (nb == nw + 1)) throw FormatError("the colour with five must have moved last");
    auto& list = black_five ? b : w;
    // Replay one of the five's stones last so no earlier prefix is already won.
    auto last = std::find_if(list.begin(), list.end(), [&](Move m) {
      cells[m.index()] = Cell::Empty;
      const bool still = has_five(cells, c);
      cells[m.index()] = c;
      return !still;
    });
    if (last == list.end()) throw FormatError("position cannot arise from play");
    std::rotate(last, last + 1, list.end());
  }

  Board board;
  for (int i = 0; i < nb; ++i) {
    board.place(b[i], Player::Black);
    board.history_.push_back(b[i]);
    if (i < nw) {
      board.place(w[i], Player::White);
      board.history_.push_back(w[i]);
    }
  }
  board.to_move_ = (nb == nw) ? Player::Black : Player::White;
  if (black_five) board.winner_ = Player::Black;
  if (white_five) board.winner_ = Player::White;
  return board;
}

bool operator==(const Board& a, const Board& b) {
  return a.cells_ == b.cells_ && a.bits_ == b.bits_ && a.history_ == b.history_ && a.to_move_ == b.to_move_ &&
         a.winner_ == b.winner_;
}

Board apply_move(Board board, Move m) {
  board.play(m);
  return board;
}

Board undo_move(Board board) {
  board.undo();
  return board;
}

int run_length(const Board& board, Move m, int dir) {
  const Cell c = board.at(m);
  if (c == Cell::Empty) return 0;
  const auto& d = kDirections[dir];
  int n = 1;
  for (int sign : {1, -1}) {
    int x = m.x + sign * d[0], y = m.y + sign * d[1];
    while (x >= 0 && x < kBoardSize && y >= 0 && y < kBoardSize && board.at(x, y) == c) {
      ++n;
      x += sign * d[0];
      y += sign * d[1];
    }
  }
  return n;
}

std::optional<Player> winner_check(const Board& board, Move last) {
  const Cell c = board.at(last);
  if (c == Cell::Empty) return std::nullopt;
  for (int d = 0; d < kNumDirections; ++d) {
    if (run_length(board, last, d) >= 5) return c == Cell::Black ? Player::Black : Player::White;
  }
  return std::nullopt;
}

bool makes_five(const Board& board, Move m, Player p) {
  const Cell c = cell_of(p);
  for (const auto& d : kDirections) {
    int n = 1;
    for (int sign : {1, -1}) {
      int x = m.x + sign * d[0], y = m.y + sign * d[1];
      while (x >= 0 && x < kBoardSize && y >= 0 && y < kBoardSize && board.at(x, y) == c) {
        ++n;
        x += sign * d[0];
        y += sign * d[1];
      }
    }
    if (n >= 5) return true;
  }
  return false;
}

std::array<LineMask, kBoardSize> candidate_rows(const Board& board) {
  constexpr LineMask kFull = (1u << kBoardSize) - 1;
  std::array<LineMask, kBoardSize> occ{}, horiz{}, out{};
  bool any = false;
  for (int y = 0; y < kBoardSize; ++y) {
    occ[y] = board.row_bits(Player::Black, y) | board.row_bits(Player::White, y);
    const unsigned o = occ[y];
    horiz[y] = static_cast<LineMask>((o | o << 1 | o << 2 | o >> 1 | o >> 2) & kFull);
    any = any || occ[y] != 0;
  }
  if (!any) {
    out[kBoardSize / 2] = static_cast<LineMask>(1u << (kBoardSize / 2));
    return out;
  }
  for (int y = 0; y < kBoardSize; ++y) {
    LineMask v = 0;
    for (int dy = -2; dy <= 2; ++dy) {
      if (y + dy >= 0 && y + dy < kBoardSize) v |= horiz[y + dy];
    }
    out[y] = static_cast<LineMask>(v & ~occ[y] & kFull);
  }
  return out;
}

std::vector<Move> candidate_moves(const Board& board) {
  const auto rows = candidate_rows(board);
  std::vector<Move> moves;
  moves.reserve(64);
  for (int y = 0; y < kBoardSize; ++y) {
    for (unsigned bits = rows[y]; bits != 0; bits &= bits - 1) {
      moves.push_back(Move{__builtin_ctz(bits), y});
    }
  }
  return moves;
}

Board parse_board(std::string_view text) {
  std::vector<std::string> rows;
  std::optional<char> turn;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.rfind("turn:", 0) == 0) {
      auto t = line.find_first_not_of(' ', 5);
      if (t == std::string::npos || (line[t] != 'X' && line[t] != 'O')) throw FormatError("bad turn line: " + line);
      turn = line[t];
      continue;
    }
    rows.push_back(line);
  }
  if (rows.size() != kBoardSize) throw FormatError("expected 15 board rows, got " + std::to_string(rows.size()));

  std::vector<Move> black, white;
  for (int y = 0; y < kBoardSize; ++y) {
    if (rows[y].size() != kBoardSize) throw FormatError("row " + std::to_string(y) + " must have 15 cells");
    for (int x = 0; x < kBoardSize; ++x) {
      switch (rows[y][x]) {
        case '.': break;
        case 'X': black.push_back({x, y}); break;
        case 'O': white.push_back({x, y}); break;
        default: throw FormatError(std::string("unexpected cell character '") + rows[y][x] + "'");
      }
    }
  }
  Board board = Board::from_stones(black, white);
  if (turn) {
    const Player expected = *turn == 'X' ? Player::Black : Player::White;
    if (expected != board.side_to_move()) throw FormatError("turn line disagrees with stone counts");
  }
  return board;
}

std::string format_board(const Board& board) {
  std::string out;
  out.reserve(kNumCells + 32);
  for (int y = 0; y < kBoardSize; ++y) {
    for (int x = 0; x < kBoardSize; ++x) {
      const Cell c = board.at(x, y);
      out += c == Cell::Empty ? '.' : (c == Cell::Black ? 'X' : 'O');
    }
    out += '\n';
  }
  out += board.side_to_move() == Player::Black ? "turn: X\n" : "turn: O\n";
  return out;
}

}  // namespace uctadp
