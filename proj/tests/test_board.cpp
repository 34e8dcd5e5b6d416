#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"
#include "uctadp/board.hpp"
#include "uctadp/rng.hpp"

using namespace uctadp;

namespace {

// Every 5-cell window on the board, checked cell by cell.
std::optional<Player> brute_force_winner(const Board& b) {
  int windows = 0;
  std::optional<Player> found;
  for (const auto& d : kDirections) {
    for (int y = 0; y < kBoardSize; ++y) {
      for (int x = 0; x < kBoardSize; ++x) {
        const int ex = x + 4 * d[0], ey = y + 4 * d[1];
        if (ex < 0 || ex >= kBoardSize || ey < 0 || ey >= kBoardSize) continue;
        ++windows;
        const Cell c = b.at(x, y);
        if (c == Cell::Empty) continue;
        bool all = true;
        for (int k = 1; k < 5 && all; ++k) all = b.at(x + k * d[0], y + k * d[1]) == c;
        if (all) found = c == Cell::Black ? Player::Black : Player::White;
      }
    }
  }
  EXPECT_EQ(windows, 572);
  return found;
}

std::set<Move> chebyshev_candidates(const Board& b) {
  std::set<Move> out;
  for (int y = 0; y < kBoardSize; ++y)
    for (int x = 0; x < kBoardSize; ++x) {
      if (b.at(x, y) != Cell::Empty) continue;
      for (Move s : b.history())
        if (std::abs(s.x - x) <= 2 && std::abs(s.y - y) <= 2) out.insert(Move{x, y});
    }
  return out;
}

}  // namespace

TEST(Board, FirstMoveAtCentre) {
  Board b;
  b.play({7, 7});
  EXPECT_EQ(b.at(7, 7), Cell::Black);
  EXPECT_EQ(b.side_to_move(), Player::White);
  EXPECT_EQ(b.stone_count(), 1);
  EXPECT_EQ(b.history(), (std::vector<Move>{Move{7, 7}}));
}

TEST(Board, PlayThenUndoRestoresEverything) {
  Board b;
  b.play({7, 7});
  b.play({8, 8});
  const Board before = b;
  b.play({6, 6});
  b.undo();
  EXPECT_TRUE(b == before);
  for (int dir = 0; dir < kNumDirections; ++dir)
    for (int line = 0; line < line_geometry().num_lines[dir]; ++line)
      for (Player p : {Player::Black, Player::White}) EXPECT_EQ(b.line_bits(p, dir, line), before.line_bits(p, dir, line));
}

TEST(Board, IllegalMoves) {
  Board b;
  b.play({7, 7});
  EXPECT_THROW(b.play({7, 7}), IllegalMove);
  EXPECT_THROW(b.play({15, 0}), IllegalMove);
  EXPECT_THROW(b.play({0, -1}), IllegalMove);
  EXPECT_THROW(apply_move(b, Move{7, 7}), IllegalMove);
}

TEST(Board, NoMovesAfterAWin) {
  Board b = test::board_from_rows({
      "XXXXX..........",
      "OOOO...........",
  });
  ASSERT_EQ(b.winner(), Player::Black);
  EXPECT_THROW(b.play({10, 10}), GameFinished);
}

TEST(Board, UndoOnEmptyBoard) {
  Board b;
  EXPECT_THROW(b.undo(), NothingToUndo);
  EXPECT_THROW(undo_move(b), NothingToUndo);
  b.play({7, 7});
  b.undo();
  EXPECT_TRUE(b == Board{});
}

TEST(Board, RandomApplyUndoRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Board b;
    for (int i = 0; i < 10; ++i) {
      auto moves = candidate_moves(b);
      b.play(moves[rng.below(moves.size())]);
      if (b.is_terminal()) break;
    }
    while (b.stone_count() > 0) b.undo();
    EXPECT_TRUE(b == Board{});
  }
}

TEST(Board, PlayChangesOnlyThePlayedCell) {
  Rng rng(5);
  Board b;
  for (int i = 0; i < 40 && !b.is_terminal(); ++i) {
    const Board before = b;
    auto moves = candidate_moves(b);
    const Move m = moves[rng.below(moves.size())];
    b.play(m);
    for (int c = 0; c < kNumCells; ++c) {
      const Move cell = Move::from_index(c);
      if (cell == m) EXPECT_EQ(b.at(cell), cell_of(before.side_to_move()));
      else EXPECT_EQ(b.at(cell), before.at(cell));
    }
  }
}

TEST(Board, ReplayReproducesCells) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Board b;
    for (int i = 0; i < 60 && !b.is_terminal(); ++i) {
      auto moves = candidate_moves(b);
      b.play(moves[rng.below(moves.size())]);
    }
    Board replay;
    for (Move m : b.history()) replay.play(m);
    EXPECT_TRUE(replay == b);
  }
}

TEST(WinnerCheck, FiveInARow) {
  Board b = test::board_from_rows({
      ".XXXX..........",
      ".OOOO..........",
  });
  b.play({5, 0});
  EXPECT_EQ(winner_check(b, {5, 0}), Player::Black);
  EXPECT_EQ(b.winner(), Player::Black);
}

TEST(WinnerCheck, OverlineWins) {
  Board b = test::board_from_rows({
      "XXX.XX.........",
      "OOOO...........",
      "O..............",
  });
  b.play({3, 0});
  EXPECT_EQ(run_length(b, {3, 0}, 0), 6);
  EXPECT_EQ(winner_check(b, {3, 0}), Player::Black);
}

TEST(WinnerCheck, FourIsNotAWin) {
  Board b = test::board_from_rows({
      "XXX............",
      "OOO............",
  });
  b.play({3, 0});
  EXPECT_FALSE(winner_check(b, {3, 0}).has_value());
}

TEST(WinnerCheck, AgreesWithWindowScan) {
  Rng rng(2024);
  int decided = 0;
  for (int game = 0; game < 1000; ++game) {
    Board b;
    const int len = 5 + static_cast<int>(rng.below(120));
    for (int i = 0; i < len && !b.is_terminal(); ++i) {
      auto moves = candidate_moves(b);
      b.play(moves[rng.below(moves.size())]);
    }
    const Move last = b.history().back();
    EXPECT_EQ(winner_check(b, last), brute_force_winner(b));
    if (b.winner()) ++decided;
  }
  EXPECT_GT(decided, 10);
}

TEST(Candidates, EmptyBoardIsCentre) { EXPECT_EQ(candidate_moves(Board{}), (std::vector<Move>{Move{7, 7}})); }

TEST(Candidates, SingleCentreStone) {
  Board b;
  b.play({7, 7});
  const auto moves = candidate_moves(b);
  EXPECT_EQ(moves.size(), 24u);
  std::vector<Move> box;
  for (int y = 5; y <= 9; ++y)
    for (int x = 5; x <= 9; ++x)
      if (x != 7 || y != 7) box.push_back({x, y});
  EXPECT_EQ(moves, box);
}

TEST(Candidates, CornerStone) {
  Board b;
  b.play({0, 0});
  EXPECT_EQ(candidate_moves(b).size(), 8u);
}

TEST(Candidates, MatchChebyshevBallOnRandomBoards) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Board b;
    const int len = 1 + static_cast<int>(rng.below(60));
    for (int i = 0; i < len && !b.is_terminal(); ++i) {
      Move m;
      do m = Move::from_index(static_cast<int>(rng.below(kNumCells)));
      while (!b.empty_at(m));
      b.play(m);
    }
    const auto moves = candidate_moves(b);
    EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
    const auto expected = chebyshev_candidates(b);
    EXPECT_EQ(std::set<Move>(moves.begin(), moves.end()), expected);
    EXPECT_EQ(moves.size(), expected.size());
  }
}

TEST(BoardText, RoundTrip) {
  Board b;
  for (Move m : {Move{7, 7}, Move{8, 7}, Move{7, 8}}) b.play(m);
  const std::string text = format_board(b);
  const Board parsed = parse_board(text);
  EXPECT_EQ(format_board(parsed), text);
  EXPECT_EQ(parsed.side_to_move(), Player::White);
  EXPECT_THROW(parse_board("XX\n"), FormatError);
}

TEST(BoardText, FromStonesRejectsBadCounts) {
  EXPECT_THROW(Board::from_stones({{0, 0}, {1, 1}}, {}), FormatError);
  EXPECT_NO_THROW(Board::from_stones({{0, 0}}, {}));
}

TEST(Moves, ParseAndPrint) {
  EXPECT_EQ(parse_move("3,4"), (Move{3, 4}));
  EXPECT_EQ(to_string(Move{3, 4}), "3,4");
  EXPECT_FALSE(parse_move("3;4").has_value());
  EXPECT_FALSE(parse_move("3,").has_value());
}

TEST(Players, OpponentIsAnInvolution) {
  for (Player p : {Player::Black, Player::White}) EXPECT_EQ(opponent(opponent(p)), p);
}
