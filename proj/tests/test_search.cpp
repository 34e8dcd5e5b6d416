#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_util.hpp"
#include "uctadp/harness.hpp"
#include "uctadp/search.hpp"

using namespace uctadp;

namespace {

SearchConfig dummy_config(std::int64_t iterations = 200) {
  SearchConfig c;
  c.evaluator = EvaluatorKind::Dummy;
  c.iteration_budget = iterations;
  return c;
}

bool has_five(const std::vector<std::string>& rows, int x, int y) {
  const char c = rows[y][x];
  for (const auto& d : kDirections) {
    int run = 1;
    for (int s : {1, -1})
      for (int k = 1; k < 5; ++k) {
        const int xx = x + s * k * d[0], yy = y + s * k * d[1];
        if (xx < 0 || yy < 0 || xx >= kBoardSize || yy >= kBoardSize || rows[yy][xx] != c) break;
        ++run;
      }
    if (run >= 5) return true;
  }
  return false;
}

// Full board except (4,0), Black to move, where Black's only move completes
// XXXX on row 0 and no five exists yet.
Board one_hole_board() {
  std::vector<std::string> rows(kBoardSize, std::string(kBoardSize, '.'));
  for (int y = 0; y < kBoardSize; ++y)
    for (int x = 0; x < kBoardSize; ++x) rows[y][x] = (x + 2 * y) % 4 < 2 ? 'X' : 'O';
  for (int x = 0; x < 4; ++x) rows[0][x] = 'X';
  rows[0][5] = 'O';
  rows[0][4] = '.';
  auto count = [&](char c) {
    int n = 0;
    for (const auto& r : rows) n += static_cast<int>(std::count(r.begin(), r.end(), c));
    return n;
  };
  // Recolour stones far from the hole until the counts are level.
  for (int i = kNumCells - 1; i >= 0 && count('X') != count('O'); --i) {
    const int x = i % kBoardSize, y = i / kBoardSize;
    if (y < 3) break;
    const char from = count('X') > count('O') ? 'X' : 'O';
    if (rows[y][x] != from) continue;
    rows[y][x] = from == 'X' ? 'O' : 'X';
    if (has_five(rows, x, y)) rows[y][x] = from;
  }
  EXPECT_EQ(count('X'), count('O'));
  for (int y = 0; y < kBoardSize; ++y)
    for (int x = 0; x < kBoardSize; ++x)
      if (rows[y][x] != '.') EXPECT_FALSE(has_five(rows, x, y)) << x << "," << y;
  return test::board_from_rows(rows);
}

void check_tree(const Searcher& s) {
  const auto& nodes = s.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const SearchNode& v = nodes[i];
    std::int64_t child_n = 0;
    double child_loss = 0;
    for (int c : v.children) {
      child_n += nodes[c].n;
      child_loss += nodes[c].n - nodes[c].q;
      EXPECT_EQ(nodes[c].parent, static_cast<int>(i));
      EXPECT_EQ(nodes[c].depth, v.depth + 1);
    }
    EXPECT_EQ(v.n, child_n + v.evaluations) << "node " << i;
    EXPECT_GE(v.q, 0.0);
    EXPECT_LE(v.q, static_cast<double>(v.n));
    // What is left after the children is the sum of this node's own leaf values.
    const double own = v.q - child_loss;
    EXPECT_GE(own, -1e-9) << "node " << i;
    EXPECT_LE(own, v.evaluations + 1e-9) << "node " << i;
  }
}

}  // namespace

TEST(PbUcb, WorkedExample) {
  SearchConfig c;
  c.k1 = std::sqrt(2.0);
  c.k2 = 1.0;
  c.max_h = 100000;
  // 6/10 + sqrt(2) * sqrt(ln 100 / 10) + 10000/100000
  //  = 0.6 + 1.41421356 * 0.67861404 + 0.1 = 1.65970518
  EXPECT_NEAR(pb_ucb(6, 10, 100, 10000, c), 1.65970518, 1e-7);
  // 3/4 + 1 * sqrt(ln 16 / 4) + 0.5 * 1000/100000 = 0.75 + 0.83255461 + 0.005
  c.k1 = 1.0;
  c.k2 = 0.5;
  EXPECT_NEAR(pb_ucb(3, 4, 16, 1000, c), 1.58755461, 1e-7);
}

TEST(PbUcb, ZeroBiasIsPlainUct) {
  SearchConfig c;
  c.k2 = 0;
  SearchConfig plain = c;
  EXPECT_EQ(pb_ucb(2, 5, 30, 99999, c), pb_ucb(2, 5, 30, 0, plain));
  EXPECT_EQ(pb_ucb(2, 5, 30, 0, c), 0.4 + c.k1 * std::sqrt(std::log(30.0) / 5));
}

TEST(PbUcb, IncreasesWithHeuristic) {
  SearchConfig c;
  double prev = -1;
  for (double h : {0.0, 8.1, 100.0, 810.0, 1000.0, 100000.0}) {
    const double v = pb_ucb(1, 3, 9, h, c);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Config, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.msd = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SearchConfig{};
  c.iteration_budget.reset();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.time_budget_ms = 10;
  EXPECT_NO_THROW(c.validate());
  c.weighted_sum_w = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Preferred, QuietPositionFallsBackToCandidates) {
  Board b;
  b.play({7, 7});
  std::vector<Move> moves;
  std::vector<double> h;
  preferred_moves(b, moves, h);
  EXPECT_EQ(moves, candidate_moves(b));
  ASSERT_EQ(h.size(), moves.size());
}

TEST(Preferred, OwnFiveIsTheOnlyChoice) {
  const Board b = test::board_from_rows({".XXXX..........", "..........OOO..", "...O..........."});
  std::vector<Move> moves;
  std::vector<double> h;
  preferred_moves(b, moves, h);
  EXPECT_EQ(moves, five_points(b, Player::Black));
  EXPECT_EQ(moves, (std::vector<Move>{{0, 0}, {5, 0}}));
}

TEST(Preferred, OpponentFiveMustBeBlocked) {
  const Board b = test::board_from_rows({"OOOO.X.........", "......X........", "..X............", "...........X..."});
  ASSERT_EQ(b.side_to_move(), Player::Black);
  std::vector<Move> moves;
  std::vector<double> h;
  preferred_moves(b, moves, h);
  EXPECT_EQ(moves, (std::vector<Move>{{4, 0}}));
  EXPECT_EQ(moves, five_points(b, Player::White));
}

TEST(Preferred, OpenFourLeavesBothEnds) {
  // White .OOOO. on row 5; Black has no four of its own.
  const Board b = test::board_from_rows({"", "", "", "", "", "....OOOO.......", "X.........X....", "", "", "",
                                         "X.........X...."});
  ASSERT_EQ(b.side_to_move(), Player::Black);
  std::vector<Move> moves;
  std::vector<double> h;
  preferred_moves(b, moves, h);
  const std::set<Move> got(moves.begin(), moves.end());
  EXPECT_EQ(got, (std::set<Move>{{3, 5}, {8, 5}}));
  for (std::size_t i = 0; i < moves.size(); ++i) EXPECT_GE(h[i], kThreatThreshold) << to_string(moves[i]);
}

TEST(Preferred, ThreatListsCarryThreatLevelHeuristics) {
  Rng rng(17);
  int restricted = 0;
  for (int t = 0; t < 300; ++t) {
    const Board b = test::random_position(rng, 6 + static_cast<int>(rng.below(30)));
    std::vector<Move> moves;
    std::vector<double> h;
    preferred_moves(b, moves, h);
    const auto cands = candidate_moves(b);
    ASSERT_EQ(moves.size(), h.size());
    ASSERT_FALSE(moves.empty());
    for (Move m : moves) EXPECT_TRUE(std::binary_search(cands.begin(), cands.end(), m));
    for (std::size_t i = 0; i < moves.size(); ++i) EXPECT_DOUBLE_EQ(h[i], exp_heuristic(b, moves[i], b.side_to_move()));
    if (moves.size() == cands.size()) continue;
    ++restricted;
    for (double v : h) EXPECT_GE(v, kThreatThreshold);
  }
  EXPECT_GT(restricted, 30);
}

TEST(Searcher, TreePolicyExpandsFromTheRoot) {
  Board b;
  b.play({7, 7});
  Searcher s(b, dummy_config(), nullptr);
  const int leaf = s.tree_policy();
  EXPECT_EQ(leaf, 1);
  EXPECT_EQ(s.nodes()[leaf].depth, 1);
  EXPECT_EQ(s.working_board().stone_count(), 2);
  EXPECT_EQ(s.working_board().at(s.nodes()[leaf].move), Cell::White);
  EXPECT_EQ(s.root().untried.size(), 23u);
  s.rewind();
  EXPECT_TRUE(s.working_board() == b);
}

TEST(Searcher, TwoExpansionsPickDistinctMoves) {
  Board b;
  b.play({7, 7});
  Searcher s(b, dummy_config(), nullptr);
  const int a = s.expand(0);
  s.rewind();
  const int c = s.expand(0);
  s.rewind();
  EXPECT_NE(s.nodes()[a].move, s.nodes()[c].move);
  EXPECT_EQ(s.root().children.size(), 2u);
}

TEST(Searcher, BackUpdateAlternatesPerspective) {
  Board b;
  b.play({7, 7});
  Searcher s(b, dummy_config(), nullptr);
  const int child = s.expand(0);
  const int grandchild = s.expand(child);
  s.back_update(grandchild, 1.0);
  EXPECT_EQ(s.nodes()[grandchild].q, 1.0);
  EXPECT_EQ(s.nodes()[child].q, 0.0);
  EXPECT_EQ(s.root().q, 1.0);
  s.back_update(grandchild, 0.25);
  EXPECT_EQ(s.nodes()[grandchild].n, 2);
  EXPECT_EQ(s.nodes()[grandchild].q, 1.25);
  EXPECT_EQ(s.nodes()[child].q, 0.75);
  EXPECT_EQ(s.root().q, 1.25);
  EXPECT_EQ(s.root().n, 2);
}

TEST(Searcher, MaxDepthStopsDescent) {
  Board b;
  b.play({7, 7});
  SearchConfig c = dummy_config();
  c.msd = 1;
  Searcher s(b, c, nullptr);
  s.run(500);
  for (const auto& v : s.nodes()) EXPECT_LE(v.depth, 1);
  EXPECT_EQ(s.nodes().size(), 25u);
}

TEST(Searcher, TreeInvariantsHold) {
  const Fixture f = builtin_fixture("midgame");
  for (EvaluatorKind e : {EvaluatorKind::Dummy, EvaluatorKind::Simulation}) {
    SearchConfig c = dummy_config();
    c.evaluator = e;
    Searcher s(f.board, c, nullptr);
    s.run(3000);
    EXPECT_EQ(s.root().n, 3000);
    check_tree(s);
  }
}

TEST(Searcher, TreeInvariantsHoldNearTheEnd) {
  const Fixture f = builtin_fixture("double-three");
  Searcher s(f.board, dummy_config(), nullptr);
  s.run(2000);
  check_tree(s);
}

TEST(EvaluateLeaf, DecidedBoards) {
  const Board lost = test::board_from_rows({"XXXXX", "OOOO"});
  Rng rng(1);
  SearchConfig c = dummy_config();
  EXPECT_EQ(evaluate_leaf(lost, c, nullptr, rng), 0.0);
  c.evaluator = EvaluatorKind::Simulation;
  EXPECT_EQ(evaluate_leaf(lost, c, nullptr, rng), 0.0);
}

TEST(EvaluateLeaf, DummyIsHalf) {
  Rng rng(1);
  Board b;
  b.play({7, 7});
  EXPECT_EQ(evaluate_leaf(b, dummy_config(), nullptr, rng), 0.5);
}

TEST(EvaluateLeaf, SimulationOfAForcedFinish) {
  const Board b = one_hole_board();
  ASSERT_EQ(b.stone_count(), kNumCells - 1);
  ASSERT_EQ(b.side_to_move(), Player::Black);
  ASSERT_FALSE(b.is_terminal());
  SearchConfig c = dummy_config();
  c.evaluator = EvaluatorKind::Simulation;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    EXPECT_EQ(evaluate_leaf(b, c, nullptr, rng), 1.0);
  }
}

TEST(EvaluateLeaf, PlayoutOutcomesAreBounded) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const Board b = test::random_position(rng, 8);
    const double v = random_playout(b, rng);
    EXPECT_TRUE(v == 0.0 || v == 0.5 || v == 1.0);
  }
}

TEST(EvaluateLeaf, AdpNeedsAModel) {
  Board b;
  b.play({7, 7});
  SearchConfig c;
  EXPECT_THROW(Searcher(b, c, nullptr), std::invalid_argument);
}

TEST(Search, FindsAWinInOne) {
  const Board b = test::board_from_rows({"XXXX...........", "OOO............", "..........O...."});
  ASSERT_EQ(b.side_to_move(), Player::Black);
  for (EvaluatorKind e : {EvaluatorKind::Dummy, EvaluatorKind::Simulation}) {
    SearchConfig c = dummy_config(50);
    c.evaluator = e;
    const auto r = search(b, c, nullptr);
    EXPECT_EQ(r.best, (Move{4, 0}));
    EXPECT_EQ(r.iterations_run, 50);
  }
}

TEST(Search, DeterministicForASeed) {
  const Fixture f = builtin_fixture("midgame");
  SearchConfig c = dummy_config(1500);
  c.evaluator = EvaluatorKind::Simulation;
  auto a = search(f.board, c, nullptr), b = search(f.board, c, nullptr);
  a.elapsed_ms = b.elapsed_ms = 0;
  EXPECT_EQ(format_result(a), format_result(b));
}

TEST(Search, RootStatisticsSumToIterations) {
  const Fixture f = builtin_fixture("midgame");
  const auto r = search(f.board, dummy_config(1000), nullptr);
  std::int64_t total = 0;
  for (const auto& c : r.root_children) total += c.visits;
  EXPECT_EQ(total, 1000);
  EXPECT_TRUE(std::is_sorted(r.root_children.begin(), r.root_children.end(),
                             [](const ChildStats& a, const ChildStats& b) { return a.visits > b.visits; }));
  EXPECT_EQ(r.best, r.root_children.front().move);
}

TEST(Search, TimeBudgetAlone) {
  SearchConfig c = dummy_config();
  c.iteration_budget.reset();
  c.time_budget_ms = 50;
  Board b;
  b.play({7, 7});
  const auto r = search(b, c, nullptr);
  EXPECT_GE(r.elapsed_ms, 50);
  EXPECT_LT(r.elapsed_ms, 500);
  EXPECT_GT(r.iterations_run, 1);
}

TEST(Search, DecidedBoardThrows) {
  const Board b = test::board_from_rows({"XXXXX", "OOOO"});
  EXPECT_THROW(search(b, dummy_config(), nullptr), NoMoveAvailable);
}

TEST(Search, FormatResult) {
  SearchResult r;
  r.best = {3, 4};
  r.iterations_run = 10;
  r.elapsed_ms = 2;
  r.root_children = {{{3, 4}, 7, 0.5, 900}};
  EXPECT_EQ(format_result(r), "best 3,4\niterations 10\nelapsed_ms 2\nchild 3,4 visits 7 mean 0.500000 heuristic 900\n");
}
