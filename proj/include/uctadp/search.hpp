#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uctadp/adp.hpp"
#include "uctadp/board.hpp"
#include "uctadp/rng.hpp"

namespace uctadp {

enum class EvaluatorKind { Adp, Dummy, Simulation, WeightedSum };

const char* evaluator_name(EvaluatorKind kind);
/// Accepts adp, dummy, simulation, weighted-sum.
std::optional<EvaluatorKind> parse_evaluator(std::string_view name);

struct SearchConfig {
  double k1 = 1.4142135623730951;
  double k2 = 1.0;
  double max_h = kMaxH;
  int msd = 12;
  std::optional<std::int64_t> iteration_budget = 2000;
  std::optional<std::int64_t> time_budget_ms;
  EvaluatorKind evaluator = EvaluatorKind::Adp;
  double weighted_sum_w = 0.5;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

class NoMoveAvailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q/n + k1 * sqrt(ln(parent_n) / n) + k2 * h / max_h.
double pb_ucb(double q, std::int64_t n, std::int64_t parent_n, double h, const SearchConfig& cfg);

struct ChildStats {
  Move move;
  std::int64_t visits = 0;
  double mean = 0;
  double heuristic = 0;
};

struct SearchResult {
  Move best;
  std::vector<ChildStats> root_children;  // by visits, descending
  std::int64_t iterations_run = 0;
  std::int64_t elapsed_ms = 0;
};

/// Line-oriented report: "best x,y", "iterations N", "elapsed_ms T", then one
/// "child x,y visits N mean Q heuristic H" line per root child.
std::string format_result(const SearchResult& result);

struct SearchNode {
  Move move{};
  int parent = -1;
  int depth = 0;
  double q = 0;
  std::int64_t n = 0;
  std::int64_t evaluations = 0;  // times this node was scored as a leaf
  double h = 0;
  bool terminal = false;
  bool initialized = false;
  std::vector<int> children;
  std::vector<Move> untried;
  std::vector<double> untried_h;
};

/// Leaf value for the side to move: exact on decided boards, otherwise by evaluator.
double evaluate_leaf(const Board& board, const SearchConfig& cfg, const Mlp* model, Rng& rng);

/// Playout choosing uniformly among the 2-adjacent empty cells at every ply.
/// 1 if the side to move at `board` wins, 0 if it loses, 0.5 on a draw.
double random_playout(const Board& board, Rng& rng);

/// Preferred moves of the side to move with their heuristics, the initial
/// untried list of a node.
void preferred_moves(const Board& board, std::vector<Move>& moves, std::vector<double>& h);

/// One UCT tree over a fixed root position.
class Searcher {
 public:
  /// `model` may be null for evaluators that do not use it.
  Searcher(const Board& root, const SearchConfig& cfg, const Mlp* model);

  void run_iteration();
  void run(std::int64_t iterations);

  std::int64_t iterations() const { return iterations_; }
  Move best_move() const;
  SearchResult result() const;

  const std::vector<SearchNode>& nodes() const { return nodes_; }
  const SearchNode& root() const { return nodes_[0]; }

  // Individual stages, exposed for tests. tree_policy leaves the working board
  // at the returned node; rewind() restores the root position.
  int tree_policy();
  int expand(int node);
  void back_update(int node, double r);
  void rewind();
  const Board& working_board() const { return board_; }

 private:
  int best_child(int node) const;
  void initialize(int node);

  SearchConfig cfg_;
  const Mlp* model_;
  Board board_;
  int root_depth_stones_;
  Rng rng_;
  std::vector<SearchNode> nodes_;
  std::int64_t iterations_ = 0;
};

/// Runs until the iteration or time budget runs out, at least one iteration.
/// Throws NoMoveAvailable on a decided board.
SearchResult search(const Board& board, const SearchConfig& cfg, const Mlp* model);

}  // namespace uctadp
