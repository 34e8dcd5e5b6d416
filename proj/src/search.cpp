#include "uctadp/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "uctadp/patterns.hpp"

namespace uctadp {

const char* evaluator_name(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::Adp: return "adp";
    case EvaluatorKind::Dummy: return "dummy";
    case EvaluatorKind::Simulation: return "simulation";
    case EvaluatorKind::WeightedSum: return "weighted-sum";
  }
  return "?";
}

std::optional<EvaluatorKind> parse_evaluator(std::string_view name) {
  if (name == "adp") return EvaluatorKind::Adp;
  if (name == "dummy") return EvaluatorKind::Dummy;
  if (name == "simulation") return EvaluatorKind::Simulation;
  if (name == "weighted-sum") return EvaluatorKind::WeightedSum;
  return std::nullopt;
}

void SearchConfig::validate() const {
  if (!(k1 >= 0)) throw std::invalid_argument("k1 must be non-negative");
  if (!(k2 >= 0)) throw std::invalid_argument("k2 must be non-negative");
  if (!(max_h > 0)) throw std::invalid_argument("max_h must be positive");
  if (msd < 1) throw std::invalid_argument("msd must be at least 1");
  if (!(weighted_sum_w >= 0 && weighted_sum_w <= 1)) throw std::invalid_argument("weighted_sum_w must lie in [0, 1]");
  if (!iteration_budget && !time_budget_ms) throw std::invalid_argument("an iteration or time budget is required");
  if (iteration_budget && *iteration_budget < 0) throw std::invalid_argument("iteration budget must be non-negative");
  if (time_budget_ms && *time_budget_ms < 0) throw std::invalid_argument("time budget must be non-negative");
}

double pb_ucb(double q, std::int64_t n, std::int64_t parent_n, double h, const SearchConfig& cfg) {
  const double dn = static_cast<double>(n);
  return q / dn + cfg.k1 * std::sqrt(std::log(static_cast<double>(parent_n)) / dn) + cfg.k2 * h / cfg.max_h;
}

std::string format_result(const SearchResult& result) {
  std::string out = "best " + to_string(result.best) + "\n";
  out += "iterations " + std::to_string(result.iterations_run) + "\n";
  out += "elapsed_ms " + std::to_string(result.elapsed_ms) + "\n";
  char buf[128];
  for (const auto& c : result.root_children) {
    std::snprintf(buf, sizeof buf, "child %s visits %lld mean %.6f heuristic %.6g\n", to_string(c.move).c_str(),
                  static_cast<long long>(c.visits), c.mean, c.heuristic);
    out += buf;
  }
  return out;
}

double random_playout(const Board& board, Rng& rng) {
  constexpr unsigned kFull = (1u << kBoardSize) - 1;
  const Player me = board.side_to_move();
  Board b = board;
  auto rows = candidate_rows(b);
  while (!b.is_terminal()) {
    int total = 0;
    for (LineMask r : rows) total += __builtin_popcount(r);
    if (total == 0) {
      // Everything near the stones is filled; any empty cell will do.
      for (int y = 0; y < kBoardSize; ++y) {
        rows[y] = static_cast<LineMask>(~(b.row_bits(Player::Black, y) | b.row_bits(Player::White, y)) & kFull);
        total += __builtin_popcount(rows[y]);
      }
    }
    int k = static_cast<int>(rng.below(total));
    int y = 0;
    while (k >= __builtin_popcount(rows[y])) k -= __builtin_popcount(rows[y++]);
    unsigned bits = rows[y];
    while (k-- > 0) bits &= bits - 1;
    const int x = __builtin_ctz(bits);
    b.play(Move{x, y});

    const unsigned box = ((x >= 2 ? 0x1Fu << (x - 2) : 0x1Fu >> (2 - x))) & kFull;
    for (int yy = std::max(0, y - 2); yy <= std::min(kBoardSize - 1, y + 2); ++yy) {
      const unsigned occ = b.row_bits(Player::Black, yy) | b.row_bits(Player::White, yy);
      rows[yy] = static_cast<LineMask>((rows[yy] | box) & ~occ & kFull);
    }
  }
  if (!b.winner()) return 0.5;
  return *b.winner() == me ? 1.0 : 0.0;
}

double evaluate_leaf(const Board& board, const SearchConfig& cfg, const Mlp* model, Rng& rng) {
  if (const auto w = board.winner()) return *w == board.side_to_move() ? 1.0 : 0.0;
  if (board.is_full()) return 0.5;
  switch (cfg.evaluator) {
    case EvaluatorKind::Adp: return evaluate_board(*model, board);
    case EvaluatorKind::Dummy: return 0.5;
    case EvaluatorKind::Simulation: return random_playout(board, rng);
    case EvaluatorKind::WeightedSum: {
      const double adp = evaluate_board(*model, board);
      return cfg.weighted_sum_w * adp + (1.0 - cfg.weighted_sum_w) * random_playout(board, rng);
    }
  }
  return 0.5;
}

void preferred_moves(const Board& board, std::vector<Move>& moves, std::vector<double>& h) {
  moves.clear();
  h.clear();
  const auto threats = analyze_moves(board, board.side_to_move());
  auto take = [&](auto&& keep) {
    for (const auto& t : threats) {
      if (keep(t)) {
        moves.push_back(t.move);
        h.push_back(t.h);
      }
    }
  };
  const bool own_five = std::any_of(threats.begin(), threats.end(), [](const auto& t) { return t.own_five; });
  const bool opp_five = std::any_of(threats.begin(), threats.end(), [](const auto& t) { return t.opp_five; });
  const bool opp_live_four = std::any_of(threats.begin(), threats.end(), [](const auto& t) { return t.opp_live_four; });
  if (own_five) {
    take([](const MoveThreat& t) { return t.own_five; });
  } else if (opp_five) {
    take([](const MoveThreat& t) { return t.opp_five; });
  } else if (opp_live_four) {
    take([](const MoveThreat& t) { return t.own_four || t.opp_four || t.opp_three; });
  } else {
    take([](const MoveThreat& t) { return t.own_four || t.own_three || t.opp_four || t.opp_three; });
  }
  if (moves.empty()) take([](const MoveThreat&) { return true; });
}

Searcher::Searcher(const Board& root, const SearchConfig& cfg, const Mlp* model)
    : cfg_(cfg), model_(model), board_(root), root_depth_stones_(root.stone_count()), rng_(cfg.seed) {
  cfg_.validate();
  if (root.is_terminal()) throw NoMoveAvailable("position is already decided");
  const bool needs_model = cfg_.evaluator == EvaluatorKind::Adp || cfg_.evaluator == EvaluatorKind::WeightedSum;
  if (needs_model && model_ == nullptr) throw std::invalid_argument("evaluator requires a model");
  nodes_.reserve(1024);
  nodes_.emplace_back();
}

void Searcher::initialize(int node) {
  SearchNode& v = nodes_[node];
  preferred_moves(board_, v.untried, v.untried_h);
  v.initialized = true;
}

int Searcher::expand(int node) {
  if (!nodes_[node].initialized) initialize(node);
  SearchNode& v = nodes_[node];
  if (v.untried.empty()) throw NoMoveAvailable("node has no untried move");
  const auto i = static_cast<std::size_t>(rng_.below(v.untried.size()));
  const Move move = v.untried[i];
  const double h = v.untried_h[i];
  v.untried[i] = v.untried.back();
  v.untried_h[i] = v.untried_h.back();
  v.untried.pop_back();
  v.untried_h.pop_back();

  board_.play(move);
  SearchNode child;
  child.move = move;
  child.parent = node;
  child.depth = v.depth + 1;
  child.h = h;
  child.terminal = board_.is_terminal();
  const int idx = static_cast<int>(nodes_.size());
  v.children.push_back(idx);
  nodes_.push_back(std::move(child));
  return idx;
}

int Searcher::best_child(int node) const {
  const SearchNode& v = nodes_[node];
  int best = -1;
  double best_score = -1e300;
  for (int c : v.children) {
    const SearchNode& child = nodes_[c];
    const double s = pb_ucb(child.q, child.n, v.n, child.h, cfg_);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

int Searcher::tree_policy() {
  int v = 0;
  while (true) {
    if (nodes_[v].terminal || nodes_[v].depth >= cfg_.msd) return v;
    if (!nodes_[v].initialized) initialize(v);
    if (!nodes_[v].untried.empty()) return expand(v);
    if (nodes_[v].children.empty()) {
      nodes_[v].terminal = true;
      return v;
    }
    v = best_child(v);
    board_.play(nodes_[v].move);
  }
}

void Searcher::back_update(int node, double r) {
  while (node >= 0) {
    SearchNode& v = nodes_[node];
    v.n += 1;
    v.q += r;
    r = 1.0 - r;
    node = v.parent;
  }
}

void Searcher::rewind() {
  while (board_.stone_count() > root_depth_stones_) board_.undo();
}

void Searcher::run_iteration() {
  const int leaf = tree_policy();
  const double value = evaluate_leaf(board_, cfg_, model_, rng_);
  nodes_[leaf].evaluations += 1;
  back_update(leaf, 1.0 - value);
  rewind();
  ++iterations_;
}

void Searcher::run(std::int64_t iterations) {
  for (std::int64_t i = 0; i < iterations; ++i) run_iteration();
}

Move Searcher::best_move() const {
  const SearchNode& root = nodes_[0];
  if (root.children.empty()) {
    std::vector<Move> moves;
    std::vector<double> h;
    preferred_moves(board_, moves, h);
    return moves[std::max_element(h.begin(), h.end()) - h.begin()];
  }
  int best = root.children.front();
  for (int c : root.children) {
    const SearchNode& a = nodes_[c];
    const SearchNode& b = nodes_[best];
    if (a.n != b.n) {
      if (a.n > b.n) best = c;
      continue;
    }
    const double ma = a.q / a.n, mb = b.q / b.n;
    if (ma != mb) {
      if (ma > mb) best = c;
      continue;
    }
    if (a.move < b.move) best = c;
  }
  return nodes_[best].move;
}

SearchResult Searcher::result() const {
  SearchResult r;
  r.best = best_move();
  r.iterations_run = iterations_;
  for (int c : nodes_[0].children) {
    const SearchNode& v = nodes_[c];
    r.root_children.push_back({v.move, v.n, v.n ? v.q / v.n : 0.0, v.h});
  }
  std::sort(r.root_children.begin(), r.root_children.end(), [](const ChildStats& a, const ChildStats& b) {
    if (a.visits != b.visits) return a.visits > b.visits;
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.move < b.move;
  });
  return r;
}

SearchResult search(const Board& board, const SearchConfig& cfg, const Mlp* model) {
  using Clock = std::chrono::steady_clock;
  prepare_pattern_tables();
  const auto start = Clock::now();
  Searcher s(board, cfg, model);
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };
  do {
    s.run_iteration();
  } while (!(cfg.iteration_budget && s.iterations() >= *cfg.iteration_budget) &&
           !(cfg.time_budget_ms && elapsed_ms() >= *cfg.time_budget_ms));
  SearchResult r = s.result();
  r.elapsed_ms = elapsed_ms();
  return r;
}

}  // namespace uctadp
