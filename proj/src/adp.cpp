#include "uctadp/adp.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace uctadp {

std::array<double, kSlotsPerPattern> encode_slots(int n) {
  return {n >= 1 ? 1.0 : 0.0, n >= 2 ? 1.0 : 0.0, n >= 3 ? 1.0 : 0.0, n >= 4 ? 1.0 : 0.0,
          n > 4 ? (n - 4) / 2.0 : 0.0};
}

EncodedInput encode_input(const PatternCounts& self, const PatternCounts& opp, Player to_move) {
  EncodedInput x(kInputSize, 0.0);
  auto put = [&x](const PatternCounts& counts, int offset) {
    for (int i = 0; i < kNumPatterns; ++i) {
      if (counts[i] == 0) continue;
      const auto s = encode_slots(counts[i]);
      std::copy(s.begin(), s.end(), x.begin() + offset + i * kSlotsPerPattern);
    }
  };
  put(self, 0);
  put(opp, kNumPatterns * kSlotsPerPattern);
  x[kInputSize - 2 + index_of(to_move)] = 1.0;
  return x;
}

EncodedInput encode_board(const Board& board) {
  const Player p = board.side_to_move();
  return encode_input(scan_patterns(board, p), scan_patterns(board, opponent(p)), p);
}

Mlp Mlp::zeros(int in, int hidden) {
  if (in <= 0 || hidden <= 0) throw ShapeError("network dimensions must be positive");
  Mlp m;
  m.in = in;
  m.hidden = hidden;
  m.w1.assign(static_cast<std::size_t>(in) * hidden, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(hidden, 0.0);
  return m;
}

Mlp Mlp::random(int in, int hidden, std::uint64_t seed, double scale) {
  Mlp m = zeros(in, hidden);
  Rng rng(seed);
  for (std::size_t i = 0; i < m.num_params(); ++i) m.param(i) = rng.uniform(-scale, scale);
  return m;
}

double& Mlp::param(std::size_t i) {
  if (i < w1.size()) return w1[i];
  i -= w1.size();
  if (i < b1.size()) return b1[i];
  i -= b1.size();
  if (i < w2.size()) return w2[i];
  return b2;
}

double Mlp::param(std::size_t i) const { return const_cast<Mlp&>(*this).param(i); }

namespace {

void check_shape(const Mlp& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.in) {
    throw ShapeError("input has " + std::to_string(x.size()) + " entries, network expects " + std::to_string(model.in));
  }
}

// Hidden activations; zero inputs are skipped since encodings are sparse.
double hidden_layer(const Mlp& model, std::span<const double> x, std::vector<double>& h) {
  h = model.b1;
  for (int i = 0; i < model.in; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* col = model.w1.data() + i;
    for (int j = 0; j < model.hidden; ++j) h[j] += col[static_cast<std::size_t>(j) * model.in] * xi;
  }
  double z = model.b2;
  for (int j = 0; j < model.hidden; ++j) {
    h[j] = sigmoid(h[j]);
    z += model.w2[j] * h[j];
  }
  return sigmoid(z);
}

}  // namespace

double forward(const Mlp& model, std::span<const double> x) {
  check_shape(model, x);
  thread_local std::vector<double> h;
  return hidden_layer(model, x, h);
}

std::vector<double> value_gradient(const Mlp& model, std::span<const double> x) {
  check_shape(model, x);
  std::vector<double> h;
  const double v = hidden_layer(model, x, h);
  const double dz2 = v * (1.0 - v);
  std::vector<double> grad(model.num_params(), 0.0);
  const std::size_t nw1 = model.w1.size();
  const std::size_t nb1 = model.b1.size();
  for (int j = 0; j < model.hidden; ++j) {
    const double dh = dz2 * model.w2[j] * h[j] * (1.0 - h[j]);
    for (int i = 0; i < model.in; ++i) grad[static_cast<std::size_t>(j) * model.in + i] = dh * x[i];
    grad[nw1 + j] = dh;
    grad[nw1 + nb1 + j] = dz2 * h[j];
  }
  grad.back() = dz2;
  return grad;
}

std::vector<double> loss_gradient(const Mlp& model, std::span<const double> x, double target) {
  const double v = forward(model, x);
  auto grad = value_gradient(model, x);
  for (double& g : grad) g *= -(target - v);
  return grad;
}

double td_update(Mlp& model, std::span<const double> x_t, double v_t, double v_next, double r_next,
                 const TdConfig& cfg) {
  check_shape(model, x_t);
  if (!std::isfinite(v_t) || !std::isfinite(v_next) || !std::isfinite(r_next)) {
    throw NumericError("non-finite value passed to td_update");
  }
  const double e = cfg.alpha * (r_next + cfg.gamma * v_next - v_t);
  if (e == 0.0) return e;

  thread_local std::vector<double> h;
  const double v = hidden_layer(model, x_t, h);
  const double dz2 = v * (1.0 - v);
  for (int j = 0; j < model.hidden; ++j) {
    const double dh = dz2 * model.w2[j] * h[j] * (1.0 - h[j]);
    double* row = model.w1.data() + static_cast<std::size_t>(j) * model.in;
    for (int i = 0; i < model.in; ++i) {
      if (x_t[i] != 0.0) row[i] += e * dh * x_t[i];
    }
    model.b1[j] += e * dh;
    model.w2[j] += e * dz2 * h[j];
  }
  model.b2 += e * dz2;
  return e;
}

double evaluate_board(const Mlp& model, const Board& board) {
  if (const auto w = board.winner()) return *w == board.side_to_move() ? 1.0 : 0.0;
  if (board.is_full()) return 0.5;
  return forward(model, encode_board(board));
}

std::string save_model(const Mlp& model) {
  for (std::size_t i = 0; i < model.num_params(); ++i) {
    if (!std::isfinite(model.param(i))) throw NumericError("cannot save a model with non-finite weights");
  }
  std::string out = "UCTADP-MLP v1 in=" + std::to_string(model.in) + " hidden=" + std::to_string(model.hidden) + "\n";
  char buf[32];
  auto row = [&](const double* data, int n) {
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", data[i]);
      if (i) out += ' ';
      out += buf;
    }
    out += '\n';
  };
  out += "W1\n";
  for (int j = 0; j < model.hidden; ++j) row(model.w1.data() + static_cast<std::size_t>(j) * model.in, model.in);
  out += "B1\n";
  row(model.b1.data(), model.hidden);
  out += "W2\n";
  row(model.w2.data(), model.hidden);
  out += "B2\n";
  row(&model.b2, 1);
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next(const char* what) {
    while (pos_ < text_.size()) {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
      if (!line.empty()) return line;
    }
    throw FormatError(std::string("model file truncated: expected ") + what);
  }

  bool at_end() {
    while (pos_ < text_.size() && (text_[pos_] == '\n' || text_[pos_] == '\r' || text_[pos_] == ' ')) ++pos_;
    return pos_ >= text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

void parse_row(std::string_view line, double* out, int n, const char* section) {
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (int i = 0; i < n; ++i) {
    while (p < end && *p == ' ') ++p;
    auto [next, ec] = std::from_chars(p, end, out[i]);
    if (ec != std::errc() || !std::isfinite(out[i])) {
      throw FormatError(std::string("bad number in section ") + section);
    }
    p = next;
  }
  while (p < end && *p == ' ') ++p;
  if (p != end) throw FormatError(std::string("too many numbers in a row of section ") + section);
}

void expect_header(LineReader& r, const char* name) {
  if (r.next(name) != name) throw FormatError(std::string("expected section ") + name);
}

int parse_dim(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) throw FormatError("bad model header");
  token.remove_prefix(key.size());
  int v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v <= 0) throw FormatError("bad model dimension");
  return v;
}

}  // namespace

Mlp load_model(std::string_view text) {
  LineReader r(text);
  std::string header(r.next("header"));
  std::istringstream hs(header);
  std::string magic, version, in_tok, hidden_tok, extra;
  hs >> magic >> version >> in_tok >> hidden_tok;
  if (magic != "UCTADP-MLP") throw FormatError("bad magic in model header");
  if (version != "v1") throw FormatError("unsupported model version " + version);
  if (hs >> extra) throw FormatError("trailing data in model header");
  Mlp m = Mlp::zeros(parse_dim(in_tok, "in="), parse_dim(hidden_tok, "hidden="));

  expect_header(r, "W1");
  for (int j = 0; j < m.hidden; ++j) {
    parse_row(r.next("W1 row"), m.w1.data() + static_cast<std::size_t>(j) * m.in, m.in, "W1");
  }
  expect_header(r, "B1");
  parse_row(r.next("B1 row"), m.b1.data(), m.hidden, "B1");
  expect_header(r, "W2");
  parse_row(r.next("W2 row"), m.w2.data(), m.hidden, "W2");
  expect_header(r, "B2");
  parse_row(r.next("B2 row"), &m.b2, 1, "B2");
  if (!r.at_end()) throw FormatError("trailing data after model");
  return m;
}

void save_model_file(const Mlp& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << save_model(model);
  if (!out) throw std::runtime_error("failed writing " + path);
}

Mlp load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

Move greedy_move(const Mlp& model, const Board& board, Rng& rng, double epsilon) {
  const auto moves = candidate_moves(board);
  if (moves.empty()) throw IllegalMove("no legal move available");
  if (epsilon > 0 && rng.uniform01() < epsilon) return moves[rng.below(moves.size())];
  Board b = board;
  Move best = moves.front();
  double best_value = -1;
  for (Move m : moves) {
    b.play(m);
    const double v = 1.0 - evaluate_board(model, b);
    b.undo();
    if (v > best_value) {
      best_value = v;
      best = m;
    }
  }
  return best;
}

TrainResult self_play_train(const TdConfig& cfg, const TrainProgress& progress) {
  return self_play_train(Mlp::random(kInputSize, cfg.hidden, derive_seed(cfg.seed, 0)), cfg, progress);
}

TrainResult self_play_train(Mlp model, const TdConfig& cfg, const TrainProgress& progress) {
  if (!(cfg.alpha > 0 && cfg.alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(cfg.epsilon >= 0 && cfg.epsilon <= 1)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  TrainResult result;
  Rng rng(derive_seed(cfg.seed, 1));
  std::vector<EncodedInput> states;
  for (int game = 0; game < cfg.games; ++game) {
    Board board;
    states.clear();
    while (!board.is_terminal()) {
      states.push_back(encode_board(board));
      board.play(greedy_move(model, board, rng, cfg.epsilon));
    }
    // The last mover either completed five or filled the board.
    const double final_reward = board.winner() ? 1.0 : 0.5;

    // Sweep the game backwards so the final reward reaches early states in one pass.
    double abs_error = 0;
    const int steps = static_cast<int>(states.size());
    for (int t = steps - 1; t >= 0; --t) {
      const bool last = t == steps - 1;
      const double r = last ? final_reward : 0.0;
      const double v_next = last ? 0.0 : 1.0 - forward(model, states[t + 1]);
      abs_error += std::abs(td_update(model, states[t], forward(model, states[t]), v_next, r, cfg));
    }
    result.game_td_error.push_back(steps ? abs_error / steps : 0.0);

    if (cfg.log_every > 0 && (game + 1) % cfg.log_every == 0) {
      TrainLogRow row;
      row.game_index = game + 1;
      const auto first = result.game_td_error.end() - cfg.log_every;
      row.avg_abs_td_error = std::accumulate(first, result.game_td_error.end(), 0.0) / cfg.log_every;
      row.win_rate_vs_random = win_rate_vs_random(model, cfg.eval_games, derive_seed(cfg.seed, 1000 + game));
      result.log.push_back(row);
      if (progress) progress(row);
    }
  }
  result.model = std::move(model);
  return result;
}

std::string format_train_log(const std::vector<TrainLogRow>& log) {
  std::string out = "game_index,avg_abs_td_error,win_rate_vs_random\n";
  char buf[96];
  for (const auto& row : log) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.4g\n", row.game_index, row.avg_abs_td_error, row.win_rate_vs_random);
    out += buf;
  }
  return out;
}

double relative_drift(const std::vector<double>& series, int window) {
  const int n = std::min<int>(window, static_cast<int>(series.size()));
  if (n < 2) return 0.0;
  const auto first = series.end() - n;
  const double mean_y = std::accumulate(first, series.end(), 0.0) / n;
  const double mean_x = (n - 1) / 2.0;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (i - mean_x) * (first[i] - mean_y);
    sxx += (i - mean_x) * (i - mean_x);
  }
  if (mean_y == 0.0) return 0.0;
  return (sxy / sxx) * n / mean_y;
}

namespace {

// 1 if Black wins, 0 if White wins, 0.5 on a draw.
template <typename BlackPolicy, typename WhitePolicy>
double play_out(Board board, BlackPolicy&& black, WhitePolicy&& white) {
  while (!board.is_terminal()) {
    board.play(board.side_to_move() == Player::Black ? black(board) : white(board));
  }
  if (!board.winner()) return 0.5;
  return *board.winner() == Player::Black ? 1.0 : 0.0;
}

}  // namespace

double win_rate_vs_random(const Mlp& model, int games, std::uint64_t seed) {
  if (games <= 0) return 0.0;
  Rng rng(seed);
  auto greedy = [&](const Board& b) { return greedy_move(model, b, rng); };
  auto random = [&](const Board& b) {
    const auto moves = candidate_moves(b);
    return moves[rng.below(moves.size())];
  };
  double score = 0;
  for (int g = 0; g < games; ++g) {
    score += g % 2 == 0 ? play_out(Board{}, greedy, random) : 1.0 - play_out(Board{}, random, greedy);
  }
  return score / games;
}

HeadToHead head_to_head(const Mlp& a, const Mlp& b, int games, std::uint64_t seed) {
  HeadToHead result;
  Rng unused(0);
  auto policy = [&unused](const Mlp& m) { return [&m, &unused](const Board& bd) { return greedy_move(m, bd, unused); }; };
  for (int g = 0; g < games; ++g) {
    // Each opening is played twice with colours swapped.
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g / 2)));
    Board board;
    const int plies = 2 + static_cast<int>(rng.below(3));
    for (int i = 0; i < plies; ++i) {
      const auto moves = candidate_moves(board);
      board.play(moves[rng.below(moves.size())]);
    }
    const bool a_black = g % 2 == 0;
    const double black_score = a_black ? play_out(board, policy(a), policy(b)) : play_out(board, policy(b), policy(a));
    const double a_score = a_black ? black_score : 1.0 - black_score;
    if (a_score == 1.0) ++result.wins;
    else if (a_score == 0.0) ++result.losses;
    else ++result.draws;
  }
  return result;
}

}  // namespace uctadp
