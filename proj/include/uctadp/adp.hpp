#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uctadp/board.hpp"
#include "uctadp/patterns.hpp"
#include "uctadp/rng.hpp"

namespace uctadp {

inline constexpr int kSlotsPerPattern = 5;
inline constexpr int kInputSize = 2 * kNumPatterns * kSlotsPerPattern + 2;  // 322
inline constexpr int kDefaultHidden = 64;

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EncodedInput = std::vector<double>;

/// Input slots for a pattern that occurs n times: four thresholds, then (n-4)/2 above four.
std::array<double, kSlotsPerPattern> encode_slots(int n);

/// Side-to-move slots, then opponent slots, then the (Black, White) one-hot.
EncodedInput encode_input(const PatternCounts& self, const PatternCounts& opp, Player to_move);
EncodedInput encode_board(const Board& board);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// in -> hidden -> 1 perceptron, sigmoid on both layers.
struct Mlp {
  int in = 0;
  int hidden = 0;
  std::vector<double> w1;  // hidden x in, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0;

  static Mlp zeros(int in, int hidden);
  /// Weights and biases uniform in [-scale, scale].
  static Mlp random(int in, int hidden, std::uint64_t seed, double scale = 0.1);

  std::size_t num_params() const { return w1.size() + b1.size() + w2.size() + 1; }
  /// Flat view order: w1, b1, w2, b2.
  double& param(std::size_t i);
  double param(std::size_t i) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// V(x) in (0, 1). Throws ShapeError when x.size() != model.in.
double forward(const Mlp& model, std::span<const double> x);

/// dV/dtheta at x, laid out like Mlp::param.
std::vector<double> value_gradient(const Mlp& model, std::span<const double> x);

/// Gradient of 0.5 * (target - V(x))^2, laid out like Mlp::param.
std::vector<double> loss_gradient(const Mlp& model, std::span<const double> x, double target);

struct TdConfig {
  double alpha = 0.05;
  double gamma = 1.0;
  int games = 12000;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
  int hidden = kDefaultHidden;
  int log_every = 100;
  int eval_games = 20;
};

/// One semi-gradient TD(0) step on the input x_t that produced v_t:
/// e = alpha * (r_next + gamma * v_next - v_t), theta += e * dV(x_t)/dtheta.
/// Returns e. Throws NumericError on non-finite arguments.
double td_update(Mlp& model, std::span<const double> x_t, double v_t, double v_next, double r_next,
                 const TdConfig& cfg);

/// Win probability for the side to move. Decided boards skip the network:
/// 1 or 0 for a won board, 0.5 for a full board.
double evaluate_board(const Mlp& model, const Board& board);

std::string save_model(const Mlp& model);
/// Throws FormatError on any malformed payload.
Mlp load_model(std::string_view text);
void save_model_file(const Mlp& model, const std::string& path);
Mlp load_model_file(const std::string& path);

/// Candidate maximising 1 - evaluate_board(after the move); first one in
/// row-major order on ties. With probability epsilon a uniform candidate instead.
Move greedy_move(const Mlp& model, const Board& board, Rng& rng, double epsilon = 0.0);

struct TrainLogRow {
  int game_index = 0;
  double avg_abs_td_error = 0;
  double win_rate_vs_random = 0;
};

struct TrainResult {
  Mlp model;
  std::vector<TrainLogRow> log;
  std::vector<double> game_td_error;  // mean |e| of each game
};

using TrainProgress = std::function<void(const TrainLogRow&)>;

TrainResult self_play_train(const TdConfig& cfg, const TrainProgress& progress = {});
/// Continues training an existing model.
TrainResult self_play_train(Mlp model, const TdConfig& cfg, const TrainProgress& progress = {});

/// CSV text with header game_index,avg_abs_td_error,win_rate_vs_random.
std::string format_train_log(const std::vector<TrainLogRow>& log);

/// Least-squares slope of the last `window` values times `window`, divided by
/// their mean. A plateaued curve keeps this within +-0.1.
double relative_drift(const std::vector<double>& series, int window);

/// Greedy model against uniform random candidate moves, colours alternating.
double win_rate_vs_random(const Mlp& model, int games, std::uint64_t seed);

struct HeadToHead {
  int wins = 0;
  int losses = 0;
  int draws = 0;
};

/// Greedy games between two models after a seeded random opening of 2..4 moves;
/// `a` takes Black in even games.
HeadToHead head_to_head(const Mlp& a, const Mlp& b, int games, std::uint64_t seed);

}  // namespace uctadp
